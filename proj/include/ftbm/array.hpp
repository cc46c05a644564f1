// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// Antenna array geometry, steering vectors and array-factor evaluation for
// uniform rectangular / linear arrays of isotropic elements.
//
// Conventions (fixed once, used everywhere):
//  * Phase kernel: exp(+j * (2*pi*d/lambda) * (m*cos(theta) + n*sin(theta)*cos(phi)))
//    with n the horizontal element index (0..n_h-1) and m the vertical index
//    (0..n_v-1). The URA lies on the yz-plane, a ULA on the y-axis; broadside
//    is therefore at phi = pi/2.
//  * The array factor is the plain (non-conjugated) inner product of the
//    weights with the steering vector. A receive combining vector whose
//    angular response equals the array factor is the elementwise conjugate of
//    the vectorized weights; see beam_vector().
//  * Weight grids are stored as n_v x n_h matrices (row = vertical index m,
//    column = horizontal index n); vectorization is column-major, so the
//    flattened index is n*n_v + m, matching the steering vector ordering.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ftbm {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class ArrayKind { URA, ULA };

struct ArrayGeometry {
  ArrayKind kind = ArrayKind::URA;
  int n_h = 1;       // horizontal element count
  int n_v = 1;       // vertical element count (1 for ULA)
  double spacing = 0.5;  // element spacing d in wavelengths

  static ArrayGeometry ura(int n_h, int n_v, double spacing = 0.5);
  static ArrayGeometry ula(int n_h, double spacing = 0.5);

  int size() const { return n_h * n_v; }
};

// theta: inclination in [0, pi]; phi: azimuth in [-pi, pi].
struct AngleDirection {
  double theta = 0.0;
  double phi = 0.0;

  AngleDirection() = default;
  AngleDirection(double theta_, double phi_);

  static AngleDirection broadside();
  // Azimuth measured from array broadside, elevation cut (theta = pi/2).
  // Maps b degrees to phi = pi/2 - b, the single point where the
  // broadside-relative convention of codebooks meets the raw kernel.
  static AngleDirection from_azimuth_deg(double azimuth_deg);
};

// Constant-modulus-or-off analog weight grid: every entry is either exactly 0
// (element off) or unit magnitude (phase-only control).
class WeightMatrix {
 public:
  explicit WeightMatrix(CMat grid);

  const CMat& grid() const { return grid_; }
  int n_h() const { return static_cast<int>(grid_.cols()); }
  int n_v() const { return static_cast<int>(grid_.rows()); }
  int active_count() const;

  static WeightMatrix ones(int n_h, int n_v);

 private:
  CMat grid_;
};

// Element-space response a(theta, phi); doubles as the channel array response.
CVec steering_vector(const ArrayGeometry& geom, const AngleDirection& dir);

// AF(theta, phi) = sum_n w_n * exp(+j k.r_n). The raw-grid overload accepts
// arbitrary-amplitude weights (needed for linear-equivalent comparisons).
cplx array_factor(const ArrayGeometry& geom, const CMat& weights,
                  const AngleDirection& dir);
cplx array_factor(const ArrayGeometry& geom, const WeightMatrix& w,
                  const AngleDirection& dir);

// Per-column sums of a URA grid: the ULA weights with identical azimuth cut.
CVec linear_equivalent(const WeightMatrix& w);
CVec linear_equivalent(const CMat& grid);

// Column-major stacking of the weight grid.
CVec vectorize(const WeightMatrix& w);

// Receive combining vector for the beam: conj(vectorize(w)), so that
// u^H a(theta, phi) == array_factor(w, theta, phi).
CVec beam_vector(const WeightMatrix& w);

}  // namespace ftbm
