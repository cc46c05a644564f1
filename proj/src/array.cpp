// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#include "ftbm/array.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ftbm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kModulusTol = 1e-12;
}  // namespace

ArrayGeometry ArrayGeometry::ura(int n_h, int n_v, double spacing) {
  if (n_h < 1 || n_v < 1) throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
  if (spacing <= 0.0) throw std::invalid_argument("ArrayGeometry: spacing must be > 0");
  return ArrayGeometry{n_v == 1 ? ArrayKind::ULA : ArrayKind::URA, n_h, n_v, spacing};
}

ArrayGeometry ArrayGeometry::ula(int n_h, double spacing) {
  return ura(n_h, 1, spacing);
}

AngleDirection::AngleDirection(double theta_, double phi_) : theta(theta_), phi(phi_) {
  if (theta < 0.0 || theta > kPi) throw std::invalid_argument("AngleDirection: theta outside [0, pi]");
  if (phi < -kPi || phi > kPi) throw std::invalid_argument("AngleDirection: phi outside [-pi, pi]");
}

AngleDirection AngleDirection::broadside() { return AngleDirection(kPi / 2.0, kPi / 2.0); }

AngleDirection AngleDirection::from_azimuth_deg(double azimuth_deg) {
  return AngleDirection(kPi / 2.0, kPi / 2.0 - azimuth_deg * kPi / 180.0);
}

WeightMatrix::WeightMatrix(CMat grid) : grid_(std::move(grid)) {
  if (grid_.size() == 0) throw std::invalid_argument("WeightMatrix: empty grid");
  int active = 0;
  for (Eigen::Index c = 0; c < grid_.cols(); ++c) {
    for (Eigen::Index r = 0; r < grid_.rows(); ++r) {
      const double mag = std::abs(grid_(r, c));
      if (mag == 0.0) continue;
      if (std::abs(mag - 1.0) > kModulusTol)
        throw std::invalid_argument("WeightMatrix: entries must be 0 or unit magnitude");
      ++active;
    }
  }
  if (active == 0) throw std::invalid_argument("WeightMatrix: at least one entry must be active");
}

int WeightMatrix::active_count() const {
  int active = 0;
  for (Eigen::Index i = 0; i < grid_.size(); ++i)
    if (grid_(i) != cplx{0.0, 0.0}) ++active;
  return active;
}

WeightMatrix WeightMatrix::ones(int n_h, int n_v) {
  return WeightMatrix(CMat::Ones(n_v, n_h));
}

CVec steering_vector(const ArrayGeometry& geom, const AngleDirection& dir) {
  const double scale = 2.0 * kPi * geom.spacing;
  const double vert = scale * std::cos(dir.theta);
  const double horiz = scale * std::sin(dir.theta) * std::cos(dir.phi);
  CVec a(geom.size());
  for (int n = 0; n < geom.n_h; ++n) {
    for (int m = 0; m < geom.n_v; ++m) {
      const double phase = m * vert + n * horiz;
      a(n * geom.n_v + m) = cplx{std::cos(phase), std::sin(phase)};
    }
  }
  return a;
}

cplx array_factor(const ArrayGeometry& geom, const CMat& weights, const AngleDirection& dir) {
  if (weights.rows() != geom.n_v || weights.cols() != geom.n_h)
    throw std::invalid_argument("array_factor: weight grid does not match geometry");
  const CVec a = steering_vector(geom, dir);
  const Eigen::Map<const CVec> w(weights.data(), weights.size());
  return (w.array() * a.array()).sum();
}

cplx array_factor(const ArrayGeometry& geom, const WeightMatrix& w, const AngleDirection& dir) {
  return array_factor(geom, w.grid(), dir);
}

CVec linear_equivalent(const CMat& grid) { return grid.colwise().sum().transpose(); }

CVec linear_equivalent(const WeightMatrix& w) { return linear_equivalent(w.grid()); }

CVec vectorize(const WeightMatrix& w) {
  return Eigen::Map<const CVec>(w.grid().data(), w.grid().size());
}

CVec beam_vector(const WeightMatrix& w) { return vectorize(w).conjugate(); }

}  // namespace ftbm
