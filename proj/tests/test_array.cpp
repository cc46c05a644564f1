// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ftbm/array.hpp"

using namespace ftbm;
namespace {
constexpr double kPi = std::numbers::pi;

// The published example weight grid for the second-level beam at -8 deg:
// rows 5..11 of the first three columns carry a +/-1 pattern, columns 7..10
// are all -1, everything else is off.
CMat example_ftb_grid() {
  CMat g = CMat::Zero(16, 16);
  for (int r = 5; r <= 11; ++r) {
    g(r, 0) = -1.0;
    g(r, 1) = (r == 5) ? 1.0 : (r == 11 ? 0.0 : -1.0);
    g(r, 2) = 1.0;
  }
  for (int c = 7; c <= 10; ++c)
    for (int r = 0; r < 16; ++r) g(r, c) = -1.0;
  return g;
}
}  // namespace

TEST_CASE("geometry factories") {
  const ArrayGeometry ura = ArrayGeometry::ura(16, 16, 0.5);
  CHECK(ura.kind == ArrayKind::URA);
  CHECK(ura.size() == 256);
  const ArrayGeometry ula = ArrayGeometry::ula(16, 0.5);
  CHECK(ula.kind == ArrayKind::ULA);
  CHECK(ula.n_v == 1);
  CHECK(ArrayGeometry::ura(4, 1, 0.5).kind == ArrayKind::ULA);
  CHECK_THROWS(ArrayGeometry::ura(0, 4, 0.5));
  CHECK_THROWS(ArrayGeometry::ura(4, 4, 0.0));
}

TEST_CASE("angle conventions") {
  const AngleDirection b = AngleDirection::broadside();
  CHECK(b.theta == doctest::Approx(kPi / 2));
  CHECK(b.phi == doctest::Approx(kPi / 2));
  const AngleDirection d = AngleDirection::from_azimuth_deg(-8.0);
  CHECK(d.theta == doctest::Approx(kPi / 2));
  CHECK(d.phi == doctest::Approx(kPi / 2 + 8.0 * kPi / 180.0));
  CHECK_THROWS(AngleDirection(-0.1, 0.0));
  CHECK_THROWS(AngleDirection(1.0, 4.0));
}

TEST_CASE("steering vector: broadside is all ones") {
  const ArrayGeometry geom = ArrayGeometry::ura(16, 16, 0.5);
  const CVec a = steering_vector(geom, AngleDirection::broadside());
  REQUIRE(a.size() == 256);
  for (int i = 0; i < 256; ++i) {
    CHECK(a(i).real() == doctest::Approx(1.0));
    CHECK(a(i).imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("steering vector: ULA phase progression") {
  const ArrayGeometry geom = ArrayGeometry::ula(8, 0.5);
  const AngleDirection dir = AngleDirection::from_azimuth_deg(30.0);
  const CVec a = steering_vector(geom, dir);
  const double step = 2.0 * kPi * 0.5 * std::cos(dir.phi);
  for (int n = 0; n < 8; ++n) {
    CHECK(std::arg(a(n)) == doctest::Approx(std::remainder(n * step, 2 * kPi)).epsilon(1e-9));
    CHECK(std::abs(a(n)) == doctest::Approx(1.0));
  }
}

TEST_CASE("steering vector indexing is column-major over (m, n)") {
  // vertical phase must advance with the fast index, horizontal with the slow
  const ArrayGeometry geom = ArrayGeometry::ura(3, 2, 0.5);
  const AngleDirection dir(kPi / 3, kPi / 5);
  const CVec a = steering_vector(geom, dir);
  const double vert = 2.0 * kPi * 0.5 * std::cos(dir.theta);
  const double horiz = 2.0 * kPi * 0.5 * std::sin(dir.theta) * std::cos(dir.phi);
  for (int n = 0; n < 3; ++n)
    for (int m = 0; m < 2; ++m)
      CHECK(std::arg(a(n * 2 + m)) ==
            doctest::Approx(std::remainder(m * vert + n * horiz, 2 * kPi)).epsilon(1e-9));
}

TEST_CASE("array factor of the all-ones grid") {
  const ArrayGeometry geom = ArrayGeometry::ura(16, 16, 0.5);
  const WeightMatrix w = WeightMatrix::ones(16, 16);
  CHECK(std::abs(array_factor(geom, w, AngleDirection::broadside())) == doctest::Approx(256.0));
  CHECK(20.0 * std::log10(256.0) == doctest::Approx(48.16).epsilon(1e-3));
}

TEST_CASE("weight matrix validation") {
  CMat g = CMat::Zero(2, 2);
  CHECK_THROWS(WeightMatrix(g));  // nothing active
  g(0, 0) = cplx{0.5, 0.0};
  CHECK_THROWS(WeightMatrix(g));  // non-unit magnitude
  g(0, 0) = cplx{0.0, 1.0};
  const WeightMatrix w{g};
  CHECK(w.active_count() == 1);
}

TEST_CASE("linear equivalent and vectorize of the published example grid") {
  const CMat g = example_ftb_grid();
  const WeightMatrix w{g};
  CHECK(w.active_count() == 84);
  const CVec s = linear_equivalent(w);
  const double expect[16] = {-7, -4, 7, 0, 0, 0, 0, -16, -16, -16, -16, 0, 0, 0, 0, 0};
  REQUIRE(s.size() == 16);
  for (int n = 0; n < 16; ++n) CHECK(s(n).real() == doctest::Approx(expect[n]));
  const CVec v = vectorize(w);
  CHECK(v.size() == 256);
  CHECK(v(5).real() == doctest::Approx(-1.0));    // (row 5, col 0)
  CHECK(v(16 + 5).real() == doctest::Approx(1.0));  // (row 5, col 1)
  const CVec u = beam_vector(w);
  CHECK(u.isApprox(v.conjugate()));
}

TEST_CASE("URA/ULA array factor equivalence at the horizon") {
  // random {0, +/-1, +/-j} grids; the URA pattern at theta = pi/2 must equal
  // the ULA pattern of the column sums
  const ArrayGeometry ura = ArrayGeometry::ura(16, 16, 0.5);
  const ArrayGeometry ula = ArrayGeometry::ula(16, 0.5);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> pick(0, 4);
  const cplx alphabet[5] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int trial = 0; trial < 20; ++trial) {
    CMat g(16, 16);
    for (int c = 0; c < 16; ++c)
      for (int r = 0; r < 16; ++r) g(r, c) = alphabet[pick(rng)];
    const CMat lin = linear_equivalent(g).transpose();  // 1 x 16
    double w1 = 0;
    for (int i = 0; i < g.size(); ++i) w1 += std::abs(g(i));
    for (int s = 0; s < 72; ++s) {
      const double az = -89.0 + s * 2.5;
      const AngleDirection dir = AngleDirection::from_azimuth_deg(az);
      const cplx af_r = array_factor(ura, g, dir);
      const cplx af_l = array_factor(ula, lin, dir);
      CHECK(std::abs(af_r - af_l) <= 1e-9 * std::max(w1, 1.0));
    }
  }
}

TEST_CASE("array factor rejects mismatched grids") {
  const ArrayGeometry geom = ArrayGeometry::ura(4, 4, 0.5);
  CHECK_THROWS(array_factor(geom, CMat::Ones(4, 3), AngleDirection::broadside()));
}
