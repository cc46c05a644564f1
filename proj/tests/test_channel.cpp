// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ftbm/channel.hpp"

using namespace ftbm;
namespace {
constexpr double kPi = std::numbers::pi;

const BsArrayLayout kBs{2, 16, 16, 0.5};
const ArrayGeometry kUe = ArrayGeometry::ula(4, 0.5);
}  // namespace

TEST_CASE("cluster params validation") {
  ClusterParams p;
  CHECK_NOTHROW(p.validate());
  p.n_clusters = 0;
  CHECK_THROWS(p.validate());
  p = ClusterParams{};
  p.az_lo_deg = 10;
  p.az_hi_deg = -10;
  CHECK_THROWS(p.validate());
}

TEST_CASE("layout blocks") {
  CHECK(kBs.panel_size() == 256);
  CHECK(kBs.panel().size() == 256);
  CHECK(kBs.full().size() == 512);
  CHECK(kBs.full().n_h == 32);
}

TEST_CASE("single path channel is a scaled rank-1 outer product") {
  PathRecord p;
  p.power = 1.0;
  p.delay = 0.0;
  p.bs_dir = AngleDirection::from_azimuth_deg(10.0);
  p.ue_dir = AngleDirection::broadside();
  p.gain = cplx{1.0, 0.0};
  const CMat H = assemble_channel({p}, kBs, kUe);
  REQUIRE(H.rows() == 512);
  REQUIRE(H.cols() == 4);
  CHECK(H.norm() == doctest::Approx(std::sqrt(512.0 * 4.0)).epsilon(1e-12));
  Eigen::JacobiSVD<CMat> svd(H);
  CHECK(svd.singularValues()(1) <= 1e-9 * svd.singularValues()(0));
}

TEST_CASE("draw is deterministic in the seed") {
  std::mt19937_64 r1(123), r2(123), r3(124);
  const ChannelRealization a = draw_channel(ClusterParams{}, kBs, kUe, r1);
  const ChannelRealization b = draw_channel(ClusterParams{}, kBs, kUe, r2);
  const ChannelRealization c = draw_channel(ClusterParams{}, kBs, kUe, r3);
  CHECK((a.H - b.H).norm() == 0.0);
  CHECK((a.H - c.H).norm() > 0.0);
  CHECK(a.paths.size() == 40);
}

TEST_CASE("path powers sum to one") {
  std::mt19937_64 rng(5);
  const ChannelRealization ch = draw_channel(ClusterParams{}, kBs, kUe, rng);
  double total = 0;
  for (const PathRecord& p : ch.paths) total += p.power;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruction from the path list is numerically tight") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const ChannelRealization ch = draw_channel(ClusterParams{}, kBs, kUe, rng);
    const CMat H2 = assemble_channel(ch.paths, kBs, kUe);
    CHECK((ch.H - H2).norm() <= 1e-10 * ch.H.norm());
  }
}

TEST_CASE("average Frobenius norm is calibrated") {
  std::mt19937_64 rng(11);
  double acc = 0;
  const int n = 300;
  for (int t = 0; t < n; ++t) {
    const ChannelRealization ch = draw_channel(ClusterParams{}, kBs, kUe, rng);
    acc += ch.H.squaredNorm();
  }
  CHECK(acc / n / (512.0 * 4.0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("evolution: zero drift keeps angles, delays redraw toggles") {
  std::mt19937_64 rng(3);
  ClusterParams params;
  params.redraw_delays = false;
  const ChannelRealization ch = draw_channel(params, kBs, kUe, rng);
  const ChannelRealization same = evolve_channel(ch, params, kBs, kUe, 0.0, rng);
  CHECK((ch.H - same.H).norm() == 0.0);

  params.redraw_delays = true;
  const ChannelRealization redrawn = evolve_channel(ch, params, kBs, kUe, 0.0, rng);
  CHECK((ch.H - redrawn.H).norm() > 0.0);
  for (std::size_t i = 0; i < ch.paths.size(); ++i) {
    CHECK(redrawn.paths[i].bs_dir.theta == ch.paths[i].bs_dir.theta);
    CHECK(redrawn.paths[i].power == ch.paths[i].power);
  }

  const ChannelRealization drifted = evolve_channel(ch, params, kBs, kUe, 5.0, rng);
  bool moved = false;
  for (std::size_t i = 0; i < ch.paths.size(); ++i)
    moved = moved || drifted.paths[i].bs_dir.phi != ch.paths[i].bs_dir.phi;
  CHECK(moved);
  CHECK_THROWS(evolve_channel(ch, params, kBs, kUe, -1.0, rng));
}

TEST_CASE("huge drift stays inside the angular domain") {
  std::mt19937_64 rng(9);
  ChannelRealization ch = draw_channel(ClusterParams{}, kBs, kUe, rng);
  for (int t = 0; t < 5; ++t) {
    ch = evolve_channel(ch, ClusterParams{}, kBs, kUe, 720.0, rng);
    for (const PathRecord& p : ch.paths) {
      CHECK(p.bs_dir.theta >= 0.0);
      CHECK(p.bs_dir.theta <= kPi);
      CHECK(std::abs(p.bs_dir.phi) <= kPi);
    }
  }
}

TEST_CASE("beamformed channel columns") {
  std::mt19937_64 rng(17);
  const ChannelRealization ch = draw_channel(ClusterParams{}, kBs, kUe, rng);
  std::vector<CVec> beams(2, CVec::Ones(256));
  const CMat eff = beamformed_channel(ch, beams);
  REQUIRE(eff.rows() == 4);
  REQUIRE(eff.cols() == 2);
  for (int i = 0; i < 2; ++i)
    CHECK((eff.col(i) - ch.block(i).adjoint() * beams[i]).norm() == doctest::Approx(0.0));
  beams.pop_back();
  CHECK_THROWS(beamformed_channel(ch, beams));
}

TEST_CASE("channel JSON round trip reproduces H bit-exactly") {
  std::mt19937_64 rng(23);
  const ChannelRealization ch = draw_channel(ClusterParams{}, kBs, kUe, rng);
  const std::string text = channel_to_json(ch, ClusterParams{}, kBs, kUe);
  BsArrayLayout bs2;
  ArrayGeometry ue2 = ArrayGeometry::ula(1, 0.5);
  const ChannelRealization ch2 = channel_from_json(text, &bs2, &ue2);
  CHECK(bs2.m_bs == 2);
  CHECK(ue2.size() == 4);
  REQUIRE(ch2.paths.size() == ch.paths.size());
  CHECK((ch.H - ch2.H).norm() == 0.0);
}
