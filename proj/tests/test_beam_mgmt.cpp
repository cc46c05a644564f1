// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ftbm/beam_mgmt.hpp"
#include "ftbm/sim.hpp"

using namespace ftbm;
namespace {
constexpr double kPi = std::numbers::pi;

const BsArrayLayout kBs{2, 16, 16, 0.5};
const ArrayGeometry kUe = ArrayGeometry::ula(4, 0.5);

const HierarchicalCodebook& default_codebook() {
  static const HierarchicalCodebook cb =
      build_codebook(ArrayGeometry::ura(16, 16, 0.5), CodebookConfig::defaults().levels);
  return cb;
}

ChannelRealization random_channel(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return draw_channel(ClusterParams{}, kBs, kUe, rng);
}

// channel with all energy along one codebook angle
ChannelRealization aligned_channel(double az_deg) {
  PathRecord p;
  p.power = 1.0;
  p.delay = 0.0;
  p.bs_dir = AngleDirection::from_azimuth_deg(az_deg);
  p.ue_dir = AngleDirection::broadside();
  p.gain = cplx{1.0, 0.0};
  ChannelRealization ch;
  ch.m_bs = kBs.m_bs;
  ch.paths = {p};
  ch.H = assemble_channel(ch.paths, kBs, kUe);
  return ch;
}
}  // namespace

TEST_CASE("sweep sequence: hand-derived trace") {
  const std::vector<int> expect{6, 4, 7, 3, 8, 2, 9, 1, 10, 11, 12, 13, 14, 15, 16, 17};
  CHECK(sweep_sequence(17, 5) == expect);
}

TEST_CASE("sweep sequence: descending branch and small cases") {
  std::vector<int> desc(16);
  for (int i = 0; i < 16; ++i) desc[i] = 16 - i;
  CHECK(sweep_sequence(17, 17) == desc);
  CHECK(sweep_sequence(2, 1) == std::vector<int>{2});
  CHECK(sweep_sequence(2, 2) == std::vector<int>{1});
  CHECK(sweep_sequence(3, 2) == std::vector<int>{3, 1});
}

TEST_CASE("sweep sequence: permutation property for all card <= 32") {
  for (int card = 2; card <= 32; ++card) {
    for (int nu = 1; nu <= card; ++nu) {
      const std::vector<int> seq = sweep_sequence(card, nu);
      REQUIRE(static_cast<int>(seq.size()) == card - 1);
      std::set<int> seen(seq.begin(), seq.end());
      CHECK(static_cast<int>(seen.size()) == card - 1);
      CHECK(seen.count(nu) == 0);
      CHECK(*seen.begin() >= 1);
      CHECK(*seen.rbegin() <= card);
    }
  }
}

TEST_CASE("sweep sequence: preconditions") {
  CHECK_THROWS(sweep_sequence(1, 1));
  CHECK_THROWS(sweep_sequence(5, 0));
  CHECK_THROWS(sweep_sequence(5, 6));
}

TEST_CASE("measure_snr basics") {
  const LinkBudget budget{2.0, 1.0, 1.0};
  CVec u = CVec::Zero(4);
  u(1) = 1.0;
  const CMat H = CMat::Ones(4, 3);
  CVec v = CVec::Zero(3);
  v(0) = 1.0;
  CHECK(measure_snr(u, H, v, budget) == doctest::Approx(2.0));  // P / sigma^2
  // unit phase on v changes nothing
  CHECK(measure_snr(u, H, v * cplx{0.0, 1.0}, budget) == doctest::Approx(2.0));
  CHECK_THROWS(measure_snr(CVec::Zero(4), H, v, budget));
}

TEST_CASE("measure_snr on a rank-1 channel with matched u, v") {
  const LinkBudget budget{1.0, 1.0, 1.0};
  const ArrayGeometry panel = kBs.panel();
  const CVec a = steering_vector(panel, AngleDirection::from_azimuth_deg(12.0));
  CVec b = steering_vector(kUe, AngleDirection::broadside());
  b /= b.norm();
  const cplx g{0.3, -0.4};
  const CMat H = g * a * b.adjoint();
  CHECK(measure_snr(a, H, b, budget) ==
        doctest::Approx(std::norm(g) * 256.0).epsilon(1e-9));
}

TEST_CASE("mrc equals the per-branch loop and dominates any fixed precoder") {
  const LinkBudget budget{1.3, 0.7, 1.0};
  std::mt19937_64 rng(31);
  const ChannelRealization ch = random_channel(31);
  const CVec u = beam_vector(dft_beam(kBs.panel(), AngleDirection::from_azimuth_deg(-15.0)));
  const double gamma = mrc_init_snr(u, ch.block(0), budget);
  double per_branch = 0;
  for (int r = 0; r < 4; ++r) {
    const cplx br = u.dot(ch.block(0).col(r));
    per_branch += budget.tx_power * std::norm(br) / (budget.noise_var * u.squaredNorm());
  }
  CHECK(gamma == doctest::Approx(per_branch).epsilon(1e-9));

  std::normal_distribution<double> gauss;
  for (int t = 0; t < 10; ++t) {
    CVec v(4);
    for (int r = 0; r < 4; ++r) v(r) = cplx{gauss(rng), gauss(rng)};
    v /= v.norm();
    CHECK(measure_snr(u, ch.block(0), v, budget) <= gamma * (1 + 1e-9));
  }
}

TEST_CASE("mrc with a single UE antenna reduces to measure_snr") {
  const LinkBudget budget{1.0, 1.0, 1.0};
  const ArrayGeometry ue1 = ArrayGeometry::ula(1, 0.5);
  std::mt19937_64 rng(5);
  const ChannelRealization ch = draw_channel(ClusterParams{}, kBs, ue1, rng);
  const CVec u = beam_vector(dft_beam(kBs.panel(), AngleDirection::broadside()));
  CVec v = CVec::Ones(1);
  CHECK(mrc_init_snr(u, ch.block(0), budget) ==
        doctest::Approx(measure_snr(u, ch.block(0), v, budget)).epsilon(1e-12));
}

TEST_CASE("mrt precoder: rank-1 case, optimality, determinism") {
  const ChannelRealization ch = random_channel(77);
  std::vector<CVec> beams(2, beam_vector(dft_beam(kBs.panel(), AngleDirection::broadside())));
  const CMat eff = beamformed_channel(ch, beams);

  // single column: normalized column with real-positive leading phase
  const CMat one_col = eff.col(0);
  const CVec v1 = mrt_precoder(one_col);
  CHECK(v1.norm() == doctest::Approx(1.0));
  CHECK(std::abs((one_col.col(0) / one_col.norm()).dot(v1)) == doctest::Approx(1.0));
  CHECK(v1(0).imag() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(v1(0).real() >= 0.0);

  // grid-search oracle over the unit sphere restricted to the column space
  const CVec v = mrt_precoder(eff);
  CHECK(v.norm() == doctest::Approx(1.0));
  const double best = (eff.adjoint() * v).norm();
  for (int it = 0; it < 200; ++it) {
    const double t = kPi / 2 * (it % 20) / 19.0;
    const double p = 2 * kPi * (it / 20) / 9.0;
    CVec cand = std::cos(t) * mrt_precoder(eff.col(0)) +
                std::sin(t) * cplx{std::cos(p), std::sin(p)} * mrt_precoder(eff.col(1));
    if (cand.norm() < 1e-12) continue;
    cand /= cand.norm();
    CHECK((eff.adjoint() * cand).norm() <= best * (1 + 1e-6));
  }
  const CVec v_again = mrt_precoder(eff);
  CHECK((v - v_again).norm() == 0.0);
  CHECK_THROWS(mrt_precoder(CMat::Zero(4, 2)));
}

TEST_CASE("beam space agrees with the direct measurement") {
  const HierarchicalCodebook& cb = default_codebook();
  const ChannelRealization ch = random_channel(91);
  const BeamSpace space(cb, ch);
  const LinkBudget budget = LinkBudget::from_db(0.0, 10.0);
  CVec v(4);
  v << cplx{0.5, 0}, cplx{0.5, 0}, cplx{0, 0.5}, cplx{0, -0.5};
  for (int l = 1; l <= 3; ++l) {
    for (int k = 1; k <= cb.level_size(l); ++k) {
      const CVec u = beam_vector(cb.beam(l, k).weights);
      for (int i = 0; i < 2; ++i) {
        CHECK(space.snr(i, l, k, v, budget) ==
              doctest::Approx(measure_snr(u, ch.block(i), v, budget)).epsilon(1e-9));
        CHECK(space.mrc_snr(i, l, k, budget) ==
              doctest::Approx(mrc_init_snr(u, ch.block(i), budget)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("initialize: trivial and impossible thresholds") {
  const HierarchicalCodebook& cb = default_codebook();
  const BeamSpace space(cb, random_channel(101));
  auto [st_easy, res_easy] = initialize(space, LinkBudget::from_db(0.0, -300.0));
  CHECK(res_easy.aligned);
  CHECK(res_easy.searches == 1);
  CHECK(st_easy.has_precoder);

  auto [st_hard, res_hard] = initialize(space, LinkBudget::from_db(0.0, 200.0));
  CHECK(!res_hard.aligned);
  CHECK(res_hard.searches == 17);
  CHECK(st_hard.has_precoder);  // warm start still computed

  auto [st_cap, res_cap] = initialize(space, LinkBudget::from_db(0.0, 200.0), 5);
  CHECK(res_cap.searches == 5);
}

TEST_CASE("initialize finds a single-path channel's beam") {
  const HierarchicalCodebook& cb = default_codebook();
  const BeamSpace space(cb, aligned_channel(0.0));  // beam 9 points at 0 deg
  auto [st, res] = initialize(space, LinkBudget::from_db(0.0, 200.0));
  CHECK(st.nu == std::vector<int>{9, 9});
}

TEST_CASE("run_tti: UL accept, exhaustion, and threshold invariant") {
  const HierarchicalCodebook& cb = default_codebook();
  const BeamSpace space(cb, random_channel(7));
  {
    auto [st, ignore] = initialize(space, LinkBudget::from_db(0.0, -300.0));
    const TtiResult res = run_tti(st, space, LinkBudget::from_db(0.0, -300.0));
    CHECK(res.aligned);
    CHECK(res.searches == 4);  // the UL phase always runs its four CTSs
  }
  {
    auto [st, ignore] = initialize(space, LinkBudget::from_db(0.0, 200.0));
    const TtiResult res = run_tti(st, space, LinkBudget::from_db(0.0, 200.0));
    CHECK(!res.aligned);
    CHECK(res.searches == 17);  // 4 UL + the 13 remaining narrow beams
  }
  for (std::uint64_t seed = 200; seed < 212; ++seed) {
    const BeamSpace sp(cb, random_channel(seed));
    const LinkBudget budget = LinkBudget::from_db(0.0, 18.0);
    auto [st, ignore] = initialize(sp, budget);
    const TtiResult res = run_tti(st, sp, budget);
    if (res.aligned) CHECK(res.achieved_snr >= budget.snr_threshold * (1 - 1e-9));
    CHECK(res.searches >= 4);
    CHECK(res.searches <= 17);
  }
}

TEST_CASE("benchmark schemes: constant search counts and dominance") {
  const HierarchicalCodebook& cb = default_codebook();
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    const BeamSpace space(cb, random_channel(seed));
    const LinkBudget budget = LinkBudget::from_db(-1.0, 20.0);

    const TtiResult ex = exhaustive_search(space, budget);
    CHECK(ex.searches == 17);

    auto [st_ul, i1] = initialize(space, budget);
    const TtiResult ul = only_ul(st_ul, space, budget);
    CHECK(ul.searches == 4);

    auto [st_dl, i2] = initialize(space, budget);
    const TtiResult dl = dl_assisted_ul(st_dl, space, budget);
    CHECK(dl.searches >= 4);
    CHECK(dl.searches <= 17);

    auto [st_p, i3] = initialize(space, budget);
    const TtiResult prop = run_tti(st_p, space, budget);

    CHECK(ex.achieved_snr >= ul.achieved_snr * (1 - 1e-9));
    CHECK(ex.achieved_snr >= dl.achieved_snr * (1 - 1e-9));
    CHECK(ex.achieved_snr >= prop.achieved_snr * (1 - 1e-9));
  }
}

TEST_CASE("dl_assisted exhausts to K_1 searches on impossible thresholds") {
  const HierarchicalCodebook& cb = default_codebook();
  const BeamSpace space(cb, random_channel(404));
  const LinkBudget budget = LinkBudget::from_db(0.0, 200.0);
  auto [st, ignore] = initialize(space, budget);
  const TtiResult res = dl_assisted_ul(st, space, budget);
  CHECK(!res.aligned);
  CHECK(res.searches == 17);
}

TEST_CASE("ftb prune variant stays within bounds and honors the threshold") {
  const HierarchicalCodebook& cb = default_codebook();
  BmOptions opts;
  opts.ftb_prune = true;
  for (std::uint64_t seed = 300; seed < 306; ++seed) {
    const BeamSpace space(cb, random_channel(seed));
    const LinkBudget budget = LinkBudget::from_db(0.0, 21.0);
    auto [st, ignore] = initialize(space, budget);
    const TtiResult res = run_tti(st, space, budget, opts);
    CHECK(res.searches >= 4);
    CHECK(res.searches <= 4 + 13 + 6);  // narrow beams plus at most 6 wide probes
    if (res.aligned) CHECK(res.achieved_snr >= budget.snr_threshold * (1 - 1e-9));
  }
}

TEST_CASE("run_tti requires an initialized state") {
  const HierarchicalCodebook& cb = default_codebook();
  const BeamSpace space(cb, random_channel(1));
  BmState st;
  CHECK_THROWS(run_tti(st, space, LinkBudget::from_db(0.0, 10.0)));
}
