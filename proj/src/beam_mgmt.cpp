// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#include "ftbm/beam_mgmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <Eigen/SVD>

namespace ftbm {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

// Members ordered for a sweep: the member whose flat region contains seed_az
// (nearest center on ties, or nearest center if none covers) first, then the
// zig-zag order of the remaining positions.
std::vector<int> ordered_members(const HierarchicalCodebook& cb, int level,
                                 const std::vector<int>& members, double seed_az) {
  if (members.empty()) return {};
  int pos = 0;
  double best_d = std::numeric_limits<double>::infinity();
  bool covering = false;
  for (std::size_t p = 0; p < members.size(); ++p) {
    const FlatnessReport& rep = cb.flat(level, members[p]);
    const bool inside = seed_az >= rep.flat_lo_deg && seed_az <= rep.flat_hi_deg;
    if (covering && !inside) continue;
    const double d = std::abs(cb.beam(level, members[p]).center_azimuth_deg - seed_az);
    if (inside && !covering) {
      covering = true;
      best_d = d;
      pos = static_cast<int>(p);
    } else if (d < best_d) {
      best_d = d;
      pos = static_cast<int>(p);
    }
  }
  std::vector<int> out{members[pos]};
  if (members.size() > 1)
    for (int p : sweep_sequence(static_cast<int>(members.size()), pos + 1))
      out.push_back(members[p - 1]);
  return out;
}

// Level-1 visit order for the DL descent: top-level beams swept around the
// one covering best_az, each expanded depth-first through its child sets,
// skipping already-visited beams and the UL-swept level-1 angles.
std::vector<int> dl_order(const HierarchicalCodebook& cb, double best_az,
                          const std::vector<int>& swept) {
  const int top = cb.num_levels();
  std::vector<std::vector<char>> visited(top + 1);
  for (int l = 1; l <= top; ++l) visited[l].assign(cb.level_size(l) + 1, 0);
  for (int k : swept) visited[1][k] = 1;
  std::vector<int> out;
  auto expand = [&](auto&& self, int level, int idx) -> void {
    if (visited[level][idx]) return;
    visited[level][idx] = 1;
    if (level == 1) {
      out.push_back(idx);
      return;
    }
    for (int m : ordered_members(cb, level - 1, cb.children(level - 1, idx), best_az))
      self(self, level - 1, m);
  };
  std::vector<int> top_all(cb.level_size(top));
  std::iota(top_all.begin(), top_all.end(), 1);
  for (int k : ordered_members(cb, top, top_all, best_az)) expand(expand, top, k);
  return out;
}

// UL phase shared by run_tti / only_ul / dl_assisted_ul: min(4, K_1 - 1) CTSs
// of each AiP's zig-zag sequence, measured with the carried precoder;
// per-AiP maxima may come from different CTSs.
struct UlPhase {
  std::vector<std::vector<int>> seq;  // per AiP, full zig-zag order
  std::vector<int> best;              // per AiP argmax among measured
  std::vector<double> best_g;
  double sum_best = 0;
  int cts = 0;
};

UlPhase ul_phase(BmState& state, const BeamSpace& bs, const LinkBudget& budget) {
  const int m = bs.m_bs();
  const int k1 = bs.codebook().level_size(1);
  if (!state.has_precoder) throw std::logic_error("ul_phase: state not initialized");
  if (static_cast<int>(state.nu.size()) != m)
    throw std::invalid_argument("ul_phase: state does not match the AiP count");
  state.snr_cache.assign(m, std::vector<double>(k1 + 1, kNan));
  UlPhase ul;
  ul.cts = std::min(4, k1 - 1);
  ul.best = state.nu;
  ul.best_g.assign(m, -1.0);
  for (int i = 0; i < m; ++i)
    ul.seq.push_back(k1 >= 2 ? sweep_sequence(k1, state.nu[i]) : std::vector<int>{});
  for (int s = 0; s < ul.cts; ++s) {
    for (int i = 0; i < m; ++i) {
      const int idx = ul.seq[i][s];
      const double g = bs.snr(i, 1, idx, state.precoder, budget);
      state.snr_cache[i][idx] = g;
      if (g > ul.best_g[i]) {
        ul.best_g[i] = g;
        ul.best[i] = idx;
      }
    }
  }
  for (int i = 0; i < m; ++i) ul.sum_best += std::max(ul.best_g[i], 0.0);
  return ul;
}

CVec safe_mrt(const CMat& effective) {
  if (effective.norm() < 1e-300) {
    CVec v = CVec::Zero(effective.rows());
    v(0) = 1.0;
    return v;
  }
  return mrt_precoder(effective);
}

// Select the final beams, recompute the MRT precoder, and fold the outcome
// back into the state (the precoder is only refreshed on alignment, i.e.
// after an actual data phase).
TtiResult finalize(BmState& state, const BeamSpace& bs, const LinkBudget& budget, bool aligned,
                   std::vector<int> beams, int searches, std::string scheme) {
  const CVec v = safe_mrt(bs.effective(beams));
  double achieved = 0;
  for (int i = 0; i < bs.m_bs(); ++i) achieved += bs.snr(i, 1, beams[i], v, budget);
  state.nu = beams;
  state.aligned = aligned;
  state.cts_counter = searches;
  if (aligned) {
    state.precoder = v;
    state.has_precoder = true;
  }
  return TtiResult{aligned, std::move(beams), searches, achieved, std::move(scheme)};
}

// Per-AiP argmax over everything measured this TTI.
std::vector<int> cache_best(const BmState& state, int k1) {
  const int m = static_cast<int>(state.snr_cache.size());
  std::vector<int> beams(m);
  for (int i = 0; i < m; ++i) {
    int bi = state.nu[i];
    double bg = -1.0;
    for (int k = 1; k <= k1; ++k) {
      const double g = state.snr_cache[i][k];
      if (!std::isnan(g) && g > bg) {
        bg = g;
        bi = k;
      }
    }
    beams[i] = bi;
  }
  return beams;
}
}  // namespace

LinkBudget LinkBudget::from_db(double tx_snr_db, double gamma_th_db) {
  return LinkBudget{db_to_lin(tx_snr_db), 1.0, db_to_lin(gamma_th_db)};
}

std::vector<int> sweep_sequence(int card, int nu) {
  if (card < 2) throw std::invalid_argument("sweep_sequence: card must be >= 2");
  if (nu < 1 || nu > card) throw std::invalid_argument("sweep_sequence: nu outside 1..card");
  std::vector<int> out;
  out.reserve(card - 1);
  if (nu + 1 <= card) {
    out.push_back(nu + 1);
    int mu = 1;
    for (int p = 3; p <= card; ++p) {
      mu = mu > 0 ? -mu : -mu + 1;  // mu <- -mu - min(0, sign(mu))
      int xi = nu + mu;
      if (xi < 1 || xi > card) {
        mu = mu > 0 ? -mu : -mu + 1;
        xi = nu + mu;
      }
      out.push_back(xi);
    }
  } else {
    for (int k = card - 1; k >= 1; --k) out.push_back(k);
  }
  return out;
}

double measure_snr(const CVec& u, const Eigen::Ref<const CMat>& H_i, const CVec& v,
                   const LinkBudget& budget) {
  const double u2 = u.squaredNorm();
  if (u2 == 0.0) throw std::invalid_argument("measure_snr: all-zero beam vector");
  const cplx num = u.dot(H_i * v);
  return budget.tx_power * std::norm(num) / (budget.noise_var * u2);
}

double mrc_init_snr(const CVec& u, const Eigen::Ref<const CMat>& H_i, const LinkBudget& budget) {
  const double u2 = u.squaredNorm();
  if (u2 == 0.0) throw std::invalid_argument("mrc_init_snr: all-zero beam vector");
  return budget.tx_power * (H_i.adjoint() * u).squaredNorm() / (budget.noise_var * u2);
}

CVec mrt_precoder(const CMat& effective) {
  if (effective.size() == 0 || effective.norm() == 0.0)
    throw std::invalid_argument("mrt_precoder: zero effective channel");
  Eigen::JacobiSVD<CMat> svd(effective, Eigen::ComputeThinU);
  CVec v = svd.matrixU().col(0);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double mag = std::abs(v(k));
    if (mag > 1e-12) {
      v *= std::conj(v(k)) / mag;
      break;
    }
  }
  return v;
}

BeamSpace::BeamSpace(const HierarchicalCodebook& cb, const ChannelRealization& ch)
    : cb_(&cb), m_bs_(ch.m_bs) {
  int total = 0;
  for (int l = 1; l <= cb.num_levels(); ++l) {
    offset_.push_back(total);
    total += cb.level_size(l);
  }
  std::vector<CVec> beams(total);
  active_.resize(total);
  for (int l = 1; l <= cb.num_levels(); ++l) {
    for (int k = 1; k <= cb.level_size(l); ++k) {
      const int b = id(l, k);
      beams[b] = beam_vector(cb.beam(l, k).weights);
      active_[b] = cb.beam(l, k).weights.active_count();
    }
  }
  if (ch.block_rows() != beams[0].size())
    throw std::invalid_argument("BeamSpace: codebook size does not match the AiP block");
  proj_.assign(m_bs_, std::vector<CVec>(total));
  for (int i = 0; i < m_bs_; ++i)
    for (int b = 0; b < total; ++b) proj_[i][b] = ch.block(i).adjoint() * beams[b];
}

double BeamSpace::snr(int aip, int level, int index, const CVec& v,
                      const LinkBudget& budget) const {
  const int b = id(level, index);
  const cplx num = proj_[aip][b].dot(v);
  return budget.tx_power * std::norm(num) / (budget.noise_var * active_[b]);
}

double BeamSpace::mrc_snr(int aip, int level, int index, const LinkBudget& budget) const {
  const int b = id(level, index);
  return budget.tx_power * proj_[aip][b].squaredNorm() / (budget.noise_var * active_[b]);
}

CMat BeamSpace::effective(const std::vector<int>& beams) const {
  if (static_cast<int>(beams.size()) != m_bs_)
    throw std::invalid_argument("BeamSpace: need one beam per AiP");
  CMat eff(proj_[0][0].size(), m_bs_);
  for (int i = 0; i < m_bs_; ++i) eff.col(i) = proj_[i][id(1, beams[i])];
  return eff;
}

std::pair<BmState, TtiResult> initialize(const BeamSpace& bs, const LinkBudget& budget,
                                         int max_cts) {
  const int m = bs.m_bs();
  const int k1 = bs.codebook().level_size(1);
  if (max_cts <= 0 || max_cts > k1) max_cts = k1;
  BmState state;
  state.snr_cache.assign(m, std::vector<double>(k1 + 1, kNan));
  std::vector<int> best(m, 1);
  std::vector<double> best_g(m, -1.0);
  bool aligned = false;
  int searches = 0;
  for (int j = 1; j <= max_cts; ++j) {
    for (int i = 0; i < m; ++i) {
      const double g = bs.mrc_snr(i, 1, j, budget);
      state.snr_cache[i][j] = g;
      if (g > best_g[i]) {
        best_g[i] = g;
        best[i] = j;
      }
    }
    ++searches;
    const double sum = std::accumulate(best_g.begin(), best_g.end(), 0.0);
    if (sum >= budget.snr_threshold) {
      aligned = true;
      break;
    }
  }
  state.nu = best;
  state.aligned = aligned;
  state.cts_counter = searches;
  state.precoder = safe_mrt(bs.effective(best));
  state.has_precoder = true;
  const double achieved = std::accumulate(best_g.begin(), best_g.end(), 0.0);
  return {std::move(state), TtiResult{aligned, best, searches, achieved, "initialize"}};
}

TtiResult run_tti(BmState& state, const BeamSpace& bs, const LinkBudget& budget,
                  const BmOptions& opts) {
  const HierarchicalCodebook& cb = bs.codebook();
  const int m = bs.m_bs();
  const int k1 = cb.level_size(1);
  UlPhase ul = ul_phase(state, bs, budget);
  int searches = ul.cts;
  if (ul.sum_best >= budget.snr_threshold)
    return finalize(state, bs, budget, true, ul.best, searches, "proposed");

  const CVec v = state.precoder;
  std::optional<std::vector<int>> accepted;

  if (!opts.ftb_prune) {
    // Per-AiP DL descent seeded at each AiP's own UL-phase best angle.
    std::vector<std::vector<int>> order(m);
    std::size_t len = 0;
    for (int i = 0; i < m; ++i) {
      const std::vector<int> swept(ul.seq[i].begin(), ul.seq[i].begin() + ul.cts);
      order[i] = dl_order(cb, cb.beam(1, ul.best[i]).center_azimuth_deg, swept);
      len = std::max(len, order[i].size());
    }
    std::vector<int> current = ul.best;
    for (std::size_t s = 0; s < len && !accepted; ++s) {
      double sum = 0;
      for (int i = 0; i < m; ++i) {
        if (s < order[i].size()) {
          current[i] = order[i][s];
          state.snr_cache[i][current[i]] = bs.snr(i, 1, current[i], v, budget);
        }
        sum += std::max(state.snr_cache[i][current[i]], 0.0);
      }
      ++searches;
      if (sum >= budget.snr_threshold) accepted = current;
    }
  } else {
    // Extension: one joint schedule seeded at the best summed UL angle, with
    // a wide-beam probe on subtree entry; a probe below gamma_th minus the
    // back-off skips the subtree. Every CTS (probe or narrow) measures all
    // AiPs on the same beam.
    int jbest = ul.best[0];
    double jg = -1.0;
    for (int k = 1; k <= k1; ++k) {
      double sum = 0;
      bool any = false;
      for (int i = 0; i < m; ++i) {
        const double g = state.snr_cache[i][k];
        if (!std::isnan(g)) {
          sum += g;
          any = true;
        }
      }
      if (any && sum > jg) {
        jg = sum;
        jbest = k;
      }
    }
    const double best_az = cb.beam(1, jbest).center_azimuth_deg;
    const double floor_th = budget.snr_threshold * db_to_lin(-opts.prune_backoff_db);
    const int top = cb.num_levels();
    std::vector<std::vector<char>> visited(top + 1);
    for (int l = 1; l <= top; ++l) visited[l].assign(cb.level_size(l) + 1, 0);
    // Only angles swept in the UL phase by every AiP are excluded.
    for (int k = 1; k <= k1; ++k) {
      bool all = true;
      for (int i = 0; i < m && all; ++i) {
        const auto b = ul.seq[i].begin();
        all = std::find(b, b + ul.cts, k) != b + ul.cts;
      }
      if (all) visited[1][k] = 1;
    }
    auto walk = [&](auto&& self, int level, int idx) -> bool {
      if (visited[level][idx]) return false;
      visited[level][idx] = 1;
      double sum = 0;
      for (int i = 0; i < m; ++i) {
        const double g = bs.snr(i, level, idx, v, budget);
        if (level == 1) state.snr_cache[i][idx] = g;
        sum += g;
      }
      ++searches;
      if (level == 1) {
        if (sum >= budget.snr_threshold) accepted = std::vector<int>(m, idx);
        return accepted.has_value();
      }
      if (sum < floor_th) return false;
      for (int c : ordered_members(cb, level - 1, cb.children(level - 1, idx), best_az))
        if (self(self, level - 1, c)) return true;
      return false;
    };
    std::vector<int> top_all(cb.level_size(top));
    std::iota(top_all.begin(), top_all.end(), 1);
    for (int k : ordered_members(cb, top, top_all, best_az))
      if (walk(walk, top, k)) break;
  }

  if (accepted) return finalize(state, bs, budget, true, *accepted, searches, "proposed");
  return finalize(state, bs, budget, false, cache_best(state, k1), searches, "proposed");
}

TtiResult exhaustive_search(const BeamSpace& bs, const LinkBudget& budget) {
  const int m = bs.m_bs();
  const int k1 = bs.codebook().level_size(1);
  std::vector<int> best(m, 1);
  double achieved = 0;
  for (int i = 0; i < m; ++i) {
    double bg = -1.0;
    for (int k = 1; k <= k1; ++k) {
      const double g = bs.mrc_snr(i, 1, k, budget);
      if (g > bg) {
        bg = g;
        best[i] = k;
      }
    }
    achieved += bg;
  }
  return TtiResult{achieved >= budget.snr_threshold, std::move(best), k1, achieved, "exhaustive"};
}

TtiResult only_ul(BmState& state, const BeamSpace& bs, const LinkBudget& budget) {
  UlPhase ul = ul_phase(state, bs, budget);
  return finalize(state, bs, budget, ul.sum_best >= budget.snr_threshold, ul.best, ul.cts,
                  "only_ul");
}

TtiResult dl_assisted_ul(BmState& state, const BeamSpace& bs, const LinkBudget& budget) {
  const int m = bs.m_bs();
  const int k1 = bs.codebook().level_size(1);
  UlPhase ul = ul_phase(state, bs, budget);
  int searches = ul.cts;
  if (ul.sum_best >= budget.snr_threshold)
    return finalize(state, bs, budget, true, ul.best, searches, "dl_assisted");

  const CVec v = state.precoder;
  // Flat continuation: the remaining zig-zag entries, then the previous nu.
  std::vector<std::vector<int>> rest(m);
  std::size_t len = 0;
  for (int i = 0; i < m; ++i) {
    rest[i].assign(ul.seq[i].begin() + ul.cts, ul.seq[i].end());
    rest[i].push_back(state.nu[i]);
    len = std::max(len, rest[i].size());
  }
  std::optional<std::vector<int>> accepted;
  std::vector<int> current = ul.best;
  for (std::size_t s = 0; s < len && !accepted; ++s) {
    double sum = 0;
    for (int i = 0; i < m; ++i) {
      if (s < rest[i].size()) {
        current[i] = rest[i][s];
        state.snr_cache[i][current[i]] = bs.snr(i, 1, current[i], v, budget);
      }
      sum += std::max(state.snr_cache[i][current[i]], 0.0);
    }
    ++searches;
    if (sum >= budget.snr_threshold) accepted = current;
  }
  if (accepted) return finalize(state, bs, budget, true, *accepted, searches, "dl_assisted");
  return finalize(state, bs, budget, false, cache_best(state, k1), searches, "dl_assisted");
}

std::pair<BmState, TtiResult> initialize(const HierarchicalCodebook& cb,
                                         const ChannelRealization& ch, const LinkBudget& budget,
                                         int max_cts) {
  return initialize(BeamSpace(cb, ch), budget, max_cts);
}

TtiResult run_tti(BmState& state, const HierarchicalCodebook& cb, const ChannelRealization& ch,
                  const LinkBudget& budget, const BmOptions& opts) {
  return run_tti(state, BeamSpace(cb, ch), budget, opts);
}

TtiResult exhaustive_search(const HierarchicalCodebook& cb, const ChannelRealization& ch,
                            const LinkBudget& budget) {
  return exhaustive_search(BeamSpace(cb, ch), budget);
}

TtiResult only_ul(BmState& state, const HierarchicalCodebook& cb, const ChannelRealization& ch,
                  const LinkBudget& budget) {
  return only_ul(state, BeamSpace(cb, ch), budget);
}

TtiResult dl_assisted_ul(BmState& state, const HierarchicalCodebook& cb,
                         const ChannelRealization& ch, const LinkBudget& budget) {
  return dl_assisted_ul(state, BeamSpace(cb, ch), budget);
}

}  // namespace ftbm
