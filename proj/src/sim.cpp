// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#include "ftbm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace ftbm {

namespace {

enum class SchemeId { Proposed, Exhaustive, OnlyUl, DlAssisted };

SchemeId parse_scheme(const std::string& name) {
  if (name == "proposed") return SchemeId::Proposed;
  if (name == "exhaustive") return SchemeId::Exhaustive;
  if (name == "only_ul") return SchemeId::OnlyUl;
  if (name == "dl_assisted") return SchemeId::DlAssisted;
  throw std::invalid_argument("SimConfig: unknown scheme '" + name + "'");
}

std::uint64_t trial_seed(std::uint64_t master, int trial) {
  // splitmix64 step keeps nearby trial indices decorrelated
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct TrialStats {
  double searches = 0;   // per-trial mean
  double snr_db = 0;     // per-trial mean linear SNR, in dB
  double aligned = 0;    // per-trial alignment fraction
};

struct MeanCi {
  double mean = 0;
  double ci95 = 0;
};

MeanCi mean_ci(const std::vector<double>& x) {
  const std::size_t n = x.size();
  MeanCi out;
  if (n == 0) return out;
  double sum = 0;
  for (double v : x) sum += v;
  out.mean = sum / n;
  if (n < 2) return out;
  double ss = 0;
  for (double v : x) ss += (v - out.mean) * (v - out.mean);
  out.ci95 = 1.96 * std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

double lin_to_db(double lin) { return 10.0 * std::log10(std::max(lin, 1e-300)); }

CodebookConfig CodebookConfig::defaults() {
  CodebookConfig cfg;
  cfg.levels = {
      LevelSpec{17, 0.0, -60.0, 60.0, 0.0},
      LevelSpec{4, 3.2, -38.0, 52.0, 0.0},
      LevelSpec{2, 2.5, -23.0, 37.0, 0.0},
  };
  return cfg;
}

void SimConfig::validate() const {
  if (n_trials < 1) throw std::invalid_argument("SimConfig: n_trials must be >= 1");
  if (n_ttis_per_trial < 0)
    throw std::invalid_argument("SimConfig: n_ttis_per_trial must be >= 0");
  if (tx_snr_db.empty()) throw std::invalid_argument("SimConfig: tx_snr_db must be nonempty");
  if (gamma_th_db_grid.empty())
    throw std::invalid_argument("SimConfig: gamma_th_db_grid must be nonempty");
  if (schemes.empty()) throw std::invalid_argument("SimConfig: schemes must be nonempty");
  for (const std::string& s : schemes) parse_scheme(s);
  if (array.m_bs < 1) throw std::invalid_argument("SimConfig: array.m_bs must be >= 1");
  if (array.n_h < 1 || array.n_v < 1)
    throw std::invalid_argument("SimConfig: array.n_h and array.n_v must be >= 1");
  if (array.spacing <= 0) throw std::invalid_argument("SimConfig: array.spacing must be > 0");
  if (array.n_ue < 1) throw std::invalid_argument("SimConfig: array.n_ue must be >= 1");
  if (array.ue_spacing <= 0)
    throw std::invalid_argument("SimConfig: array.ue_spacing must be > 0");
  if (codebook.levels.empty())
    throw std::invalid_argument("SimConfig: codebook.levels must be nonempty");
  if (drift_deg_std < 0) throw std::invalid_argument("SimConfig: drift_deg_std must be >= 0");
  clusters.validate();
}

std::vector<MetricsRecord> run_monte_carlo(const SimConfig& cfg, ExecPolicy policy) {
  cfg.validate();
  const BsArrayLayout bs_layout = cfg.array.bs_layout();
  const ArrayGeometry ue = cfg.array.ue_geometry();
  const HierarchicalCodebook cb = build_codebook(bs_layout.panel(), cfg.codebook.levels);
  const BmOptions bm_opts{cfg.ftb_prune, cfg.prune_backoff_db};

  struct Point {
    double tx_db;
    double g_db;
  };
  std::vector<Point> points;
  for (double tx : cfg.tx_snr_db)
    for (double g : cfg.gamma_th_db_grid) points.push_back({tx, g});

  std::vector<SchemeId> scheme_ids;
  for (const std::string& s : cfg.schemes) scheme_ids.push_back(parse_scheme(s));

  const std::size_t np = points.size();
  const std::size_t ns = scheme_ids.size();
  // [point][scheme][trial], filled by trial index: order-independent.
  std::vector<std::vector<std::vector<TrialStats>>> stats(
      np, std::vector<std::vector<TrialStats>>(ns, std::vector<TrialStats>(cfg.n_trials)));

  auto run_trial = [&](int t) {
    std::mt19937_64 rng(trial_seed(cfg.master_seed, t));
    ChannelRealization ch = draw_channel(cfg.clusters, bs_layout, ue, rng);
    BeamSpace space(cb, ch);

    // Shared initialization per grid point; each stateful scheme then evolves
    // its own copy of the state.
    std::vector<std::vector<BmState>> state(np, std::vector<BmState>(ns));
    for (std::size_t p = 0; p < np; ++p) {
      const LinkBudget budget = LinkBudget::from_db(points[p].tx_db, points[p].g_db);
      auto [st, init_res] = initialize(space, budget, cfg.max_init_cts);
      for (std::size_t s = 0; s < ns; ++s) state[p][s] = st;
    }

    std::vector<std::vector<TrialStats>> acc(np, std::vector<TrialStats>(ns));
    for (int tti = 0; tti < cfg.n_ttis_per_trial; ++tti) {
      ch = evolve_channel(ch, cfg.clusters, bs_layout, ue, cfg.drift_deg_std, rng);
      BeamSpace tti_space(cb, ch);
      const double offset = cfg.gamma_th_offsets_db.empty()
                                ? 0.0
                                : cfg.gamma_th_offsets_db[tti % cfg.gamma_th_offsets_db.size()];
      for (std::size_t p = 0; p < np; ++p) {
        const LinkBudget budget = LinkBudget::from_db(points[p].tx_db, points[p].g_db + offset);
        for (std::size_t s = 0; s < ns; ++s) {
          TtiResult res;
          switch (scheme_ids[s]) {
            case SchemeId::Proposed:
              res = run_tti(state[p][s], tti_space, budget, bm_opts);
              break;
            case SchemeId::Exhaustive:
              res = exhaustive_search(tti_space, budget);
              break;
            case SchemeId::OnlyUl:
              res = only_ul(state[p][s], tti_space, budget);
              break;
            case SchemeId::DlAssisted:
              res = dl_assisted_ul(state[p][s], tti_space, budget);
              break;
          }
          acc[p][s].searches += res.searches;
          acc[p][s].snr_db += res.achieved_snr;  // linear accumulation
          acc[p][s].aligned += res.aligned ? 1.0 : 0.0;
        }
      }
    }
    const double nt = std::max(cfg.n_ttis_per_trial, 1);
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t s = 0; s < ns; ++s) {
        TrialStats& ts = stats[p][s][t];
        ts.searches = acc[p][s].searches / nt;
        ts.snr_db = lin_to_db(acc[p][s].snr_db / nt);
        ts.aligned = acc[p][s].aligned / nt;
      }
    }
  };

  if (policy == ExecPolicy::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int t = 0; t < cfg.n_trials; ++t) run_trial(t);
  } else {
    for (int t = 0; t < cfg.n_trials; ++t) run_trial(t);
  }

  std::vector<MetricsRecord> records;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<double> searches, snr_db, aligned;
      searches.reserve(cfg.n_trials);
      snr_db.reserve(cfg.n_trials);
      aligned.reserve(cfg.n_trials);
      for (const TrialStats& ts : stats[p][s]) {
        searches.push_back(ts.searches);
        snr_db.push_back(ts.snr_db);
        aligned.push_back(ts.aligned);
      }
      const MeanCi mc_s = mean_ci(searches);
      const MeanCi mc_g = mean_ci(snr_db);
      const MeanCi mc_a = mean_ci(aligned);
      MetricsRecord rec;
      rec.scheme = cfg.schemes[s];
      rec.tx_snr_db = points[p].tx_db;
      rec.gamma_th_db = points[p].g_db;
      rec.avg_rx_snr_db = mc_g.mean;
      rec.ci95_snr_db = mc_g.ci95;
      rec.avg_searches = mc_s.mean;
      rec.ci95_searches = mc_s.ci95;
      rec.alignment_rate = mc_a.mean;
      records.push_back(std::move(rec));
    }
  }
  return summarize(std::move(records));
}

std::vector<MetricsRecord> summarize(std::vector<MetricsRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const MetricsRecord& a, const MetricsRecord& b) {
                     return std::tie(a.scheme, a.tx_snr_db, a.gamma_th_db) <
                            std::tie(b.scheme, b.tx_snr_db, b.gamma_th_db);
                   });
  return records;
}

}  // namespace ftbm
