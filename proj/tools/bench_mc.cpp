// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// Benchmark: serial vs parallel Monte Carlo on a reduced grid, with an
// exact-equality check between the two result sets.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ftbm/sim.hpp"

int main(int argc, char** argv) {
  using namespace ftbm;
  SimConfig cfg;
  cfg.n_trials = argc > 1 ? std::atoi(argv[1]) : 200;
  cfg.n_ttis_per_trial = 10;
  cfg.tx_snr_db = {0.0};
  cfg.gamma_th_db_grid = {18.0, 24.0, 30.0};

  const auto time_run = [&](ExecPolicy policy) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<MetricsRecord> records = run_monte_carlo(cfg, policy);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::pair{std::move(records), s};
  };

  const auto [serial, t_serial] = time_run(ExecPolicy::Serial);
  const auto [parallel, t_parallel] = time_run(ExecPolicy::Parallel);

  bool equal = serial.size() == parallel.size();
  for (std::size_t i = 0; equal && i < serial.size(); ++i) {
    const MetricsRecord& a = serial[i];
    const MetricsRecord& b = parallel[i];
    equal = a.scheme == b.scheme && a.tx_snr_db == b.tx_snr_db &&
            a.gamma_th_db == b.gamma_th_db && a.avg_rx_snr_db == b.avg_rx_snr_db &&
            a.ci95_snr_db == b.ci95_snr_db && a.avg_searches == b.avg_searches &&
            a.ci95_searches == b.ci95_searches && a.alignment_rate == b.alignment_rate;
  }

  std::printf("trials=%d serial=%.3fs parallel=%.3fs speedup=%.2fx results_equal=%s\n",
              cfg.n_trials, t_serial, t_parallel, t_serial / t_parallel,
              equal ? "yes" : "NO");
  return equal ? 0 : 1;
}
