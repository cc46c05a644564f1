// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// Monte Carlo driver: sweeps (tx SNR, gamma_th, scheme) over n_trials
// independent channel timelines. Trials are embarrassingly parallel; results
// are stored by trial index so serial and parallel execution are identical.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftbm/beam_mgmt.hpp"
#include "ftbm/channel.hpp"
#include "ftbm/codebook.hpp"

namespace ftbm {

struct ArrayConfig {
  int m_bs = 2;       // AiP count
  int n_h = 16;       // per-AiP columns
  int n_v = 16;       // per-AiP rows
  double spacing = 0.5;
  int n_ue = 4;       // UE ULA elements
  double ue_spacing = 0.5;

  BsArrayLayout bs_layout() const { return BsArrayLayout{m_bs, n_h, n_v, spacing}; }
  ArrayGeometry ue_geometry() const { return ArrayGeometry::ula(n_ue, ue_spacing); }
};

struct CodebookConfig {
  std::vector<LevelSpec> levels;

  // 17 DFT beams over [-60, 60], 4 wide FTBs, 2 wider FTBs.
  static CodebookConfig defaults();
};

struct SimConfig {
  std::uint64_t master_seed = 1;
  int n_trials = 2000;
  int n_ttis_per_trial = 10;
  std::vector<double> tx_snr_db = {-1.0, 0.0};
  std::vector<double> gamma_th_db_grid = {12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0, 33.0};
  std::vector<std::string> schemes = {"proposed", "exhaustive", "only_ul", "dl_assisted"};
  ArrayConfig array;
  CodebookConfig codebook = CodebookConfig::defaults();
  ClusterParams clusters;
  double drift_deg_std = 5.0;
  int max_init_cts = 0;  // 0 = K_1
  bool ftb_prune = false;
  double prune_backoff_db = 3.0;
  // Optional per-TTI additive offsets to gamma_th (dB); empty = constant.
  std::vector<double> gamma_th_offsets_db;

  void validate() const;  // throws std::invalid_argument naming the field
};

struct MetricsRecord {
  std::string scheme;
  double tx_snr_db = 0;
  double gamma_th_db = 0;
  double avg_rx_snr_db = 0;   // mean over trials of per-trial dB averages
  double ci95_snr_db = 0;
  double avg_searches = 0;
  double ci95_searches = 0;
  double alignment_rate = 0;
};

enum class ExecPolicy { Serial, Parallel };

// One record per (scheme, tx_snr, gamma_th). Per-trial seeds derive from
// master_seed, so every scheme and grid point sees identical channels.
std::vector<MetricsRecord> run_monte_carlo(const SimConfig& cfg,
                                           ExecPolicy policy = ExecPolicy::Parallel);

// Stable sort by (scheme, tx_snr, gamma_th).
std::vector<MetricsRecord> summarize(std::vector<MetricsRecord> records);

double lin_to_db(double lin);

}  // namespace ftbm
