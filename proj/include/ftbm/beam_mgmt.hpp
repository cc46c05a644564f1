// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// Protocol core: initialization sweep, zig-zag angle ordering, UL + 3-level
// DL beam management, SNR measurements, MRT precoder, and the benchmark
// schemes (exhaustive, only-UL, DL-assisted-UL).
//
// A "search" is one CTS-level SNR measurement; the M_bs AiPs are measured in
// parallel within a CTS and count as one.

#pragma once

#include <string>
#include <vector>

#include "ftbm/channel.hpp"
#include "ftbm/codebook.hpp"

namespace ftbm {

struct LinkBudget {
  double tx_power = 1.0;      // P (linear)
  double noise_var = 1.0;     // sigma^2 (linear)
  double snr_threshold = 1.0; // gamma_th (linear)

  static LinkBudget from_db(double tx_snr_db, double gamma_th_db);
};

// Per-AiP protocol state carried across TTIs.
struct BmState {
  std::vector<int> nu;          // selected level-1 angle index per AiP (1-based)
  CVec precoder;                // MRT precoder from the latest data phase
  bool has_precoder = false;
  bool aligned = false;         // outcome of the latest TTI
  int cts_counter = 0;          // CTSs consumed in the latest TTI
  // gamma measured for (AiP, level-1 angle) in the latest TTI; NaN = unmeasured.
  std::vector<std::vector<double>> snr_cache;
};

struct TtiResult {
  bool aligned = false;
  std::vector<int> beams;       // final level-1 index per AiP
  int searches = 0;
  double achieved_snr = 0.0;    // sum over AiPs, linear
  std::string scheme;
};

struct BmOptions {
  // Extension (off by default): measure each wide FTB on entry and skip its
  // subtree when the summed SNR falls below gamma_th minus the back-off.
  bool ftb_prune = false;
  double prune_backoff_db = 3.0;
};

// Zig-zag sweep order around nu: nu+1, nu-1, nu+2, ...; an out-of-range
// candidate flips via mu <- -mu - min(0, sign(mu)) and the sweep continues
// monotonically toward the other boundary. nu == card descends card-1 .. 1.
// Returns every index in 1..card except nu, exactly once.
std::vector<int> sweep_sequence(int card, int nu);

// gamma = P |u^H H_i v|^2 / (sigma^2 ||u||^2); ||u||^2 = active element count.
double measure_snr(const CVec& u, const Eigen::Ref<const CMat>& H_i, const CVec& v,
                   const LinkBudget& budget);

// MRC over UE branches: gamma = P ||H_i^H u||^2 / (sigma^2 ||u||^2).
double mrc_init_snr(const CVec& u, const Eigen::Ref<const CMat>& H_i, const LinkBudget& budget);

// Dominant left singular vector of the N_ue x M_bs effective channel, unit
// norm, first nonzero component rotated real-positive.
CVec mrt_precoder(const CMat& effective);

// Per-TTI cache of the beamformed channel h_{i,b} = H_i^H u_b for every
// codebook beam, shared by every scheme run on the same realization.
class BeamSpace {
 public:
  BeamSpace(const HierarchicalCodebook& cb, const ChannelRealization& ch);

  const HierarchicalCodebook& codebook() const { return *cb_; }
  int m_bs() const { return m_bs_; }

  double snr(int aip, int level, int index, const CVec& v, const LinkBudget& budget) const;
  double mrc_snr(int aip, int level, int index, const LinkBudget& budget) const;
  // Columns H_i^H u_{b_i} for the given per-AiP level-1 beams.
  CMat effective(const std::vector<int>& beams) const;

 private:
  int id(int level, int index) const { return offset_[level - 1] + index - 1; }

  const HierarchicalCodebook* cb_;
  int m_bs_ = 1;
  std::vector<int> offset_;
  std::vector<std::vector<CVec>> proj_;  // [aip][beam id]
  std::vector<double> active_;           // ||u||^2 per beam id
};

// Initialization sweep: every AiP sounds the same ascending level-1 angle per
// CTS with MRC at the UE; stops at the first CTS where the best cached
// configuration meets gamma_th, or at max_cts (0 = K_1).
std::pair<BmState, TtiResult> initialize(const BeamSpace& bs, const LinkBudget& budget,
                                         int max_cts = 0);
std::pair<BmState, TtiResult> initialize(const HierarchicalCodebook& cb,
                                         const ChannelRealization& ch, const LinkBudget& budget,
                                         int max_cts = 0);

// One beam-management TTI: 4-CTS UL sweep, then the hierarchical DL descent
// over the level-1 angles not yet swept; falls back to the best beams found.
TtiResult run_tti(BmState& state, const BeamSpace& bs, const LinkBudget& budget,
                  const BmOptions& opts = {});
TtiResult run_tti(BmState& state, const HierarchicalCodebook& cb, const ChannelRealization& ch,
                  const LinkBudget& budget, const BmOptions& opts = {});

// Benchmarks.
TtiResult exhaustive_search(const BeamSpace& bs, const LinkBudget& budget);
TtiResult exhaustive_search(const HierarchicalCodebook& cb, const ChannelRealization& ch,
                            const LinkBudget& budget);
TtiResult only_ul(BmState& state, const BeamSpace& bs, const LinkBudget& budget);
TtiResult only_ul(BmState& state, const HierarchicalCodebook& cb, const ChannelRealization& ch,
                  const LinkBudget& budget);
TtiResult dl_assisted_ul(BmState& state, const BeamSpace& bs, const LinkBudget& budget);
TtiResult dl_assisted_ul(BmState& state, const HierarchicalCodebook& cb,
                         const ChannelRealization& ch, const LinkBudget& budget);

}  // namespace ftbm
