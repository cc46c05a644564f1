// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// Clustered mmWave MIMO channel: K clusters of L sub-paths, each a rank-1
// outer product of array responses scaled by sqrt(P) exp(-j 2 pi tau f_c).
// The base station is a row of co-planar AiP sub-panels; the stacked channel
// H = [H_1; ...; H_M] is generated from the full panel so that block i uses
// the element positions of sub-panel i.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "ftbm/array.hpp"

namespace ftbm {

struct ClusterParams {
  int n_clusters = 4;
  int n_subpaths = 10;
  double carrier_hz = 28e9;
  double power_decay = 1.0;       // e-fold decay rate across cluster index
  double angle_spread_deg = 5.0;  // per-cluster sub-path angular std
  double delay_spread_s = 100e-9; // delays uniform in [0, delay_spread_s]
  double az_lo_deg = -60.0;       // cluster center azimuth range (from broadside)
  double az_hi_deg = 60.0;
  double incl_lo_deg = 80.0;      // cluster center inclination range (theta, deg)
  double incl_hi_deg = 100.0;
  bool redraw_delays = true;      // evolve_channel redraws delays (fresh phases)

  void validate() const;
};

// M_bs co-planar AiP sub-panels of n_h x n_v elements tiled horizontally.
struct BsArrayLayout {
  int m_bs = 2;
  int n_h = 16;
  int n_v = 16;
  double spacing = 0.5;

  ArrayGeometry panel() const { return ArrayGeometry::ura(n_h, n_v, spacing); }
  ArrayGeometry full() const { return ArrayGeometry::ura(m_bs * n_h, n_v, spacing); }
  int panel_size() const { return n_h * n_v; }
};

struct PathRecord {
  int cluster = 0;   // k, 0-based
  int subpath = 0;   // l, 0-based
  double power = 0;  // P_{k,l}
  double delay = 0;  // tau_{k,l} [s]
  AngleDirection bs_dir;  // arrival at the BS
  AngleDirection ue_dir;  // departure at the UE
  cplx gain;              // sqrt(P) exp(-j 2 pi tau f_c)
};

struct ChannelRealization {
  std::vector<PathRecord> paths;
  CMat H;  // N_bs x N_ue, rows stacked per AiP
  int m_bs = 1;

  int block_rows() const { return static_cast<int>(H.rows()) / m_bs; }
  // H_i, the rows belonging to AiP i (0-based).
  Eigen::Block<const CMat> block(int i) const {
    return H.block(i * block_rows(), 0, block_rows(), H.cols());
  }
};

ChannelRealization draw_channel(const ClusterParams& params, const BsArrayLayout& bs,
                                const ArrayGeometry& ue, std::mt19937_64& rng);

// Gaussian random-walk on all path angles; powers kept; delays redrawn when
// params.redraw_delays is set.
ChannelRealization evolve_channel(const ChannelRealization& real, const ClusterParams& params,
                                  const BsArrayLayout& bs, const ArrayGeometry& ue,
                                  double drift_deg_std, std::mt19937_64& rng);

// H^H U_RF with the block-diagonal analog combiner: column i = H_i^H u_i.
CMat beamformed_channel(const ChannelRealization& real, const std::vector<CVec>& analog_beams);

// Rebuild H from the path list (the reconstruction invariant / replay path).
CMat assemble_channel(const std::vector<PathRecord>& paths, const BsArrayLayout& bs,
                      const ArrayGeometry& ue);

// Structured-text dump of the path list; replay reproduces H bit-exactly.
std::string channel_to_json(const ChannelRealization& real, const ClusterParams& params,
                            const BsArrayLayout& bs, const ArrayGeometry& ue);
ChannelRealization channel_from_json(const std::string& text, BsArrayLayout* bs_out = nullptr,
                                     ArrayGeometry* ue_out = nullptr);

}  // namespace ftbm
