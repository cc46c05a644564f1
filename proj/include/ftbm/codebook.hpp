// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// Flat-top-beam synthesis (sinc sampling + constant-modulus quantization +
// steering) and the multi-level hierarchical beam codebook.
//
// Codebook azimuths are measured from array broadside in degrees and are
// mapped to the raw angle convention exactly once, in
// AngleDirection::from_azimuth_deg.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftbm/array.hpp"

namespace ftbm {

struct BeamSpec {
  int level = 1;                  // 1..L, level 1 = narrow DFT beams
  int index = 1;                  // 1..K_l, ascending center azimuth
  double center_azimuth_deg = 0;  // from broadside
  double width_param = 0;         // sinc width a; unused (0) at level 1
  WeightMatrix weights;
};

struct LevelSpec {
  int count = 1;          // K_l
  double width_param = 0; // sinc width a for FTB levels; ignored at level 1
  double span_lo_deg = 0; // first beam center
  double span_hi_deg = 0; // last beam center
  // When > 0, sinc samples farther than truncation*a columns from the grid
  // center are zeroed before quantization.
  double truncation = 0;
};

struct FlatnessReport {
  double ripple_db = 0;      // max - min gain inside the flat region
  double flat_lo_deg = 0;    // flat region bounds, azimuth from broadside
  double flat_hi_deg = 0;
  double flat_width_deg = 0;
  double peak_gain_db = 0;   // 20*log10 max |AF|
};

class HierarchicalCodebook {
 public:
  HierarchicalCodebook(ArrayGeometry geom, std::vector<std::vector<BeamSpec>> levels,
                       std::vector<std::vector<std::vector<int>>> children);

  const ArrayGeometry& geometry() const { return geom_; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  int level_size(int level) const { return static_cast<int>(levels_[level - 1].size()); }
  int total_size() const;

  // level 1..L, index 1..K_l
  const BeamSpec& beam(int level, int index) const { return levels_[level - 1][index - 1]; }

  // Indices (1-based) of the level-l beams covered by beam `index` of level l+1.
  const std::vector<int>& children(int level, int index) const {
    return children_[level - 1][index - 1];
  }
  // Cached flatness scan of each beam (computed at construction).
  const FlatnessReport& flat(int level, int index) const { return flats_[level - 1][index - 1]; }
  // Beam at `level` whose flat region contains the azimuth (nearest center on ties
  // or when no region contains it).
  int covering_beam(int level, double azimuth_deg) const;
  // Parents at level l+1 whose coverage includes level-l beam `index`.
  std::vector<int> parents(int level, int index) const;
  // Single parent used for sweep seeding: the covering parent with the
  // nearest center (nearest center overall if none covers).
  int parent_of(int level, int index) const;

 private:
  ArrayGeometry geom_;
  std::vector<std::vector<BeamSpec>> levels_;
  std::vector<std::vector<std::vector<int>>> children_;  // [level-1][parent-1] -> child indices
  std::vector<std::vector<FlatnessReport>> flats_;
};

// Eq-driven sinc samples for the linear-equivalent FTB target, length n_h.
std::vector<double> sinc_linear_weights(int n_h, int n_v, double width_param);

// Column-wise constant-modulus quantization: per column, ceil(|w_l|) elements
// (clipped to n_v) with value sign(w_l), placed center-out from row n_v/2.
WeightMatrix quantize_to_ura(std::span<const double> w_l, int n_v);

// Entrywise product with the conjugate steering phase grid, so that the
// resulting beam's array factor peaks at `target`.
WeightMatrix steer_beam(const WeightMatrix& w, const ArrayGeometry& geom,
                        const AngleDirection& target);

WeightMatrix dft_beam(const ArrayGeometry& geom, const AngleDirection& target);

// Centered (unsteered) FTB prototype for a level spec.
WeightMatrix ftb_prototype(const ArrayGeometry& geom, double width_param, double truncation = 0);

HierarchicalCodebook build_codebook(const ArrayGeometry& geom,
                                    const std::vector<LevelSpec>& level_specs);

// |AF|^2 scan over azimuth at theta = pi/2. The flat region is the widest
// contiguous run of samples within 3 dB of the peak.
FlatnessReport flatness_report(const BeamSpec& spec, const ArrayGeometry& geom,
                               double grid_step_deg = 0.05);
FlatnessReport flatness_report(const WeightMatrix& w, const ArrayGeometry& geom,
                               double grid_step_deg = 0.05);

// Structured-text (JSON) export/import; bit-exact round trip.
std::string codebook_to_json(const HierarchicalCodebook& cb);
HierarchicalCodebook codebook_from_json(const std::string& text);

}  // namespace ftbm
