// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#include "ftbm/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace ftbm {

namespace {
constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

std::vector<double> level_centers(const LevelSpec& spec) {
  std::vector<double> centers(spec.count);
  if (spec.count == 1) {
    centers[0] = 0.5 * (spec.span_lo_deg + spec.span_hi_deg);
  } else {
    const double pitch = (spec.span_hi_deg - spec.span_lo_deg) / (spec.count - 1);
    for (int k = 0; k < spec.count; ++k) centers[k] = spec.span_lo_deg + k * pitch;
  }
  return centers;
}
}  // namespace

std::vector<double> sinc_linear_weights(int n_h, int n_v, double width_param) {
  if (width_param <= 0.0) throw std::invalid_argument("sinc_linear_weights: width_param must be > 0");
  const double center = (n_v % 2 == 0) ? 0.5 * (n_v - 1) : 0.5 * n_v;
  std::vector<double> w(n_h);
  for (int n = 0; n < n_h; ++n) w[n] = n_h * sinc((n - center) / width_param);
  return w;
}

WeightMatrix quantize_to_ura(std::span<const double> w_l, int n_v) {
  const int n_h = static_cast<int>(w_l.size());
  CMat grid = CMat::Zero(n_v, n_h);
  for (int n = 0; n < n_h; ++n) {
    const double mag = std::abs(w_l[n]);
    if (mag > n_v + 1e-9)
      throw std::invalid_argument("quantize_to_ura: |w_l| exceeds the column element count");
    const int count = std::min<int>(n_v, static_cast<int>(std::ceil(mag - 1e-12)));
    if (count <= 0) continue;
    const double sign = w_l[n] < 0.0 ? -1.0 : 1.0;
    // Center-out placement: n_v/2, then alternately one row up, one row down.
    const int center = n_v / 2;
    grid(center, n) = sign;
    int placed = 1;
    for (int off = 1; placed < count; ++off) {
      if (center - off >= 0 && placed < count) { grid(center - off, n) = sign; ++placed; }
      if (center + off < n_v && placed < count) { grid(center + off, n) = sign; ++placed; }
    }
  }
  return WeightMatrix(std::move(grid));
}

WeightMatrix steer_beam(const WeightMatrix& w, const ArrayGeometry& geom,
                        const AngleDirection& target) {
  if (w.n_h() != geom.n_h || w.n_v() != geom.n_v)
    throw std::invalid_argument("steer_beam: weight grid does not match geometry");
  const double scale = 2.0 * kPi * geom.spacing;
  const double vert = scale * std::cos(target.theta);
  const double horiz = scale * std::sin(target.theta) * std::cos(target.phi);
  CMat grid = w.grid();
  for (int n = 0; n < geom.n_h; ++n) {
    for (int m = 0; m < geom.n_v; ++m) {
      const double phase = -(m * vert + n * horiz);
      grid(m, n) *= cplx{std::cos(phase), std::sin(phase)};
    }
  }
  return WeightMatrix(std::move(grid));
}

WeightMatrix dft_beam(const ArrayGeometry& geom, const AngleDirection& target) {
  return steer_beam(WeightMatrix::ones(geom.n_h, geom.n_v), geom, target);
}

WeightMatrix ftb_prototype(const ArrayGeometry& geom, double width_param, double truncation) {
  std::vector<double> w_l = sinc_linear_weights(geom.n_h, geom.n_v, width_param);
  if (truncation > 0.0) {
    const double center = 0.5 * (geom.n_h - 1);
    for (int n = 0; n < geom.n_h; ++n)
      if (std::abs(n - center) > truncation * width_param) w_l[n] = 0.0;
  }
  return quantize_to_ura(w_l, geom.n_v);
}

FlatnessReport flatness_report(const WeightMatrix& w, const ArrayGeometry& geom,
                               double grid_step_deg) {
  const int n = static_cast<int>(std::floor(180.0 / grid_step_deg)) + 1;
  std::vector<double> gain_db(n);
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double az = -90.0 + i * grid_step_deg;
    const double mag = std::abs(array_factor(geom, w, AngleDirection::from_azimuth_deg(az)));
    gain_db[i] = 20.0 * std::log10(std::max(mag, 1e-12));
    peak = std::max(peak, gain_db[i]);
  }
  // Widest contiguous run within 3 dB of the peak.
  int best_lo = 0, best_hi = -1;
  for (int i = 0; i < n;) {
    if (gain_db[i] >= peak - 3.0) {
      int j = i;
      while (j + 1 < n && gain_db[j + 1] >= peak - 3.0) ++j;
      if (j - i > best_hi - best_lo) { best_lo = i; best_hi = j; }
      i = j + 1;
    } else {
      ++i;
    }
  }
  FlatnessReport rep;
  rep.peak_gain_db = peak;
  rep.flat_lo_deg = -90.0 + best_lo * grid_step_deg;
  rep.flat_hi_deg = -90.0 + best_hi * grid_step_deg;
  rep.flat_width_deg = rep.flat_hi_deg - rep.flat_lo_deg;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = best_lo; i <= best_hi; ++i) lo = std::min(lo, gain_db[i]);
  rep.ripple_db = peak - lo;
  return rep;
}

FlatnessReport flatness_report(const BeamSpec& spec, const ArrayGeometry& geom,
                               double grid_step_deg) {
  return flatness_report(spec.weights, geom, grid_step_deg);
}

HierarchicalCodebook::HierarchicalCodebook(ArrayGeometry geom,
                                           std::vector<std::vector<BeamSpec>> levels,
                                           std::vector<std::vector<std::vector<int>>> children)
    : geom_(geom), levels_(std::move(levels)), children_(std::move(children)) {
  for (const auto& lvl : levels_) {
    for (std::size_t k = 1; k < lvl.size(); ++k)
      if (lvl[k].center_azimuth_deg <= lvl[k - 1].center_azimuth_deg)
        throw std::invalid_argument("HierarchicalCodebook: level angles must be strictly increasing");
  }
  // Every non-top angle must be covered by at least one parent.
  for (std::size_t l = 0; l + 1 < levels_.size(); ++l) {
    std::vector<bool> covered(levels_[l].size(), false);
    for (const auto& kids : children_[l])
      for (int c : kids) covered[c - 1] = true;
    for (std::size_t k = 0; k < covered.size(); ++k)
      if (!covered[k])
        throw std::invalid_argument("HierarchicalCodebook: level " + std::to_string(l + 1) +
                                    " beam " + std::to_string(k + 1) + " has no covering parent");
  }
  for (const auto& lvl : levels_) {
    std::vector<FlatnessReport> reps;
    reps.reserve(lvl.size());
    for (const BeamSpec& b : lvl) reps.push_back(flatness_report(b, geom_));
    flats_.push_back(std::move(reps));
  }
}

int HierarchicalCodebook::covering_beam(int level, double azimuth_deg) const {
  std::vector<int> cand;
  for (int k = 1; k <= level_size(level); ++k) {
    const FlatnessReport& rep = flat(level, k);
    if (azimuth_deg >= rep.flat_lo_deg && azimuth_deg <= rep.flat_hi_deg) cand.push_back(k);
  }
  if (cand.empty())
    for (int k = 1; k <= level_size(level); ++k) cand.push_back(k);
  int best = cand.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (int k : cand) {
    const double d = std::abs(beam(level, k).center_azimuth_deg - azimuth_deg);
    if (d < best_d) { best_d = d; best = k; }
  }
  return best;
}

int HierarchicalCodebook::total_size() const {
  int n = 0;
  for (const auto& lvl : levels_) n += static_cast<int>(lvl.size());
  return n;
}

std::vector<int> HierarchicalCodebook::parents(int level, int index) const {
  std::vector<int> out;
  const auto& maps = children_[level - 1];
  for (std::size_t p = 0; p < maps.size(); ++p)
    if (std::find(maps[p].begin(), maps[p].end(), index) != maps[p].end())
      out.push_back(static_cast<int>(p) + 1);
  return out;
}

int HierarchicalCodebook::parent_of(int level, int index) const {
  const double az = beam(level, index).center_azimuth_deg;
  std::vector<int> cand = parents(level, index);
  if (cand.empty()) {
    cand.resize(level_size(level + 1));
    for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = static_cast<int>(i) + 1;
  }
  int best = cand.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (int p : cand) {
    const double d = std::abs(beam(level + 1, p).center_azimuth_deg - az);
    if (d < best_d) { best_d = d; best = p; }
  }
  return best;
}

HierarchicalCodebook build_codebook(const ArrayGeometry& geom,
                                    const std::vector<LevelSpec>& level_specs) {
  if (level_specs.empty()) throw std::invalid_argument("build_codebook: no levels");
  std::vector<std::vector<BeamSpec>> levels;
  for (std::size_t l = 0; l < level_specs.size(); ++l) {
    const LevelSpec& spec = level_specs[l];
    if (spec.count < 1) throw std::invalid_argument("build_codebook: level count must be >= 1");
    std::vector<BeamSpec> beams;
    const std::vector<double> centers = level_centers(spec);
    for (int k = 0; k < spec.count; ++k) {
      const AngleDirection target = AngleDirection::from_azimuth_deg(centers[k]);
      WeightMatrix w = (l == 0)
                           ? dft_beam(geom, target)
                           : steer_beam(ftb_prototype(geom, spec.width_param, spec.truncation),
                                        geom, target);
      beams.push_back(BeamSpec{static_cast<int>(l) + 1, k + 1, centers[k],
                               l == 0 ? 0.0 : spec.width_param, std::move(w)});
    }
    levels.push_back(std::move(beams));
  }

  // Child maps: a level-l angle is a child of a level-(l+1) beam iff it lies
  // inside that beam's flat region.
  std::vector<std::vector<std::vector<int>>> children;
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    std::vector<std::vector<int>> maps(levels[l + 1].size());
    for (std::size_t p = 0; p < levels[l + 1].size(); ++p) {
      const FlatnessReport rep = flatness_report(levels[l + 1][p], geom);
      for (std::size_t k = 0; k < levels[l].size(); ++k) {
        const double az = levels[l][k].center_azimuth_deg;
        if (az >= rep.flat_lo_deg && az <= rep.flat_hi_deg)
          maps[p].push_back(static_cast<int>(k) + 1);
      }
    }
    children.push_back(std::move(maps));
  }
  return HierarchicalCodebook(geom, std::move(levels), std::move(children));
}

std::string codebook_to_json(const HierarchicalCodebook& cb) {
  nlohmann::json doc;
  doc["array"] = {{"kind", cb.geometry().kind == ArrayKind::URA ? "URA" : "ULA"},
                  {"n_h", cb.geometry().n_h},
                  {"n_v", cb.geometry().n_v},
                  {"spacing", cb.geometry().spacing}};
  nlohmann::json beams = nlohmann::json::array();
  for (int l = 1; l <= cb.num_levels(); ++l) {
    for (int k = 1; k <= cb.level_size(l); ++k) {
      const BeamSpec& b = cb.beam(l, k);
      nlohmann::json weights = nlohmann::json::array();
      for (int col = 0; col < b.weights.n_h(); ++col)
        for (int row = 0; row < b.weights.n_v(); ++row) {
          const cplx w = b.weights.grid()(row, col);
          if (w != cplx{0.0, 0.0})
            weights.push_back({row, col, w.real(), w.imag()});
        }
      beams.push_back({{"level", b.level},
                       {"index", b.index},
                       {"center_azimuth_deg", b.center_azimuth_deg},
                       {"width_param", b.width_param},
                       {"weights", std::move(weights)}});
    }
  }
  doc["beams"] = std::move(beams);
  nlohmann::json children = nlohmann::json::array();
  for (int l = 1; l < cb.num_levels(); ++l) {
    nlohmann::json maps = nlohmann::json::array();
    for (int k = 1; k <= cb.level_size(l + 1); ++k) maps.push_back(cb.children(l, k));
    children.push_back(std::move(maps));
  }
  doc["children"] = std::move(children);
  return doc.dump(2);
}

HierarchicalCodebook codebook_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  const auto& arr = doc.at("array");
  ArrayGeometry geom = ArrayGeometry::ura(arr.at("n_h").get<int>(), arr.at("n_v").get<int>(),
                                          arr.at("spacing").get<double>());
  std::vector<std::vector<BeamSpec>> levels;
  for (const auto& b : doc.at("beams")) {
    const int level = b.at("level").get<int>();
    CMat grid = CMat::Zero(geom.n_v, geom.n_h);
    for (const auto& t : b.at("weights"))
      grid(t.at(0).get<int>(), t.at(1).get<int>()) = cplx{t.at(2).get<double>(), t.at(3).get<double>()};
    if (static_cast<int>(levels.size()) < level) levels.resize(level);
    levels[level - 1].push_back(BeamSpec{level, b.at("index").get<int>(),
                                         b.at("center_azimuth_deg").get<double>(),
                                         b.at("width_param").get<double>(),
                                         WeightMatrix(std::move(grid))});
  }
  for (auto& lvl : levels)
    std::sort(lvl.begin(), lvl.end(), [](const BeamSpec& a, const BeamSpec& b) { return a.index < b.index; });
  std::vector<std::vector<std::vector<int>>> children;
  for (const auto& lvl : doc.at("children"))
    children.push_back(lvl.get<std::vector<std::vector<int>>>());
  return HierarchicalCodebook(geom, std::move(levels), std::move(children));
}

}  // namespace ftbm
