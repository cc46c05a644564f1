// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#include "ftbm/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ftbm {

namespace {
using nlohmann::json;

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key '") + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_results: cannot write " + path.string());
  out << body;
}
}  // namespace

SimConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  reject_unknown(doc, "top level",
                 {"master_seed", "n_trials", "n_ttis_per_trial", "tx_snr_db",
                  "gamma_th_db_grid", "schemes", "array", "codebook", "clusters",
                  "drift_deg_std", "max_init_cts", "ftb_prune", "prune_backoff_db",
                  "gamma_th_offsets_db"});
  SimConfig cfg;
  read(doc, "master_seed", cfg.master_seed);
  read(doc, "n_trials", cfg.n_trials);
  read(doc, "n_ttis_per_trial", cfg.n_ttis_per_trial);
  read(doc, "tx_snr_db", cfg.tx_snr_db);
  read(doc, "gamma_th_db_grid", cfg.gamma_th_db_grid);
  read(doc, "schemes", cfg.schemes);
  read(doc, "drift_deg_std", cfg.drift_deg_std);
  read(doc, "max_init_cts", cfg.max_init_cts);
  read(doc, "ftb_prune", cfg.ftb_prune);
  read(doc, "prune_backoff_db", cfg.prune_backoff_db);
  read(doc, "gamma_th_offsets_db", cfg.gamma_th_offsets_db);
  if (doc.contains("array")) {
    const json& a = doc.at("array");
    reject_unknown(a, "array", {"m_bs", "n_h", "n_v", "spacing", "n_ue", "ue_spacing"});
    read(a, "m_bs", cfg.array.m_bs);
    read(a, "n_h", cfg.array.n_h);
    read(a, "n_v", cfg.array.n_v);
    read(a, "spacing", cfg.array.spacing);
    read(a, "n_ue", cfg.array.n_ue);
    read(a, "ue_spacing", cfg.array.ue_spacing);
  }
  if (doc.contains("codebook")) {
    const json& c = doc.at("codebook");
    reject_unknown(c, "codebook", {"levels"});
    if (c.contains("levels")) {
      cfg.codebook.levels.clear();
      for (const json& lvl : c.at("levels")) {
        reject_unknown(lvl, "codebook.levels[]",
                       {"count", "width_param", "span_lo_deg", "span_hi_deg", "truncation"});
        LevelSpec spec;
        read(lvl, "count", spec.count);
        read(lvl, "width_param", spec.width_param);
        read(lvl, "span_lo_deg", spec.span_lo_deg);
        read(lvl, "span_hi_deg", spec.span_hi_deg);
        read(lvl, "truncation", spec.truncation);
        cfg.codebook.levels.push_back(spec);
      }
    }
  }
  if (doc.contains("clusters")) {
    const json& c = doc.at("clusters");
    reject_unknown(c, "clusters",
                   {"n_clusters", "n_subpaths", "carrier_hz", "power_decay", "angle_spread_deg",
                    "delay_spread_s", "az_lo_deg", "az_hi_deg", "incl_lo_deg", "incl_hi_deg",
                    "redraw_delays"});
    read(c, "n_clusters", cfg.clusters.n_clusters);
    read(c, "n_subpaths", cfg.clusters.n_subpaths);
    read(c, "carrier_hz", cfg.clusters.carrier_hz);
    read(c, "power_decay", cfg.clusters.power_decay);
    read(c, "angle_spread_deg", cfg.clusters.angle_spread_deg);
    read(c, "delay_spread_s", cfg.clusters.delay_spread_s);
    read(c, "az_lo_deg", cfg.clusters.az_lo_deg);
    read(c, "az_hi_deg", cfg.clusters.az_hi_deg);
    read(c, "incl_lo_deg", cfg.clusters.incl_lo_deg);
    read(c, "incl_hi_deg", cfg.clusters.incl_hi_deg);
    read(c, "redraw_delays", cfg.clusters.redraw_delays);
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const SimConfig& cfg) {
  json levels = json::array();
  for (const LevelSpec& lvl : cfg.codebook.levels)
    levels.push_back({{"count", lvl.count},
                      {"width_param", lvl.width_param},
                      {"span_lo_deg", lvl.span_lo_deg},
                      {"span_hi_deg", lvl.span_hi_deg},
                      {"truncation", lvl.truncation}});
  json doc = {
      {"master_seed", cfg.master_seed},
      {"n_trials", cfg.n_trials},
      {"n_ttis_per_trial", cfg.n_ttis_per_trial},
      {"tx_snr_db", cfg.tx_snr_db},
      {"gamma_th_db_grid", cfg.gamma_th_db_grid},
      {"schemes", cfg.schemes},
      {"array",
       {{"m_bs", cfg.array.m_bs},
        {"n_h", cfg.array.n_h},
        {"n_v", cfg.array.n_v},
        {"spacing", cfg.array.spacing},
        {"n_ue", cfg.array.n_ue},
        {"ue_spacing", cfg.array.ue_spacing}}},
      {"codebook", {{"levels", std::move(levels)}}},
      {"clusters",
       {{"n_clusters", cfg.clusters.n_clusters},
        {"n_subpaths", cfg.clusters.n_subpaths},
        {"carrier_hz", cfg.clusters.carrier_hz},
        {"power_decay", cfg.clusters.power_decay},
        {"angle_spread_deg", cfg.clusters.angle_spread_deg},
        {"delay_spread_s", cfg.clusters.delay_spread_s},
        {"az_lo_deg", cfg.clusters.az_lo_deg},
        {"az_hi_deg", cfg.clusters.az_hi_deg},
        {"incl_lo_deg", cfg.clusters.incl_lo_deg},
        {"incl_hi_deg", cfg.clusters.incl_hi_deg},
        {"redraw_delays", cfg.clusters.redraw_delays}}},
      {"drift_deg_std", cfg.drift_deg_std},
      {"max_init_cts", cfg.max_init_cts},
      {"ftb_prune", cfg.ftb_prune},
      {"prune_backoff_db", cfg.prune_backoff_db},
      {"gamma_th_offsets_db", cfg.gamma_th_offsets_db},
  };
  return doc.dump(2);
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string snr_csv(const std::vector<MetricsRecord>& records) {
  std::string out = "scheme,tx_snr_db,gamma_th_db,avg_rx_snr_db,ci95_db,alignment_rate\n";
  for (const MetricsRecord& r : records)
    out += r.scheme + "," + fmt6(r.tx_snr_db) + "," + fmt6(r.gamma_th_db) + "," +
           fmt6(r.avg_rx_snr_db) + "," + fmt6(r.ci95_snr_db) + "," + fmt6(r.alignment_rate) +
           "\n";
  return out;
}

std::string searches_csv(const std::vector<MetricsRecord>& records) {
  std::string out = "scheme,tx_snr_db,gamma_th_db,avg_searches,ci95\n";
  for (const MetricsRecord& r : records)
    out += r.scheme + "," + fmt6(r.tx_snr_db) + "," + fmt6(r.gamma_th_db) + "," +
           fmt6(r.avg_searches) + "," + fmt6(r.ci95_searches) + "\n";
  return out;
}

std::string manifest_to_json(const RunManifest& manifest) {
  json doc = {
      {"version", manifest.version},
      {"master_seed", manifest.master_seed},
      {"runtime_s", manifest.runtime_s},
      {"files", manifest.files},
      {"config", json::parse(manifest.config_json)},
      {"notes", "paired per-trial seeds shared across schemes and grid points"},
  };
  return doc.dump(2);
}

RunManifest emit_results(const std::vector<MetricsRecord>& records, const std::string& out_dir,
                         const SimConfig& cfg, double runtime_s) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::is_directory(out_dir))
    throw std::runtime_error("emit_results: cannot create " + out_dir);

  RunManifest manifest;
  manifest.version = kToolVersion;
  manifest.master_seed = cfg.master_seed;
  manifest.runtime_s = runtime_s;
  manifest.config_json = config_to_json(cfg);
  manifest.files = {"snr_vs_threshold.csv", "searches_vs_threshold.csv"};

  const fs::path dir(out_dir);
  write_file(dir / "snr_vs_threshold.csv", snr_csv(records));
  write_file(dir / "searches_vs_threshold.csv", searches_csv(records));
  write_file(dir / "manifest.json", manifest_to_json(manifest) + "\n");
  return manifest;
}

}  // namespace ftbm
