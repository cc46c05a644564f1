// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// Config loading (strict schema: unknown keys rejected) and deterministic
// result emission. CSV headers and the fixed 6-decimal numeric format are a
// compatibility contract.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftbm/sim.hpp"

namespace ftbm {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string version;
  std::uint64_t master_seed = 0;
  double runtime_s = 0;
  std::vector<std::string> files;   // every emitted data file, exactly once
  std::string config_json;          // echo of the effective config
};

SimConfig config_from_json(const std::string& text);
std::string config_to_json(const SimConfig& cfg);

// Reads and validates a config file; missing keys take defaults.
SimConfig load_config(const std::string& path);

// Writes snr_vs_threshold.csv, searches_vs_threshold.csv and manifest.json
// into out_dir (created if needed).
RunManifest emit_results(const std::vector<MetricsRecord>& records, const std::string& out_dir,
                         const SimConfig& cfg, double runtime_s);

std::string manifest_to_json(const RunManifest& manifest);

// CSV bodies (header + one row per record), used by emit_results.
std::string snr_csv(const std::vector<MetricsRecord>& records);
std::string searches_csv(const std::vector<MetricsRecord>& records);

}  // namespace ftbm
