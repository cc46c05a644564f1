// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors
//
// ftbm CLI: codebook build/export/inspect, Monte Carlo simulation, sweep
// order tracing, and channel realization dumps.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ftbm/beam_mgmt.hpp"
#include "ftbm/channel.hpp"
#include "ftbm/codebook.hpp"
#include "ftbm/io.hpp"
#include "ftbm/sim.hpp"

namespace {

using namespace ftbm;

void write_output(const std::string& out, const std::string& body) {
  if (out.empty() || out == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << body;
}

SimConfig config_or_default(const std::string& path) {
  return path.empty() ? SimConfig{} : load_config(path);
}

HierarchicalCodebook codebook_for(const SimConfig& cfg) {
  return build_codebook(cfg.array.bs_layout().panel(), cfg.codebook.levels);
}

int cmd_codebook_build(const std::string& config, const std::string& out) {
  write_output(out, codebook_to_json(codebook_for(config_or_default(config))) + "\n");
  return 0;
}

int cmd_codebook_export(const std::string& config, const std::string& out, double step_deg) {
  const SimConfig cfg = config_or_default(config);
  const HierarchicalCodebook cb = codebook_for(cfg);
  const ArrayGeometry geom = cb.geometry();
  std::string body = "level,index,azimuth_deg,gain_db\n";
  char buf[128];
  for (int l = 1; l <= cb.num_levels(); ++l) {
    for (int k = 1; k <= cb.level_size(l); ++k) {
      const WeightMatrix& w = cb.beam(l, k).weights;
      for (double az = -90.0; az <= 90.0 + 1e-9; az += step_deg) {
        const double mag =
            std::abs(array_factor(geom, w, AngleDirection::from_azimuth_deg(az)));
        const double gain_db = 20.0 * std::log10(std::max(mag, 1e-12));
        std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f\n", l, k, az, gain_db);
        body += buf;
      }
    }
  }
  write_output(out, body);
  return 0;
}

int cmd_codebook_inspect(const std::string& config) {
  const SimConfig cfg = config_or_default(config);
  const HierarchicalCodebook cb = codebook_for(cfg);
  std::printf("levels=%d beams=%d\n", cb.num_levels(), cb.total_size());
  for (int l = 1; l <= cb.num_levels(); ++l) {
    for (int k = 1; k <= cb.level_size(l); ++k) {
      const BeamSpec& b = cb.beam(l, k);
      const FlatnessReport& rep = cb.flat(l, k);
      std::printf(
          "level=%d index=%d center_deg=%.2f width_param=%.2f active=%d "
          "flat=[%.2f,%.2f] ripple_db=%.2f peak_db=%.2f\n",
          l, k, b.center_azimuth_deg, b.width_param, b.weights.active_count(), rep.flat_lo_deg,
          rep.flat_hi_deg, rep.ripple_db, rep.peak_gain_db);
    }
  }
  return 0;
}

int cmd_simulate(const std::string& config, const std::string& out, bool serial) {
  const SimConfig cfg = load_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<MetricsRecord> records =
      run_monte_carlo(cfg, serial ? ExecPolicy::Serial : ExecPolicy::Parallel);
  const double runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit_results(records, out, cfg, runtime_s);
  std::printf("wrote %zu records to %s in %.2f s\n", records.size(), out.c_str(), runtime_s);
  return 0;
}

int cmd_sweep_trace(int card, int nu) {
  const std::vector<int> seq = sweep_sequence(card, nu);
  std::string line;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) line += " ";
    line += std::to_string(seq[i]);
  }
  std::printf("%s\n", line.c_str());
  return 0;
}

int cmd_channel_draw(const std::string& config, std::uint64_t seed, const std::string& out) {
  const SimConfig cfg = config_or_default(config);
  std::mt19937_64 rng(seed);
  const BsArrayLayout bs = cfg.array.bs_layout();
  const ArrayGeometry ue = cfg.array.ue_geometry();
  const ChannelRealization ch = draw_channel(cfg.clusters, bs, ue, rng);
  write_output(out, channel_to_json(ch, cfg.clusters, bs, ue) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flat-top-beam codebook and uplink beam-management simulator"};
  app.require_subcommand(1);

  std::string config, out;
  double step_deg = 0.5;
  bool serial = false;
  int card = 17, nu = 1;
  std::uint64_t seed = 1;

  CLI::App* codebook = app.add_subcommand("codebook", "codebook operations");
  codebook->require_subcommand(1);
  CLI::App* cb_build = codebook->add_subcommand("build", "build and dump the codebook as JSON");
  cb_build->add_option("--config", config, "simulation config file");
  cb_build->add_option("--out", out, "output file (default stdout)");
  CLI::App* cb_export =
      codebook->add_subcommand("export", "dump beam patterns over an azimuth grid as CSV");
  cb_export->add_option("--config", config, "simulation config file");
  cb_export->add_option("--out", out, "output file (default stdout)");
  cb_export->add_option("--step", step_deg, "azimuth grid step in degrees")
      ->check(CLI::PositiveNumber);
  CLI::App* cb_inspect = codebook->add_subcommand("inspect", "list the codebook beams");
  cb_inspect->add_option("--config", config, "simulation config file");

  CLI::App* simulate = app.add_subcommand("simulate", "run the Monte Carlo sweep");
  simulate->add_option("--config", config, "simulation config file")->required();
  simulate->add_option("--out", out, "output directory")->required();
  simulate->add_flag("--serial", serial, "disable trial-level parallelism");

  CLI::App* trace = app.add_subcommand("sweep-trace", "print the zig-zag sweep order");
  trace->add_option("--card", card, "level cardinality")->required();
  trace->add_option("--nu", nu, "previous index")->required();

  CLI::App* channel = app.add_subcommand("channel", "channel operations");
  channel->require_subcommand(1);
  CLI::App* ch_draw = channel->add_subcommand("draw", "dump one channel realization as JSON");
  ch_draw->add_option("--seed", seed, "RNG seed");
  ch_draw->add_option("--config", config, "simulation config file");
  ch_draw->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cb_build->parsed()) return cmd_codebook_build(config, out);
    if (cb_export->parsed()) return cmd_codebook_export(config, out, step_deg);
    if (cb_inspect->parsed()) return cmd_codebook_inspect(config);
    if (simulate->parsed()) return cmd_simulate(config, out, serial);
    if (trace->parsed()) return cmd_sweep_trace(card, nu);
    if (ch_draw->parsed()) return cmd_channel_draw(config, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help() << "error: no subcommand\n";
  return 2;
}
