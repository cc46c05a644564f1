// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The ftbm Authors

#include "ftbm/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace ftbm {

namespace {
constexpr double kPi = std::numbers::pi;

// Clamp inclination into [0, pi] and wrap azimuth into [-pi, pi].
AngleDirection make_dir(double theta, double phi) {
  theta = std::clamp(theta, 0.0, kPi);
  phi = std::remainder(phi, 2.0 * kPi);
  if (phi < -kPi) phi += 2.0 * kPi;
  if (phi > kPi) phi -= 2.0 * kPi;
  return AngleDirection(theta, phi);
}

cplx subpath_gain(double power, double delay, double carrier_hz) {
  const double phase = -2.0 * kPi * delay * carrier_hz;
  return std::sqrt(power) * cplx{std::cos(phase), std::sin(phase)};
}
}  // namespace

void ClusterParams::validate() const {
  if (n_clusters < 1) throw std::invalid_argument("ClusterParams: n_clusters must be >= 1");
  if (n_subpaths < 1) throw std::invalid_argument("ClusterParams: n_subpaths must be >= 1");
  if (carrier_hz <= 0) throw std::invalid_argument("ClusterParams: carrier_hz must be > 0");
  if (delay_spread_s < 0) throw std::invalid_argument("ClusterParams: delay_spread_s must be >= 0");
  if (angle_spread_deg < 0) throw std::invalid_argument("ClusterParams: angle_spread_deg must be >= 0");
  if (az_hi_deg < az_lo_deg) throw std::invalid_argument("ClusterParams: azimuth range inverted");
  if (incl_hi_deg < incl_lo_deg) throw std::invalid_argument("ClusterParams: inclination range inverted");
}

CMat assemble_channel(const std::vector<PathRecord>& paths, const BsArrayLayout& bs,
                      const ArrayGeometry& ue) {
  const ArrayGeometry full = bs.full();
  CMat H = CMat::Zero(full.size(), ue.size());
  for (const PathRecord& p : paths) {
    const CVec a_bs = steering_vector(full, p.bs_dir);
    const CVec a_ue = steering_vector(ue, p.ue_dir);
    H.noalias() += p.gain * a_bs * a_ue.adjoint();
  }
  return H;
}

ChannelRealization draw_channel(const ClusterParams& params, const BsArrayLayout& bs,
                                const ArrayGeometry& ue, std::mt19937_64& rng) {
  params.validate();
  const double d2r = kPi / 180.0;
  std::uniform_real_distribution<double> u_az(params.az_lo_deg, params.az_hi_deg);
  std::uniform_real_distribution<double> u_incl(params.incl_lo_deg, params.incl_hi_deg);
  std::uniform_real_distribution<double> u_delay(0.0, params.delay_spread_s);
  std::normal_distribution<double> n_spread(0.0, params.angle_spread_deg * d2r);

  // Exponential decay across clusters, uniform split across sub-paths.
  std::vector<double> cluster_power(params.n_clusters);
  double total = 0.0;
  for (int k = 0; k < params.n_clusters; ++k) {
    cluster_power[k] = std::exp(-params.power_decay * k);
    total += cluster_power[k];
  }

  ChannelRealization real;
  real.m_bs = bs.m_bs;
  for (int k = 0; k < params.n_clusters; ++k) {
    const double bs_az = kPi / 2.0 - u_az(rng) * d2r;
    const double bs_incl = u_incl(rng) * d2r;
    const double ue_az = kPi / 2.0 - u_az(rng) * d2r;
    const double ue_incl = u_incl(rng) * d2r;
    const double power = cluster_power[k] / (total * params.n_subpaths);
    for (int l = 0; l < params.n_subpaths; ++l) {
      PathRecord p;
      p.cluster = k;
      p.subpath = l;
      p.power = power;
      p.bs_dir = make_dir(bs_incl + n_spread(rng), bs_az + n_spread(rng));
      p.ue_dir = make_dir(ue_incl + n_spread(rng), ue_az + n_spread(rng));
      p.delay = u_delay(rng);
      p.gain = subpath_gain(p.power, p.delay, params.carrier_hz);
      real.paths.push_back(p);
    }
  }
  real.H = assemble_channel(real.paths, bs, ue);
  return real;
}

ChannelRealization evolve_channel(const ChannelRealization& real, const ClusterParams& params,
                                  const BsArrayLayout& bs, const ArrayGeometry& ue,
                                  double drift_deg_std, std::mt19937_64& rng) {
  if (drift_deg_std < 0) throw std::invalid_argument("evolve_channel: drift_deg_std must be >= 0");
  const double d2r = kPi / 180.0;
  std::normal_distribution<double> n_drift(0.0, drift_deg_std * d2r);
  std::uniform_real_distribution<double> u_delay(0.0, params.delay_spread_s);

  ChannelRealization next;
  next.m_bs = real.m_bs;
  next.paths = real.paths;
  for (PathRecord& p : next.paths) {
    if (drift_deg_std > 0.0) {
      p.bs_dir = make_dir(p.bs_dir.theta + n_drift(rng), p.bs_dir.phi + n_drift(rng));
      p.ue_dir = make_dir(p.ue_dir.theta + n_drift(rng), p.ue_dir.phi + n_drift(rng));
    }
    if (params.redraw_delays) {
      p.delay = u_delay(rng);
      p.gain = subpath_gain(p.power, p.delay, params.carrier_hz);
    }
  }
  next.H = assemble_channel(next.paths, bs, ue);
  return next;
}

CMat beamformed_channel(const ChannelRealization& real, const std::vector<CVec>& analog_beams) {
  if (static_cast<int>(analog_beams.size()) != real.m_bs)
    throw std::invalid_argument("beamformed_channel: need one beam per AiP");
  const int rows = real.block_rows();
  CMat eff(real.H.cols(), real.m_bs);
  for (int i = 0; i < real.m_bs; ++i) {
    if (analog_beams[i].size() != rows)
      throw std::invalid_argument("beamformed_channel: beam length does not match AiP block");
    eff.col(i) = real.block(i).adjoint() * analog_beams[i];
  }
  return eff;
}

std::string channel_to_json(const ChannelRealization& real, const ClusterParams& params,
                            const BsArrayLayout& bs, const ArrayGeometry& ue) {
  nlohmann::json doc;
  doc["bs"] = {{"m_bs", bs.m_bs}, {"n_h", bs.n_h}, {"n_v", bs.n_v}, {"spacing", bs.spacing}};
  doc["ue"] = {{"n", ue.size()}, {"spacing", ue.spacing}};
  doc["carrier_hz"] = params.carrier_hz;
  nlohmann::json paths = nlohmann::json::array();
  for (const PathRecord& p : real.paths)
    paths.push_back({{"cluster", p.cluster},
                     {"subpath", p.subpath},
                     {"power", p.power},
                     {"delay", p.delay},
                     {"bs_theta", p.bs_dir.theta},
                     {"bs_phi", p.bs_dir.phi},
                     {"ue_theta", p.ue_dir.theta},
                     {"ue_phi", p.ue_dir.phi}});
  doc["paths"] = std::move(paths);
  return doc.dump(2);
}

ChannelRealization channel_from_json(const std::string& text, BsArrayLayout* bs_out,
                                     ArrayGeometry* ue_out) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  BsArrayLayout bs{doc.at("bs").at("m_bs").get<int>(), doc.at("bs").at("n_h").get<int>(),
                   doc.at("bs").at("n_v").get<int>(), doc.at("bs").at("spacing").get<double>()};
  ArrayGeometry ue = ArrayGeometry::ula(doc.at("ue").at("n").get<int>(),
                                        doc.at("ue").at("spacing").get<double>());
  const double carrier = doc.at("carrier_hz").get<double>();
  ChannelRealization real;
  real.m_bs = bs.m_bs;
  for (const auto& jp : doc.at("paths")) {
    PathRecord p;
    p.cluster = jp.at("cluster").get<int>();
    p.subpath = jp.at("subpath").get<int>();
    p.power = jp.at("power").get<double>();
    p.delay = jp.at("delay").get<double>();
    p.bs_dir = AngleDirection(jp.at("bs_theta").get<double>(), jp.at("bs_phi").get<double>());
    p.ue_dir = AngleDirection(jp.at("ue_theta").get<double>(), jp.at("ue_phi").get<double>());
    p.gain = subpath_gain(p.power, p.delay, carrier);
    real.paths.push_back(p);
  }
  real.H = assemble_channel(real.paths, bs, ue);
  if (bs_out) *bs_out = bs;
  if (ue_out) *ue_out = ue;
  return real;
}

}  // namespace ftbm
