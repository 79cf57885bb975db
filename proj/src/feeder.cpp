#include <algorithm>
#include <cmath>
#include <numbers>

#include "hif/error.hpp"
#include "hif/hifsim.hpp"
#include "hif/random.hpp"

namespace hif::sim {
namespace {

// Phase voltages of the 12 buses downstream of the substation (bus 650 is
// the regulated source and is not measured). nominal_pu are the published
// power-flow magnitudes of the 13-node test feeder. Load sensitivity is 15%
// of each bus's drop from the regulated source, the residual after regulator
// compensation. Capacitor rise is 1% at bus 675 scaled by the path length
// shared with 675. Fault sensitivities are 0.02 ohm per foot of feeder path
// shared with the faulted bus (source equivalent counted as 1000 ft),
// same phase only, referred through XFM-1 for bus 634.
//   A = 671 phase a, B = 645 phase b, C = 611 phase c.
const FeederModel& build_standard() {
  static const FeederModel model = [] {
    FeederModel m;
    m.channels = {
        {"632.a", 0, 4.16, 1.0210, 0.006225, 0.005455, {60.0, 0.0, 0.0}},
        {"632.b", 1, 4.16, 1.0420, 0.001200, 0.005455, {0.0, 60.0, 0.0}},
        {"632.c", 2, 4.16, 1.0174, 0.007695, 0.005455, {0.0, 0.0, 60.0}},
        {"633.a", 0, 4.16, 1.0180, 0.006675, 0.005455, {60.0, 0.0, 0.0}},
        {"633.b", 1, 4.16, 1.0401, 0.001485, 0.005455, {0.0, 60.0, 0.0}},
        {"633.c", 2, 4.16, 1.0148, 0.008085, 0.005455, {0.0, 0.0, 60.0}},
        {"634.a", 0, 0.48, 0.9940, 0.010275, 0.005455, {6.923077, 0.0, 0.0}},
        {"634.b", 1, 0.48, 1.0218, 0.004230, 0.005455, {0.0, 6.923077, 0.0}},
        {"634.c", 2, 0.48, 0.9960, 0.010905, 0.005455, {0.0, 0.0, 6.923077}},
        {"645.b", 1, 4.16, 1.0329, 0.002565, 0.005455, {0.0, 70.0, 0.0}},
        {"645.c", 2, 4.16, 1.0155, 0.007980, 0.005455, {0.0, 0.0, 60.0}},
        {"646.b", 1, 4.16, 1.0311, 0.002835, 0.005455, {0.0, 70.0, 0.0}},
        {"646.c", 2, 4.16, 1.0134, 0.008295, 0.005455, {0.0, 0.0, 60.0}},
        {"671.a", 0, 4.16, 0.9900, 0.010875, 0.009091, {100.0, 0.0, 0.0}},
        {"671.b", 1, 4.16, 1.0529, -0.000435, 0.009091, {0.0, 60.0, 0.0}},
        {"671.c", 2, 4.16, 0.9778, 0.013635, 0.009091, {0.0, 0.0, 100.0}},
        {"680.a", 0, 4.16, 0.9900, 0.010875, 0.009091, {100.0, 0.0, 0.0}},
        {"680.b", 1, 4.16, 1.0529, -0.000435, 0.009091, {0.0, 60.0, 0.0}},
        {"680.c", 2, 4.16, 0.9778, 0.013635, 0.009091, {0.0, 0.0, 100.0}},
        {"684.a", 0, 4.16, 0.9881, 0.011160, 0.009091, {100.0, 0.0, 0.0}},
        {"684.c", 2, 4.16, 0.9758, 0.013935, 0.009091, {0.0, 0.0, 106.0}},
        {"611.c", 2, 4.16, 0.9738, 0.014235, 0.009091, {0.0, 0.0, 112.0}},
        {"652.a", 0, 4.16, 0.9825, 0.012000, 0.009091, {100.0, 0.0, 0.0}},
        {"692.a", 0, 4.16, 0.9900, 0.010875, 0.009091, {100.0, 0.0, 0.0}},
        {"692.b", 1, 4.16, 1.0529, -0.000435, 0.009091, {0.0, 60.0, 0.0}},
        {"692.c", 2, 4.16, 0.9777, 0.013650, 0.009091, {0.0, 0.0, 100.0}},
        {"675.a", 0, 4.16, 0.9835, 0.011850, 0.010000, {100.0, 0.0, 0.0}},
        {"675.b", 1, 4.16, 1.0553, -0.000795, 0.010000, {0.0, 60.0, 0.0}},
        {"675.c", 2, 4.16, 0.9758, 0.013935, 0.010000, {0.0, 0.0, 100.0}},
    };
    m.fault_channel = {13, 9, 21};  // 671.a, 645.b, 611.c
    return m;
  }();
  return model;
}

}  // namespace

double FeederChannel::nominal_rms() const { return base_kv_ll * 1000.0 / std::numbers::sqrt3 * nominal_pu; }

const FeederModel& FeederModel::standard() { return build_standard(); }

std::vector<std::string> FeederModel::channel_names() const {
  std::vector<std::string> names;
  names.reserve(channels.size());
  for (const auto& c : channels) names.push_back(c.name);
  return names;
}

ClassCode label_for(FaultLocation loc) {
  switch (loc) {
    case FaultLocation::None: return ClassCode::Normal;
    case FaultLocation::A: return ClassCode::FaultA;
    case FaultLocation::B: return ClassCode::FaultB;
    case FaultLocation::C: return ClassCode::FaultC;
  }
  return ClassCode::Normal;
}

std::string location_name(FaultLocation loc) {
  switch (loc) {
    case FaultLocation::None: return "none";
    case FaultLocation::A: return "A";
    case FaultLocation::B: return "B";
    case FaultLocation::C: return "C";
  }
  return "?";
}

void ArcScenario::validate() const {
  arc.validate();
  if (!(duration > 0.0)) throw InvalidInput("scenario duration must be positive");
  if (!(sample_rate >= 20.0 * arc.system_frequency)) {
    throw InvalidInput("sample rate must be at least 20x the system frequency");
  }
  if (!(load_scale >= 0.5 && load_scale <= 1.5)) throw InvalidInput("load_scale must lie in [0.5, 1.5]");
  if (capacitor_switch_at && !(*capacitor_switch_at >= 0.0)) {
    throw InvalidInput("capacitor switching time must be >= 0");
  }
}

WaveformSet simulate_feeder(const ArcScenario& scenario, const FeederModel& feeder) {
  scenario.validate();
  if (feeder.channels.size() != kChannelCount) throw InvalidInput("feeder model must define 29 channels");

  const double fs = scenario.sample_rate;
  const double f0 = scenario.arc.system_frequency;
  const auto n = static_cast<std::size_t>(std::llround(scenario.duration * fs));
  if (n == 0) throw InvalidInput("scenario shorter than one sample");
  const auto cycles = static_cast<std::size_t>(std::floor(static_cast<double>(n) * f0 / fs)) + 1;

  WaveformSet w;
  w.sample_rate = fs;
  w.system_frequency = f0;
  w.label = label_for(scenario.fault_location);
  w.channel_names = feeder.channel_names();
  w.time.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.time[i] = static_cast<double>(i) / fs;

  // Independent streams: 0 load fluctuation, 1 arc, 2 measurement noise.
  numerics::Rng load_rng(numerics::derive_seed(scenario.seed, 0));
  std::vector<double> load(cycles);
  for (auto& l : load) l = scenario.load_scale * (1.0 + load_rng.uniform(-feeder.load_jitter, feeder.load_jitter));

  // First sample with the capacitor bank in service (n means never).
  std::size_t cap_sample = n;
  if (scenario.capacitor_switch_at) {
    cap_sample = static_cast<std::size_t>(std::max(0.0, std::ceil(*scenario.capacitor_switch_at * fs - 1e-9)));
  }

  const double omega = 2.0 * std::numbers::pi * f0;
  const double phase_shift[3] = {0.0, -2.0 * std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0};
  w.channels.assign(kChannelCount, std::vector<double>(n));
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto& ch = feeder.channels[c];
    const double base_peak = std::numbers::sqrt2 * ch.base_kv_ll * 1000.0 / std::numbers::sqrt3;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = w.time[i];
      const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(i) * f0 / fs));
      const bool cap_on = i >= cap_sample;
      const double pu =
          ch.nominal_pu - (load[k] - 1.0) * ch.load_sensitivity_pu + (cap_on ? ch.capacitor_rise_pu : 0.0);
      w.channels[c][i] = base_peak * pu * std::sin(omega * t + phase_shift[ch.phase]);
    }
  }

  w.arc_current.assign(n, 0.0);
  if (scenario.fault_location != FaultLocation::None) {
    const auto loc = static_cast<std::size_t>(scenario.fault_location) - 1;
    const auto& drive = w.channels[feeder.fault_channel[loc]];
    w.arc_current = arc_current(scenario.arc, drive, fs, numerics::derive_seed(scenario.seed, 1),
                                scenario.broken_conductor);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const double s = feeder.channels[c].fault_sensitivity[loc];
      if (s == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) w.channels[c][i] -= s * w.arc_current[i];
    }
  }

  if (feeder.noise_fraction > 0.0) {
    numerics::Rng noise_rng(numerics::derive_seed(scenario.seed, 2));
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const double sigma = feeder.noise_fraction * std::numbers::sqrt2 * feeder.channels[c].nominal_rms();
      for (auto& v : w.channels[c]) v += sigma * noise_rng.normal();
    }
  }
  return w;
}

}  // namespace hif::sim
