#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hif/dataio.hpp"

namespace hif::sim {

/// Two-diode arc model: a positive branch (V_p, R_p) and a negative branch
/// (V_n, R_n) whose sources and resistances are redrawn every update interval.
struct ArcParams {
  double v_p = 1000.0;               // volts
  double v_n = 500.0;                // volts
  double variation_fraction = 0.10;  // sources vary by +/- this fraction
  double r_lo = 1000.0;              // ohms
  double r_hi = 1500.0;              // ohms
  double update_interval = 0.11e-3;  // seconds
  double build_up_time_constant = 0.05;  // seconds; 0 disables build-up
  double system_frequency = 60.0;    // hertz

  void validate() const;
};

enum class FaultLocation { None, A, B, C };

ClassCode label_for(FaultLocation loc);
std::string location_name(FaultLocation loc);

inline constexpr double kDefaultSampleRate = 12000.0;

struct ArcScenario {
  ArcParams arc;
  FaultLocation fault_location = FaultLocation::None;
  /// Conduction on positive half-cycles only (single-diode path).
  bool broken_conductor = false;
  double load_scale = 1.0;
  std::optional<double> capacitor_switch_at;  // seconds
  double duration = 0.5;                       // seconds
  double sample_rate = kDefaultSampleRate;     // hertz
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr std::size_t kChannelCount = 29;

struct WaveformSet {
  std::vector<double> time;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> channels;  // kChannelCount sequences of volts
  std::vector<double> arc_current;            // amperes; zeros without a fault
  ClassCode label = ClassCode::Normal;
  double sample_rate = kDefaultSampleRate;
  double system_frequency = 60.0;

  std::size_t samples() const { return time.size(); }
  bool operator==(const WaveformSet&) const = default;
};

/// One measured phase voltage of the surrogate feeder.
struct FeederChannel {
  std::string name;        // "<node>.<phase>"
  int phase;               // 0 = a, 1 = b, 2 = c
  double base_kv_ll;       // nominal line-to-line voltage of the bus
  double nominal_pu;       // steady-state magnitude at load_scale = 1
  double load_sensitivity_pu;  // per-unit drop per unit of load above nominal
  double capacitor_rise_pu;    // per-unit rise with the capacitor bank switched in
  std::array<double, 3> fault_sensitivity;  // ohms of sag per ampere of arc current, for A, B, C

  double nominal_rms() const;
};

/// Linear sensitivity surrogate of the 13-node feeder. The default table is
/// documented in README.md.
struct FeederModel {
  std::vector<FeederChannel> channels;
  /// Faulted channel index for locations A, B, C.
  std::array<std::size_t, 3> fault_channel{};
  /// Per-sample Gaussian noise, as a fraction of each channel's nominal peak.
  double noise_fraction = 1e-3;
  /// Per-cycle multiplicative load fluctuation, uniform in +/- this value.
  double load_jitter = 0.05;

  static const FeederModel& standard();
  std::vector<std::string> channel_names() const;
};

/// Arc current for the given phase-voltage series. Parameters are redrawn
/// every ceil(update_interval * sample_rate) samples: sources uniformly
/// within +/- variation_fraction of V_p and V_n, resistances uniformly in
/// [r_lo, r_hi]. The result is scaled by 1 - exp(-t / tau).
std::vector<double> arc_current(const ArcParams& params, std::span<const double> phase_voltage,
                                double sample_rate, std::uint64_t seed, bool positive_only = false);

WaveformSet simulate_feeder(const ArcScenario& scenario, const FeederModel& feeder = FeederModel::standard());

/// One row per complete cycle; each entry is the cycle RMS of a channel.
/// The sample rate must be an integer multiple of the system frequency.
DataMatrix extract_features(const WaveformSet& w);

struct ScenarioBatch {
  ArcScenario scenario;
  std::size_t rows = 20;
  /// Leading cycles simulated but not recorded (arc build-up and start-up).
  std::size_t settle_cycles = 18;
};

/// Simulates each batch for settle_cycles + rows cycles with seed
/// derive_seed(seed, batch index) and stacks the recorded rows.
DataMatrix generate_dataset(const std::vector<ScenarioBatch>& config, std::uint64_t seed,
                            const FeederModel& feeder = FeederModel::standard());

/// Options for the bundled scenario set.
struct DatasetOptions {
  std::size_t rows_per_class = 100;
  std::vector<double> load_scales{0.8, 0.9, 1.0, 1.1, 1.2};
  /// The load_scale = 1.0 scenario of every class switches the capacitor in
  /// halfway through its recorded rows.
  bool capacitor_switching = true;
  /// Location C is modelled as a downed (broken) conductor.
  bool broken_conductor_c = true;
  std::size_t settle_cycles = 18;
  double sample_rate = kDefaultSampleRate;
  ArcParams arc;
};

/// Normal, A, B, C blocks of rows_per_class rows each, spread over the load
/// scales (earlier scales take the remainder).
std::vector<ScenarioBatch> default_dataset_config(const DatasetOptions& options = {});

}  // namespace hif::sim
