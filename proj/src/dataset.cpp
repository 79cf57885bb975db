#include <cmath>

#include "hif/error.hpp"
#include "hif/hifsim.hpp"
#include "hif/random.hpp"

namespace hif::sim {
namespace {

std::size_t samples_per_cycle(double sample_rate, double frequency) {
  const double spc = sample_rate / frequency;
  const double rounded = std::round(spc);
  if (rounded < 1.0 || std::abs(spc - rounded) > 1e-9 * spc) {
    throw InvalidInput("sample rate must be an integer multiple of the system frequency");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

DataMatrix extract_features(const WaveformSet& w) {
  if (w.channels.size() != w.channel_names.size()) throw InvalidInput("waveform channel/name count mismatch");
  const std::size_t spc = samples_per_cycle(w.sample_rate, w.system_frequency);
  const std::size_t n = w.samples();
  for (const auto& ch : w.channels) {
    if (ch.size() != n) throw InvalidInput("waveform channels differ in length");
  }
  const std::size_t cycles = n / spc;
  if (cycles == 0) throw InvalidInput("waveform shorter than one cycle");

  DataMatrix x;
  x.channel_names = w.channel_names;
  x.observations.resize(static_cast<Eigen::Index>(cycles), static_cast<Eigen::Index>(w.channels.size()));
  for (std::size_t c = 0; c < w.channels.size(); ++c) {
    for (std::size_t k = 0; k < cycles; ++k) {
      double sum_sq = 0.0;
      for (std::size_t i = k * spc; i < (k + 1) * spc; ++i) sum_sq += w.channels[c][i] * w.channels[c][i];
      x.observations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
          std::sqrt(sum_sq / static_cast<double>(spc));
    }
  }
  x.labels = std::vector<ClassCode>(cycles, w.label);
  return x;
}

DataMatrix generate_dataset(const std::vector<ScenarioBatch>& config, std::uint64_t seed,
                            const FeederModel& feeder) {
  if (config.empty()) throw InvalidInput("generate_dataset: empty scenario list");
  std::vector<DataMatrix> parts;
  parts.reserve(config.size());
  for (std::size_t j = 0; j < config.size(); ++j) {
    const auto& batch = config[j];
    if (batch.rows == 0) continue;
    ArcScenario s = batch.scenario;
    const std::size_t cycles = batch.settle_cycles + batch.rows;
    s.duration = static_cast<double>(cycles) / s.arc.system_frequency;
    s.seed = numerics::derive_seed(seed, j);
    const DataMatrix all = extract_features(simulate_feeder(s, feeder));
    if (static_cast<std::size_t>(all.rows()) < cycles) throw InvalidInput("scenario produced too few cycles");
    std::vector<Eigen::Index> keep;
    for (std::size_t k = batch.settle_cycles; k < cycles; ++k) keep.push_back(static_cast<Eigen::Index>(k));
    parts.push_back(all.select_rows(keep));
  }
  if (parts.empty()) throw InvalidInput("generate_dataset: no rows requested");
  return vstack(parts);
}

std::vector<ScenarioBatch> default_dataset_config(const DatasetOptions& options) {
  if (options.load_scales.empty()) throw InvalidInput("dataset options need at least one load scale");
  std::vector<ScenarioBatch> batches;
  const std::size_t n_loads = options.load_scales.size();
  for (const auto loc : {FaultLocation::None, FaultLocation::A, FaultLocation::B, FaultLocation::C}) {
    for (std::size_t l = 0; l < n_loads; ++l) {
      const std::size_t rows = options.rows_per_class / n_loads + (l < options.rows_per_class % n_loads ? 1 : 0);
      if (rows == 0) continue;
      ScenarioBatch b;
      b.rows = rows;
      b.settle_cycles = options.settle_cycles;
      b.scenario.arc = options.arc;
      b.scenario.fault_location = loc;
      b.scenario.broken_conductor = options.broken_conductor_c && loc == FaultLocation::C;
      b.scenario.load_scale = options.load_scales[l];
      b.scenario.sample_rate = options.sample_rate;
      if (options.capacitor_switching && options.load_scales[l] == 1.0) {
        b.scenario.capacitor_switch_at =
            static_cast<double>(options.settle_cycles + rows / 2) / options.arc.system_frequency;
      }
      batches.push_back(b);
    }
  }
  return batches;
}

}  // namespace hif::sim
