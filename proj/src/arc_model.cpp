#include <cmath>

#include "hif/error.hpp"
#include "hif/hifsim.hpp"
#include "hif/random.hpp"

namespace hif::sim {

void ArcParams::validate() const {
  if (!(v_p > v_n && v_n > 0.0)) throw InvalidInput("arc parameters need v_p > v_n > 0");
  if (!(variation_fraction >= 0.0 && variation_fraction < 1.0)) {
    throw InvalidInput("arc variation_fraction must lie in [0, 1)");
  }
  if (!(r_lo > 0.0 && r_lo <= r_hi)) throw InvalidInput("arc resistances need 0 < r_lo <= r_hi");
  if (!(update_interval > 0.0)) throw InvalidInput("arc update_interval must be positive");
  if (!(build_up_time_constant >= 0.0)) throw InvalidInput("arc build-up time constant must be >= 0");
  if (!(system_frequency > 0.0)) throw InvalidInput("system frequency must be positive");
}

std::vector<double> arc_current(const ArcParams& params, std::span<const double> phase_voltage,
                                double sample_rate, std::uint64_t seed, bool positive_only) {
  params.validate();
  if (phase_voltage.empty()) throw InvalidInput("arc_current: empty voltage series");
  if (!(sample_rate > 0.0)) throw InvalidInput("arc_current: sample rate must be positive");
  // Guard against 0.11 ms * 10 kHz evaluating to 1.1000000000000001.
  const auto hold = static_cast<std::size_t>(std::max(1.0, std::ceil(params.update_interval * sample_rate - 1e-9)));

  numerics::Rng rng(seed);
  const double var = params.variation_fraction;
  double v_p = params.v_p;
  double v_n = params.v_n;
  double r_p = params.r_lo;
  double r_n = params.r_lo;

  std::vector<double> current(phase_voltage.size());
  for (std::size_t i = 0; i < phase_voltage.size(); ++i) {
    if (i % hold == 0) {
      v_p = params.v_p * (1.0 + rng.uniform(-var, var));
      v_n = params.v_n * (1.0 + rng.uniform(-var, var));
      r_p = rng.uniform(params.r_lo, params.r_hi);
      r_n = rng.uniform(params.r_lo, params.r_hi);
    }
    const double v = phase_voltage[i];
    double amps = 0.0;
    if (v > v_p) {
      amps = (v - v_p) / r_p;
    } else if (v < -v_n && !positive_only) {
      amps = (v + v_n) / r_n;
    }
    if (params.build_up_time_constant > 0.0) {
      const double t = static_cast<double>(i) / sample_rate;
      amps *= 1.0 - std::exp(-t / params.build_up_time_constant);
    }
    current[i] = amps;
  }
  return current;
}

}  // namespace hif::sim
