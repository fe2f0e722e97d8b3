#pragma once

#include <map>
#include <optional>
#include <string>

#include "rowsim/mitigation.hpp"

namespace rowsim::mitigation {

struct AdaptationConfig {
  /// The controller never keeps a row open longer than this.
  Nanos t_on_cap{7'800};
  /// Rescaling factor; defaults to weight(t_on_cap) on the single-sided curve.
  std::optional<double> scale;
  /// RowHammer threshold N the original PARA probability was sized for.
  /// Defaults to floor(base_threshold x row_variation.min_factor).
  std::optional<double> para_threshold;
  int temp_c = 50;
};

struct ControllerPolicy {
  std::optional<Nanos> t_on_cap;

  bool operator==(const ControllerPolicy&) const = default;
};

struct Adapted {
  MitigationConfig config;
  ControllerPolicy policy;
  double scale = 1.0;
  /// How the new parameters were obtained, for run metadata.
  std::string formula;
  std::map<std::string, double> parameters;
};

/// Rescales a RowHammer-tuned mitigation for RowPress and pairs it with a tON cap.
///
/// Graphene, weighted increments: T' = T - ceil(w/2), so that two aggressors just under T' plus
/// one maximal increment stay below 2T + 1. Division mode: T' = floor(T / w).
/// PARA: see para_exposure(); p' keeps the per-attempt miss probability at the capped tON no
/// larger than the original one at tRAS.
/// TRR configurations pass through unchanged.
Adapted adapt(const MitigationConfig& cfg, const AdaptationConfig& adaptation,
              const device::DeviceProfile& profile, const dram::TimingParams& timing = {},
              std::uint32_t blast_radius = 1);

/// Precharges of an aggressor that can still refresh a victim before the flip-causing one:
/// ceil(N / w) - 1.
double para_exposure(double threshold, double w);

/// Probability that a victim adjacent to a single aggressor is never refreshed during one attack
/// of ceil(N / w) activations: (1 - p / (2 * blast_radius))^exposure.
double para_miss_probability(double p, double threshold, double w, std::uint32_t blast_radius = 1);

}  // namespace rowsim::mitigation
