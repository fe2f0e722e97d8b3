#include "rowsim/adaptation.hpp"

#include <cmath>

namespace rowsim::mitigation {

double para_exposure(double threshold, double w) {
  return std::ceil(threshold / w) - 1.0;
}

double para_miss_probability(double p, double threshold, double w, std::uint32_t blast_radius) {
  const double q = p / (2.0 * blast_radius);
  return std::pow(1.0 - q, para_exposure(threshold, w));
}

namespace {

Adapted adapt_graphene(GrapheneConfig g, double w) {
  Adapted out;
  out.parameters["threshold"] = g.threshold;
  if (g.weighted_increments) {
    out.formula = "T' = T - ceil(w(t_on_cap) / 2) with weighted increments w(tON)";
    g.threshold = g.threshold - std::ceil(w / 2.0);
    if (w == 1.0) g.threshold = out.parameters["threshold"];
  } else {
    out.formula = "T' = floor(T / w(t_on_cap)) with unit increments";
    g.threshold = std::floor(g.threshold / w);
  }
  if (!(g.threshold >= 1.0)) {
    throw ConfigError("adapted Graphene threshold drops below 1 (T = " + std::to_string(out.parameters["threshold"]) +
                      ", w = " + std::to_string(w) + ")");
  }
  out.parameters["threshold_adapted"] = g.threshold;
  out.config = g;
  return out;
}

Adapted adapt_para(ParaConfig para, double w, double n, std::uint32_t radius) {
  Adapted out;
  const double sides = 2.0 * radius;
  const double q = para.p / sides;
  const double e0 = para_exposure(n, 1.0);
  const double e1 = para_exposure(n, w);
  out.formula =
      "q = p / (2 r); E(t) = ceil(N / w(t)) - 1; miss(t) = (1 - q)^E(t); "
      "q' = 1 - (1 - q)^(E(t_ras) / E(t_on_cap)); p' = 2 r q'";
  out.parameters["p"] = para.p;
  out.parameters["N"] = n;
  out.parameters["N_effective"] = n / w;
  out.parameters["exposure_t_ras"] = e0;
  out.parameters["exposure_t_on_cap"] = e1;
  out.parameters["miss_original"] = std::pow(1.0 - q, e0);
  if (w == 1.0) {
    out.parameters["p_adapted"] = para.p;
    out.parameters["miss_adapted"] = out.parameters["miss_original"];
    out.config = para;
    return out;
  }
  if (e1 < 1.0) {
    throw ConfigError("PARA cannot be adapted: a single activation at t_on_cap reaches N = " + std::to_string(n));
  }
  const double q1 = 1.0 - std::pow(1.0 - q, e0 / e1);
  const double p1 = sides * q1;
  if (p1 > 1.0) {
    throw ConfigError("PARA cannot be adapted: required p' = " + std::to_string(p1) + " exceeds 1 (N = " +
                      std::to_string(n) + ", w(t_on_cap) = " + std::to_string(w) + ")");
  }
  para.p = p1;
  out.parameters["p_adapted"] = p1;
  out.parameters["miss_adapted"] = std::pow(1.0 - q1, e1);
  out.config = para;
  return out;
}

}  // namespace

Adapted adapt(const MitigationConfig& cfg, const AdaptationConfig& a, const device::DeviceProfile& profile,
              const dram::TimingParams& timing, std::uint32_t blast_radius) {
  if (a.t_on_cap < timing.t_ras_min || a.t_on_cap > timing.t_ron_max_jedec) {
    throw ConfigError("t_on_cap " + std::to_string(a.t_on_cap.count()) + " ns outside [" +
                      std::to_string(timing.t_ras_min.count()) + ", " +
                      std::to_string(timing.t_ron_max_jedec.count()) + "] ns");
  }
  const auto p = device::at_temperature(profile, a.temp_c);
  const double w = a.scale.value_or(device::weight(p, a.t_on_cap, Sidedness::Single, a.temp_c));
  if (!(w >= 1.0)) throw ConfigError("adaptation scale must be >= 1, got " + std::to_string(w));

  Adapted out;
  if (const auto* g = std::get_if<GrapheneConfig>(&cfg)) {
    out = adapt_graphene(*g, w);
  } else if (const auto* para = std::get_if<ParaConfig>(&cfg)) {
    const double n = a.para_threshold.value_or(std::floor(p.base_threshold * p.row_variation.min_factor));
    out = adapt_para(*para, w, n, blast_radius);
  } else {
    out.config = cfg;
    out.formula = "unchanged";
  }
  out.scale = w;
  out.policy.t_on_cap = a.t_on_cap;
  out.parameters["t_on_cap_ns"] = static_cast<double>(a.t_on_cap.count());
  out.parameters["scale"] = w;
  return out;
}

}  // namespace rowsim::mitigation
