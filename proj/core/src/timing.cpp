#include "rowsim/timing.hpp"

#include <cmath>
#include <string>

namespace rowsim::dram {

void TimingParams::validate() const {
  if (t_ras_min.count() <= 0) throw ConfigError("t_ras_min must be positive");
  if (t_refi.count() <= 0) throw ConfigError("t_refi must be positive");
  if (t_refw.count() <= 0) throw ConfigError("t_refw must be positive");
  if (ref_groups == 0) throw ConfigError("ref_groups must be at least 1");
  if (t_rc.count() < 0 || t_rcd.count() < 0 || t_read.count() <= 0 || t_rfc.count() < 0) {
    throw ConfigError("t_rc, t_rcd, t_read and t_rfc must be non-negative (t_read positive)");
  }
  if (t_rcd > t_ras_min) throw ConfigError("t_rcd must not exceed t_ras_min");
  if (t_ron_max_jedec < t_ras_min) throw ConfigError("t_ron_max_jedec must be >= t_ras_min");
  // 8192 x 7.8 us = 63.8976 ms: the window is nominal, so allow 1% slack.
  const double covered = static_cast<double>(ref_groups) * static_cast<double>(t_refi.count());
  const double window = static_cast<double>(t_refw.count());
  if (std::abs(covered - window) > 0.01 * window) {
    throw ConfigError("t_refw must equal ref_groups x t_refi within rounding (got " +
                      std::to_string(covered) + " vs " + std::to_string(window) + " ns)");
  }
}

std::uint64_t TimingParams::max_activations_in_window(Nanos t_on) const {
  const auto period = t_on + t_rc;
  if (period.count() <= 0) return 0;
  return static_cast<std::uint64_t>(t_refw.count() / period.count());
}

}  // namespace rowsim::dram
