#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rowsim/types.hpp"

namespace rowsim::device {

struct CurveAnchor {
  Nanos t_on{0};
  double acmin = 1.0;

  bool operator==(const CurveAnchor&) const = default;
};

/// ACmin as a function of aggressor on-time, piecewise-linear in log-log space.
///
/// Anchors are strictly increasing in t_on and non-increasing in acmin, and acmin never drops
/// below 1. Lookups are exact at anchors and clamp to the last anchor beyond its t_on.
class AcminCurve {
 public:
  AcminCurve() = default;
  explicit AcminCurve(std::vector<CurveAnchor> anchors);

  double at(Nanos t_on) const;

  std::span<const CurveAnchor> anchors() const { return anchors_; }
  Nanos first_t_on() const { return anchors_.front().t_on; }
  Nanos last_t_on() const { return anchors_.back().t_on; }

  bool operator==(const AcminCurve& other) const { return anchors_ == other.anchors_; }

 private:
  std::vector<CurveAnchor> anchors_;
  std::vector<double> log_t_;
  std::vector<double> log_acmin_;
};

struct CurveKey {
  Sidedness sidedness = Sidedness::Single;
  int temp_c = 50;

  auto operator<=>(const CurveKey&) const = default;
};

/// Multiplier applied to ACmin beyond tRAS when moving from one temperature to another.
struct TempScale {
  int from_c = 50;
  int to_c = 80;
  double factor = 1.0;

  bool operator==(const TempScale&) const = default;
};

/// Bounded log-uniform spread of per-row thresholds around base_threshold.
struct RowVariation {
  double min_factor = 1.0;
  double max_factor = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const RowVariation&) const = default;
};

struct RetentionTail {
  /// Fraction of all cells that are retention-weak only.
  double fraction = 0.0;
  Nanos min_retention{1'000'000'000};
  /// Retention times are log-uniform in [min_retention, min_retention * spread].
  double spread = 8.0;

  bool operator==(const RetentionTail&) const = default;
};

/// A synthetic device's read-disturb vulnerability. Immutable once validated; safe to share.
struct DeviceProfile {
  std::string name;
  std::string description;
  /// ACmin at tRAS, single-sided, reference temperature. Every curve is in the same units.
  double base_threshold = 32'000.0;
  int reference_temp_c = 50;
  Nanos t_ras_min{36};
  /// Activations with tON above this value disturb through the Press mechanism.
  Nanos press_onset{36};
  std::map<CurveKey, AcminCurve> curves;
  std::vector<TempScale> temp_scale;
  RowVariation row_variation;
  std::uint32_t cells_per_row = 1024;
  double press_cell_fraction = 0.02;
  double hammer_cell_fraction = 0.02;
  double max_threshold_mult = 2.0;
  double overlap_rh = 0.00013;
  double overlap_ret = 0.0034;
  double press_direction_bias = 1.0;
  double hammer_direction_bias = 1.0;
  RetentionTail retention_tail;

  void validate() const;

  bool has_curve(Sidedness s, int temp_c) const;
  const AcminCurve& curve(Sidedness s, int temp_c) const;

  bool operator==(const DeviceProfile&) const = default;
};

double acmin_at(const DeviceProfile& profile, Nanos t_on, Sidedness sidedness, int temp_c);

/// acmin(t_ras_min) / acmin(t_on) within one (sidedness, temperature) context; 1 at tRAS.
double weight(const DeviceProfile& profile, Nanos t_on, Sidedness sidedness, int temp_c);

/// Accumulator increment for one activation: base_threshold / acmin(t_on, context).
///
/// Identical to weight() for every single-sided context. For double-sided contexts it keeps
/// the accumulator in base_threshold units so the measured ACmin equals the double curve.
double damage_per_activation(const DeviceProfile& profile, Nanos t_on, Sidedness sidedness,
                             int temp_c);

/// Returns a copy with curves at `to_c` derived from the curves at `from_c`.
DeviceProfile scale_temperature(const DeviceProfile& profile, int from_c, int to_c);

/// Same curve shapes scaled so that ACmin at tRAS (reference temperature, single-sided) is
/// `base_threshold`; anchors are clamped at 1. Small bases keep exhaustive searches cheap.
DeviceProfile rescale_base(const DeviceProfile& profile, double base_threshold);

/// The profile itself when it carries curves at `temp_c`, else a copy scaled from the
/// reference temperature.
DeviceProfile at_temperature(const DeviceProfile& profile, int temp_c);

/// Looks up the temperature factor for (from, to); inverse entries are used when needed.
std::optional<double> temperature_factor(const DeviceProfile& profile, int from_c, int to_c);

std::string to_json(const DeviceProfile& profile);
DeviceProfile profile_from_json(const std::string& text);
DeviceProfile load_profile(const std::string& path);
void save_profile(const DeviceProfile& profile, const std::string& path);

const std::vector<DeviceProfile>& builtin_profiles();
const DeviceProfile* find_builtin(std::string_view name);

/// Builtin name or path to a JSON profile file.
DeviceProfile resolve_profile(const std::string& name_or_path);

}  // namespace rowsim::device
