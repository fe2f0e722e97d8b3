#include "rowsim/profile.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace rowsim::device {

AcminCurve::AcminCurve(std::vector<CurveAnchor> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.empty()) throw ProfileError("ACmin curve needs at least one anchor");
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const auto& a = anchors_[i];
    if (a.t_on.count() <= 0) throw ProfileError("ACmin anchor t_on must be positive");
    if (!(a.acmin >= 1.0) || !std::isfinite(a.acmin)) {
      throw ProfileError("ACmin anchor value must be finite and >= 1");
    }
    if (i > 0) {
      if (a.t_on <= anchors_[i - 1].t_on) throw ProfileError("ACmin anchors must increase in t_on");
      if (a.acmin > anchors_[i - 1].acmin) throw ProfileError("ACmin anchors must be non-increasing");
    }
  }
  log_t_.reserve(anchors_.size());
  log_acmin_.reserve(anchors_.size());
  for (const auto& a : anchors_) {
    log_t_.push_back(std::log(static_cast<double>(a.t_on.count())));
    log_acmin_.push_back(std::log(a.acmin));
  }
}

double AcminCurve::at(Nanos t_on) const {
  if (anchors_.empty()) throw ProfileError("empty ACmin curve");
  if (t_on < anchors_.front().t_on) {
    throw ProfileError("t_on " + std::to_string(t_on.count()) + " ns is below the curve's first anchor (" +
                       std::to_string(anchors_.front().t_on.count()) + " ns)");
  }
  if (t_on >= anchors_.back().t_on) return anchors_.back().acmin;

  auto it = std::upper_bound(anchors_.begin(), anchors_.end(), t_on,
                             [](Nanos t, const CurveAnchor& a) { return t < a.t_on; });
  const auto hi = static_cast<std::size_t>(it - anchors_.begin());
  const auto lo = hi - 1;
  if (anchors_[lo].t_on == t_on) return anchors_[lo].acmin;

  const double x = std::log(static_cast<double>(t_on.count()));
  const double frac = (x - log_t_[lo]) / (log_t_[hi] - log_t_[lo]);
  const double y = log_acmin_[lo] + frac * (log_acmin_[hi] - log_acmin_[lo]);
  return std::max(1.0, std::exp(y));
}

void DeviceProfile::validate() const {
  if (name.empty()) throw ProfileError("profile needs a name");
  if (!(base_threshold >= 1.0)) throw ProfileError("base_threshold must be >= 1");
  if (t_ras_min.count() <= 0) throw ProfileError("t_ras_min must be positive");
  if (press_onset < t_ras_min) throw ProfileError("press_onset must be >= t_ras_min");
  if (curves.empty()) throw ProfileError("profile '" + name + "' has no ACmin curves");
  for (const auto& [key, c] : curves) {
    if (c.first_t_on() != t_ras_min) {
      throw ProfileError("curve (" + std::string(to_string(key.sidedness)) + ", " +
                         std::to_string(key.temp_c) + " C) must start at t_ras_min");
    }
  }
  if (!has_curve(Sidedness::Single, reference_temp_c)) {
    throw ProfileError("profile '" + name + "' lacks a single-sided curve at its reference temperature");
  }
  if (std::abs(curve(Sidedness::Single, reference_temp_c).at(t_ras_min) - base_threshold) >
      1e-9 * base_threshold) {
    throw ProfileError("single-sided reference curve must equal base_threshold at t_ras_min");
  }
  auto fraction = [&](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ProfileError(std::string(what) + " must be within [0, 1]");
  };
  fraction(overlap_rh, "overlap_rh");
  fraction(overlap_ret, "overlap_ret");
  fraction(press_direction_bias, "press_direction_bias");
  fraction(hammer_direction_bias, "hammer_direction_bias");
  fraction(press_cell_fraction, "press_cell_fraction");
  fraction(hammer_cell_fraction, "hammer_cell_fraction");
  fraction(retention_tail.fraction, "retention_tail.fraction");
  if (press_cell_fraction + hammer_cell_fraction + retention_tail.fraction > 1.0) {
    throw ProfileError("vulnerable cell fractions sum above 1");
  }
  if (!(max_threshold_mult >= 1.0)) throw ProfileError("max_threshold_mult must be >= 1");
  if (!(row_variation.min_factor > 0.0) || row_variation.min_factor > row_variation.max_factor) {
    throw ProfileError("row variation needs 0 < min_factor <= max_factor");
  }
  if (cells_per_row == 0) throw ProfileError("cells_per_row must be >= 1");
  if (retention_tail.min_retention.count() <= 0 || !(retention_tail.spread >= 1.0)) {
    throw ProfileError("retention tail needs positive min_retention and spread >= 1");
  }
  for (const auto& s : temp_scale) {
    if (!(s.factor > 0.0)) throw ProfileError("temperature factors must be positive");
  }
}

bool DeviceProfile::has_curve(Sidedness s, int temp_c) const {
  return curves.contains(CurveKey{s, temp_c});
}

const AcminCurve& DeviceProfile::curve(Sidedness s, int temp_c) const {
  auto it = curves.find(CurveKey{s, temp_c});
  if (it == curves.end()) {
    throw ProfileError("profile '" + name + "' has no " + std::string(to_string(s)) +
                       "-sided curve at " + std::to_string(temp_c) + " C");
  }
  return it->second;
}

double acmin_at(const DeviceProfile& profile, Nanos t_on, Sidedness sidedness, int temp_c) {
  if (t_on < profile.t_ras_min) {
    throw ProfileError("t_on below t_ras_min (" + std::to_string(t_on.count()) + " ns)");
  }
  return profile.curve(sidedness, temp_c).at(t_on);
}

double weight(const DeviceProfile& profile, Nanos t_on, Sidedness sidedness, int temp_c) {
  const auto& c = profile.curve(sidedness, temp_c);
  if (t_on < profile.t_ras_min) {
    throw ProfileError("t_on below t_ras_min (" + std::to_string(t_on.count()) + " ns)");
  }
  return c.at(profile.t_ras_min) / c.at(t_on);
}

double damage_per_activation(const DeviceProfile& profile, Nanos t_on, Sidedness sidedness,
                             int temp_c) {
  return profile.base_threshold / acmin_at(profile, t_on, sidedness, temp_c);
}

std::optional<double> temperature_factor(const DeviceProfile& profile, int from_c, int to_c) {
  if (from_c == to_c) return 1.0;
  for (const auto& s : profile.temp_scale) {
    if (s.from_c == from_c && s.to_c == to_c) return s.factor;
  }
  for (const auto& s : profile.temp_scale) {
    if (s.from_c == to_c && s.to_c == from_c) return 1.0 / s.factor;
  }
  return std::nullopt;
}

DeviceProfile scale_temperature(const DeviceProfile& profile, int from_c, int to_c) {
  if (from_c == to_c) return profile;
  const auto factor = temperature_factor(profile, from_c, to_c);
  if (!factor) {
    throw ProfileError("profile '" + profile.name + "' has no temperature factor for " +
                       std::to_string(from_c) + " C -> " + std::to_string(to_c) + " C");
  }

  DeviceProfile out = profile;
  bool any = false;
  for (const auto& [key, c] : profile.curves) {
    if (key.temp_c != from_c) continue;
    any = true;
    std::vector<CurveAnchor> scaled(c.anchors().begin(), c.anchors().end());
    // tRAS anchor is the identity point; the tail is scaled, kept >= 1 and non-increasing.
    for (std::size_t i = 1; i < scaled.size(); ++i) {
      double v = scaled[i].acmin * *factor;
      v = std::max(1.0, std::min(v, scaled[i - 1].acmin));
      scaled[i].acmin = v;
    }
    out.curves.insert_or_assign(CurveKey{key.sidedness, to_c}, AcminCurve(std::move(scaled)));
  }
  if (!any) {
    throw ProfileError("profile '" + profile.name + "' has no curves at " + std::to_string(from_c) + " C");
  }
  if (out.reference_temp_c == from_c) out.reference_temp_c = to_c;
  out.name = profile.name + "@" + std::to_string(to_c) + "C";
  return out;
}

DeviceProfile rescale_base(const DeviceProfile& profile, double base_threshold) {
  if (!(base_threshold >= 1.0) || !std::isfinite(base_threshold)) {
    throw ProfileError("base_threshold must be a finite value >= 1");
  }
  const double k = base_threshold / profile.base_threshold;
  DeviceProfile out = profile;
  for (auto& [key, c] : out.curves) {
    std::vector<CurveAnchor> scaled(c.anchors().begin(), c.anchors().end());
    for (auto& a : scaled) a.acmin = std::max(1.0, a.acmin * k);
    c = AcminCurve(std::move(scaled));
  }
  out.base_threshold = base_threshold;
  out.name = profile.name + "@base" + format_real(base_threshold);
  out.validate();
  return out;
}

DeviceProfile at_temperature(const DeviceProfile& profile, int temp_c) {
  if (profile.has_curve(Sidedness::Single, temp_c)) return profile;
  return scale_temperature(profile, profile.reference_temp_c, temp_c);
}

DeviceProfile resolve_profile(const std::string& name_or_path) {
  if (const auto* p = find_builtin(name_or_path)) return *p;
  if (std::filesystem::exists(name_or_path)) return load_profile(name_or_path);
  throw ProfileError("unknown profile '" + name_or_path + "' (not a builtin name or readable file)");
}

}  // namespace rowsim::device
