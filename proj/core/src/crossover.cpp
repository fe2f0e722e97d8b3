#include <algorithm>
#include <cmath>
#include <ostream>

#include "rowsim/characterizer.hpp"

namespace rowsim::characterize {

double sidedness_gap(const device::DeviceProfile& profile, Nanos t_on, int temp_c) {
  return device::acmin_at(profile, t_on, Sidedness::Single, temp_c) -
         device::acmin_at(profile, t_on, Sidedness::Double, temp_c);
}

namespace {

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::vector<Nanos> crossover_points(const device::DeviceProfile& profile, Nanos lo, Nanos hi, int temp_c) {
  if (lo > hi) throw ConfigError("crossover range is empty");
  const auto dev = device::at_temperature(profile, temp_c);
  if (!dev.has_curve(Sidedness::Double, temp_c)) {
    throw ProfileError("profile '" + dev.name + "' has no double-sided curve at " + std::to_string(temp_c) + " C");
  }

  // Between consecutive anchors of either curve both are straight lines in log-log space, so
  // the log of their ratio is linear and the gap changes sign at most once per segment.
  std::vector<Nanos> pts{lo, hi};
  for (const auto s : {Sidedness::Single, Sidedness::Double}) {
    for (const auto& a : dev.curve(s, temp_c).anchors()) {
      if (a.t_on > lo && a.t_on < hi) pts.push_back(a.t_on);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::vector<Nanos> out;
  auto gap = [&](Nanos t) { return sidedness_gap(dev, t, temp_c); };
  int prev_sign = 0;
  Nanos prev_at{0};
  std::optional<Nanos> first_zero;
  for (const auto p : pts) {
    const int s = sign(gap(p));
    if (s == 0) {
      if (!first_zero) first_zero = p;
      continue;
    }
    if (prev_sign != 0 && s != prev_sign) {
      if (first_zero) {
        out.push_back(*first_zero);
      } else {
        Nanos a = prev_at;
        Nanos b = p;
        while (b - a > Nanos{1}) {
          const auto mid = Nanos{static_cast<Nanos::rep>(std::llround(std::sqrt(double(a.count()) * double(b.count()))))};
          const Nanos m = std::clamp(mid, a + Nanos{1}, b - Nanos{1});
          const int sm = sign(gap(m));
          if (sm == prev_sign) {
            a = m;
          } else if (sm == 0) {
            a = b = m;
          } else {
            b = m;
          }
        }
        out.push_back(b);
      }
    }
    prev_sign = s;
    prev_at = p;
    first_zero.reset();
  }
  return out;
}

std::optional<Nanos> crossover_scan(const device::DeviceProfile& profile, Nanos lo, Nanos hi, int temp_c) {
  const auto pts = crossover_points(profile, lo, hi, temp_c);
  if (pts.empty()) return std::nullopt;
  return pts.front();
}

std::vector<GapRow> gap_table(const device::DeviceProfile& profile, const std::vector<Nanos>& t_on_values,
                              int temp_c) {
  const auto dev = device::at_temperature(profile, temp_c);
  std::vector<GapRow> out;
  for (const auto t : t_on_values) {
    const double s = device::acmin_at(dev, t, Sidedness::Single, temp_c);
    const double d = device::acmin_at(dev, t, Sidedness::Double, temp_c);
    out.push_back({t, s, d, s - d});
  }
  return out;
}

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "t_on_ns,single,double,diff\n";
  for (const auto& r : rows) {
    out << r.t_on.count() << ',' << format_real(r.single) << ',' << format_real(r.dbl) << ',' << format_real(r.gap)
        << '\n';
  }
}

}  // namespace rowsim::characterize
