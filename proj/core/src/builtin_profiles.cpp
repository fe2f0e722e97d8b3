#include <algorithm>

#include "rowsim/profile.hpp"

namespace rowsim::device {

namespace {

constexpr double kBase = 32'000.0;
constexpr std::uint64_t kRowSeed = 0x5eed'7011'0b5e'2023ULL;

AcminCurve mean_curve(double reduction_refi, double reduction_9refi) {
  return AcminCurve({{Nanos{36}, kBase},
                     {Nanos{7'800}, kBase / reduction_refi},
                     {Nanos{70'200}, kBase / reduction_9refi},
                     {Nanos{30'000'000}, 1.0}});
}

DeviceProfile skeleton(std::string name, std::string description, int temp_c) {
  DeviceProfile p;
  p.name = std::move(name);
  p.description = std::move(description);
  p.base_threshold = kBase;
  p.reference_temp_c = temp_c;
  p.row_variation = {0.5, 1.0, kRowSeed};
  p.retention_tail.fraction = 0.01;
  return p;
}

DeviceProfile mean_profile(std::string name, int temp_c, double r1, double r9) {
  auto p = skeleton(std::move(name),
                    "Average-chip ACmin reduction at " + std::to_string(temp_c) + " C: " +
                        std::to_string(r1).substr(0, 5) + "x at 7.8 us, " +
                        std::to_string(r9).substr(0, 5) + "x at 70.2 us",
                    temp_c);
  const auto c = mean_curve(r1, r9);
  p.curves.emplace(CurveKey{Sidedness::Single, temp_c}, c);
  p.curves.emplace(CurveKey{Sidedness::Double, temp_c}, c);
  return p;
}

DeviceProfile manufacturer_profile(char mfr, double factor_80c) {
  auto p = mean_profile(std::string("paper-mfr") + mfr + "-50C", 50, 21.0, 190.0);
  p.description = std::string("Manufacturer-") + mfr +
                  "-style chip at 50 C; ACmin beyond tRAS scales by " +
                  std::to_string(factor_80c).substr(0, 4) + "x at 80 C";
  p.temp_scale.push_back({50, 80, factor_80c});
  return p;
}

DeviceProfile crossover_profile() {
  auto p = skeleton("crossover",
                    "Double-sided needs more activations than single-sided at short tON and fewer "
                    "at long tON; one sign change in single minus double",
                    50);
  p.curves.emplace(CurveKey{Sidedness::Single, 50},
                   AcminCurve({{Nanos{36}, kBase},
                               {Nanos{7'800}, 1'600.0},
                               {Nanos{70'200}, 200.0},
                               {Nanos{30'000'000}, 2.0}}));
  p.curves.emplace(CurveKey{Sidedness::Double, 50},
                   AcminCurve({{Nanos{36}, 36'000.0},
                               {Nanos{7'800}, 1'400.0},
                               {Nanos{70'200}, 150.0},
                               {Nanos{30'000'000}, 1.0}}));
  return p;
}

std::vector<DeviceProfile> make_builtins() {
  std::vector<DeviceProfile> out;
  out.push_back(mean_profile("paper-mean-80C", 80, 17.6, 159.4));
  out.push_back(mean_profile("paper-mean-50C", 50, 21.0, 190.0));
  out.push_back(manufacturer_profile('S', 0.55));
  out.push_back(manufacturer_profile('H', 0.32));
  out.push_back(manufacturer_profile('M', 0.59));
  out.push_back(crossover_profile());
  for (const auto& p : out) p.validate();
  return out;
}

}  // namespace

const std::vector<DeviceProfile>& builtin_profiles() {
  static const std::vector<DeviceProfile> profiles = make_builtins();
  return profiles;
}

const DeviceProfile* find_builtin(std::string_view name) {
  const auto& all = builtin_profiles();
  auto it = std::find_if(all.begin(), all.end(), [&](const DeviceProfile& p) { return p.name == name; });
  return it == all.end() ? nullptr : &*it;
}

}  // namespace rowsim::device
