#include <gtest/gtest.h>

#include <filesystem>

#include "rowsim/profile.hpp"
#include "support.hpp"

using namespace rowsim;
using device::AcminCurve;
using device::acmin_at;
using device::DeviceProfile;
using support::builtin;
using support::Dec50;

namespace {

constexpr Nanos kTras{36};
constexpr Nanos kRefi{7'800};
constexpr Nanos k9Refi{70'200};

double ratio(const DeviceProfile& p, Nanos t, int temp) {
  return acmin_at(p, kTras, Sidedness::Single, temp) / acmin_at(p, t, Sidedness::Single, temp);
}

}  // namespace

TEST(Curve, RejectsBadAnchors) {
  using device::CurveAnchor;
  EXPECT_THROW(AcminCurve(std::vector<CurveAnchor>{}), ProfileError);
  EXPECT_THROW(AcminCurve({{Nanos{36}, 0.5}}), ProfileError);
  EXPECT_THROW(AcminCurve({{Nanos{36}, 10.0}, {Nanos{36}, 5.0}}), ProfileError);
  EXPECT_THROW(AcminCurve({{Nanos{36}, 10.0}, {Nanos{100}, 20.0}}), ProfileError);
  EXPECT_THROW(AcminCurve({{Nanos{0}, 10.0}}), ProfileError);
}

TEST(Curve, ExactAtAnchorsAndFlatBeyondLast) {
  const AcminCurve c({{Nanos{36}, 1000.0}, {Nanos{1000}, 100.0}, {Nanos{5000}, 3.0}});
  EXPECT_EQ(c.at(Nanos{36}), 1000.0);
  EXPECT_EQ(c.at(Nanos{1000}), 100.0);
  EXPECT_EQ(c.at(Nanos{5000}), 3.0);
  EXPECT_EQ(c.at(Nanos{1'000'000}), 3.0);
  EXPECT_THROW(c.at(Nanos{35}), ProfileError);
}

// Interpolation is geometric in both axes; recompute with 50 significant digits.
TEST(Curve, LogLogInterpolationMatchesHighPrecisionOracle) {
  for (const auto& p : device::builtin_profiles()) {
    for (const auto& [key, curve] : p.curves) {
      const auto a = curve.anchors();
      for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        for (int k = 1; k < 8; ++k) {
          const long long lo = a[i].t_on.count();
          const long long hi = a[i + 1].t_on.count();
          const long long t = lo + (hi - lo) * k / 8;
          if (t == lo) continue;
          const Dec50 frac = log(Dec50(t) / Dec50(lo)) / log(Dec50(hi) / Dec50(lo));
          const Dec50 expect = Dec50(a[i].acmin) * pow(Dec50(a[i + 1].acmin) / Dec50(a[i].acmin), frac);
          const double want = std::max(1.0, expect.convert_to<double>());
          EXPECT_NEAR(curve.at(Nanos{t}), want, 1e-11 * want) << p.name << " t=" << t;
        }
      }
    }
  }
}

TEST(Profile, BuiltinsValidateAndStartAtBase) {
  ASSERT_GE(device::builtin_profiles().size(), 6U);
  for (const auto& p : device::builtin_profiles()) {
    EXPECT_NO_THROW(p.validate());
    EXPECT_EQ(acmin_at(p, kTras, Sidedness::Single, p.reference_temp_c), p.base_threshold) << p.name;
  }
}

TEST(Profile, MeanProfilesHitReportedReductions) {
  EXPECT_NEAR(ratio(builtin("paper-mean-80C"), kRefi, 80), 17.6, 0.176);
  EXPECT_NEAR(ratio(builtin("paper-mean-80C"), k9Refi, 80), 159.4, 1.594);
  EXPECT_NEAR(ratio(builtin("paper-mean-50C"), kRefi, 50), 21.0, 0.21);
  EXPECT_NEAR(ratio(builtin("paper-mean-50C"), k9Refi, 50), 190.0, 1.9);
  EXPECT_EQ(acmin_at(builtin("paper-mean-80C"), Nanos{30'000'000}, Sidedness::Single, 80), 1.0);
}

TEST(Profile, WeightIsNormalizedAndMonotone) {
  for (const auto& p : device::builtin_profiles()) {
    for (const auto& [key, c] : p.curves) {
      EXPECT_EQ(device::weight(p, kTras, key.sidedness, key.temp_c), 1.0);
      double prev = 1.0;
      for (long long t = 36; t <= 40'000'000; t = t * 5 / 4 + 1) {
        const double w = device::weight(p, Nanos{t}, key.sidedness, key.temp_c);
        EXPECT_GE(w, prev) << p.name << " t=" << t;
        prev = w;
      }
    }
  }
  EXPECT_NEAR(device::weight(builtin("paper-mean-50C"), kRefi, Sidedness::Single, 50), 21.0, 0.21);
}

TEST(Profile, TemperatureFactorsOfManufacturerPresets) {
  const std::pair<const char*, double> cases[] = {
      {"paper-mfrS-50C", 0.55}, {"paper-mfrH-50C", 0.32}, {"paper-mfrM-50C", 0.59}};
  for (const auto& [name, f] : cases) {
    const auto& p = builtin(name);
    const auto hot = device::scale_temperature(p, 50, 80);
    const double r = acmin_at(hot, kRefi, Sidedness::Single, 80) / acmin_at(p, kRefi, Sidedness::Single, 50);
    EXPECT_NEAR(r, f, 0.01 * f) << name;
    EXPECT_EQ(acmin_at(hot, kTras, Sidedness::Single, 80), p.base_threshold);
    EXPECT_NEAR(*device::temperature_factor(p, 80, 50), 1.0 / f, 1e-12);
  }
}

TEST(Profile, SameTemperatureScalingIsIdentity) {
  const auto& p = builtin("paper-mfrS-50C");
  EXPECT_EQ(device::scale_temperature(p, 50, 50), p);
  EXPECT_EQ(device::at_temperature(p, 50), p);
}

TEST(Profile, ScalingPreservesMonotonicity) {
  for (const auto& p : device::builtin_profiles()) {
    for (const auto& s : p.temp_scale) {
      const auto q = device::scale_temperature(p, s.from_c, s.to_c);
      for (const auto& [key, c] : q.curves) {
        const auto a = c.anchors();
        for (std::size_t i = 1; i < a.size(); ++i) {
          EXPECT_LE(a[i].acmin, a[i - 1].acmin);
          EXPECT_GE(a[i].acmin, 1.0);
        }
      }
    }
  }
}

TEST(Profile, MissingTemperatureFactorIsAnError) {
  EXPECT_THROW(device::scale_temperature(builtin("paper-mean-50C"), 50, 80), ProfileError);
  EXPECT_THROW(acmin_at(builtin("paper-mean-50C"), kRefi, Sidedness::Single, 80), ProfileError);
}

TEST(Profile, JsonRoundTripIsBitExact) {
  for (const auto& p : device::builtin_profiles()) {
    EXPECT_EQ(device::profile_from_json(device::to_json(p)), p) << p.name;
  }
  auto odd = builtin("crossover");
  odd.base_threshold = 31'999.999999999996;
  odd.overlap_rh = 1.0 / 3.0;
  odd.curves.insert_or_assign(device::CurveKey{Sidedness::Single, 50},
                              AcminCurve({{Nanos{36}, odd.base_threshold}, {Nanos{777}, 0.1 + 1234.2}}));
  EXPECT_EQ(device::profile_from_json(device::to_json(odd)), odd);
}

TEST(Profile, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "rowsim_profile_roundtrip.json";
  device::save_profile(builtin("paper-mfrH-50C"), path.string());
  EXPECT_EQ(device::load_profile(path.string()), builtin("paper-mfrH-50C"));
  EXPECT_EQ(device::resolve_profile(path.string()), builtin("paper-mfrH-50C"));
  std::filesystem::remove(path);
}

TEST(Profile, RejectsMalformedJson) {
  EXPECT_THROW(device::profile_from_json("{"), ProfileError);
  EXPECT_THROW(device::profile_from_json("{\"name\": \"x\"}"), ProfileError);
  EXPECT_THROW(device::resolve_profile("definitely-not-a-profile"), ProfileError);
}

TEST(Profile, RescaleBaseKeepsRatiosUntilClamped) {
  const auto& p = builtin("paper-mean-80C");
  const auto q = device::rescale_base(p, 64.0);
  EXPECT_EQ(q.base_threshold, 64.0);
  EXPECT_NEAR(ratio(q, kRefi, 80), 17.6, 1e-9);
  EXPECT_EQ(acmin_at(q, k9Refi, Sidedness::Single, 80), 1.0);  // 64 / 159.4 clamps to one activation
  EXPECT_THROW(device::rescale_base(p, 0.5), ProfileError);
}

TEST(Profile, CrossoverBuiltinChangesSignOnce) {
  const auto& p = builtin("crossover");
  int changes = 0;
  double prev = 0.0;
  for (long long t = 36; t <= 30'000'000; t = t * 11 / 10 + 1) {
    const double d =
        acmin_at(p, Nanos{t}, Sidedness::Single, 50) - acmin_at(p, Nanos{t}, Sidedness::Double, 50);
    if (prev != 0.0 && d != 0.0 && (d > 0) != (prev > 0)) ++changes;
    if (d != 0.0) prev = d;
    if (t == 36) {
      EXPECT_LT(d, 0.0);
    }
  }
  EXPECT_GT(prev, 0.0);
  EXPECT_EQ(changes, 1);
}
