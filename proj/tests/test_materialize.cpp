#include <gtest/gtest.h>

#include <cmath>

#include "rowsim/materialize.hpp"
#include "support.hpp"

using namespace rowsim;
using device::VulnClass;
using support::builtin;

TEST(Materialize, SeedDeterminesLayout) {
  const auto& p = builtin("paper-mean-80C");
  EXPECT_EQ(device::materialize_rows(p, 64, 1024, 42), device::materialize_rows(p, 64, 1024, 42));
  EXPECT_NE(device::materialize_rows(p, 64, 1024, 42), device::materialize_rows(p, 64, 1024, 43));
  // Rows are independent streams: materializing a single row matches its slot in a batch.
  EXPECT_EQ(device::materialize_row(p, 17, 1024, 42), device::materialize_rows(p, 64, 1024, 42)[17]);
}

TEST(Materialize, DegenerateVariationPinsEveryRow) {
  const auto p = support::pinned(builtin("paper-mean-50C"));
  for (const auto& r : device::materialize_rows(p, 256, 64, 9)) EXPECT_EQ(r.row_factor, 1.0);
}

TEST(Materialize, RowFactorsStayInsideEnvelope) {
  const auto& p = builtin("paper-mean-80C");
  for (const auto& r : device::materialize_rows(p, 2048, 16, 5)) {
    EXPECT_GE(r.row_factor, p.row_variation.min_factor);
    EXPECT_LE(r.row_factor, p.row_variation.max_factor);
  }
}

TEST(Materialize, EveryRowHasMinimumThresholdPairs) {
  const auto& p = builtin("paper-mean-80C");
  for (const auto& r : device::materialize_rows(p, 128, 1024, 3)) {
    int press = 0;
    int hammer = 0;
    for (const auto& c : r.cells) {
      if (c.threshold_mult != 1.0) continue;
      press += c.vuln_class == VulnClass::PressOnly && c.direction == FlipDirection::OneToZero;
      hammer += c.vuln_class == VulnClass::HammerOnly && c.direction == FlipDirection::ZeroToOne;
    }
    EXPECT_GE(press, 2);
    EXPECT_GE(hammer, 2);
  }
}

TEST(Materialize, ClassFractionsWithinThreeSigma) {
  const auto& p = builtin("paper-mean-80C");
  constexpr double kRows = 1024;
  constexpr double kCells = 1024;
  const auto rows = device::materialize_rows(p, 1024, 1024, 11);
  double press = 0;
  double both = 0;
  double ret = 0;
  for (const auto& r : rows) {
    for (const auto& c : r.cells) {
      EXPECT_GE(c.threshold_mult, 1.0);
      EXPECT_LE(c.threshold_mult, p.max_threshold_mult);
      if (c.threshold_mult == 1.0 && c.vuln_class != VulnClass::Retention) continue;  // forced pairs
      press += c.vuln_class == VulnClass::PressOnly || c.vuln_class == VulnClass::Both;
      both += c.vuln_class == VulnClass::Both;
      ret += c.vuln_class == VulnClass::Retention;
    }
  }
  // The four forced cells per row overwrite whatever was sampled there.
  const double trials = kRows * (kCells - 4);
  auto within = [&](double count, double prob) {
    const double sigma = std::sqrt(trials * prob * (1 - prob));
    return std::abs(count - trials * prob) <= 3 * sigma;
  };
  EXPECT_TRUE(within(press, p.press_cell_fraction)) << press;
  EXPECT_TRUE(within(ret, p.retention_tail.fraction)) << ret;
  EXPECT_LT(both / press, p.overlap_rh + 3 * std::sqrt(p.overlap_rh / press));
}

TEST(Materialize, NoRetentionTailMeansNoRetentionCells) {
  auto p = builtin("paper-mean-80C");
  p.retention_tail.fraction = 0.0;
  p.overlap_ret = 0.0;
  for (const auto& r : device::materialize_rows(p, 128, 1024, 1)) {
    for (const auto& c : r.cells) EXPECT_EQ(c.retention_time, device::kNoRetentionFailure);
  }
}
