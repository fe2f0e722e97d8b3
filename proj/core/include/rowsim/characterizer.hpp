#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rowsim/bank.hpp"

namespace rowsim::characterize {

/// Raised when even a window-filling hammer does not flip the victim.
class NotVulnerable : public Error {
 public:
  using Error::Error;
};

/// Device under test: everything a probe needs to build a fresh bank.
struct ProbeSetup {
  RowIndex bank_rows = 65'536;
  int temp_c = 50;
  dram::TimingParams timing;
  dram::DataPattern pattern = dram::DataPattern::Checkerboard;
  std::optional<std::uint64_t> device_seed;
  std::uint32_t cells_per_row = 0;
  bool strict_jedec = false;
};

struct AcminResult {
  RowIndex row = 0;
  Nanos t_on{0};
  Sidedness sidedness = Sidedness::Single;
  int temp_c = 50;
  /// nullopt when the row does not flip within one refresh window (sweeps only).
  std::optional<std::uint64_t> acmin;
  std::uint32_t reps = 0;
  /// Victim cells flipped by a hammer of exactly `acmin` activations.
  std::uint64_t flips = 0;

  bool operator==(const AcminResult&) const = default;
};

inline const std::vector<std::uint64_t> kDefaultSeeds{1, 2, 3, 4, 5};

/// Aggressors for a victim: the upper neighbor (lower one at the top edge) for single-sided,
/// both neighbors for double-sided.
std::vector<RowIndex> aggressors_for(RowIndex victim, Sidedness sidedness, RowIndex bank_rows);

/// Outcome of one probe: hammer `count` activations on a fresh bank without refresh.
struct ProbeOutcome {
  /// 1-based activation whose precharge flipped the first victim cell.
  std::optional<std::uint64_t> first_flip;
  std::uint64_t victim_flips = 0;
};

ProbeOutcome probe(const device::DeviceProfile& profile, const ProbeSetup& setup, RowIndex victim, Nanos t_on,
                   Sidedness sidedness, std::uint64_t count, std::uint64_t seed = 0);

/// Doubling search from 1 activation until a flip (or the window-filling count), then a
/// binary search below the first flip. Each probe runs on a fresh bank and stops at the
/// victim's first flip. Reports the minimum over `seeds`; the seed sets the phase of the
/// probe against the refresh schedule.
AcminResult measure_acmin(const device::DeviceProfile& profile, const ProbeSetup& setup, RowIndex victim,
                          Nanos t_on, Sidedness sidedness, const std::vector<std::uint64_t>& seeds = kDefaultSeeds);

struct SweepConfig {
  std::vector<Nanos> t_on_values;
  Sidedness sidedness = Sidedness::Single;
  ProbeSetup setup;
  /// Rows measured in total, split across the first, middle and last block of the bank.
  std::uint32_t rows = 64;
  /// Explicit victims; overrides `rows`.
  std::vector<RowIndex> victims;
  std::vector<std::uint64_t> seeds = kDefaultSeeds;
  unsigned threads = 1;

  void validate() const;
};

struct SummaryRow {
  Nanos t_on{0};
  double mean = 0.0;
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  /// Rows that flipped; the statistics cover only these.
  std::size_t vulnerable = 0;

  bool operator==(const SummaryRow&) const = default;
};

struct SweepResult {
  /// Sorted by (row, t_on).
  std::vector<AcminResult> results;
  /// One row per t_on, ascending.
  std::vector<SummaryRow> summary;
};

/// First/middle/last blocks of `total` rows, skipping the two edge rows.
std::vector<RowIndex> block_rows(RowIndex bank_rows, std::uint32_t total);

SweepResult sweep(const device::DeviceProfile& profile, const SweepConfig& cfg);

/// mean(ACmin at t_on) / mean(ACmin at the smallest t_on); nullopt if either is missing.
std::optional<double> mean_ratio(const SweepResult& r, Nanos t_on);

void write_results_csv(std::ostream& out, const std::vector<AcminResult>& results);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

// --- overlap and flip direction ---

/// Identity of a materialized device and its initial data. Runs are only comparable when these
/// agree.
struct Materialization {
  std::string profile;
  std::uint64_t device_seed = 0;
  RowIndex rows = 0;
  std::uint32_t cells_per_row = 0;
  int temp_c = 50;
  dram::ReferencePattern pattern;

  bool operator==(const Materialization&) const = default;
};

Materialization materialization_of(const dram::Bank& bank);

struct FlipRun {
  Materialization device;
  dram::FlipReport flips;
};

struct DirectionHistogram {
  std::uint64_t one_to_zero = 0;
  std::uint64_t zero_to_one = 0;

  std::uint64_t total() const { return one_to_zero + zero_to_one; }
  double one_to_zero_fraction() const;
  double zero_to_one_fraction() const;
};

struct OverlapReport {
  std::uint64_t cells = 0;
  std::uint64_t press = 0;
  std::uint64_t hammer = 0;
  std::uint64_t retention = 0;
  std::uint64_t press_and_hammer = 0;
  std::uint64_t press_and_retention = 0;
  DirectionHistogram press_directions;
  DirectionHistogram hammer_directions;
  DirectionHistogram retention_directions;

  double press_hammer_fraction() const;
  double press_retention_fraction() const;
};

/// Throws ConfigError unless the three runs share one materialization.
OverlapReport overlap_and_direction(const FlipRun& hammer, const FlipRun& press, const FlipRun& retention,
                                    std::uint64_t cells);

struct OverlapConfig {
  RowIndex rows = 2'048;
  int temp_c = 80;
  std::optional<std::uint64_t> device_seed;
  dram::DataPattern pattern = dram::DataPattern::Checkerboard;
  Nanos hammer_t_on{36};
  Nanos press_t_on{7'800};
  /// Unrefreshed interval for the retention run.
  Nanos retention_wait{4'000'000'000};
  dram::TimingParams timing;
};

/// Aggressors at rows 4i+2, victims 4i+1 and 4i+3. Each aggressor is hammered (and, in a
/// separate bank, pressed) until every vulnerable victim cell has been driven past its
/// threshold; a third bank only waits. Refresh is off in all three.
struct OverlapExperiment {
  OverlapReport report;
  FlipRun hammer;
  FlipRun press;
  FlipRun retention;
};

OverlapExperiment run_overlap(const device::DeviceProfile& profile, const OverlapConfig& cfg);

// --- single vs double sided crossover ---

/// Signed single minus double ACmin at t_on.
double sidedness_gap(const device::DeviceProfile& profile, Nanos t_on, int temp_c);

/// Every t_on in [lo, hi] where the gap changes sign, found by bisection in log t_on on each
/// interpolation segment. Each point is the first nanosecond carrying the new sign (or the
/// anchor where the gap is exactly zero).
std::vector<Nanos> crossover_points(const device::DeviceProfile& profile, Nanos lo, Nanos hi, int temp_c);

/// The first crossover, or nullopt when the gap keeps one sign.
std::optional<Nanos> crossover_scan(const device::DeviceProfile& profile, Nanos lo, Nanos hi, int temp_c);

struct GapRow {
  Nanos t_on{0};
  double single = 0.0;
  double dbl = 0.0;
  double gap = 0.0;
};

std::vector<GapRow> gap_table(const device::DeviceProfile& profile, const std::vector<Nanos>& t_on_values,
                              int temp_c);
void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows);

}  // namespace rowsim::characterize
