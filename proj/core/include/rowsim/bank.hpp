#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rowsim/command.hpp"
#include "rowsim/materialize.hpp"
#include "rowsim/profile.hpp"
#include "rowsim/timing.hpp"

namespace rowsim::dram {

enum class DataPattern : std::uint8_t { Checkerboard, Inverse, Solid };

std::string_view to_string(DataPattern p);
DataPattern parse_data_pattern(std::string_view text);

/// Initial bank contents: aggressor rows get one byte, every other row the other.
/// Checkerboard is victim 0x55 / aggressor 0xAA, Inverse swaps them, Solid is 0xFF / 0x00.
struct ReferencePattern {
  DataPattern pattern = DataPattern::Checkerboard;
  std::vector<RowIndex> aggressors;

  std::uint8_t byte_for(RowIndex row) const;
  std::uint8_t bit(RowIndex row, std::uint32_t cell) const {
    return static_cast<std::uint8_t>((byte_for(row) >> (cell % 8)) & 1U);
  }

  bool operator==(const ReferencePattern&) const = default;
};

/// How the bank picks the curve used to charge a victim.
/// Auto: double-sided if the victim's mirror aggressor was activated since the victim's last
/// refresh, else single-sided. Single/Double pin the context for characterization runs.
enum class SidednessMode : std::uint8_t { Auto, Single, Double };

struct BankConfig {
  RowIndex rows = 65'536;
  TimingParams timing;
  std::uint32_t blast_radius = 1;
  int temp_c = 50;
  bool strict_jedec = false;
  SidednessMode sidedness = SidednessMode::Auto;
  /// Device instance; defaults to the profile's row_variation.seed.
  std::optional<std::uint64_t> device_seed;
  /// 0 keeps the profile's cells_per_row.
  std::uint32_t cells_per_row = 0;
  ReferencePattern pattern;
  /// Keep every event in the bank's log (apply() still returns them either way).
  bool record_events = true;
};

struct BitFlip {
  RowIndex row = 0;
  std::uint32_t cell = 0;
  FlipDirection direction = FlipDirection::OneToZero;
  Mechanism mechanism = Mechanism::Press;
  Nanos time{0};

  bool operator==(const BitFlip&) const = default;
};

struct TimingWarning {
  Nanos time{0};
  RowIndex row = 0;
  Nanos t_on{0};
  std::string message;

  bool operator==(const TimingWarning&) const = default;
};

using Event = std::variant<BitFlip, TimingWarning>;
using EventList = std::vector<Event>;

struct FlipReport {
  struct Entry {
    std::uint32_t cell = 0;
    FlipDirection direction = FlipDirection::OneToZero;
    Mechanism mechanism = Mechanism::Press;

    bool operator==(const Entry&) const = default;
  };
  struct RowFlips {
    RowIndex row = 0;
    std::vector<Entry> cells;

    bool operator==(const RowFlips&) const = default;
  };
  /// Rows with at least one flipped cell, ascending; cells ascending.
  std::vector<RowFlips> rows;

  std::size_t total() const;
  std::size_t count(RowIndex row) const;
  std::size_t rows_with_flips() const { return rows.size(); }

  bool operator==(const FlipReport&) const = default;
};

/// Relative slack on the flip comparison. Without it n x (base / acmin) can land one ulp short of
/// base when acmin is an integer and the flip would need one extra activation.
inline constexpr double kFlipSlack = 1e-12;

/// One DRAM bank: open-row state machine, refresh bookkeeping and disturbance accumulation.
///
/// Rows are built on first touch from the profile, so huge banks cost nothing until used.
/// Not thread-safe; separate Bank objects share nothing.
class Bank {
 public:
  Bank(const device::DeviceProfile& profile, BankConfig cfg);
  Bank(const Bank&) = delete;
  Bank& operator=(const Bank&) = delete;
  Bank(Bank&&) = default;

  /// Applies one command. Throws StateError on timestamp regression or wrong row state, and
  /// TimingViolation for tON above the JEDEC limit in strict mode.
  EventList apply(const Command& cmd);

  EventList auto_refresh(Nanos at) { return apply({CommandKind::AutoRefresh, kNoRow, at}); }

  /// Retention failures of every row at time `at` (refresh assumed disabled since each row's
  /// last restore). Does not move the bank clock.
  EventList check_retention(Nanos at);

  /// Throws ConfigError when `ref` is not the pattern the bank was initialized with.
  FlipReport snapshot_bitflips(const ReferencePattern& ref) const;

  Nanos now() const { return now_; }
  std::optional<RowIndex> open_row() const { return open_ ? std::optional<RowIndex>(open_row_) : std::nullopt; }
  Nanos open_since() const { return open_since_; }
  std::uint32_t refresh_cursor() const { return cursor_; }
  std::uint32_t rows_per_group() const { return rows_per_group_; }

  double disturbance(RowIndex row) const;
  Nanos last_refresh(RowIndex row) const;
  /// base_threshold x row factor: the flip threshold of the row's weakest cells.
  double row_threshold(RowIndex row);
  std::uint8_t stored_bit(RowIndex row, std::uint32_t cell);

  std::uint64_t flip_count() const { return flip_count_; }
  std::uint64_t flips_in_row(RowIndex row) const;
  std::uint64_t activations() const { return activations_; }
  /// Largest disturbance / row_threshold seen on any row so far; >= 1 means a weakest cell was
  /// reachable (whether or not its stored data allowed a flip).
  double peak_disturbance_ratio() const { return peak_ratio_; }

  const EventList& events() const { return events_; }
  const device::DeviceProfile& profile() const { return profile_; }
  const BankConfig& config() const { return cfg_; }

 private:
  struct Candidate {
    double threshold;
    std::uint32_t idx;
  };

  struct RowState {
    double factor = 1.0;
    double threshold = 0.0;
    std::vector<device::CellVuln> cells;
    std::vector<std::uint8_t> bits;
    /// 0 = intact, else 1 + the Mechanism that flipped the cell.
    std::vector<std::uint8_t> flipped;
    std::array<std::vector<Candidate>, 2> candidates;
    std::array<std::uint32_t, 2> next{0, 0};
    double acc = 0.0;
    double comp = 0.0;
    Nanos last_refresh{0};
    std::optional<Nanos> last_activate;
    std::uint64_t flips = 0;
  };

  RowState& state(RowIndex row);
  RowState build_row(RowIndex row) const;
  void rebuild_candidates(RowState& rs) const;
  void restore(RowState& rs, Nanos at);
  void check_row(RowIndex row) const;
  std::uint32_t group_of(RowIndex row) const { return row / rows_per_group_; }

  double damage(Sidedness s, Nanos t_on);
  void close_row(Nanos at, EventList& out);
  void charge(RowIndex victim, RowIndex aggressor, Nanos t_on, Mechanism mech, Nanos at, EventList& out);
  void flip(RowIndex row, RowState& rs, std::uint32_t idx, Mechanism mech, Nanos at, EventList& out);
  void emit(Event e, EventList& out);

  device::DeviceProfile profile_;
  BankConfig cfg_;
  std::uint64_t seed_;
  std::uint32_t cells_per_row_;
  std::uint32_t rows_per_group_;
  const device::AcminCurve* single_curve_;
  const device::AcminCurve* double_curve_;
  std::array<std::pair<Nanos, double>, 2> damage_cache_{};

  std::unordered_map<RowIndex, RowState> rows_;
  std::vector<Nanos> group_refresh_;
  std::uint32_t cursor_ = 0;

  Nanos now_{0};
  bool open_ = false;
  RowIndex open_row_ = 0;
  Nanos open_since_{0};

  std::uint64_t flip_count_ = 0;
  std::uint64_t activations_ = 0;
  double peak_ratio_ = 0.0;
  EventList events_;
};

/// Replays a trace, inserting the implied precharge before an ACT or REF that finds a row open.
EventList replay(Bank& bank, const Trace& trace);

}  // namespace rowsim::dram
