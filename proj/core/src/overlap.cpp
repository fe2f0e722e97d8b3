#include <algorithm>
#include <cmath>
#include <set>

#include "rowsim/characterizer.hpp"

namespace rowsim::characterize {

using dram::Bank;
using dram::CommandKind;
using dram::FlipReport;

double DirectionHistogram::one_to_zero_fraction() const {
  return total() ? static_cast<double>(one_to_zero) / static_cast<double>(total()) : 0.0;
}

double DirectionHistogram::zero_to_one_fraction() const {
  return total() ? static_cast<double>(zero_to_one) / static_cast<double>(total()) : 0.0;
}

double OverlapReport::press_hammer_fraction() const {
  return press ? static_cast<double>(press_and_hammer) / static_cast<double>(press) : 0.0;
}

double OverlapReport::press_retention_fraction() const {
  return press ? static_cast<double>(press_and_retention) / static_cast<double>(press) : 0.0;
}

Materialization materialization_of(const Bank& bank) {
  const auto& c = bank.config();
  return {bank.profile().name,
          c.device_seed.value_or(bank.profile().row_variation.seed),
          c.rows,
          c.cells_per_row ? c.cells_per_row : bank.profile().cells_per_row,
          c.temp_c,
          c.pattern};
}

namespace {

using CellKey = std::pair<RowIndex, std::uint32_t>;

std::set<CellKey> cells_of(const FlipReport& r) {
  std::set<CellKey> s;
  for (const auto& row : r.rows) {
    for (const auto& e : row.cells) s.emplace(row.row, e.cell);
  }
  return s;
}

DirectionHistogram histogram(const FlipReport& r) {
  DirectionHistogram h;
  for (const auto& row : r.rows) {
    for (const auto& e : row.cells) {
      (e.direction == FlipDirection::OneToZero ? h.one_to_zero : h.zero_to_one)++;
    }
  }
  return h;
}

std::uint64_t common(const std::set<CellKey>& a, const std::set<CellKey>& b) {
  std::uint64_t n = 0;
  for (const auto& k : a) n += b.count(k);
  return n;
}

}  // namespace

OverlapReport overlap_and_direction(const FlipRun& hammer, const FlipRun& press, const FlipRun& retention,
                                    std::uint64_t cells) {
  if (!(hammer.device == press.device) || !(press.device == retention.device)) {
    throw ConfigError("overlap runs were taken on different materializations or data patterns");
  }
  const auto p = cells_of(press.flips);
  const auto h = cells_of(hammer.flips);
  const auto r = cells_of(retention.flips);
  OverlapReport rep;
  rep.cells = cells;
  rep.press = p.size();
  rep.hammer = h.size();
  rep.retention = r.size();
  rep.press_and_hammer = common(p, h);
  rep.press_and_retention = common(p, r);
  rep.press_directions = histogram(press.flips);
  rep.hammer_directions = histogram(hammer.flips);
  rep.retention_directions = histogram(retention.flips);
  return rep;
}

namespace {

dram::BankConfig overlap_bank(const OverlapConfig& cfg, const std::vector<RowIndex>& aggressors) {
  dram::BankConfig bc;
  bc.rows = cfg.rows;
  bc.timing = cfg.timing;
  bc.temp_c = cfg.temp_c;
  bc.sidedness = dram::SidednessMode::Single;
  bc.device_seed = cfg.device_seed;
  bc.pattern = {cfg.pattern, aggressors};
  bc.record_events = false;
  return bc;
}

// Activations per aggressor that push every victim cell past its threshold.
std::uint64_t saturating_count(const device::DeviceProfile& dev, Nanos t_on, int temp_c) {
  const double top = dev.base_threshold * dev.row_variation.max_factor * dev.max_threshold_mult;
  return static_cast<std::uint64_t>(
             std::ceil(top / device::damage_per_activation(dev, t_on, Sidedness::Single, temp_c))) +
         1;
}

FlipRun hammer_all(const device::DeviceProfile& dev, const OverlapConfig& cfg, const std::vector<RowIndex>& aggressors,
                   Nanos t_on) {
  Bank bank(dev, overlap_bank(cfg, aggressors));
  const std::uint64_t n = saturating_count(dev, t_on, cfg.temp_c);
  Nanos t{0};
  for (const auto a : aggressors) {
    for (std::uint64_t i = 0; i < n; ++i) {
      bank.apply({CommandKind::Activate, a, t});
      bank.apply({CommandKind::Precharge, a, t + t_on});
      t += t_on + cfg.timing.t_rc;
    }
  }
  return {materialization_of(bank), bank.snapshot_bitflips(bank.config().pattern)};
}

}  // namespace

OverlapExperiment run_overlap(const device::DeviceProfile& profile, const OverlapConfig& cfg) {
  if (cfg.rows < 4) throw ConfigError("overlap experiment needs at least 4 rows");
  if (cfg.hammer_t_on < cfg.timing.t_ras_min || cfg.press_t_on < cfg.timing.t_ras_min) {
    throw ConfigError("overlap t_on values must be >= t_ras_min");
  }
  const auto dev = device::at_temperature(profile, cfg.temp_c);
  if (cfg.hammer_t_on > dev.press_onset) throw ConfigError("hammer_t_on must not exceed the press onset");
  if (cfg.press_t_on <= dev.press_onset) throw ConfigError("press_t_on must exceed the press onset");

  std::vector<RowIndex> aggressors;
  std::uint64_t victims = 0;
  for (RowIndex a = 2; a < cfg.rows; a += 4) {
    aggressors.push_back(a);
    victims += 1 + (a + 1 < cfg.rows);
  }

  OverlapExperiment ex;
  ex.hammer = hammer_all(dev, cfg, aggressors, cfg.hammer_t_on);
  ex.press = hammer_all(dev, cfg, aggressors, cfg.press_t_on);
  {
    Bank bank(dev, overlap_bank(cfg, aggressors));
    bank.check_retention(cfg.retention_wait);
    ex.retention = {materialization_of(bank), bank.snapshot_bitflips(bank.config().pattern)};
  }
  const std::uint32_t cpr = ex.hammer.device.cells_per_row;
  ex.report = overlap_and_direction(ex.hammer, ex.press, ex.retention, victims * cpr);
  return ex;
}

}  // namespace rowsim::characterize
