#include "rowsim/bank.hpp"

#include <algorithm>
#include <cmath>

namespace rowsim::dram {

std::string_view to_string(DataPattern p) {
  switch (p) {
    case DataPattern::Checkerboard: return "checkerboard";
    case DataPattern::Inverse: return "inverse";
    case DataPattern::Solid: return "solid";
  }
  return "unknown";
}

DataPattern parse_data_pattern(std::string_view text) {
  if (text == "checkerboard") return DataPattern::Checkerboard;
  if (text == "inverse") return DataPattern::Inverse;
  if (text == "solid") return DataPattern::Solid;
  throw ConfigError("unknown data pattern '" + std::string(text) + "'");
}

std::uint8_t ReferencePattern::byte_for(RowIndex row) const {
  const bool aggr = std::find(aggressors.begin(), aggressors.end(), row) != aggressors.end();
  switch (pattern) {
    case DataPattern::Checkerboard: return aggr ? 0xAA : 0x55;
    case DataPattern::Inverse: return aggr ? 0x55 : 0xAA;
    case DataPattern::Solid: return aggr ? 0x00 : 0xFF;
  }
  return 0;
}

std::size_t FlipReport::total() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.cells.size();
  return n;
}

std::size_t FlipReport::count(RowIndex row) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), row,
                             [](const RowFlips& r, RowIndex v) { return r.row < v; });
  return it != rows.end() && it->row == row ? it->cells.size() : 0;
}

Bank::Bank(const device::DeviceProfile& profile, BankConfig cfg)
    : profile_(device::at_temperature(profile, cfg.temp_c)), cfg_(std::move(cfg)) {
  cfg_.timing.validate();
  profile_.validate();
  if (cfg_.rows == 0) throw ConfigError("bank needs at least one row");
  if (cfg_.blast_radius == 0) throw ConfigError("blast_radius must be >= 1");
  seed_ = cfg_.device_seed.value_or(profile_.row_variation.seed);
  cells_per_row_ = cfg_.cells_per_row ? cfg_.cells_per_row : profile_.cells_per_row;
  rows_per_group_ = (cfg_.rows + cfg_.timing.ref_groups - 1) / cfg_.timing.ref_groups;
  group_refresh_.assign(cfg_.timing.ref_groups, Nanos{0});
  std::sort(cfg_.pattern.aggressors.begin(), cfg_.pattern.aggressors.end());

  single_curve_ = &profile_.curve(Sidedness::Single, cfg_.temp_c);
  double_curve_ = profile_.has_curve(Sidedness::Double, cfg_.temp_c)
                      ? &profile_.curve(Sidedness::Double, cfg_.temp_c)
                      : nullptr;
  if (cfg_.sidedness == SidednessMode::Double && !double_curve_) {
    throw ProfileError("profile '" + profile_.name + "' has no double-sided curve at " +
                       std::to_string(cfg_.temp_c) + " C");
  }
  damage_cache_.fill({Nanos{-1}, 0.0});
}

Bank::RowState Bank::build_row(RowIndex row) const {
  RowState rs;
  auto vuln = device::materialize_row(profile_, row, cells_per_row_, seed_);
  rs.factor = vuln.row_factor;
  rs.threshold = profile_.base_threshold * rs.factor;
  rs.cells = std::move(vuln.cells);
  rs.bits.resize(rs.cells.size());
  rs.flipped.assign(rs.cells.size(), 0);
  for (std::size_t i = 0; i < rs.cells.size(); ++i) rs.bits[i] = cfg_.pattern.bit(row, rs.cells[i].cell);
  rs.last_refresh = group_refresh_[group_of(row)];
  rebuild_candidates(rs);
  return rs;
}

void Bank::rebuild_candidates(RowState& rs) const {
  for (int m = 0; m < 2; ++m) {
    const auto mech = m == 0 ? Mechanism::Hammer : Mechanism::Press;
    auto& list = rs.candidates[m];
    list.clear();
    for (std::uint32_t i = 0; i < rs.cells.size(); ++i) {
      const auto& c = rs.cells[i];
      if (c.admits(mech) && !rs.flipped[i] && rs.bits[i] == source_bit(c.direction)) {
        list.push_back({rs.threshold * c.threshold_mult, i});
      }
    }
    std::sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
      return a.threshold < b.threshold || (a.threshold == b.threshold && a.idx < b.idx);
    });
    rs.next[m] = 0;
  }
}

Bank::RowState& Bank::state(RowIndex row) {
  auto it = rows_.find(row);
  if (it != rows_.end()) return it->second;
  return rows_.emplace(row, build_row(row)).first->second;
}

void Bank::check_row(RowIndex row) const {
  if (row >= cfg_.rows) {
    throw StateError("row " + std::to_string(row) + " outside bank of " + std::to_string(cfg_.rows) + " rows");
  }
}

void Bank::restore(RowState& rs, Nanos at) {
  rs.acc = 0.0;
  rs.comp = 0.0;
  rs.next = {0, 0};
  rs.last_refresh = at;
}

void Bank::emit(Event e, EventList& out) {
  if (cfg_.record_events) events_.push_back(e);
  out.push_back(std::move(e));
}

double Bank::damage(Sidedness s, Nanos t_on) {
  const int k = s == Sidedness::Double ? 1 : 0;
  auto& slot = damage_cache_[k];
  if (slot.first != t_on) {
    const auto* curve = (s == Sidedness::Double) ? double_curve_ : single_curve_;
    slot = {t_on, profile_.base_threshold / curve->at(t_on)};
  }
  return slot.second;
}

void Bank::flip(RowIndex row, RowState& rs, std::uint32_t idx, Mechanism mech, Nanos at, EventList& out) {
  const auto& c = rs.cells[idx];
  rs.flipped[idx] = static_cast<std::uint8_t>(1 + static_cast<int>(mech));
  rs.bits[idx] ^= 1U;
  ++rs.flips;
  ++flip_count_;
  emit(BitFlip{row, c.cell, c.direction, mech, at}, out);
}

void Bank::charge(RowIndex victim, RowIndex aggressor, Nanos t_on, Mechanism mech, Nanos at,
                  EventList& out) {
  auto& rs = state(victim);
  Sidedness side = Sidedness::Single;
  switch (cfg_.sidedness) {
    case SidednessMode::Single: break;
    case SidednessMode::Double: side = Sidedness::Double; break;
    case SidednessMode::Auto: {
      if (!double_curve_) break;
      const std::int64_t mirror = 2 * static_cast<std::int64_t>(victim) - aggressor;
      if (mirror < 0 || mirror >= cfg_.rows) break;
      auto it = rows_.find(static_cast<RowIndex>(mirror));
      if (it != rows_.end() && it->second.last_activate && *it->second.last_activate >= rs.last_refresh) {
        side = Sidedness::Double;
      }
      break;
    }
  }

  // Neumaier summation keeps the sum within a couple of ulps of n x damage.
  const double d = damage(side, t_on);
  const double sum = rs.acc + d;
  rs.comp += std::abs(rs.acc) >= std::abs(d) ? (rs.acc - sum) + d : (d - sum) + rs.acc;
  rs.acc = sum;
  const double total = (rs.acc + rs.comp) * (1.0 + kFlipSlack);
  peak_ratio_ = std::max(peak_ratio_, total / rs.threshold);

  const int m = mech == Mechanism::Hammer ? 0 : 1;
  auto& list = rs.candidates[m];
  auto& nx = rs.next[m];
  while (nx < list.size() && total >= list[nx].threshold) {
    const auto idx = list[nx].idx;
    if (!rs.flipped[idx] && rs.bits[idx] == source_bit(rs.cells[idx].direction)) {
      flip(victim, rs, idx, mech, at, out);
    }
    ++nx;
  }
}

void Bank::close_row(Nanos at, EventList& out) {
  const RowIndex aggr = open_row_;
  Nanos t_on = at - open_since_;
  if (t_on > cfg_.timing.t_ron_max_jedec) {
    const std::string msg = "row " + std::to_string(aggr) + " open for " + std::to_string(t_on.count()) +
                            " ns exceeds the JEDEC limit of " +
                            std::to_string(cfg_.timing.t_ron_max_jedec.count()) + " ns";
    if (cfg_.strict_jedec) throw TimingViolation(msg);
    emit(TimingWarning{at, aggr, t_on, msg}, out);
  }
  open_ = false;
  t_on = std::max(t_on, cfg_.timing.t_ras_min);
  const auto mech = t_on > profile_.press_onset ? Mechanism::Press : Mechanism::Hammer;

  const auto r = static_cast<std::int64_t>(cfg_.blast_radius);
  for (std::int64_t d = 1; d <= r; ++d) {
    for (const std::int64_t v : {static_cast<std::int64_t>(aggr) - d, static_cast<std::int64_t>(aggr) + d}) {
      if (v < 0 || v >= cfg_.rows) continue;
      charge(static_cast<RowIndex>(v), aggr, t_on, mech, at, out);
    }
  }
}

EventList Bank::apply(const Command& cmd) {
  if (cmd.time < now_) {
    throw StateError("timestamp regression: " + std::to_string(cmd.time.count()) + " ns < bank time " +
                     std::to_string(now_.count()) + " ns");
  }
  EventList out;
  switch (cmd.kind) {
    case CommandKind::Activate: {
      check_row(cmd.row);
      if (open_) {
        throw StateError("ACT row " + std::to_string(cmd.row) + " while row " + std::to_string(open_row_) +
                         " is open");
      }
      now_ = cmd.time;
      auto& rs = state(cmd.row);
      restore(rs, cmd.time);
      rs.last_activate = cmd.time;
      open_ = true;
      open_row_ = cmd.row;
      open_since_ = cmd.time;
      ++activations_;
      break;
    }
    case CommandKind::Precharge: {
      if (!open_) throw StateError("PRE with no open row");
      if (cmd.row != kNoRow && cmd.row != open_row_) {
        throw StateError("PRE row " + std::to_string(cmd.row) + " but row " + std::to_string(open_row_) +
                         " is open");
      }
      now_ = cmd.time;
      close_row(cmd.time, out);
      break;
    }
    case CommandKind::Read:
    case CommandKind::Write: {
      if (!open_ || (cmd.row != kNoRow && cmd.row != open_row_)) {
        throw StateError(std::string(keyword(cmd.kind)) + " row " + std::to_string(cmd.row) +
                         " which is not open");
      }
      now_ = cmd.time;
      break;
    }
    case CommandKind::AutoRefresh: {
      if (open_) throw StateError("REF while row " + std::to_string(open_row_) + " is open");
      now_ = cmd.time;
      group_refresh_[cursor_] = cmd.time;
      const std::uint64_t lo = static_cast<std::uint64_t>(cursor_) * rows_per_group_;
      const std::uint64_t hi = std::min<std::uint64_t>(lo + rows_per_group_, cfg_.rows);
      for (std::uint64_t r = lo; r < hi; ++r) {
        auto it = rows_.find(static_cast<RowIndex>(r));
        if (it != rows_.end()) restore(it->second, cmd.time);
      }
      cursor_ = (cursor_ + 1) % cfg_.timing.ref_groups;
      break;
    }
    case CommandKind::NeighborRefresh: {
      check_row(cmd.row);
      now_ = cmd.time;
      restore(state(cmd.row), cmd.time);
      break;
    }
  }
  return out;
}

EventList Bank::check_retention(Nanos at) {
  EventList out;
  auto scan = [&](RowIndex row, RowState& rs) {
    bool any = false;
    for (std::uint32_t i = 0; i < rs.cells.size(); ++i) {
      const auto& c = rs.cells[i];
      if (c.retention_time == device::kNoRetentionFailure || rs.flipped[i] || rs.bits[i] != 1) continue;
      if (at - rs.last_refresh > c.retention_time) {
        rs.flipped[i] = static_cast<std::uint8_t>(1 + static_cast<int>(Mechanism::Retention));
        rs.bits[i] = 0;
        ++rs.flips;
        ++flip_count_;
        emit(BitFlip{row, c.cell, FlipDirection::OneToZero, Mechanism::Retention, at}, out);
        any = true;
      }
    }
    // A retention flip can make a 0->1 disturbance cell eligible.
    if (any) rebuild_candidates(rs);
    return any;
  };
  for (RowIndex row = 0; row < cfg_.rows; ++row) {
    if (auto it = rows_.find(row); it != rows_.end()) {
      scan(row, it->second);
    } else {
      RowState rs = build_row(row);
      if (scan(row, rs)) rows_.emplace(row, std::move(rs));
    }
  }
  return out;
}

FlipReport Bank::snapshot_bitflips(const ReferencePattern& ref) const {
  ReferencePattern sorted = ref;
  std::sort(sorted.aggressors.begin(), sorted.aggressors.end());
  if (!(sorted == cfg_.pattern)) {
    throw ConfigError("reference pattern does not match the pattern the bank was initialized with");
  }
  FlipReport report;
  for (const auto& [row, rs] : rows_) {
    if (rs.flips == 0) continue;
    FlipReport::RowFlips rf{row, {}};
    for (std::uint32_t i = 0; i < rs.cells.size(); ++i) {
      if (!rs.flipped[i]) continue;
      rf.cells.push_back({rs.cells[i].cell, rs.bits[i] ? FlipDirection::ZeroToOne : FlipDirection::OneToZero,
                          static_cast<Mechanism>(rs.flipped[i] - 1)});
    }
    report.rows.push_back(std::move(rf));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const auto& a, const auto& b) { return a.row < b.row; });
  return report;
}

double Bank::disturbance(RowIndex row) const {
  auto it = rows_.find(row);
  return it == rows_.end() ? 0.0 : it->second.acc + it->second.comp;
}

Nanos Bank::last_refresh(RowIndex row) const {
  auto it = rows_.find(row);
  return it == rows_.end() ? group_refresh_[group_of(row)] : it->second.last_refresh;
}

double Bank::row_threshold(RowIndex row) {
  check_row(row);
  return state(row).threshold;
}

std::uint8_t Bank::stored_bit(RowIndex row, std::uint32_t cell) {
  check_row(row);
  const auto& rs = state(row);
  for (std::uint32_t i = 0; i < rs.cells.size(); ++i) {
    if (rs.cells[i].cell == cell) return rs.bits[i];
  }
  return cfg_.pattern.bit(row, cell);
}

std::uint64_t Bank::flips_in_row(RowIndex row) const {
  auto it = rows_.find(row);
  return it == rows_.end() ? 0 : it->second.flips;
}

EventList replay(Bank& bank, const Trace& trace) {
  EventList out;
  for (const auto& cmd : trace) {
    if ((cmd.kind == CommandKind::Activate || cmd.kind == CommandKind::AutoRefresh) && bank.open_row()) {
      auto ev = bank.apply({CommandKind::Precharge, kNoRow, cmd.time});
      out.insert(out.end(), ev.begin(), ev.end());
    }
    auto ev = bank.apply(cmd);
    out.insert(out.end(), ev.begin(), ev.end());
  }
  return out;
}

}  // namespace rowsim::dram
