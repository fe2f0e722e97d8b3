#include "rowsim/adversary.hpp"

#include <algorithm>

#include "rowsim/controller.hpp"

namespace rowsim::tracegen {

using dram::CommandKind;
using dram::Trace;

void AdversaryConfig::validate() const {
  timing.validate();
  if (rows < window_rows || window_rows == 0) throw ConfigError("adversary window must fit in the bank");
  if (max_cycle == 0) throw ConfigError("max_cycle must be >= 1");
  if (t_on_values.empty()) throw ConfigError("adversary needs at least one t_on value");
  for (const auto t : t_on_values) {
    if (t < timing.t_ras_min || t > t_on_cap) throw ConfigError("adversary t_on values must lie in [t_ras_min, t_on_cap]");
  }
}

Trace cycle_trace(const std::vector<CycleStep>& cycle, std::uint64_t activations, const dram::TimingParams& timing) {
  Trace out;
  out.reserve(2 * activations);
  Nanos t{0};
  for (std::uint64_t i = 0; i < activations; ++i) {
    const auto& [row, t_on] = cycle[i % cycle.size()];
    out.push_back({CommandKind::Activate, row, t});
    out.push_back({CommandKind::Precharge, row, t + t_on});
    t += t_on + timing.t_rc;
  }
  return out;
}

namespace {

std::vector<RowIndex> window_starts(const AdversaryConfig& cfg) {
  std::vector<RowIndex> s{0, (cfg.rows - cfg.window_rows) / 2, cfg.rows - cfg.window_rows};
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::string step_name(const CycleStep& s) {
  return std::to_string(s.first) + "@" + std::to_string(s.second.count());
}

}  // namespace

std::uint64_t exhaustive_suite_size(const AdversaryConfig& cfg) {
  const std::uint64_t symbols = static_cast<std::uint64_t>(cfg.window_rows) * cfg.t_on_values.size();
  std::uint64_t per_window = 0;
  std::uint64_t pow = 1;
  for (std::uint32_t len = 1; len <= cfg.max_cycle; ++len) {
    pow *= symbols;
    per_window += pow;
  }
  return per_window * window_starts(cfg).size();
}

void for_each_exhaustive_trace(const AdversaryConfig& cfg, const std::function<void(const NamedTrace&)>& fn) {
  cfg.validate();
  const std::uint32_t symbols = cfg.window_rows * static_cast<std::uint32_t>(cfg.t_on_values.size());
  for (const RowIndex base : window_starts(cfg)) {
    for (std::uint32_t len = 1; len <= cfg.max_cycle; ++len) {
      std::vector<std::uint32_t> digits(len, 0);
      while (true) {
        std::vector<CycleStep> cycle;
        std::string name = "cycle";
        for (const auto d : digits) {
          cycle.emplace_back(base + d / cfg.t_on_values.size(), cfg.t_on_values[d % cfg.t_on_values.size()]);
          name += ":" + step_name(cycle.back());
        }
        fn(NamedTrace{std::move(name), cycle_trace(cycle, cfg.activations, cfg.timing)});
        std::uint32_t k = 0;
        while (k < len && ++digits[k] == symbols) digits[k++] = 0;
        if (k == len) break;
      }
    }
  }
}

std::vector<NamedTrace> handcrafted_attacks(const AdversaryConfig& cfg) {
  cfg.validate();
  const auto& tm = cfg.timing;
  const Nanos cap = cfg.t_on_cap;
  const RowIndex v = cfg.rows / 2;
  const std::uint64_t fill = tm.max_activations_in_window(cap);
  std::vector<NamedTrace> out;

  out.push_back({"double-sided-at-cap", cycle_trace({{v - 1, cap}, {v + 1, cap}}, fill, tm)});
  out.push_back({"single-sided-at-cap", cycle_trace({{v - 1, cap}}, fill, tm)});
  out.push_back({"edge-single-sided-at-cap", cycle_trace({{1, cap}}, fill, tm)});

  // RowHammer warm-up, then switch to the cap (and the reverse).
  {
    Trace t = cycle_trace({{v - 1, tm.t_ras_min}, {v + 1, tm.t_ras_min}}, 4'000, tm);
    const Nanos off = t.back().time + tm.t_rc;
    for (auto c : cycle_trace({{v - 1, cap}, {v + 1, cap}}, 2'000, tm)) {
      c.time += off;
      t.push_back(c);
    }
    out.push_back({"hammer-then-press", std::move(t)});
  }
  {
    Trace t = cycle_trace({{v - 1, cap}, {v + 1, cap}}, 2'000, tm);
    const Nanos off = t.back().time + tm.t_rc;
    for (auto c : cycle_trace({{v - 1, tm.t_ras_min}, {v + 1, tm.t_ras_min}}, 4'000, tm)) {
      c.time += off;
      t.push_back(c);
    }
    out.push_back({"press-then-hammer", std::move(t)});
  }

  // Every row in turn, so every victim is double-sided and all counters rise together.
  {
    std::vector<CycleStep> all;
    for (RowIndex r = 0; r < cfg.rows; ++r) all.emplace_back(r, cap);
    out.push_back({"many-sided-at-cap", cycle_trace(all, fill, tm)});
    std::vector<CycleStep> odd;
    for (RowIndex r = 1; r < cfg.rows; r += 2) odd.emplace_back(r, cap);
    out.push_back({"odd-rows-at-cap", cycle_trace(odd, fill, tm)});
  }

  // One aggressor pair at the cap interleaved with single activations of every other row.
  {
    std::vector<CycleStep> flood;
    for (RowIndex r = 0; r < cfg.rows; ++r) {
      if (r == v - 1 || r == v + 1) continue;
      flood.emplace_back(v - 1, cap);
      flood.emplace_back(r, tm.t_ras_min);
      flood.emplace_back(v + 1, cap);
    }
    out.push_back({"decoy-flood", cycle_trace(flood, fill, tm)});
  }

  // Slightly below the cap and a sweep of on-times up to it.
  out.push_back({"just-below-cap", cycle_trace({{v - 1, cap - Nanos{1}}, {v + 1, cap - Nanos{1}}}, fill, tm)});
  {
    std::vector<CycleStep> ramp;
    for (Nanos t = tm.t_ras_min; t < cap; t = t * 2) {
      ramp.emplace_back(v - 1, t);
      ramp.emplace_back(v + 1, t);
    }
    ramp.emplace_back(v - 1, cap);
    ramp.emplace_back(v + 1, cap);
    out.push_back({"on-time-ramp", cycle_trace(ramp, 4'000, tm)});
  }

  // A request stream that would keep each aggressor open ~70 us; the cap chops it.
  {
    ControllerConfig cc{tm, cap, true, 8};
    Controller ctl(cc);
    Nanos arrival{0};
    while (ctl.ready_at() < tm.t_refw - Nanos{200'000}) {
      for (const RowIndex row : {v - 1, v + 1}) {
        const Nanos open_for{70'000};
        const Nanos start = ctl.read(row, arrival);
        arrival = start;
        while (arrival - start < open_for) arrival = ctl.read(row, arrival);
      }
    }
    out.push_back({"capped-long-open-stream", ctl.finish()});
  }
  return out;
}

}  // namespace rowsim::tracegen
