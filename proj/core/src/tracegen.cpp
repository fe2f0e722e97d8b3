#include "rowsim/tracegen.hpp"

#include <algorithm>
#include <cmath>

#include "rowsim/rng.hpp"

namespace rowsim::tracegen {

using dram::Command;
using dram::CommandKind;
using dram::Trace;

Trace gen_hammer(const std::vector<RowIndex>& aggressors, Sidedness sidedness, std::optional<std::uint64_t> count,
                 Nanos t_on, const dram::TimingParams& timing, Nanos start) {
  if (t_on < timing.t_ras_min) throw ConfigError("hammer t_on below t_ras_min");
  const std::size_t need = sidedness == Sidedness::Single ? 1 : 2;
  if (aggressors.size() != need) {
    throw ConfigError(std::string(to_string(sidedness)) + "-sided hammering needs " + std::to_string(need) +
                      " aggressor row(s)");
  }
  if (sidedness == Sidedness::Double) {
    const auto lo = std::min(aggressors[0], aggressors[1]);
    const auto hi = std::max(aggressors[0], aggressors[1]);
    if (hi - lo != 2) throw ConfigError("double-sided aggressors must sandwich exactly one victim row");
  }
  const std::uint64_t n = count.value_or(timing.max_activations_in_window(t_on));
  if (n == 0) throw ConfigError("hammer count must be >= 1");

  Trace out;
  out.reserve(2 * n);
  Nanos t = start;
  for (std::uint64_t i = 0; i < n; ++i) {
    const RowIndex row = aggressors[i % need];
    out.push_back({CommandKind::Activate, row, t});
    out.push_back({CommandKind::Precharge, row, t + t_on});
    t += t_on + timing.t_rc;
  }
  return out;
}

void SweepSpec::validate(const dram::TimingParams& timing) const {
  if (!std::is_sorted(t_on_values.begin(), t_on_values.end())) throw ConfigError("t_on values must be ascending");
  for (const auto t : t_on_values) {
    if (t < timing.t_ras_min) {
      throw ConfigError("t_on " + std::to_string(t.count()) + " ns is below t_ras_min");
    }
    if (timing.max_activations_in_window(t) == 0) {
      throw ConfigError("t_on " + std::to_string(t.count()) + " ns cannot fit one activation in the refresh window");
    }
    if (activation_budget && *activation_budget > timing.max_activations_in_window(t)) {
      throw ConfigError("activation budget " + std::to_string(*activation_budget) + " does not fit the window at t_on " +
                        std::to_string(t.count()) + " ns");
    }
  }
  if (activation_budget && *activation_budget == 0) throw ConfigError("activation budget must be >= 1");
}

std::vector<Trace> gen_rowpress_sweep(const SweepSpec& spec, const std::vector<RowIndex>& aggressors,
                                      const dram::TimingParams& timing) {
  spec.validate(timing);
  std::vector<Trace> out;
  out.reserve(spec.t_on_values.size());
  for (const auto t : spec.t_on_values) {
    out.push_back(gen_hammer(aggressors, spec.sidedness, spec.activation_budget, t, timing));
  }
  return out;
}

RowIndex RowMapping::to_physical(RowIndex logical) const {
  if (kind == Kind::Identity) return logical;
  return (logical & 0b1000U) ? (logical ^ (mask & 0b111U)) : logical;
}

std::string_view to_string(PocOrder o) {
  return o == PocOrder::FlushAfterAll ? "flush-after-all" : "flush-each-access";
}

PocOrder parse_poc_order(std::string_view text) {
  if (text == "flush-after-all") return PocOrder::FlushAfterAll;
  if (text == "flush-each-access") return PocOrder::FlushEachAccess;
  throw ConfigError("unknown PoC order '" + std::string(text) + "' (flush-after-all | flush-each-access)");
}

void PocParams::validate() const {
  if (num_reads == 0) throw ConfigError("num_reads must be >= 1");
  if (num_aggr_acts == 0) throw ConfigError("num_aggr_acts must be >= 1");
  if (num_iter == 0) throw ConfigError("num_iter must be >= 1");
  if (sync_period == 0) throw ConfigError("sync_period must be >= 1");
  if (flush_overhead < Nanos{0}) throw ConfigError("flush_overhead must be non-negative");
}

std::pair<RowIndex, RowIndex> find_aggressor_rows(RowIndex victim_logical, const RowMapping& mapping,
                                                  RowIndex bank_rows) {
  if (victim_logical >= bank_rows) throw ConfigError("victim row outside the bank");
  const RowIndex v = mapping.to_physical(victim_logical);
  if (v == 0 || v + 1 >= bank_rows) {
    throw ConfigError("victim row " + std::to_string(victim_logical) + " sits at the bank edge; no aggressor pair");
  }
  return {mapping.to_logical(v - 1), mapping.to_logical(v + 1)};
}

namespace {

std::vector<RowIndex> pick_dummies(RowIndex victim, std::uint32_t count, RowIndex rows) {
  std::vector<RowIndex> out;
  if (count == 0) return out;
  const RowIndex base = victim < rows / 2 ? victim + rows / 4 : victim - rows / 4;
  for (RowIndex k = 0; out.size() < count && k < rows; ++k) {
    const RowIndex r = (base + 3 * k) % rows;
    const auto d = r > victim ? r - victim : victim - r;
    if (d > 2 && std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  }
  if (out.size() < count) throw ConfigError("bank too small for the requested dummy rows");
  return out;
}

}  // namespace

std::vector<PocTrace> gen_poc(const PocParams& params, const RowMapping& mapping, RowIndex bank_rows,
                              const dram::TimingParams& timing) {
  params.validate();
  std::vector<PocTrace> out;
  for (const RowIndex victim_logical : params.victim_rows) {
    const auto [l1, l2] = find_aggressor_rows(victim_logical, mapping, bank_rows);
    PocTrace pt;
    pt.victim = mapping.to_physical(victim_logical);
    pt.aggressors = {mapping.to_physical(l1), mapping.to_physical(l2)};
    pt.dummies = pick_dummies(pt.victim, params.dummy_rows, bank_rows);

    Controller ctl({timing, std::nullopt, true, 8});
    ctl.sync_to_refresh(params.sync_period);
    Nanos arrival = ctl.ready_at();
    const Nanos each_access_gap =
        params.order == PocOrder::FlushEachAccess ? timing.t_read + params.flush_overhead : Nanos{0};
    for (std::uint32_t it = 0; it < params.num_iter; ++it) {
      for (std::uint32_t i = 0; i < params.num_aggr_acts; ++i) {
        for (const RowIndex row : pt.aggressors) {
          for (std::uint32_t j = 0; j < params.num_reads; ++j) {
            const Nanos issued = ctl.read(row, arrival);
            // The flush of the last block overlaps with the next row's activation.
            arrival = issued + (j + 1 < params.num_reads ? each_access_gap : Nanos{0});
          }
        }
      }
      for (const RowIndex d : pt.dummies) arrival = ctl.read(d, arrival);
      ctl.sync_to_refresh(params.sync_period);
      arrival = ctl.ready_at();
    }
    pt.trace = ctl.finish();
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<Request> gen_random_requests(RowIndex row_count, double request_rate, Nanos duration, double locality,
                                         std::uint64_t seed) {
  if (row_count == 0) throw ConfigError("row_count must be >= 1");
  if (!(request_rate > 0.0)) throw ConfigError("request_rate must be > 0");
  if (duration <= Nanos{0}) throw ConfigError("duration must be > 0");
  if (!(locality >= 0.0 && locality <= 1.0)) throw ConfigError("locality must be within [0, 1]");

  auto eng = seeded_engine(seed, 0x7261'6e64);
  std::vector<Request> out;
  double t = 0.0;
  RowIndex row = static_cast<RowIndex>(to_unit(eng()) * row_count);
  bool first = true;
  while (true) {
    t += -std::log1p(-to_unit(eng())) / request_rate;
    const auto at = Nanos{static_cast<Nanos::rep>(t)};
    if (at >= duration) break;
    const double u_switch = to_unit(eng());
    const double u_row = to_unit(eng());
    if (first || u_switch >= locality) row = static_cast<RowIndex>(u_row * row_count);
    first = false;
    out.push_back({row, at});
  }
  return out;
}

Trace serve(const std::vector<Request>& requests, const ControllerConfig& cfg) {
  Controller ctl(cfg);
  for (const auto& r : requests) ctl.read(r.row, r.arrival);
  return ctl.finish();
}

Trace gen_random_traffic(RowIndex row_count, double request_rate, Nanos duration, double locality,
                         std::uint64_t seed, const dram::TimingParams& timing) {
  return serve(gen_random_requests(row_count, request_rate, duration, locality, seed), {timing, std::nullopt, true, 8});
}

}  // namespace rowsim::tracegen
