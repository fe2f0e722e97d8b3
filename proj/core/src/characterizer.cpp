#include "rowsim/characterizer.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <ostream>
#include <thread>

namespace rowsim::characterize {

using dram::Bank;
using dram::BankConfig;
using dram::CommandKind;

std::vector<RowIndex> aggressors_for(RowIndex victim, Sidedness sidedness, RowIndex bank_rows) {
  if (victim >= bank_rows) throw ConfigError("victim row outside the bank");
  if (sidedness == Sidedness::Double) {
    if (victim == 0 || victim + 1 >= bank_rows) {
      throw ConfigError("double-sided victim " + std::to_string(victim) + " needs neighbors on both sides");
    }
    return {victim - 1, victim + 1};
  }
  if (bank_rows < 2) throw ConfigError("single-sided hammering needs at least two rows");
  return {victim + 1 < bank_rows ? victim + 1 : victim - 1};
}

ProbeOutcome probe(const device::DeviceProfile& profile, const ProbeSetup& setup, RowIndex victim, Nanos t_on,
                   Sidedness sidedness, std::uint64_t count, std::uint64_t seed) {
  const auto aggr = aggressors_for(victim, sidedness, setup.bank_rows);
  BankConfig cfg;
  cfg.rows = setup.bank_rows;
  cfg.timing = setup.timing;
  cfg.temp_c = setup.temp_c;
  cfg.sidedness = sidedness == Sidedness::Double ? dram::SidednessMode::Double : dram::SidednessMode::Single;
  cfg.device_seed = setup.device_seed;
  cfg.cells_per_row = setup.cells_per_row;
  cfg.strict_jedec = setup.strict_jedec;
  cfg.pattern = {setup.pattern, aggr};
  cfg.record_events = false;
  Bank bank(profile, cfg);

  ProbeOutcome out;
  Nanos t{static_cast<Nanos::rep>(seed % static_cast<std::uint64_t>(setup.timing.t_refi.count()))};
  for (std::uint64_t i = 0; i < count; ++i) {
    const RowIndex row = aggr[i % aggr.size()];
    bank.apply({CommandKind::Activate, row, t});
    bank.apply({CommandKind::Precharge, row, t + t_on});
    t += t_on + setup.timing.t_rc;
    if (const auto n = bank.flips_in_row(victim)) {
      out.first_flip = i + 1;
      out.victim_flips = n;
      break;
    }
  }
  return out;
}

namespace {

std::pair<std::uint64_t, std::uint64_t> search_one(const device::DeviceProfile& profile, const ProbeSetup& setup,
                                                   RowIndex victim, Nanos t_on, Sidedness sidedness,
                                                   std::uint64_t seed) {
  const std::uint64_t limit = setup.timing.max_activations_in_window(t_on);
  if (limit == 0) {
    throw ConfigError("one activation at t_on " + std::to_string(t_on.count()) + " ns does not fit the refresh window");
  }
  std::uint64_t lo = 0;  // largest count known not to flip
  std::uint64_t hi = 0;
  std::uint64_t flips = 0;
  for (std::uint64_t n = 1;; n = std::min(2 * n, limit)) {
    const auto o = probe(profile, setup, victim, t_on, sidedness, n, seed);
    if (o.first_flip) {
      hi = *o.first_flip;
      flips = o.victim_flips;
      break;
    }
    lo = n;
    if (n == limit) {
      throw NotVulnerable("row " + std::to_string(victim) + " not vulnerable at t_on " + std::to_string(t_on.count()) +
                          " ns within one refresh window");
    }
  }
  // The first flip index is already tight on a deterministic device; probing just below it
  // usually settles the search in one step.
  bool tight = true;
  while (hi - lo > 1) {
    const std::uint64_t mid = tight ? hi - 1 : lo + (hi - lo) / 2;
    tight = false;
    const auto o = probe(profile, setup, victim, t_on, sidedness, mid, seed);
    if (o.first_flip) {
      hi = *o.first_flip;
      flips = o.victim_flips;
    } else {
      lo = mid;
    }
  }
  return {hi, flips};
}

}  // namespace

AcminResult measure_acmin(const device::DeviceProfile& profile, const ProbeSetup& setup, RowIndex victim, Nanos t_on,
                          Sidedness sidedness, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ConfigError("measure_acmin needs at least one seed");
  if (t_on < setup.timing.t_ras_min) throw ConfigError("t_on below t_ras_min");
  AcminResult r{victim, t_on, sidedness, setup.temp_c, std::nullopt, static_cast<std::uint32_t>(seeds.size()), 0};
  for (const auto seed : seeds) {
    const auto [acmin, flips] = search_one(profile, setup, victim, t_on, sidedness, seed);
    if (!r.acmin || acmin < *r.acmin) {
      r.acmin = acmin;
      r.flips = flips;
    }
  }
  return r;
}

void SweepConfig::validate() const {
  setup.timing.validate();
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (!std::is_sorted(t_on_values.begin(), t_on_values.end())) throw ConfigError("t_on values must be ascending");
  for (const auto t : t_on_values) {
    if (t < setup.timing.t_ras_min) throw ConfigError("t_on " + std::to_string(t.count()) + " ns is below t_ras_min");
    if (setup.timing.max_activations_in_window(t) == 0) {
      throw ConfigError("t_on " + std::to_string(t.count()) + " ns does not fit the refresh window");
    }
    if (setup.strict_jedec && t > setup.timing.t_ron_max_jedec) {
      throw ConfigError("t_on " + std::to_string(t.count()) + " ns exceeds the JEDEC row-open limit (strict mode)");
    }
  }
  if (victims.empty() && rows == 0) throw ConfigError("sweep needs at least one row");
  for (const auto v : victims) aggressors_for(v, sidedness, setup.bank_rows);
}

std::vector<RowIndex> block_rows(RowIndex bank_rows, std::uint32_t total) {
  if (static_cast<std::uint64_t>(total) + 2 > bank_rows) throw ConfigError("bank too small for the requested rows");
  std::vector<RowIndex> out;
  const std::uint32_t sizes[3] = {total / 3 + (total % 3 > 0), total / 3 + (total % 3 > 1), total / 3};
  const RowIndex starts[3] = {1, bank_rows / 2 - sizes[1] / 2, bank_rows - 1 - sizes[2]};
  for (int b = 0; b < 3; ++b) {
    for (RowIndex r = starts[b]; r < starts[b] + sizes[b]; ++r) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  // Overlapping blocks on small banks leave gaps; top up from the low end.
  for (RowIndex r = 1; out.size() < total && r + 1 < bank_rows; ++r) {
    if (!std::binary_search(out.begin(), out.end(), r)) out.insert(std::upper_bound(out.begin(), out.end(), r), r);
  }
  return out;
}

SweepResult sweep(const device::DeviceProfile& profile, const SweepConfig& cfg) {
  cfg.validate();
  SweepResult res;
  if (cfg.t_on_values.empty()) return res;
  const auto victims = cfg.victims.empty() ? block_rows(cfg.setup.bank_rows, cfg.rows) : cfg.victims;

  struct Task {
    RowIndex row;
    Nanos t_on;
  };
  std::vector<Task> tasks;
  for (const auto v : victims) {
    for (const auto t : cfg.t_on_values) tasks.push_back({v, t});
  }
  // Scaling the profile once keeps every probe from redoing it.
  const auto dev = device::at_temperature(profile, cfg.setup.temp_c);

  res.results.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size() && !failed; i = next++) {
      try {
        res.results[i] = measure_acmin(dev, cfg.setup, tasks[i].row, tasks[i].t_on, cfg.sidedness, cfg.seeds);
      } catch (const NotVulnerable&) {
        res.results[i] = {tasks[i].row, tasks[i].t_on, cfg.sidedness, cfg.setup.temp_c, std::nullopt,
                          static_cast<std::uint32_t>(cfg.seeds.size()), 0};
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(tasks.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(res.results.begin(), res.results.end(), [](const AcminResult& a, const AcminResult& b) {
    return a.row != b.row ? a.row < b.row : a.t_on < b.t_on;
  });

  for (const auto t : cfg.t_on_values) {
    SummaryRow s{t, 0.0, 0, 0, 0};
    double sum = 0.0;
    for (const auto& r : res.results) {
      if (r.t_on != t || !r.acmin) continue;
      const auto a = *r.acmin;
      s.min = s.vulnerable == 0 ? a : std::min(s.min, a);
      s.max = std::max(s.max, a);
      sum += static_cast<double>(a);
      ++s.vulnerable;
    }
    if (s.vulnerable) s.mean = sum / static_cast<double>(s.vulnerable);
    res.summary.push_back(s);
  }
  return res;
}

std::optional<double> mean_ratio(const SweepResult& r, Nanos t_on) {
  if (r.summary.empty() || r.summary.front().vulnerable == 0) return std::nullopt;
  for (const auto& s : r.summary) {
    if (s.t_on == t_on && s.vulnerable) return s.mean / r.summary.front().mean;
  }
  return std::nullopt;
}

void write_results_csv(std::ostream& out, const std::vector<AcminResult>& results) {
  out << "row,t_on_ns,sidedness,temp_c,acmin,reps,flips\n";
  for (const auto& r : results) {
    out << r.row << ',' << r.t_on.count() << ',' << to_string(r.sidedness) << ',' << r.temp_c << ',';
    if (r.acmin) {
      out << *r.acmin;
    } else {
      out << "NA";
    }
    out << ',' << r.reps << ',' << r.flips << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "t_on_ns,mean,min,max\n";
  for (const auto& s : summary) {
    out << s.t_on.count() << ',';
    if (s.vulnerable) {
      out << format_real(s.mean) << ',' << s.min << ',' << s.max << '\n';
    } else {
      out << "NA,NA,NA\n";
    }
  }
}

}  // namespace rowsim::characterize
