#include "runners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "rowsim/characterizer.hpp"
#include "rowsim/rng.hpp"
#include "rowsim/simulator.hpp"

#ifndef ROWSIM_VERSION
#define ROWSIM_VERSION "0.0.0"
#endif

namespace rowsim::app {

using nlohmann::json;

const Artifact* RunOutput::file(const std::string& name) const {
  for (const auto& f : files) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception wins.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  const unsigned w = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < w; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::string fmt(double v) { return format_real(v); }

mitigation::MitigationConfig with_seed(mitigation::MitigationConfig m, std::uint64_t seed) {
  std::visit(
      [&](auto& c) {
        if constexpr (requires { c.rng_seed; }) c.rng_seed = seed;
      },
      m);
  return m;
}

dram::BankConfig bank_config(const ExperimentSpec& spec, const RunOptions& opts, RowIndex rows) {
  dram::BankConfig b;
  b.rows = rows;
  b.timing = spec.timing;
  b.temp_c = spec.temp_c;
  b.strict_jedec = opts.strict_jedec;
  b.record_events = false;
  return b;
}

// --- sweep ---

void run_sweep(const ExperimentSpec& spec, const RunOptions& opts, RunOutput& out) {
  const auto profile = experiment_profile(spec);
  characterize::SweepConfig cfg;
  cfg.t_on_values = spec.sweep.t_on;
  cfg.sidedness = spec.sweep.sidedness;
  cfg.setup = {spec.sweep.bank_rows, spec.temp_c, spec.timing, spec.sweep.pattern, std::nullopt, 0, opts.strict_jedec};
  cfg.rows = spec.sweep.rows;
  cfg.victims = spec.sweep.victims;
  cfg.seeds = spec.seeds;
  cfg.threads = opts.threads;
  const auto res = characterize::sweep(profile, cfg);

  std::ostringstream r;
  characterize::write_results_csv(r, res.results);
  std::ostringstream s;
  characterize::write_summary_csv(s, res.summary);
  out.files.push_back({"results.csv", r.str()});
  out.files.push_back({"summary.csv", s.str()});

  json rows = json::array();
  for (const auto& row : res.summary) {
    json e{{"t_on_ns", row.t_on.count()}, {"vulnerable_rows", row.vulnerable}};
    if (row.vulnerable) {
      e["mean"] = row.mean;
      e["min"] = row.min;
      e["max"] = row.max;
      if (const auto ratio = characterize::mean_ratio(res, row.t_on)) e["mean_ratio_to_first"] = *ratio;
    }
    rows.push_back(e);
  }
  out.summary["summary"] = rows;
  out.summary["rows_measured"] = res.results.size() / std::max<std::size_t>(1, spec.sweep.t_on.size());
}

// --- poc ---

void run_poc(const ExperimentSpec& spec, const RunOptions& opts, RunOutput& out) {
  const auto profile = experiment_profile(spec);
  struct Cell {
    tracegen::PocOrder order;
    std::uint32_t reads;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto seed : spec.seeds) {
    for (const auto order : spec.poc.orders) {
      for (const auto reads : spec.poc.num_reads) cells.push_back({order, reads, seed});
    }
  }

  struct VictimResult {
    tracegen::PocTrace trace;
    std::uint64_t flips = 0;
    std::uint64_t flipped_rows = 0;
    std::uint64_t victim_flips = 0;
    std::uint64_t refreshes = 0;
    Nanos max_t_on{0};
  };
  std::vector<std::vector<VictimResult>> results(cells.size());

  for (std::size_t c = 0; c < cells.size(); ++c) {
    tracegen::PocParams p;
    p.num_reads = cells[c].reads;
    p.num_aggr_acts = spec.poc.num_aggr_acts;
    p.num_iter = spec.poc.num_iter;
    p.order = cells[c].order;
    p.dummy_rows = spec.poc.dummy_rows;
    p.victim_rows = spec.poc.victim_rows;
    p.flush_overhead = spec.poc.flush_overhead;
    p.sync_period = spec.poc.sync_period;
    auto traces = tracegen::gen_poc(p, spec.poc.mapping, spec.poc.bank_rows, spec.timing);
    results[c].resize(traces.size());
    for (std::size_t v = 0; v < traces.size(); ++v) results[c][v].trace = std::move(traces[v]);
  }

  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t v = 0; v < results[c].size(); ++v) jobs.emplace_back(c, v);
  }
  parallel_for(jobs.size(), opts.threads, [&](std::size_t j) {
    const auto [c, v] = jobs[j];
    auto& r = results[c][v];
    auto bc = bank_config(spec, opts, spec.poc.bank_rows);
    bc.pattern = {dram::DataPattern::Checkerboard, r.trace.aggressors};
    std::optional<mitigation::MitigationConfig> m;
    if (spec.mitigation) m = with_seed(*spec.mitigation, cells[c].seed);
    Simulator sim(profile, bc, m);
    const auto res = sim.run(r.trace.trace);
    const auto snap = sim.bank().snapshot_bitflips(bc.pattern);
    r.flips = snap.total();
    r.flipped_rows = snap.rows_with_flips();
    r.victim_flips = snap.count(r.trace.victim);
    r.refreshes = res.mitigation_refreshes;
    Nanos open{0};
    for (const auto& cmd : r.trace.trace) {
      if (cmd.kind == dram::CommandKind::Activate) open = cmd.time;
      if (cmd.kind == dram::CommandKind::Precharge) r.max_t_on = std::max(r.max_t_on, cmd.time - open);
    }
  });

  std::ostringstream detail;
  detail << "order,num_reads,seed,victim,aggressor_lo,aggressor_hi,max_t_on_ns,flips,victim_flips,flipped_rows,"
            "mitigation_refreshes\n";
  std::ostringstream summ;
  summ << "order,num_reads,seed,victims,victims_flipped,flipped_rows,flips\n";
  json js = json::array();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::uint64_t rows = 0;
    std::uint64_t flips = 0;
    std::uint64_t hit = 0;
    for (const auto& r : results[c]) {
      const auto lo = std::min(r.trace.aggressors[0], r.trace.aggressors[1]);
      const auto hi = std::max(r.trace.aggressors[0], r.trace.aggressors[1]);
      detail << tracegen::to_string(cells[c].order) << ',' << cells[c].reads << ',' << cells[c].seed << ','
             << r.trace.victim << ',' << lo << ',' << hi << ',' << r.max_t_on.count() << ',' << r.flips << ','
             << r.victim_flips << ',' << r.flipped_rows << ',' << r.refreshes << '\n';
      rows += r.flipped_rows;
      hit += r.victim_flips > 0;
      flips += r.flips;
    }
    summ << tracegen::to_string(cells[c].order) << ',' << cells[c].reads << ',' << cells[c].seed << ','
         << results[c].size() << ',' << hit << ',' << rows << ',' << flips << '\n';
    js.push_back({{"order", tracegen::to_string(cells[c].order)},
                  {"num_reads", cells[c].reads},
                  {"seed", cells[c].seed},
                  {"victims_flipped", hit},
                  {"flipped_rows", rows},
                  {"flips", flips}});
  }
  out.files.push_back({"poc.csv", detail.str()});
  out.files.push_back({"poc_summary.csv", summ.str()});
  out.summary["cells"] = js;
}

// --- overhead ---

struct OverheadRow {
  std::uint64_t seed;
  Nanos cap;
  Nanos uncapped;
  Nanos capped;
  double overhead;
};

std::vector<OverheadRow> measure_overhead(const ExperimentSpec& spec, const std::vector<Nanos>& caps,
                                          unsigned threads) {
  const auto& o = spec.overhead;
  std::vector<OverheadRow> rows(spec.seeds.size() * caps.size());
  parallel_for(spec.seeds.size(), threads, [&](std::size_t si) {
    const auto seed = spec.seeds[si];
    const auto req = tracegen::gen_random_requests(o.rows, o.request_rate_per_ns, o.duration, o.locality, seed);
    auto done = [&](std::optional<Nanos> cap) {
      const auto trace = tracegen::serve(req, {spec.timing, cap, true, 8});
      return trace.empty() ? Nanos{0} : trace.back().time;
    };
    const Nanos base = done(std::nullopt);
    for (std::size_t ci = 0; ci < caps.size(); ++ci) {
      const Nanos t = done(caps[ci]);
      const double ovh = base.count() ? static_cast<double>(t.count()) / static_cast<double>(base.count()) - 1.0 : 0.0;
      rows[si * caps.size() + ci] = {seed, caps[ci], base, t, ovh};
    }
  });
  return rows;
}

std::string overhead_csv(const std::vector<OverheadRow>& rows) {
  std::ostringstream s;
  s << "seed,t_on_cap_ns,uncapped_ns,capped_ns,overhead\n";
  for (const auto& r : rows) {
    s << r.seed << ',' << r.cap.count() << ',' << r.uncapped.count() << ',' << r.capped.count() << ','
      << fmt(r.overhead) << '\n';
  }
  return s.str();
}

json overhead_summary(const std::vector<OverheadRow>& rows, const std::vector<Nanos>& caps) {
  json per_cap = json::array();
  double prev = 0.0;
  bool monotone = true;
  for (std::size_t ci = 0; ci < caps.size(); ++ci) {
    double sum = 0.0;
    double worst = -1e300;
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (r.cap != caps[ci]) continue;
      sum += r.overhead;
      worst = std::max(worst, r.overhead);
      ++n;
    }
    const double mean = n ? sum / static_cast<double>(n) : 0.0;
    if (ci > 0 && mean > prev) monotone = false;
    prev = mean;
    per_cap.push_back({{"t_on_cap_ns", caps[ci].count()}, {"mean_overhead", mean}, {"max_overhead", worst}});
  }
  return {{"per_cap", per_cap}, {"monotone_non_increasing", monotone}};
}

void run_overhead(const ExperimentSpec& spec, const RunOptions& opts, RunOutput& out) {
  const auto rows = measure_overhead(spec, spec.overhead.t_on_caps, opts.threads);
  out.files.push_back({"overhead.csv", overhead_csv(rows)});
  out.summary["overhead"] = overhead_summary(rows, spec.overhead.t_on_caps);
}

// --- mitigation evaluation ---

struct SuiteTally {
  std::uint64_t traces = 0;
  std::uint64_t traces_with_flips = 0;
  std::uint64_t flips = 0;
  std::uint64_t refreshes = 0;
};

void run_mitigation_eval(const ExperimentSpec& spec, const RunOptions& opts, RunOutput& out) {
  const auto profile = experiment_profile(spec);
  const auto& me = spec.mitigation_eval;
  const Nanos cap = spec.adaptation ? spec.adaptation->t_on_cap : spec.timing.t_ron_max_jedec;

  // Unadapted Graphene counts plain activations; weighted_increments only selects the adaptation.
  auto original = *spec.mitigation;
  if (auto* g = std::get_if<mitigation::GrapheneConfig>(&original)) g->weighted_increments = false;
  std::vector<std::pair<std::string, std::optional<mitigation::MitigationConfig>>> configs{{"none", std::nullopt},
                                                                                           {"original", original}};
  if (spec.adaptation) {
    const auto ad = mitigation::adapt(*spec.mitigation, *spec.adaptation, profile, spec.timing);
    configs.emplace_back("adapted", ad.config);
    json params = json::object();
    for (const auto& [k, v] : ad.parameters) params[k] = v;
    out.metadata["adapted"] = {
        {"config", to_json(ad.config)}, {"scale", ad.scale}, {"formula", ad.formula}, {"parameters", params}};
    out.summary["adapted_config"] = to_json(ad.config);
  }

  if (std::holds_alternative<mitigation::ParaConfig>(*spec.mitigation)) {
    // Monte Carlo over independent attacks: one aggressor in the middle of the bank held at the
    // cap for exactly as many activations as the victim needs without any refresh.
    const RowIndex aggr = me.bank_rows / 2;
    const auto dev = device::at_temperature(profile, spec.temp_c);
    std::ostringstream csv;
    csv << "config,seed,p,t_on_ns,activations,trials,victim_flip_probability,analytic_miss,bound\n";
    json js = json::array();
    for (const auto& [label, cfg] : configs) {
      if (!cfg) continue;
      const double p = std::get<mitigation::ParaConfig>(*cfg).p;
      for (const auto seed : spec.seeds) {
        auto bc = bank_config(spec, opts, me.bank_rows);
        bc.pattern = {dram::DataPattern::Checkerboard, {aggr}};
        dram::Bank probe_bank(dev, bc);
        const double threshold = std::min(probe_bank.row_threshold(aggr - 1), probe_bank.row_threshold(aggr + 1));
        const double dmg = device::damage_per_activation(dev, cap, Sidedness::Single, spec.temp_c);
        const auto k = static_cast<std::uint64_t>(std::ceil(threshold / dmg * (1.0 - dram::kFlipSlack)));
        const auto trace = tracegen::gen_hammer({aggr}, Sidedness::Single, k, cap, spec.timing);
        std::vector<std::uint64_t> hits(me.para_trials, 0);
        parallel_for(me.para_trials, opts.threads, [&](std::size_t i) {
          Simulator sim(dev, bc, mitigation::ParaConfig{p, counter_hash(seed, i)});
          sim.run(trace);
          hits[i] = (sim.bank().flips_in_row(aggr - 1) > 0) + (sim.bank().flips_in_row(aggr + 1) > 0);
        });
        std::uint64_t total = 0;
        for (const auto h : hits) total += h;
        const double prob = static_cast<double>(total) / (2.0 * static_cast<double>(me.para_trials));
        const double analytic = std::pow(1.0 - p / 2.0, static_cast<double>(k - 1));
        csv << label << ',' << seed << ',' << fmt(p) << ',' << cap.count() << ',' << k << ',' << me.para_trials << ','
            << fmt(prob) << ',' << fmt(analytic) << ',' << fmt(me.para_bound) << '\n';
        js.push_back({{"config", label},
                      {"seed", seed},
                      {"p", p},
                      {"activations", k},
                      {"victim_flip_probability", prob},
                      {"analytic_miss", analytic},
                      {"within_bound", prob <= me.para_bound}});
      }
    }
    out.files.push_back({"para.csv", csv.str()});
    out.summary["para"] = js;
  } else {
    tracegen::AdversaryConfig ac;
    ac.rows = me.bank_rows;
    ac.t_on_values = me.suite_t_on;
    ac.window_rows = me.window_rows;
    ac.max_cycle = me.max_cycle;
    ac.activations = me.activations;
    ac.t_on_cap = cap;
    ac.timing = spec.timing;
    const auto handcrafted = tracegen::handcrafted_attacks(ac);
    const std::uint64_t n_exh = tracegen::exhaustive_suite_size(ac);

    std::ostringstream suite_csv;
    suite_csv << "config,seed,trace_set,traces,traces_with_flips,flips,mitigation_refreshes\n";
    std::ostringstream hand_csv;
    hand_csv << "config,seed,trace,flips,mitigation_refreshes\n";
    json js = json::array();
    for (const auto seed : spec.seeds) {
      for (const auto& [label, base_cfg] : configs) {
        const auto cfg = base_cfg ? std::optional(with_seed(*base_cfg, seed)) : std::nullopt;
        auto simulate = [&](const dram::Trace& t) {
          Simulator sim(profile, bank_config(spec, opts, me.bank_rows), cfg);
          return sim.run(t);
        };
        // Workers regenerate the exhaustive family and keep every n-th trace.
        const unsigned w = std::max(1U, opts.threads);
        std::vector<SuiteTally> part(w);
        parallel_for(w, w, [&](std::size_t k) {
          std::uint64_t idx = 0;
          tracegen::for_each_exhaustive_trace(ac, [&](const tracegen::NamedTrace& nt) {
            if (idx++ % w != k) return;
            const auto r = simulate(nt.trace);
            auto& p = part[k];
            ++p.traces;
            p.traces_with_flips += r.flips > 0;
            p.flips += r.flips;
            p.refreshes += r.mitigation_refreshes;
          });
        });
        SuiteTally ex;
        for (const auto& p : part) {
          ex.traces += p.traces;
          ex.traces_with_flips += p.traces_with_flips;
          ex.flips += p.flips;
          ex.refreshes += p.refreshes;
        }
        if (ex.traces != n_exh) throw Error("exhaustive suite size mismatch");

        std::vector<SimulationResult> hres(handcrafted.size());
        parallel_for(handcrafted.size(), opts.threads, [&](std::size_t i) { hres[i] = simulate(handcrafted[i].trace); });
        SuiteTally hc;
        for (std::size_t i = 0; i < handcrafted.size(); ++i) {
          ++hc.traces;
          hc.traces_with_flips += hres[i].flips > 0;
          hc.flips += hres[i].flips;
          hc.refreshes += hres[i].mitigation_refreshes;
          hand_csv << label << ',' << seed << ',' << handcrafted[i].name << ',' << hres[i].flips << ','
                   << hres[i].mitigation_refreshes << '\n';
        }
        for (const auto& [set, t] : {std::pair{"exhaustive", ex}, std::pair{"handcrafted", hc}}) {
          suite_csv << label << ',' << seed << ',' << set << ',' << t.traces << ',' << t.traces_with_flips << ','
                    << t.flips << ',' << t.refreshes << '\n';
        }
        js.push_back({{"config", label},
                      {"seed", seed},
                      {"traces", ex.traces + hc.traces},
                      {"traces_with_flips", ex.traces_with_flips + hc.traces_with_flips},
                      {"flips", ex.flips + hc.flips}});
      }
    }
    out.files.push_back({"attacks.csv", suite_csv.str()});
    out.files.push_back({"handcrafted.csv", hand_csv.str()});
    out.summary["attacks"] = js;
  }

  if (spec.adaptation && me.overhead) {
    const auto rows = measure_overhead(spec, {cap}, opts.threads);
    out.files.push_back({"overhead.csv", overhead_csv(rows)});
    out.summary["overhead"] = overhead_summary(rows, {cap});
  }
}

// --- overlap ---

void run_overlap(const ExperimentSpec& spec, const RunOptions& opts, RunOutput& out) {
  const auto profile = experiment_profile(spec);
  std::vector<characterize::OverlapReport> reports(spec.seeds.size());
  parallel_for(spec.seeds.size(), opts.threads, [&](std::size_t i) {
    characterize::OverlapConfig c;
    c.rows = spec.overlap.rows;
    c.temp_c = spec.temp_c;
    c.device_seed = spec.seeds[i];
    c.pattern = spec.overlap.pattern;
    c.hammer_t_on = spec.overlap.hammer_t_on;
    c.press_t_on = spec.overlap.press_t_on;
    c.retention_wait = spec.overlap.retention_wait;
    c.timing = spec.timing;
    reports[i] = characterize::run_overlap(profile, c).report;
  });

  std::ostringstream ov;
  ov << "seed,cells,press,hammer,retention,press_and_hammer,press_and_retention,press_hammer_fraction,"
        "press_retention_fraction\n";
  std::ostringstream dir;
  dir << "seed,mechanism,one_to_zero,zero_to_one\n";
  json js = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const auto seed = spec.seeds[i];
    ov << seed << ',' << r.cells << ',' << r.press << ',' << r.hammer << ',' << r.retention << ','
       << r.press_and_hammer << ',' << r.press_and_retention << ',' << fmt(r.press_hammer_fraction()) << ','
       << fmt(r.press_retention_fraction()) << '\n';
    for (const auto& [m, h] : {std::pair{"press", r.press_directions}, std::pair{"hammer", r.hammer_directions},
                               std::pair{"retention", r.retention_directions}}) {
      dir << seed << ',' << m << ',' << h.one_to_zero << ',' << h.zero_to_one << '\n';
    }
    js.push_back({{"seed", seed},
                  {"cells", r.cells},
                  {"press_hammer_fraction", r.press_hammer_fraction()},
                  {"press_retention_fraction", r.press_retention_fraction()},
                  {"press_one_to_zero_fraction", r.press_directions.one_to_zero_fraction()},
                  {"hammer_zero_to_one_fraction", r.hammer_directions.zero_to_one_fraction()}});
  }
  out.files.push_back({"overlap.csv", ov.str()});
  out.files.push_back({"directions.csv", dir.str()});
  out.summary["overlap"] = js;
}

// --- crossover ---

void run_crossover(const ExperimentSpec& spec, const RunOptions&, RunOutput& out) {
  const auto profile = experiment_profile(spec);
  const auto& c = spec.crossover;
  const auto pts = characterize::crossover_points(profile, c.t_on_min, c.t_on_max, spec.temp_c);

  auto table = c.table_t_on;
  if (table.empty()) {
    const auto dev = device::at_temperature(profile, spec.temp_c);
    table = {c.t_on_min, c.t_on_max};
    for (const auto s : {Sidedness::Single, Sidedness::Double}) {
      for (const auto& a : dev.curve(s, spec.temp_c).anchors()) {
        if (a.t_on > c.t_on_min && a.t_on < c.t_on_max) table.push_back(a.t_on);
      }
    }
    for (const auto p : pts) table.push_back(p);
    std::sort(table.begin(), table.end());
    table.erase(std::unique(table.begin(), table.end()), table.end());
  }
  std::ostringstream gap;
  characterize::write_gap_csv(gap, characterize::gap_table(profile, table, spec.temp_c));
  std::ostringstream cx;
  cx << "t_on_ns\n";
  json arr = json::array();
  for (const auto p : pts) {
    cx << p.count() << '\n';
    arr.push_back(p.count());
  }
  out.files.push_back({"gap.csv", gap.str()});
  out.files.push_back({"crossover.csv", cx.str()});
  out.summary["crossovers_ns"] = arr;
  out.summary["gap_at_min"] = characterize::sidedness_gap(profile, c.t_on_min, spec.temp_c);
  out.summary["gap_at_max"] = characterize::sidedness_gap(profile, c.t_on_max, spec.temp_c);
}

}  // namespace

device::DeviceProfile experiment_profile(const ExperimentSpec& spec) {
  auto p = device::resolve_profile(spec.profile);
  if (spec.kind == Kind::MitigationEval) {
    if (spec.mitigation_eval.base_threshold) p = device::rescale_base(p, *spec.mitigation_eval.base_threshold);
    if (spec.mitigation_eval.row_factor) {
      p.row_variation.min_factor = p.row_variation.max_factor = *spec.mitigation_eval.row_factor;
      p.validate();
    }
  }
  return p;
}

RunOutput run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  RunOutput out;
  out.summary = json::object();
  out.metadata = json::object();
  switch (spec.kind) {
    case Kind::Sweep: run_sweep(spec, opts, out); break;
    case Kind::Poc: run_poc(spec, opts, out); break;
    case Kind::MitigationEval: run_mitigation_eval(spec, opts, out); break;
    case Kind::Overhead: run_overhead(spec, opts, out); break;
    case Kind::Overlap: run_overlap(spec, opts, out); break;
    case Kind::Crossover: run_crossover(spec, opts, out); break;
  }
  out.summary["kind"] = to_string(spec.kind);
  out.summary["profile"] = spec.profile;
  out.summary["seeds"] = spec.seeds;

  out.metadata["tool"] = "rowsim";
  out.metadata["version"] = ROWSIM_VERSION;
  out.metadata["spec"] = to_json(spec);
  out.metadata["profile"] = json::parse(device::to_json(experiment_profile(spec)));
  out.metadata["seeds"] = spec.seeds;
  out.metadata["options"] = {{"strict_jedec", opts.strict_jedec}};
  json names = json::array();
  for (const auto& f : out.files) names.push_back(f.name);
  out.metadata["files"] = names;
  return out;
}

std::filesystem::path resolve_output_dir(const ExperimentSpec& spec) {
  if (const char* env = std::getenv("ROWSIM_OUT"); env && *env) return env;
  return spec.output_dir;
}

void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!(f << text) || !f.flush()) throw Error("cannot write '" + path.string() + "'");
  };
  for (const auto& a : out.files) put(a.name, a.content);
  put("metadata.json", out.metadata.dump(2) + "\n");
  put("summary.json", out.summary.dump(2) + "\n");
}

}  // namespace rowsim::app
