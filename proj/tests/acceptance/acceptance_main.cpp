// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "app/runners.hpp"
#include "app/spec.hpp"
#include "rowsim/characterizer.hpp"
#include "rowsim/mitigation.hpp"
#include "support.hpp"

using namespace rowsim;
using nlohmann::json;
using support::Dec50;
using support::exact;
using support::Rational;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned threads() { return std::max(1U, std::thread::hardware_concurrency()); }

/// First run of every shipped config, kept for the determinism rerun.
std::map<std::string, app::RunOutput>& runs() {
  static std::map<std::string, app::RunOutput> r;
  return r;
}

const app::RunOutput& run_config(const std::string& name) {
  auto& r = runs();
  if (auto it = r.find(name); it != r.end()) return it->second;
  const auto spec = app::load_spec(std::string(ROWSIM_CONFIG_DIR) + "/" + name);
  return r.emplace(name, app::run_experiment(spec, {threads(), false})).first->second;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    out.push_back(f);
  }
  return out;
}

double ratio_at(const app::RunOutput& out, long long t_on) {
  for (const auto& e : out.summary["summary"]) {
    if (e["t_on_ns"] == t_on && e.contains("mean_ratio_to_first")) return e["mean_ratio_to_first"].get<double>();
  }
  return NAN;
}

Verdict anchor_ratios() {
  const std::pair<const char*, std::pair<double, double>> cases[] = {{"sweep-80c.json", {17.6, 159.4}},
                                                                     {"sweep-50c.json", {21.0, 190.0}}};
  Verdict v{true, ""};
  for (const auto& [cfg, want] : cases) {
    const auto& out = run_config(cfg);
    const double r1 = 1.0 / ratio_at(out, 7'800);
    const double r9 = 1.0 / ratio_at(out, 70'200);
    const bool ok = std::abs(r1 / want.first - 1) <= 0.02 && std::abs(r9 / want.second - 1) <= 0.02 &&
                    out.summary["rows_measured"] == 64;
    v.pass = v.pass && ok;
    v.detail += fmt("%s 1/%.3f (want 1/%.1f) 1/%.2f (want 1/%.1f); ", cfg, r1, want.first, r9, want.second);
  }
  return v;
}

Verdict single_activation() {
  characterize::SweepConfig cfg;
  cfg.t_on_values = {Nanos{30'000'000}};
  cfg.setup.temp_c = 80;
  cfg.seeds = {1, 2, 3};
  cfg.threads = threads();
  const auto res = characterize::sweep(support::builtin("paper-mean-80C"), cfg);
  std::uint64_t worst = 0;
  bool all = !res.results.empty();
  for (const auto& r : res.results) {
    all = all && r.acmin;
    if (r.acmin) worst = std::max(worst, *r.acmin);
  }
  return {all && worst == 1, fmt("max ACmin(30 ms) over %zu rows = %llu", res.results.size(),
                                 static_cast<unsigned long long>(worst))};
}

Verdict temperature_factors() {
  const std::pair<const char*, double> cases[] = {
      {"paper-mfrS-50C", 0.55}, {"paper-mfrH-50C", 0.32}, {"paper-mfrM-50C", 0.59}};
  Verdict v{true, ""};
  for (const auto& [name, f] : cases) {
    const auto& p = support::builtin(name);
    const double r = device::acmin_at(device::at_temperature(p, 80), Nanos{7'800}, Sidedness::Single, 80) /
                     device::acmin_at(p, Nanos{7'800}, Sidedness::Single, 50);
    v.pass = v.pass && std::abs(r / f - 1) <= 0.01;
    v.detail += fmt("%s %.4f (want %.2f); ", name, r, f);
  }
  return v;
}

Verdict overlap() {
  const auto& out = run_config("overlap.json");
  const auto rows = csv_rows(out.file("overlap.csv")->content);
  const auto dirs = csv_rows(out.file("directions.csv")->content);
  const auto& p = support::builtin("paper-mean-80C");
  Verdict v{!rows.empty(), ""};
  for (const auto& r : rows) {
    const double cells = std::stod(r[1]);
    const double press = std::stod(r[2]);
    const double ph = std::stod(r[5]) / press;
    const double pr = std::stod(r[6]) / press;
    const double lim_h = p.overlap_rh + 3 * std::sqrt(p.overlap_rh * (1 - p.overlap_rh) / press);
    const double lim_r = p.overlap_ret + 3 * std::sqrt(p.overlap_ret * (1 - p.overlap_ret) / press);
    v.pass = v.pass && cells >= 1e6 && ph < lim_h && pr < lim_r;
    v.detail += fmt("cells %.0f P&H %.5f%% (< %.5f%%) P&R %.4f%% (< %.4f%%); ", cells, 100 * ph, 100 * lim_h,
                    100 * pr, 100 * lim_r);
  }
  for (const auto& d : dirs) {
    const double o2z = std::stod(d[2]);
    const double z2o = std::stod(d[3]);
    if (d[1] == "press") {
      v.pass = v.pass && o2z / (o2z + z2o) >= 0.99;
      v.detail += fmt("press 1->0 %.4f ", o2z / (o2z + z2o));
    } else if (d[1] == "hammer") {
      v.pass = v.pass && z2o / (o2z + z2o) >= 0.99;
      v.detail += fmt("hammer 0->1 %.4f ", z2o / (o2z + z2o));
    }
  }
  return v;
}

Verdict crossover() {
  const auto& p = support::builtin("crossover");
  const auto pts = characterize::crossover_points(p, Nanos{36}, Nanos{30'000'000}, 50);
  // Independent dense scan of the sign.
  int changes = 0;
  double prev = characterize::sidedness_gap(p, Nanos{36}, 50);
  const bool negative_first = prev < 0;
  for (double t = 36; t <= 30e6; t *= 1.001) {
    const double g = characterize::sidedness_gap(p, Nanos{static_cast<long long>(t)}, 50);
    if (g != 0 && prev != 0 && (g < 0) != (prev < 0)) ++changes;
    if (g != 0) prev = g;
  }
  return {pts.size() == 1 && changes == 1 && negative_first,
          fmt("%zu crossing(s) at %lld ns, dense scan %d sign change(s), gap(36 ns) %s 0", pts.size(),
              pts.empty() ? -1LL : static_cast<long long>(pts.front().count()), changes, negative_first ? "<" : ">=")};
}

/// ACmin from the anchors alone: 50-digit log-log interpolation, times the row factor.
Dec50 analytic_acmin(const device::AcminCurve& c, Nanos t, const Rational& factor) {
  const auto a = c.anchors();
  Dec50 v = Dec50(a.back().acmin);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (t > a[i + 1].t_on) continue;
    const Dec50 frac = log(Dec50(t.count()) / Dec50(a[i].t_on.count())) /
                       log(Dec50(a[i + 1].t_on.count()) / Dec50(a[i].t_on.count()));
    v = Dec50(a[i].acmin) * pow(Dec50(a[i + 1].acmin) / Dec50(a[i].acmin), frac);
    break;
  }
  if (t == a.front().t_on) v = Dec50(a.front().acmin);
  if (v < 1) v = 1;
  return v * Dec50(boost::multiprecision::numerator(factor).str()) /
         Dec50(boost::multiprecision::denominator(factor).str());
}

Verdict closed_loop() {
  const char* names[] = {"paper-mean-80C", "paper-mean-50C", "paper-mfrS-50C",
                         "paper-mfrH-50C", "paper-mfrM-50C", "crossover"};
  std::mt19937_64 rng(20'240'601);
  std::uniform_real_distribution<double> log_t(std::log(36.0), std::log(30e6));
  int exact_ok = 0;
  int exact_n = 0;
  int var_ok = 0;
  int var_n = 0;
  std::string worst;
  for (int i = 0; i < 100; ++i) {
    const bool pinned = i < 50;
    const auto& base = support::builtin(names[rng() % 6]);
    const auto p = pinned ? support::pinned(base) : base;
    const Nanos t{static_cast<long long>(std::exp(log_t(rng)))};
    const bool dbl = p.curves.count({Sidedness::Double, p.reference_temp_c}) && rng() % 2;
    const auto side = dbl ? Sidedness::Double : Sidedness::Single;
    characterize::ProbeSetup setup;
    setup.temp_c = p.reference_temp_c;
    setup.device_seed = rng();
    setup.cells_per_row = 128;
    const RowIndex row = 1 + static_cast<RowIndex>(rng() % 65'534);

    auto bc = support::quiet_bank(setup.bank_rows, setup.temp_c);
    bc.device_seed = setup.device_seed;
    bc.cells_per_row = setup.cells_per_row;
    dram::Bank bank(p, bc);
    const Rational factor = exact(bank.row_threshold(row)) / exact(p.base_threshold);
    const Dec50 want = analytic_acmin(p.curves.at({side, p.reference_temp_c}), t, factor);
    const Dec50 hi = ceil(want);
    // Within 1e-9 of an integer either neighbor is the true ceiling at double precision.
    const Dec50 lo = ceil(want * (1 - Dec50(1e-9)));

    const auto r = characterize::measure_acmin(p, setup, row, t, side, {1});
    const Dec50 got = r.acmin ? Dec50(*r.acmin) : Dec50(-1);
    const bool ok = pinned ? (got == hi || got == lo) : (abs(got - hi) <= 1);
    if (pinned) {
      ++exact_n;
      exact_ok += ok;
    } else {
      ++var_n;
      var_ok += ok;
    }
    if (!ok) worst = fmt("%s row %u t %lld: got %s want %s", p.name.c_str(), row, static_cast<long long>(t.count()),
                         got.str().c_str(), hi.str().c_str());
  }
  return {exact_ok == exact_n && var_ok == var_n,
          fmt("zero variation %d/%d exact, with variation %d/%d within 1 %s", exact_ok, exact_n, var_ok, var_n,
              worst.c_str())};
}

Verdict misra_gries() {
  const auto& p = support::builtin("paper-mean-80C");
  const dram::TimingParams tm;
  std::mt19937_64 rng(404);
  int violations = 0;
  long long events_total = 0;
  long long triggers = 0;
  for (int s = 0; s < 200; ++s) {
    const std::size_t k = 2 + rng() % 30;
    const double threshold = 5.0 + static_cast<double>(rng() % 300);
    const std::size_t n = 1 + rng() % 10'000;
    const RowIndex span = 8 + static_cast<RowIndex>(rng() % 500);
    mitigation::Context ctx;
    ctx.profile = &p;
    ctx.temp_c = 80;
    ctx.rows = 1'024;
    mitigation::Graphene g({k, threshold, true}, ctx);
    mitigation::MisraGries plain(k);

    std::map<RowIndex, Rational> since;  // exact weight since the row's last trigger, this window
    std::map<RowIndex, Rational> truth;  // exact weight over the whole stream (plain summary)
    Rational window_weight = 0;
    Rational stream_weight = 0;
    long long window_start = 0;
    long long now = 0;
    std::geometric_distribution<int> hot(0.05);
    std::uniform_real_distribution<double> log_t(std::log(36.0), std::log(70'200.0));
    for (std::size_t i = 0; i < n; ++i) {
      const RowIndex row = static_cast<RowIndex>(hot(rng)) % span;
      const Nanos t_on{static_cast<long long>(std::exp(log_t(rng)))};
      now += t_on.count() + tm.t_rc.count();
      if (now - window_start >= tm.t_refw.count()) {
        window_start = now - (now - window_start) % tm.t_refw.count();
        since.clear();
        window_weight = 0;
      }
      const double w = device::weight(p, t_on, Sidedness::Single, 80);
      window_weight += exact(w);
      since[row] += exact(w);
      const bool fired = !g.on_precharge(row, t_on, Nanos{now}).empty();
      if (fired) {
        since.erase(row);
        ++triggers;
      } else if (since[row] >= exact(threshold) + window_weight / Rational(k + 1)) {
        ++violations;  // a frequent row slipped past the tracker
      }
      stream_weight += exact(w);
      truth[row] += exact(w);
      plain.add(row, w);
      const Rational est = exact(plain.estimate(row));
      // Summation in double drifts by a few ulps of the total.
      const Rational eps = stream_weight * Rational(1, 1'000'000'000'000LL);
      if (est > truth[row] + eps || est < truth[row] - stream_weight / Rational(k + 1) - eps) ++violations;
    }
    events_total += static_cast<long long>(n);
  }
  return {violations == 0, fmt("200 streams, %lld weighted events, %lld triggers, %d violations", events_total,
                               triggers, violations)};
}

Verdict mitigation_pair() {
  Verdict v{true, ""};
  const auto& g = run_config("graphene-eval.json");
  std::map<std::string, long long> flips;
  for (const auto& e : g.summary["attacks"]) flips[e["config"]] += e["flips"].get<long long>();
  long long original_long = 0;
  for (const auto& r : csv_rows(g.file("handcrafted.csv")->content)) {
    if (r[0] == "original" && r[2].find("cap") != std::string::npos) original_long += std::stoll(r[3]);
  }
  v.pass = flips.count("adapted") && flips["adapted"] == 0 && original_long >= 1;
  v.detail += fmt("graphene adapted %lld flips over %s traces, original %lld flips on long-tON handcrafted traces; ",
                  flips["adapted"], g.summary["attacks"].back()["traces"].dump().c_str(), original_long);

  const auto& para = run_config("para-eval.json");
  const auto spec = app::load_spec(std::string(ROWSIM_CONFIG_DIR) + "/para-eval.json");
  const double bound = spec.mitigation_eval.para_bound;
  std::map<std::string, double> prob;
  for (const auto& e : para.summary["para"]) prob[e["config"]] = e["victim_flip_probability"].get<double>();
  const bool para_ok = spec.mitigation_eval.para_trials >= 100'000 && prob.count("adapted") &&
                       prob["adapted"] <= bound && prob["original"] > bound;
  v.pass = v.pass && para_ok;
  v.detail += fmt("para adapted %.5f original %.4f bound %.3f over %llu windows", prob["adapted"], prob["original"],
                  bound, static_cast<unsigned long long>(spec.mitigation_eval.para_trials));
  return v;
}

Verdict poc() {
  const auto& out = run_config("poc-trr.json");
  std::map<std::pair<std::string, long long>, long long> rows;
  std::map<std::pair<std::string, long long>, long long> flips;
  for (const auto& e : out.summary["cells"]) {
    const auto key = std::pair{e["order"].get<std::string>(), e["num_reads"].get<long long>()};
    rows[key] += e["flipped_rows"].get<long long>();
    flips[key] += e["flips"].get<long long>();
  }
  const long long a1 = rows[{"flush-after-all", 1}];
  const long long b1 = rows[{"flush-each-access", 1}];
  const long long a32 = rows[{"flush-after-all", 32}];
  const long long b32 = rows[{"flush-each-access", 32}];
  const long long fa = flips[{"flush-after-all", 32}];
  const long long fb = flips[{"flush-each-access", 32}];
  const bool ok = a1 == 0 && b1 == 0 && a32 > 0 && b32 > 0 && fb >= fa && flips[{"flush-each-access", 1}] == 0 &&
                  flips[{"flush-after-all", 1}] == 0;
  return {ok, fmt("flipped rows: reads=1 alg1 %lld alg2 %lld; reads=32 alg1 %lld (%lld flips) alg2 %lld (%lld flips)",
                  a1, b1, a32, fa, b32, fb)};
}

Verdict overhead() {
  const auto& out = run_config("overhead.json");
  const auto& s = out.summary["overhead"];
  double at_refi = NAN;
  std::string list;
  for (const auto& e : s["per_cap"]) {
    if (e["t_on_cap_ns"] == 7'800) at_refi = e["mean_overhead"].get<double>();
    list += fmt("%lld:%.4f ", e["t_on_cap_ns"].get<long long>(), e["mean_overhead"].get<double>());
  }
  const bool mono = s["monotone_non_increasing"].get<bool>();
  return {at_refi <= 0.15 && mono,
          fmt("overhead at 7.8 us %.4f (<= 0.15), monotone %s; per cap %s", at_refi, mono ? "yes" : "no", list.c_str())};
}

Verdict determinism() {
  const char* configs[] = {"sweep-80c.json", "sweep-50c.json", "overlap.json",  "crossover.json",
                           "poc-trr.json",   "overhead.json",  "para-eval.json", "graphene-eval.json"};
  std::size_t files = 0;
  std::string diff;
  for (const auto* c : configs) {
    const auto& first = run_config(c);
    const auto spec = app::load_spec(std::string(ROWSIM_CONFIG_DIR) + "/" + c);
    // Different worker count on the rerun: output must not depend on scheduling.
    const auto again = app::run_experiment(spec, {threads() == 1 ? 3U : 1U, false});
    if (again.files.size() != first.files.size()) diff += std::string(c) + " file count; ";
    for (std::size_t i = 0; i < std::min(again.files.size(), first.files.size()); ++i) {
      ++files;
      if (again.files[i].content != first.files[i].content) diff += std::string(c) + "/" + first.files[i].name + "; ";
    }
  }
  return {diff.empty(), fmt("%zu CSVs across %zu specs byte-identical on rerun %s", files, std::size(configs),
                            diff.empty() ? "" : ("; differs: " + diff).c_str())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"anchor-ratios", anchor_ratios},
      {"single-activation-30ms", single_activation},
      {"temperature-factors", temperature_factors},
      {"overlap-direction", overlap},
      {"crossover", crossover},
      {"closed-loop-oracle", closed_loop},
      {"misra-gries-oracle", misra_gries},
      {"mitigation-safety-pair", mitigation_pair},
      {"poc-trr", poc},
      {"overhead", overhead},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %-24s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed ? 1 : 0;
}
