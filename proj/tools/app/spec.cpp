#include "spec.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <type_traits>

namespace rowsim::app {

using nlohmann::json;

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Sweep: return "sweep";
    case Kind::Poc: return "poc";
    case Kind::MitigationEval: return "mitigation_eval";
    case Kind::Overhead: return "overhead";
    case Kind::Overlap: return "overlap";
    case Kind::Crossover: return "crossover";
  }
  return "unknown";
}

Kind parse_kind(std::string_view text) {
  for (const auto k : {Kind::Sweep, Kind::Poc, Kind::MitigationEval, Kind::Overhead, Kind::Overlap, Kind::Crossover}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("kind: unknown experiment kind '" + std::string(text) +
                    "' (sweep | poc | mitigation_eval | overhead | overlap | crossover)");
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

template <class T>
T as(const json& j, const std::string& where) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) fail(where, "expected true or false");
    return j.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
  } else if constexpr (std::is_same_v<T, Nanos>) {
    if (!j.is_number_integer()) fail(where, "expected an integer number of nanoseconds");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      fail(where, "duration out of range");
    }
    return Nanos{j.get<std::int64_t>()};
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (!j.is_number_unsigned()) fail(where, "expected a non-negative integer");
      const auto v = j.get<std::uint64_t>();
      if (v > std::numeric_limits<T>::max()) fail(where, "integer out of range");
      return static_cast<T>(v);
    } else {
      const auto v = j.get<std::int64_t>();
      if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) fail(where, "integer out of range");
      return static_cast<T>(v);
    }
  } else {
    static_assert(sizeof(T) == 0, "unsupported field type");
  }
}

template <class T>
std::vector<T> as_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as<T>(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

/// Object view that remembers which keys were read so leftovers can be reported.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "spec" : path_, "expected an object");
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& dst) {
    if (const auto* v = find(key)) dst = as<T>(*v, where(key));
  }
  template <class T>
  void get(const std::string& key, std::optional<T>& dst) {
    if (const auto* v = find(key); v && !v->is_null()) dst = as<T>(*v, where(key));
  }
  template <class T>
  void get_list(const std::string& key, std::vector<T>& dst) {
    if (const auto* v = find(key)) dst = as_list<T>(*v, where(key));
  }
  template <class T>
  T req(const std::string& key) {
    const auto* v = find(key);
    if (!v) fail(where(key), "required field is missing");
    return as<T>(*v, where(key));
  }

  /// Nested object; a missing key reads as an empty object.
  Obj sub(const std::string& key) {
    static const json empty = json::object();
    const auto* v = find(key);
    return Obj(v ? *v : empty, where(key));
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(where(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class F>
auto wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

mitigation::MitigationConfig parse_mitigation(Obj o) {
  const auto kind = o.req<std::string>("kind");
  mitigation::MitigationConfig out;
  if (kind == "para") {
    mitigation::ParaConfig c;
    o.get("p", c.p);
    o.get("rng_seed", c.rng_seed);
    wrap(o.where("p"), [&] { c.validate(); });
    out = c;
  } else if (kind == "graphene") {
    mitigation::GrapheneConfig c;
    o.get("table_size", c.table_size);
    o.get("threshold", c.threshold);
    o.get("weighted_increments", c.weighted_increments);
    wrap(o.where("threshold"), [&] { c.validate(); });
    out = c;
  } else if (kind == "trr") {
    mitigation::TrrConfig c;
    o.get("sample_rate", c.sample_rate);
    o.get("table_size", c.table_size);
    o.get("rng_seed", c.rng_seed);
    o.get("ref_period", c.ref_period);
    wrap(o.where("kind"), [&] { c.validate(); });
    out = c;
  } else {
    fail(o.where("kind"), "unknown mitigation '" + kind + "' (para | graphene | trr)");
  }
  o.done();
  return out;
}

void check_ascending(const std::vector<Nanos>& v, const std::string& where) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) fail(where, "values must be strictly ascending");
  }
}

}  // namespace

ExperimentSpec parse_spec(const json& j) {
  Obj root(j, "");
  const auto schema = root.req<int>("schema");
  if (schema != kSpecSchema) fail("schema", "unsupported schema version " + std::to_string(schema));

  ExperimentSpec s;
  s.kind = parse_kind(root.req<std::string>("kind"));
  s.profile = root.req<std::string>("profile");
  if (s.profile.empty()) fail("profile", "must not be empty");
  root.get("temperature_c", s.temp_c);
  s.seeds = as_list<std::uint64_t>(*[&] {
    const auto* v = root.find("seeds");
    if (!v) fail("seeds", "required field is missing");
    return v;
  }(), "seeds");
  if (s.seeds.empty()) fail("seeds", "must not be empty");
  s.output_dir = root.req<std::string>("output_dir");
  if (s.output_dir.empty()) fail("output_dir", "must not be empty");

  if (root.has("timing")) {
    auto t = root.sub("timing");
    t.get("t_ras_min_ns", s.timing.t_ras_min);
    t.get("t_refi_ns", s.timing.t_refi);
    t.get("t_ron_max_jedec_ns", s.timing.t_ron_max_jedec);
    t.get("t_refw_ns", s.timing.t_refw);
    t.get("ref_groups", s.timing.ref_groups);
    t.get("t_rc_ns", s.timing.t_rc);
    t.get("t_rcd_ns", s.timing.t_rcd);
    t.get("t_read_ns", s.timing.t_read);
    t.get("t_rfc_ns", s.timing.t_rfc);
    t.done();
  }
  wrap("timing", [&] { s.timing.validate(); });

  if (root.has("mitigation")) s.mitigation = parse_mitigation(root.sub("mitigation"));
  if (root.has("adaptation")) {
    auto a = root.sub("adaptation");
    mitigation::AdaptationConfig c;
    c.t_on_cap = a.req<Nanos>("t_on_cap_ns");
    a.get("scale", c.scale);
    a.get("para_threshold", c.para_threshold);
    a.done();
    c.temp_c = s.temp_c;
    if (c.t_on_cap < s.timing.t_ras_min || c.t_on_cap > s.timing.t_ron_max_jedec) {
      fail("adaptation.t_on_cap_ns", "must lie within [t_ras_min, t_ron_max_jedec]");
    }
    if (c.scale && !(*c.scale >= 1.0)) fail("adaptation.scale", "must be >= 1");
    if (c.para_threshold && !(*c.para_threshold >= 1.0)) fail("adaptation.para_threshold", "must be >= 1");
    s.adaptation = c;
  }

  if (s.mitigation && s.kind != Kind::Poc && s.kind != Kind::MitigationEval) {
    fail("mitigation", "not used by " + std::string(to_string(s.kind)) + " runs");
  }
  if (s.adaptation && s.kind != Kind::MitigationEval) {
    fail("adaptation", "not used by " + std::string(to_string(s.kind)) + " runs");
  }

  {
    auto o = root.sub("sweep");
    o.get_list("t_on_ns", s.sweep.t_on);
    if (const auto* v = o.find("sidedness")) s.sweep.sidedness = wrap(o.where("sidedness"), [&] {
      return parse_sidedness(as<std::string>(*v, o.where("sidedness")));
    });
    o.get("rows", s.sweep.rows);
    o.get_list("victims", s.sweep.victims);
    o.get("bank_rows", s.sweep.bank_rows);
    if (const auto* v = o.find("data_pattern")) s.sweep.pattern = wrap(o.where("data_pattern"), [&] {
      return dram::parse_data_pattern(as<std::string>(*v, o.where("data_pattern")));
    });
    o.done();
    check_ascending(s.sweep.t_on, "sweep.t_on_ns");
    if (s.kind == Kind::Sweep) {
      if (s.sweep.victims.empty() && s.sweep.rows == 0) fail("sweep.rows", "must be >= 1");
      if (s.sweep.bank_rows < 3) fail("sweep.bank_rows", "must be >= 3");
      if (s.sweep.victims.empty() && s.sweep.rows + 2ULL > s.sweep.bank_rows) {
        fail("sweep.rows", "does not fit in sweep.bank_rows");
      }
      for (const auto t : s.sweep.t_on) {
        if (t < s.timing.t_ras_min) fail("sweep.t_on_ns", "values must be >= t_ras_min");
        if (s.timing.max_activations_in_window(t) == 0) fail("sweep.t_on_ns", "values must fit in the refresh window");
      }
      for (const auto v : s.sweep.victims) {
        if (v >= s.sweep.bank_rows) fail("sweep.victims", "row outside the bank");
      }
    }
  }

  {
    auto o = root.sub("poc");
    o.get_list("num_reads", s.poc.num_reads);
    if (const auto* v = o.find("orders")) {
      s.poc.orders.clear();
      for (const auto& name : as_list<std::string>(*v, o.where("orders"))) {
        s.poc.orders.push_back(wrap(o.where("orders"), [&] { return tracegen::parse_poc_order(name); }));
      }
    }
    o.get("num_aggr_acts", s.poc.num_aggr_acts);
    o.get("num_iter", s.poc.num_iter);
    o.get("dummy_rows", s.poc.dummy_rows);
    o.get("sync_period", s.poc.sync_period);
    o.get("flush_overhead_ns", s.poc.flush_overhead);
    o.get_list("victim_rows", s.poc.victim_rows);
    if (const auto* v = o.find("mapping")) {
      const auto m = as<std::string>(*v, o.where("mapping"));
      if (m == "identity") {
        s.poc.mapping.kind = tracegen::RowMapping::Kind::Identity;
      } else if (m == "xor") {
        s.poc.mapping.kind = tracegen::RowMapping::Kind::Xor;
      } else {
        fail(o.where("mapping"), "expected identity or xor");
      }
    }
    o.get("mapping_mask", s.poc.mapping.mask);
    o.get("bank_rows", s.poc.bank_rows);
    o.done();
    if (s.kind == Kind::Poc) {
      if (s.poc.victim_rows.empty()) fail("poc.victim_rows", "must not be empty");
      if (s.poc.num_reads.empty()) fail("poc.num_reads", "must not be empty");
      if (s.poc.orders.empty()) fail("poc.orders", "must not be empty");
      if (s.poc.mapping.mask > 7) fail("poc.mapping_mask", "must be < 8");
      for (const auto n : s.poc.num_reads) {
        if (n == 0) fail("poc.num_reads", "values must be >= 1");
      }
      tracegen::PocParams p;
      p.num_aggr_acts = s.poc.num_aggr_acts;
      p.num_iter = s.poc.num_iter;
      p.sync_period = s.poc.sync_period;
      p.flush_overhead = s.poc.flush_overhead;
      wrap("poc", [&] { p.validate(); });
      for (const auto v : s.poc.victim_rows) {
        wrap("poc.victim_rows", [&] { tracegen::find_aggressor_rows(v, s.poc.mapping, s.poc.bank_rows); });
      }
    }
  }

  {
    auto o = root.sub("mitigation_eval");
    auto& m = s.mitigation_eval;
    o.get("bank_rows", m.bank_rows);
    o.get("base_threshold", m.base_threshold);
    o.get("row_factor", m.row_factor);
    o.get_list("suite_t_on_ns", m.suite_t_on);
    o.get("window_rows", m.window_rows);
    o.get("max_cycle", m.max_cycle);
    o.get("activations", m.activations);
    o.get("para_trials", m.para_trials);
    o.get("para_bound", m.para_bound);
    o.get("overhead", m.overhead);
    o.done();
    if (s.kind == Kind::MitigationEval) {
      if (!s.mitigation) fail("mitigation", "required for mitigation_eval");
      if (m.base_threshold && !(*m.base_threshold >= 1.0)) fail("mitigation_eval.base_threshold", "must be >= 1");
      if (m.row_factor && !(*m.row_factor > 0.0)) fail("mitigation_eval.row_factor", "must be > 0");
      if (m.bank_rows < 4) fail("mitigation_eval.bank_rows", "must be >= 4");
      if (m.window_rows == 0 || m.window_rows > m.bank_rows) fail("mitigation_eval.window_rows", "must be in [1, bank_rows]");
      if (m.max_cycle == 0) fail("mitigation_eval.max_cycle", "must be >= 1");
      if (m.activations == 0) fail("mitigation_eval.activations", "must be >= 1");
      if (m.para_trials == 0) fail("mitigation_eval.para_trials", "must be >= 1");
      if (!(m.para_bound > 0.0 && m.para_bound < 1.0)) fail("mitigation_eval.para_bound", "must be in (0, 1)");
      if (m.suite_t_on.empty()) fail("mitigation_eval.suite_t_on_ns", "must not be empty");
      const Nanos cap = s.adaptation ? s.adaptation->t_on_cap : s.timing.t_ron_max_jedec;
      for (const auto t : m.suite_t_on) {
        if (t < s.timing.t_ras_min || t > cap) fail("mitigation_eval.suite_t_on_ns", "values must lie in [t_ras_min, t_on_cap]");
      }
    }
  }

  {
    auto o = root.sub("overhead");
    auto& m = s.overhead;
    o.get("rows", m.rows);
    o.get("request_rate_per_ns", m.request_rate_per_ns);
    o.get("duration_ns", m.duration);
    o.get("locality", m.locality);
    o.get_list("t_on_caps_ns", m.t_on_caps);
    o.done();
    if (s.kind == Kind::Overhead || (s.kind == Kind::MitigationEval && s.mitigation_eval.overhead)) {
      if (m.rows == 0) fail("overhead.rows", "must be >= 1");
      if (!(m.request_rate_per_ns > 0.0)) fail("overhead.request_rate_per_ns", "must be > 0");
      if (m.duration <= Nanos{0}) fail("overhead.duration_ns", "must be > 0");
      if (!(m.locality >= 0.0 && m.locality <= 1.0)) fail("overhead.locality", "must be within [0, 1]");
      check_ascending(m.t_on_caps, "overhead.t_on_caps_ns");
      for (const auto c : m.t_on_caps) {
        if (c < s.timing.t_ras_min) fail("overhead.t_on_caps_ns", "values must be >= t_ras_min");
      }
      if (s.kind == Kind::Overhead && m.t_on_caps.empty()) fail("overhead.t_on_caps_ns", "must not be empty");
    }
  }

  {
    auto o = root.sub("overlap");
    auto& m = s.overlap;
    o.get("rows", m.rows);
    o.get("hammer_t_on_ns", m.hammer_t_on);
    o.get("press_t_on_ns", m.press_t_on);
    o.get("retention_wait_ns", m.retention_wait);
    if (const auto* v = o.find("data_pattern")) m.pattern = wrap(o.where("data_pattern"), [&] {
      return dram::parse_data_pattern(as<std::string>(*v, o.where("data_pattern")));
    });
    o.done();
    if (s.kind == Kind::Overlap) {
      if (m.rows < 4) fail("overlap.rows", "must be >= 4");
      if (m.hammer_t_on < s.timing.t_ras_min) fail("overlap.hammer_t_on_ns", "must be >= t_ras_min");
      if (m.press_t_on <= m.hammer_t_on) fail("overlap.press_t_on_ns", "must exceed hammer_t_on_ns");
      if (m.retention_wait <= Nanos{0}) fail("overlap.retention_wait_ns", "must be > 0");
    }
  }

  {
    auto o = root.sub("crossover");
    auto& m = s.crossover;
    o.get("t_on_min_ns", m.t_on_min);
    o.get("t_on_max_ns", m.t_on_max);
    o.get_list("table_t_on_ns", m.table_t_on);
    o.done();
    if (s.kind == Kind::Crossover) {
      if (m.t_on_min < s.timing.t_ras_min) fail("crossover.t_on_min_ns", "must be >= t_ras_min");
      if (m.t_on_max < m.t_on_min) fail("crossover.t_on_max_ns", "must be >= t_on_min_ns");
      check_ascending(m.table_t_on, "crossover.table_t_on_ns");
      for (const auto t : m.table_t_on) {
        if (t < s.timing.t_ras_min) fail("crossover.table_t_on_ns", "values must be >= t_ras_min");
      }
    }
  }

  root.done();
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_spec(j);
}

namespace {

json ns_list(const std::vector<Nanos>& v) {
  json a = json::array();
  for (const auto t : v) a.push_back(t.count());
  return a;
}

}  // namespace

json to_json(const mitigation::MitigationConfig& m) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, mitigation::ParaConfig>) {
          return {{"kind", "para"}, {"p", c.p}, {"rng_seed", c.rng_seed}};
        } else if constexpr (std::is_same_v<T, mitigation::GrapheneConfig>) {
          return {{"kind", "graphene"},
                  {"table_size", c.table_size},
                  {"threshold", c.threshold},
                  {"weighted_increments", c.weighted_increments}};
        } else {
          return {{"kind", "trr"},
                  {"sample_rate", c.sample_rate},
                  {"table_size", c.table_size},
                  {"rng_seed", c.rng_seed},
                  {"ref_period", c.ref_period}};
        }
      },
      m);
}

json to_json(const ExperimentSpec& s) {
  json j;
  j["schema"] = kSpecSchema;
  j["kind"] = to_string(s.kind);
  j["profile"] = s.profile;
  j["temperature_c"] = s.temp_c;
  j["seeds"] = s.seeds;
  j["output_dir"] = s.output_dir;
  const auto& t = s.timing;
  j["timing"] = {{"t_ras_min_ns", t.t_ras_min.count()}, {"t_refi_ns", t.t_refi.count()},
                 {"t_ron_max_jedec_ns", t.t_ron_max_jedec.count()}, {"t_refw_ns", t.t_refw.count()},
                 {"ref_groups", t.ref_groups}, {"t_rc_ns", t.t_rc.count()}, {"t_rcd_ns", t.t_rcd.count()},
                 {"t_read_ns", t.t_read.count()}, {"t_rfc_ns", t.t_rfc.count()}};
  if (s.mitigation) j["mitigation"] = to_json(*s.mitigation);
  if (s.adaptation) {
    json a{{"t_on_cap_ns", s.adaptation->t_on_cap.count()}};
    if (s.adaptation->scale) a["scale"] = *s.adaptation->scale;
    if (s.adaptation->para_threshold) a["para_threshold"] = *s.adaptation->para_threshold;
    j["adaptation"] = a;
  }
  j["sweep"] = {{"t_on_ns", ns_list(s.sweep.t_on)},
                {"sidedness", to_string(s.sweep.sidedness)},
                {"rows", s.sweep.rows},
                {"victims", s.sweep.victims},
                {"bank_rows", s.sweep.bank_rows},
                {"data_pattern", dram::to_string(s.sweep.pattern)}};
  {
    json orders = json::array();
    for (const auto o : s.poc.orders) orders.push_back(tracegen::to_string(o));
    j["poc"] = {{"num_reads", s.poc.num_reads},
                {"orders", orders},
                {"num_aggr_acts", s.poc.num_aggr_acts},
                {"num_iter", s.poc.num_iter},
                {"dummy_rows", s.poc.dummy_rows},
                {"sync_period", s.poc.sync_period},
                {"flush_overhead_ns", s.poc.flush_overhead.count()},
                {"victim_rows", s.poc.victim_rows},
                {"mapping", s.poc.mapping.kind == tracegen::RowMapping::Kind::Xor ? "xor" : "identity"},
                {"mapping_mask", s.poc.mapping.mask},
                {"bank_rows", s.poc.bank_rows}};
  }
  {
    const auto& m = s.mitigation_eval;
    json o{{"bank_rows", m.bank_rows},
           {"suite_t_on_ns", ns_list(m.suite_t_on)},
           {"window_rows", m.window_rows},
           {"max_cycle", m.max_cycle},
           {"activations", m.activations},
           {"para_trials", m.para_trials},
           {"para_bound", m.para_bound},
           {"overhead", m.overhead}};
    if (m.base_threshold) o["base_threshold"] = *m.base_threshold;
    if (m.row_factor) o["row_factor"] = *m.row_factor;
    j["mitigation_eval"] = o;
  }
  j["overhead"] = {{"rows", s.overhead.rows},
                   {"request_rate_per_ns", s.overhead.request_rate_per_ns},
                   {"duration_ns", s.overhead.duration.count()},
                   {"locality", s.overhead.locality},
                   {"t_on_caps_ns", ns_list(s.overhead.t_on_caps)}};
  j["overlap"] = {{"rows", s.overlap.rows},
                  {"hammer_t_on_ns", s.overlap.hammer_t_on.count()},
                  {"press_t_on_ns", s.overlap.press_t_on.count()},
                  {"retention_wait_ns", s.overlap.retention_wait.count()},
                  {"data_pattern", dram::to_string(s.overlap.pattern)}};
  j["crossover"] = {{"t_on_min_ns", s.crossover.t_on_min.count()},
                    {"t_on_max_ns", s.crossover.t_on_max.count()},
                    {"table_t_on_ns", ns_list(s.crossover.table_t_on)}};
  return j;
}

}  // namespace rowsim::app
