#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rowsim/profile.hpp"

namespace rowsim::device {

using nlohmann::json;

namespace {

constexpr int kSchema = 1;

json curve_to_json(CurveKey key, const AcminCurve& c) {
  json anchors = json::array();
  for (const auto& a : c.anchors()) anchors.push_back(json::array({a.t_on.count(), a.acmin}));
  return {{"sidedness", to_string(key.sidedness)}, {"temp_c", key.temp_c}, {"anchors", anchors}};
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

}  // namespace

std::string to_json(const DeviceProfile& p) {
  json j;
  j["schema"] = kSchema;
  j["name"] = p.name;
  j["description"] = p.description;
  j["base_threshold"] = p.base_threshold;
  j["reference_temp_c"] = p.reference_temp_c;
  j["t_ras_min_ns"] = p.t_ras_min.count();
  j["press_onset_ns"] = p.press_onset.count();
  json curves = json::array();
  for (const auto& [key, c] : p.curves) curves.push_back(curve_to_json(key, c));
  j["curves"] = curves;
  json scales = json::array();
  for (const auto& s : p.temp_scale) {
    scales.push_back({{"from_c", s.from_c}, {"to_c", s.to_c}, {"factor", s.factor}});
  }
  j["temp_scale"] = scales;
  j["row_variation"] = {{"distribution", "log-uniform"},
                        {"min_factor", p.row_variation.min_factor},
                        {"max_factor", p.row_variation.max_factor},
                        {"seed", p.row_variation.seed}};
  j["cells_per_row"] = p.cells_per_row;
  j["press_cell_fraction"] = p.press_cell_fraction;
  j["hammer_cell_fraction"] = p.hammer_cell_fraction;
  j["max_threshold_mult"] = p.max_threshold_mult;
  j["overlap_rh"] = p.overlap_rh;
  j["overlap_ret"] = p.overlap_ret;
  j["press_direction_bias"] = p.press_direction_bias;
  j["hammer_direction_bias"] = p.hammer_direction_bias;
  j["retention_tail"] = {{"fraction", p.retention_tail.fraction},
                         {"min_retention_ns", p.retention_tail.min_retention.count()},
                         {"spread", p.retention_tail.spread}};
  // max_digits10 output keeps doubles bit-exact through a round trip.
  return j.dump(2);
}

DeviceProfile profile_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProfileError(std::string("profile is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProfileError("profile document must be a JSON object");
  if (!j.contains("schema")) throw ProfileError("profile is missing \"schema\"");
  if (j["schema"] != kSchema) {
    throw ProfileError("unsupported profile schema " + j["schema"].dump() + " (expected 1)");
  }

  DeviceProfile p;
  try {
    p.name = j.at("name").get<std::string>();
    get_opt(j, "description", p.description);
    p.base_threshold = j.at("base_threshold").get<double>();
    get_opt(j, "reference_temp_c", p.reference_temp_c);
    if (j.contains("t_ras_min_ns")) p.t_ras_min = Nanos{j["t_ras_min_ns"].get<std::int64_t>()};
    p.press_onset = p.t_ras_min;
    if (j.contains("press_onset_ns")) p.press_onset = Nanos{j["press_onset_ns"].get<std::int64_t>()};

    for (const auto& cj : j.at("curves")) {
      CurveKey key{parse_sidedness(cj.at("sidedness").get<std::string>()), cj.at("temp_c").get<int>()};
      std::vector<CurveAnchor> anchors;
      for (const auto& a : cj.at("anchors")) {
        if (!a.is_array() || a.size() != 2) throw ProfileError("anchor must be a [ns, acmin] pair");
        anchors.push_back({Nanos{a[0].get<std::int64_t>()}, a[1].get<double>()});
      }
      if (!p.curves.emplace(key, AcminCurve(std::move(anchors))).second) {
        throw ProfileError("duplicate curve for (" + std::string(to_string(key.sidedness)) + ", " +
                           std::to_string(key.temp_c) + " C)");
      }
    }
    if (j.contains("temp_scale")) {
      for (const auto& s : j["temp_scale"]) {
        p.temp_scale.push_back({s.at("from_c").get<int>(), s.at("to_c").get<int>(), s.at("factor").get<double>()});
      }
    }
    if (j.contains("row_variation")) {
      const auto& rv = j["row_variation"];
      if (rv.contains("distribution") && rv["distribution"] != "log-uniform") {
        throw ProfileError("row_variation.distribution must be \"log-uniform\"");
      }
      get_opt(rv, "min_factor", p.row_variation.min_factor);
      get_opt(rv, "max_factor", p.row_variation.max_factor);
      get_opt(rv, "seed", p.row_variation.seed);
    }
    get_opt(j, "cells_per_row", p.cells_per_row);
    get_opt(j, "press_cell_fraction", p.press_cell_fraction);
    get_opt(j, "hammer_cell_fraction", p.hammer_cell_fraction);
    get_opt(j, "max_threshold_mult", p.max_threshold_mult);
    get_opt(j, "overlap_rh", p.overlap_rh);
    get_opt(j, "overlap_ret", p.overlap_ret);
    get_opt(j, "press_direction_bias", p.press_direction_bias);
    get_opt(j, "hammer_direction_bias", p.hammer_direction_bias);
    if (j.contains("retention_tail")) {
      const auto& rt = j["retention_tail"];
      get_opt(rt, "fraction", p.retention_tail.fraction);
      if (rt.contains("min_retention_ns")) {
        p.retention_tail.min_retention = Nanos{rt["min_retention_ns"].get<std::int64_t>()};
      }
      get_opt(rt, "spread", p.retention_tail.spread);
    }
  } catch (const json::exception& e) {
    throw ProfileError(std::string("malformed profile: ") + e.what());
  }
  p.validate();
  return p;
}

DeviceProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProfileError("cannot open profile file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return profile_from_json(ss.str());
}

void save_profile(const DeviceProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ProfileError("cannot write profile file '" + path + "'");
  out << to_json(profile) << '\n';
  if (!out) throw ProfileError("write failed for '" + path + "'");
}

}  // namespace rowsim::device
