#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "app/runners.hpp"
#include "app/spec.hpp"

using namespace rowsim;
using namespace rowsim::app;
using nlohmann::json;

namespace {

json sweep_json() {
  return json::parse(R"({
    "schema": 1, "kind": "sweep", "profile": "paper-mean-80C", "temperature_c": 80,
    "seeds": [1, 2], "output_dir": "out/x",
    "sweep": {"t_on_ns": [36, 7800], "rows": 4, "bank_rows": 1024}
  })");
}

std::string error_of(const json& j) {
  try {
    parse_spec(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Spec, ErrorsNameTheField) {
  auto j = sweep_json();
  j["seeds"] = json::array();
  EXPECT_EQ(error_of(j), "seeds: must not be empty");

  j = sweep_json();
  j.erase("profile");
  EXPECT_EQ(error_of(j).rfind("profile:", 0), 0U);

  j = sweep_json();
  j["sweep"]["t_on_ns"] = {7800, 36};
  EXPECT_EQ(error_of(j).rfind("sweep.t_on_ns:", 0), 0U);

  j = sweep_json();
  j["sweep"]["colour"] = "red";
  EXPECT_NE(error_of(j).find("sweep.colour"), std::string::npos);

  j = sweep_json();
  j["kind"] = "teleport";
  EXPECT_EQ(error_of(j).rfind("kind:", 0), 0U);

  j = sweep_json();
  j["schema"] = 2;
  EXPECT_EQ(error_of(j).rfind("schema:", 0), 0U);

  j = sweep_json();
  j["mitigation"] = {{"kind", "para"}, {"probability", 0.01}};
  EXPECT_EQ(error_of(j).rfind("mitigation", 0), 0U) << error_of(j);

  EXPECT_THROW(load_spec("/nonexistent/spec.json"), ConfigError);
}

TEST(Spec, ShippedConfigsRoundTrip) {
  for (const auto& entry : std::filesystem::directory_iterator(ROWSIM_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto s = load_spec(entry.path().string());
    const auto j = to_json(s);
    EXPECT_EQ(to_json(parse_spec(j)), j) << entry.path();
  }
}

TEST(App, SmallSweepIsIndependentOfThreadCount) {
  const auto spec = parse_spec(sweep_json());
  const auto one = run_experiment(spec, {1, false});
  const auto four = run_experiment(spec, {4, false});
  ASSERT_EQ(one.files.size(), four.files.size());
  for (std::size_t i = 0; i < one.files.size(); ++i) {
    EXPECT_EQ(one.files[i].name, four.files[i].name);
    EXPECT_EQ(one.files[i].content, four.files[i].content) << one.files[i].name;
  }
  EXPECT_EQ(one.summary, four.summary);
  ASSERT_NE(one.file("results.csv"), nullptr);
  ASSERT_NE(one.file("summary.csv"), nullptr);
  EXPECT_EQ(one.file("nope.csv"), nullptr);
  EXPECT_EQ(one.metadata["spec"], to_json(spec));
}

TEST(App, CrossoverRunReportsOneCrossing) {
  auto j = json::parse(R"({"schema": 1, "kind": "crossover", "profile": "crossover", "temperature_c": 50,
                           "seeds": [1], "output_dir": "out/c"})");
  const auto out = run_experiment(parse_spec(j));
  ASSERT_EQ(out.summary["crossovers_ns"].size(), 1U);
  EXPECT_LT(out.summary["gap_at_min"].get<double>(), 0.0);
  EXPECT_GT(out.summary["gap_at_max"].get<double>(), 0.0);
}

TEST(App, WriteOutputsHonoursEnvironmentOverride) {
  const auto spec = parse_spec(json::parse(R"({"schema": 1, "kind": "crossover", "profile": "crossover",
                                               "temperature_c": 50, "seeds": [1], "output_dir": "out/c"})"));
  EXPECT_EQ(resolve_output_dir(spec), std::filesystem::path("out/c"));
  const auto dir = std::filesystem::temp_directory_path() / "rowsim_app_test";
  std::filesystem::remove_all(dir);
  ::setenv("ROWSIM_OUT", dir.c_str(), 1);
  EXPECT_EQ(resolve_output_dir(spec), dir);
  ::unsetenv("ROWSIM_OUT");

  const auto out = run_experiment(spec);
  write_outputs(out, dir);
  for (const auto& f : out.files) {
    std::ifstream in(dir / f.name);
    const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(body, f.content) << f.name;
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "metadata.json"));
  std::ifstream in(dir / "summary.json");
  EXPECT_EQ(json::parse(in), out.summary);
  std::filesystem::remove_all(dir);
}
