// rowsim: run experiments from spec files, inspect builtin profiles, replay traces.
#include <CLI11.hpp>

#include <iostream>

#include "app/runners.hpp"
#include "rowsim/simulator.hpp"
#include "rowsim/trace.hpp"

namespace {

using namespace rowsim;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

int cmd_run(const std::string& path, const app::RunOptions& opts) {
  const auto spec = app::load_spec(path);
  const auto dir = app::resolve_output_dir(spec);
  const auto out = app::run_experiment(spec, opts);
  app::write_outputs(out, dir);
  std::cout << "wrote " << out.files.size() + 2 << " files to " << dir.string() << '\n';
  return kOk;
}

int cmd_profiles_list() {
  for (const auto& p : device::builtin_profiles()) std::cout << p.name << "\t" << p.description << '\n';
  return kOk;
}

int cmd_profiles_show(const std::string& name) {
  std::cout << device::to_json(device::resolve_profile(name)) << '\n';
  return kOk;
}

struct ReplayArgs {
  std::string trace;
  std::string profile = "paper-mean-50C";
  int temp_c = 50;
  RowIndex rows = 65'536;
  std::uint64_t device_seed = 0;
  bool seeded = false;
};

int cmd_replay(const ReplayArgs& a, bool strict) {
  const auto trace = dram::load_trace(a.trace);
  dram::BankConfig cfg;
  cfg.rows = a.rows;
  cfg.temp_c = a.temp_c;
  cfg.strict_jedec = strict;
  if (a.seeded) cfg.device_seed = a.device_seed;
  Simulator sim(device::resolve_profile(a.profile), cfg);
  const auto r = sim.run(trace);
  nlohmann::json j{{"commands", r.commands},
                   {"activations", r.activations},
                   {"flips", r.flips},
                   {"end_time_ns", r.end_time.count()},
                   {"peak_disturbance_ratio", sim.bank().peak_disturbance_ratio()}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : sim.bank().snapshot_bitflips(cfg.pattern).rows) {
    rows.push_back({{"row", row.row}, {"flips", row.cells.size()}});
  }
  j["rows"] = rows;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DRAM read-disturbance simulator"};
  app.require_subcommand(1);
  app::RunOptions opts;
  app.add_option("--threads", opts.threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1U, 1024U));
  app.add_flag("--strict-jedec", opts.strict_jedec, "reject row-open times above the JEDEC limit");

  std::string spec_path;
  auto* run = app.add_subcommand("run", "run an experiment spec");
  run->add_option("spec", spec_path, "spec file (JSON)")->required();

  auto* profiles = app.add_subcommand("profiles", "builtin device profiles");
  profiles->require_subcommand(1);
  auto* list = profiles->add_subcommand("list", "list builtin profiles");
  std::string show_name;
  auto* show = profiles->add_subcommand("show", "print a profile as JSON");
  show->add_option("name", show_name, "builtin name or profile file")->required();

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "replay a command trace against one bank");
  replay->add_option("trace", ra.trace, "trace file")->required();
  replay->add_option("--profile", ra.profile, "builtin name or profile file");
  replay->add_option("--temp", ra.temp_c, "temperature in C");
  replay->add_option("--rows", ra.rows, "rows in the bank")->check(CLI::PositiveNumber);
  replay->add_option("--device-seed", ra.device_seed, "per-cell layout seed")->each([&](const std::string&) {
    ra.seeded = true;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(spec_path, opts);
    if (*list) return cmd_profiles_list();
    if (*show) return cmd_profiles_show(show_name);
    if (*replay) return cmd_replay(ra, opts.strict_jedec);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ProfileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kInvalid;
}
