#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rowsim/adaptation.hpp"
#include "rowsim/adversary.hpp"
#include "rowsim/bank.hpp"
#include "rowsim/tracegen.hpp"

namespace rowsim::app {

inline constexpr int kSpecSchema = 1;

enum class Kind : std::uint8_t { Sweep, Poc, MitigationEval, Overhead, Overlap, Crossover };

std::string_view to_string(Kind k);
Kind parse_kind(std::string_view text);

struct SweepSection {
  std::vector<Nanos> t_on;
  Sidedness sidedness = Sidedness::Single;
  std::uint32_t rows = 64;
  std::vector<RowIndex> victims;
  RowIndex bank_rows = 65'536;
  dram::DataPattern pattern = dram::DataPattern::Checkerboard;
};

struct PocSection {
  std::vector<std::uint32_t> num_reads{1, 32};
  std::vector<tracegen::PocOrder> orders{tracegen::PocOrder::FlushAfterAll, tracegen::PocOrder::FlushEachAccess};
  std::uint32_t num_aggr_acts = 3;
  std::uint32_t num_iter = 900;
  std::uint32_t dummy_rows = 8;
  std::uint32_t sync_period = 9;
  Nanos flush_overhead{150};
  std::vector<RowIndex> victim_rows;
  tracegen::RowMapping mapping;
  RowIndex bank_rows = 65'536;
};

struct MitigationEvalSection {
  RowIndex bank_rows = 16;
  /// Rescales the profile so ACmin at tRAS equals this (small values keep the suite cheap).
  std::optional<double> base_threshold;
  /// Pins every row's factor (zero row variation).
  std::optional<double> row_factor;
  std::vector<Nanos> suite_t_on{Nanos{36}, Nanos{500}, Nanos{2'000}, Nanos{7'800}};
  std::uint32_t window_rows = 5;
  std::uint32_t max_cycle = 3;
  std::uint64_t activations = 400;
  std::uint64_t para_trials = 100'000;
  double para_bound = 0.01;
  bool overhead = true;
};

struct OverheadSection {
  RowIndex rows = 1'024;
  double request_rate_per_ns = 1.0 / 30.0;
  Nanos duration{20'000'000};
  double locality = 0.9;
  std::vector<Nanos> t_on_caps{Nanos{100}, Nanos{500}, Nanos{2'000}, Nanos{7'800}, Nanos{70'200}};
};

struct OverlapSection {
  RowIndex rows = 2'048;
  Nanos hammer_t_on{36};
  Nanos press_t_on{7'800};
  Nanos retention_wait{4'000'000'000};
  dram::DataPattern pattern = dram::DataPattern::Checkerboard;
};

struct CrossoverSection {
  Nanos t_on_min{36};
  Nanos t_on_max{30'000'000};
  std::vector<Nanos> table_t_on;
};

/// Declarative description of one run. Every field has been range-checked after parse_spec().
struct ExperimentSpec {
  Kind kind = Kind::Sweep;
  std::string profile;
  int temp_c = 50;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  std::optional<mitigation::MitigationConfig> mitigation;
  std::optional<mitigation::AdaptationConfig> adaptation;
  dram::TimingParams timing;

  SweepSection sweep;
  PocSection poc;
  MitigationEvalSection mitigation_eval;
  OverheadSection overhead;
  OverlapSection overlap;
  CrossoverSection crossover;
};

/// Throws ConfigError naming the offending field (e.g. "seeds: must not be empty").
ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec load_spec(const std::string& path);

/// Fully resolved spec, defaults included; parse_spec(to_json(s)) reproduces s.
nlohmann::json to_json(const ExperimentSpec& s);
nlohmann::json to_json(const mitigation::MitigationConfig& m);

}  // namespace rowsim::app
