#pragma once

#include <optional>
#include <vector>

#include "rowsim/bank.hpp"
#include "rowsim/controller.hpp"

namespace rowsim::tracegen {

/// ACT/PRE pairs with exactly `t_on` dwell and t_rc between a PRE and the next ACT. Double-sided
/// alternates the two aggressors, which must sandwich one victim. `count` is the total number of
/// activations; nullopt fills the refresh window.
dram::Trace gen_hammer(const std::vector<RowIndex>& aggressors, Sidedness sidedness,
                       std::optional<std::uint64_t> count, Nanos t_on = Nanos{36},
                       const dram::TimingParams& timing = {}, Nanos start = Nanos{0});

struct SweepSpec {
  std::vector<Nanos> t_on_values;
  Sidedness sidedness = Sidedness::Single;
  /// Activations per trace; nullopt fills the refresh window.
  std::optional<std::uint64_t> activation_budget;
  dram::DataPattern data_pattern = dram::DataPattern::Checkerboard;

  void validate(const dram::TimingParams& timing) const;
};

/// One hammer trace per t_on value, each ending strictly inside t_refw.
std::vector<dram::Trace> gen_rowpress_sweep(const SweepSpec& spec, const std::vector<RowIndex>& aggressors,
                                            const dram::TimingParams& timing = {});

/// Logical-to-physical row mapping. Xor flips the low bits selected by `mask` (< 8) whenever
/// bit 3 of the row index is set, which is its own inverse.
struct RowMapping {
  enum class Kind : std::uint8_t { Identity, Xor };
  Kind kind = Kind::Identity;
  RowIndex mask = 0b110;

  RowIndex to_physical(RowIndex logical) const;
  RowIndex to_logical(RowIndex physical) const { return to_physical(physical); }
};

enum class PocOrder : std::uint8_t { FlushAfterAll, FlushEachAccess };

std::string_view to_string(PocOrder o);
PocOrder parse_poc_order(std::string_view text);

struct PocParams {
  std::uint32_t num_reads = 1;
  std::uint32_t num_aggr_acts = 3;
  /// 900 iterations of 9 x tREFI fill one refresh window.
  std::uint32_t num_iter = 900;
  PocOrder order = PocOrder::FlushAfterAll;
  std::uint32_t dummy_rows = 8;
  /// Logical victim rows.
  std::vector<RowIndex> victim_rows;
  /// Extra dwell per read when each access is immediately followed by its flush.
  Nanos flush_overhead{150};
  /// Each iteration starts right after a REF whose index is a multiple of this.
  std::uint32_t sync_period = 9;

  void validate() const;
};

struct PocTrace {
  RowIndex victim = 0;  // physical
  std::vector<RowIndex> aggressors;
  std::vector<RowIndex> dummies;
  dram::Trace trace;
};

/// Physical rows adjacent to the victim's physical row, as logical rows. Throws ConfigError at
/// the bank edges.
std::pair<RowIndex, RowIndex> find_aggressor_rows(RowIndex victim_logical, const RowMapping& mapping,
                                                  RowIndex bank_rows);

/// One trace per victim, produced by running the demonstration access loop through the
/// controller front-end (uncapped). Rows in the traces are physical.
std::vector<PocTrace> gen_poc(const PocParams& params, const RowMapping& mapping, RowIndex bank_rows,
                              const dram::TimingParams& timing = {});

struct Request {
  RowIndex row = 0;
  Nanos arrival{0};

  bool operator==(const Request&) const = default;
};

/// Poisson arrivals at `request_rate` (requests per ns) over `duration`. Each request repeats the
/// previous row with probability `locality`, else picks a uniformly random row.
std::vector<Request> gen_random_requests(RowIndex row_count, double request_rate, Nanos duration,
                                         double locality, std::uint64_t seed);

/// Serves requests in order; returns the issued command trace.
dram::Trace serve(const std::vector<Request>& requests, const ControllerConfig& cfg);

/// gen_random_requests() served by an uncapped controller.
dram::Trace gen_random_traffic(RowIndex row_count, double request_rate, Nanos duration, double locality,
                               std::uint64_t seed, const dram::TimingParams& timing = {});

}  // namespace rowsim::tracegen
