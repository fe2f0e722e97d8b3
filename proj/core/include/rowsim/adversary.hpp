#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rowsim/command.hpp"
#include "rowsim/timing.hpp"

namespace rowsim::tracegen {

/// Bounded attack-pattern family for small banks.
///
/// The exhaustive part enumerates every cyclic access pattern of length 1..max_cycle over a
/// window of `window_rows` consecutive rows, each element carrying one of `t_on_values`, placed
/// at the low edge, the middle and the high edge of the bank, each repeated for `activations`
/// activations. Every tON is capped at t_on_cap.
struct AdversaryConfig {
  RowIndex rows = 16;
  std::vector<Nanos> t_on_values{Nanos{36}, Nanos{500}, Nanos{2'000}, Nanos{7'800}};
  std::uint32_t window_rows = 5;
  std::uint32_t max_cycle = 3;
  std::uint64_t activations = 400;
  Nanos t_on_cap{7'800};
  dram::TimingParams timing;

  void validate() const;
};

struct NamedTrace {
  std::string name;
  dram::Trace trace;
};

using CycleStep = std::pair<RowIndex, Nanos>;

/// Repeats `cycle` (row, tON) until `activations` ACT/PRE pairs have been emitted.
dram::Trace cycle_trace(const std::vector<CycleStep>& cycle, std::uint64_t activations,
                        const dram::TimingParams& timing);

/// Number of traces for_each_exhaustive_trace() visits.
std::uint64_t exhaustive_suite_size(const AdversaryConfig& cfg);

/// Visits the exhaustive family one trace at a time.
void for_each_exhaustive_trace(const AdversaryConfig& cfg, const std::function<void(const NamedTrace&)>& fn);

/// Worst cases outside the cyclic family: window-filling double/single-sided attacks at the cap,
/// hammer/press hand-offs, many-sided rotation, decoy floods, and a capped request stream that
/// would otherwise hold a row open for 70 us.
std::vector<NamedTrace> handcrafted_attacks(const AdversaryConfig& cfg);

}  // namespace rowsim::tracegen
