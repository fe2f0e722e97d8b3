#pragma once

#include <map>
#include <memory>

#include "rowsim/bank.hpp"
#include "rowsim/mitigation.hpp"

namespace rowsim {

struct SimulationResult {
  std::uint64_t commands = 0;
  std::uint64_t activations = 0;
  std::uint64_t flips = 0;
  std::uint64_t mitigation_refreshes = 0;
  /// Rows refreshed by the mitigation, with counts.
  std::map<RowIndex, std::uint64_t> refreshed_rows;
  Nanos end_time{0};
  bool stopped_early = false;
};

/// A bank with an optional mitigation observing its command stream.
class Simulator {
 public:
  Simulator(const device::DeviceProfile& profile, dram::BankConfig bank_cfg,
            std::optional<mitigation::MitigationConfig> mitigation = std::nullopt);
  // The mitigation keeps a pointer to the bank's profile.
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Feeds one command: implied precharge first when an ACT or REF finds a row open, then the
  /// mitigation hooks, then any refreshes the mitigation asks for (as NREF at the same time).
  void step(const dram::Command& cmd);

  /// Replays a whole trace; with stop_on_flip set, stops after the first command that flips a bit.
  SimulationResult run(const dram::Trace& trace, bool stop_on_flip = false);

  dram::Bank& bank() { return bank_; }
  const dram::Bank& bank() const { return bank_; }
  mitigation::Mitigation* mitigation() { return mitigation_.get(); }
  const SimulationResult& result() const { return result_; }

 private:
  void apply_refreshes(const mitigation::RefreshList& rows, Nanos at);
  void precharge(Nanos at);

  dram::Bank bank_;
  std::unique_ptr<mitigation::Mitigation> mitigation_;
  SimulationResult result_;
};

}  // namespace rowsim
