#pragma once

#include <optional>

#include "rowsim/command.hpp"
#include "rowsim/timing.hpp"

namespace rowsim::tracegen {

struct ControllerConfig {
  dram::TimingParams timing;
  /// Force a precharge once a row has been open this long (re-activating if more hits follow).
  std::optional<Nanos> t_on_cap;
  /// Issue a REF every t_refi.
  bool refresh = true;
  /// REFs that may be postponed while the open row keeps getting hits (DDR4 allows 8).
  std::uint32_t max_postponed = 8;
};

/// Minimal open-page memory-controller front-end for one bank.
///
/// Requests are served in order. Reads are spaced t_read apart, across activations too; a
/// different row costs a precharge (not before ACT + tRAS), an activation t_rc later and t_rcd
/// before its first read. REFs come due every t_refi;
/// while a row is open they are postponed up to max_postponed and issued right after the next
/// precharge.
class Controller {
 public:
  explicit Controller(ControllerConfig cfg);

  /// Serves a read of `row` that arrives at `arrival`; returns the time the RD is issued.
  Nanos read(RowIndex row, Nanos arrival);

  /// Closes the open row (if any) no earlier than `not_before`.
  void close(Nanos not_before);

  /// Closes the open row and waits until the next REF whose 1-based index is a multiple of
  /// `period` has been issued. Returns that REF's index.
  std::uint64_t sync_to_refresh(std::uint32_t period);

  /// Closes the open row and hands over the trace.
  dram::Trace finish();

  /// Earliest time the bank accepts the next command.
  Nanos ready_at() const { return busy_; }
  std::optional<RowIndex> open_row() const { return open_; }
  std::uint64_t refreshes() const { return refs_; }
  const dram::Trace& trace() const { return trace_; }
  const ControllerConfig& config() const { return cfg_; }

 private:
  void emit(dram::CommandKind kind, RowIndex row, Nanos at);
  void precharge(Nanos not_before);
  void issue_ref(Nanos at);
  void catch_up_closed(Nanos until);
  void count_due(Nanos until);

  ControllerConfig cfg_;
  dram::Trace trace_;
  std::optional<RowIndex> open_;
  Nanos act_time_{0};
  Nanos last_read_{0};
  bool served_ = false;
  Nanos busy_{0};
  Nanos next_ref_due_;
  std::uint32_t pending_ = 0;
  std::uint64_t refs_ = 0;
};

}  // namespace rowsim::tracegen
