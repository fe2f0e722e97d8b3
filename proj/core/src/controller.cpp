#include "rowsim/controller.hpp"

#include <algorithm>

namespace rowsim::tracegen {

using dram::CommandKind;

Controller::Controller(ControllerConfig cfg) : cfg_(cfg), next_ref_due_(cfg.timing.t_refi) {
  cfg_.timing.validate();
  if (cfg_.t_on_cap && (*cfg_.t_on_cap < cfg_.timing.t_ras_min)) {
    throw ConfigError("t_on_cap must be >= t_ras_min");
  }
}

void Controller::emit(CommandKind kind, RowIndex row, Nanos at) {
  trace_.push_back({kind, row, at});
}

void Controller::count_due(Nanos until) {
  if (!cfg_.refresh) return;
  while (next_ref_due_ <= until) {
    ++pending_;
    next_ref_due_ += cfg_.timing.t_refi;
  }
}

void Controller::issue_ref(Nanos at) {
  emit(CommandKind::AutoRefresh, dram::kNoRow, at);
  busy_ = at + cfg_.timing.t_rfc;
  ++refs_;
}

void Controller::precharge(Nanos not_before) {
  if (!open_) return;
  const Nanos t = std::max({not_before, busy_, act_time_ + cfg_.timing.t_ras_min});
  emit(CommandKind::Precharge, *open_, t);
  open_.reset();
  busy_ = t + cfg_.timing.t_rc;
  count_due(t);
  for (; pending_ > 0; --pending_) issue_ref(busy_);
}

void Controller::catch_up_closed(Nanos until) {
  if (!cfg_.refresh) return;
  // A closed bank refreshes on schedule (or as soon as it is free).
  while (next_ref_due_ <= std::max(until, busy_)) {
    issue_ref(std::max(next_ref_due_, busy_));
    next_ref_due_ += cfg_.timing.t_refi;
  }
}

Nanos Controller::read(RowIndex row, Nanos arrival) {
  if (arrival < Nanos{0}) throw ConfigError("request arrival time must be non-negative");
  if (open_) {
    const auto cap_end = cfg_.t_on_cap ? std::optional<Nanos>(act_time_ + *cfg_.t_on_cap) : std::nullopt;
    if (*open_ == row) {
      const Nanos t = std::max(arrival, last_read_ + cfg_.timing.t_read);
      if (cap_end && t > *cap_end) {
        precharge(*cap_end);
      } else {
        count_due(t);
        if (pending_ > cfg_.max_postponed) {
          precharge(t);
        } else {
          emit(CommandKind::Read, row, t);
          last_read_ = busy_ = t;
          return t;
        }
      }
    } else {
      precharge(cap_end ? std::min(arrival, *cap_end) : arrival);
    }
  }
  catch_up_closed(arrival);
  const Nanos t = std::max(arrival, busy_);
  emit(CommandKind::Activate, row, t);
  const Nanos rd = std::max(t + cfg_.timing.t_rcd, served_ ? last_read_ + cfg_.timing.t_read : Nanos{0});
  emit(CommandKind::Read, row, rd);
  open_ = row;
  act_time_ = t;
  last_read_ = busy_ = rd;
  served_ = true;
  return rd;
}

void Controller::close(Nanos not_before) {
  if (open_) {
    const Nanos t = cfg_.t_on_cap ? std::min(not_before, act_time_ + *cfg_.t_on_cap) : not_before;
    precharge(t);
  }
}

std::uint64_t Controller::sync_to_refresh(std::uint32_t period) {
  if (!cfg_.refresh) throw ConfigError("cannot synchronize to refresh with refresh disabled");
  if (period == 0) throw ConfigError("refresh period must be >= 1");
  const std::size_t mark = trace_.size();
  close(busy_);
  // The close may already have flushed a matching REF.
  if (trace_.size() > mark && trace_.back().kind == CommandKind::AutoRefresh && refs_ % period == 0) return refs_;
  do {
    issue_ref(std::max(next_ref_due_, busy_));
    next_ref_due_ += cfg_.timing.t_refi;
  } while (refs_ % period != 0);
  return refs_;
}

dram::Trace Controller::finish() {
  close(busy_);
  return std::move(trace_);
}

}  // namespace rowsim::tracegen
