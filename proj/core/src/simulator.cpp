#include "rowsim/simulator.hpp"

namespace rowsim {

using dram::Command;
using dram::CommandKind;

Simulator::Simulator(const device::DeviceProfile& profile, dram::BankConfig bank_cfg,
                     std::optional<mitigation::MitigationConfig> mitigation)
    : bank_(profile, std::move(bank_cfg)) {
  if (mitigation) {
    mitigation::Context ctx;
    ctx.profile = &bank_.profile();
    ctx.temp_c = bank_.config().temp_c;
    ctx.rows = bank_.config().rows;
    ctx.blast_radius = bank_.config().blast_radius;
    ctx.timing = bank_.config().timing;
    mitigation_ = mitigation::make_mitigation(*mitigation, ctx);
  }
}

void Simulator::apply_refreshes(const mitigation::RefreshList& rows, Nanos at) {
  for (const auto r : rows) {
    bank_.apply({CommandKind::NeighborRefresh, r, at});
    ++result_.mitigation_refreshes;
    ++result_.refreshed_rows[r];
  }
}

void Simulator::precharge(Nanos at) {
  const RowIndex row = *bank_.open_row();
  const Nanos t_on = at - bank_.open_since();
  bank_.apply({CommandKind::Precharge, dram::kNoRow, at});
  if (mitigation_) apply_refreshes(mitigation_->on_precharge(row, t_on, at), at);
}

void Simulator::step(const Command& cmd) {
  ++result_.commands;
  switch (cmd.kind) {
    case CommandKind::Activate:
      if (bank_.open_row()) precharge(cmd.time);
      bank_.apply(cmd);
      ++result_.activations;
      if (mitigation_) apply_refreshes(mitigation_->on_activate(cmd.row, cmd.time), cmd.time);
      break;
    case CommandKind::Precharge:
      if (!bank_.open_row()) throw StateError("PRE with no open row");
      if (cmd.row != dram::kNoRow && cmd.row != *bank_.open_row()) bank_.apply(cmd);  // raises
      precharge(cmd.time);
      break;
    case CommandKind::AutoRefresh:
      if (bank_.open_row()) precharge(cmd.time);
      bank_.apply(cmd);
      if (mitigation_) apply_refreshes(mitigation_->on_auto_refresh(cmd.time), cmd.time);
      break;
    default:
      bank_.apply(cmd);
      break;
  }
  result_.flips = bank_.flip_count();
  result_.end_time = bank_.now();
}

SimulationResult Simulator::run(const dram::Trace& trace, bool stop_on_flip) {
  for (const auto& cmd : trace) {
    step(cmd);
    if (stop_on_flip && bank_.flip_count() > 0) {
      result_.stopped_early = true;
      break;
    }
  }
  return result_;
}

}  // namespace rowsim
