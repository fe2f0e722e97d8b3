#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "rowsim/types.hpp"

namespace rowsim::dram {

enum class CommandKind : std::uint8_t { Activate, Precharge, Read, Write, AutoRefresh, NeighborRefresh };

/// Row field of commands that carry no row (REF, or PRE of whatever row is open).
inline constexpr RowIndex kNoRow = std::numeric_limits<RowIndex>::max();

struct Command {
  CommandKind kind = CommandKind::Activate;
  RowIndex row = kNoRow;
  Nanos time{0};

  bool operator==(const Command&) const = default;
};

using Trace = std::vector<Command>;

/// Trace-file keyword: ACT, PRE, RD, WR, REF, NREF.
std::string_view keyword(CommandKind kind);
CommandKind parse_keyword(std::string_view word);

/// True for kinds that must name a row (ACT, RD, WR, NREF).
constexpr bool needs_row(CommandKind k) {
  return k == CommandKind::Activate || k == CommandKind::Read || k == CommandKind::Write ||
         k == CommandKind::NeighborRefresh;
}

}  // namespace rowsim::dram
