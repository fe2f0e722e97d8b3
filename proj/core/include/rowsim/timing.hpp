#pragma once

#include <cstdint>

#include "rowsim/types.hpp"

namespace rowsim::dram {

/// DDR4-style timing constants used by the bank model and the controller front-end.
struct TimingParams {
  Nanos t_ras_min{36};
  Nanos t_refi{7'800};
  Nanos t_ron_max_jedec{70'200};
  Nanos t_refw{64'000'000};
  std::uint32_t ref_groups = 8192;
  /// Gap between a precharge and the next activation of a closed row.
  Nanos t_rc{15};
  /// Activation to first read of the opened row.
  Nanos t_rcd{14};
  /// Spacing between consecutive cache-block reads (the data path serves one at a time).
  Nanos t_read{50};
  /// Duration of one AutoRefresh; the bank accepts no other command meanwhile.
  Nanos t_rfc{350};

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  /// Activations of tON `t_on` (each followed by t_rc) that fit strictly inside one refresh window.
  std::uint64_t max_activations_in_window(Nanos t_on) const;
};

}  // namespace rowsim::dram
