#pragma once

#include <cstdint>
#include <vector>

#include "rowsim/profile.hpp"

namespace rowsim::device {

enum class VulnClass : std::uint8_t { None, HammerOnly, PressOnly, Both, Retention };

std::string_view to_string(VulnClass c);

inline constexpr Nanos kNoRetentionFailure = Nanos::max();

struct CellVuln {
  std::uint32_t cell = 0;
  VulnClass vuln_class = VulnClass::None;
  /// Multiplier over the row threshold; >= 1.
  double threshold_mult = 1.0;
  FlipDirection direction = FlipDirection::OneToZero;
  Nanos retention_time = kNoRetentionFailure;

  bool admits(Mechanism m) const {
    switch (m) {
      case Mechanism::Hammer: return vuln_class == VulnClass::HammerOnly || vuln_class == VulnClass::Both;
      case Mechanism::Press: return vuln_class == VulnClass::PressOnly || vuln_class == VulnClass::Both;
      case Mechanism::Retention: return retention_time != kNoRetentionFailure;
    }
    return false;
  }

  bool operator==(const CellVuln&) const = default;
};

/// Vulnerable cells of one row (class != None), ordered by cell index.
struct RowVulnerability {
  double row_factor = 1.0;
  std::vector<CellVuln> cells;

  bool operator==(const RowVulnerability&) const = default;
};

/// Deterministic in (profile, row, cells_per_row, seed) and independent of every other row, so
/// rows can be built lazily in any order.
///
/// Each row gets one adjacent PressOnly pair and one adjacent HammerOnly pair at multiplier 1
/// (when the corresponding fraction is non-zero). Under an alternating data pattern one cell of
/// each pair holds the bit its direction needs, so the row's weakest cell sits exactly at the
/// row threshold for both mechanisms.
RowVulnerability materialize_row(const DeviceProfile& profile, RowIndex row,
                                 std::uint32_t cells_per_row, std::uint64_t seed);

std::vector<RowVulnerability> materialize_rows(const DeviceProfile& profile, RowIndex row_count,
                                               std::uint32_t cells_per_row, std::uint64_t seed);

}  // namespace rowsim::device
