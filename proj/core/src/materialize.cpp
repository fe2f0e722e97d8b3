#include "rowsim/materialize.hpp"

#include <cmath>

#include "rowsim/rng.hpp"

namespace rowsim::device {

std::string_view to_string(VulnClass c) {
  switch (c) {
    case VulnClass::None: return "none";
    case VulnClass::HammerOnly: return "hammer";
    case VulnClass::PressOnly: return "press";
    case VulnClass::Both: return "both";
    case VulnClass::Retention: return "retention";
  }
  return "unknown";
}

namespace {

class RowRng {
 public:
  RowRng(std::uint64_t seed, RowIndex row) : eng_(seeded_engine(seed, row)) {}
  double unit() { return to_unit(eng_()); }
  bool chance(double p) { return unit() < p; }
  /// lo * (hi/lo)^u; exactly lo when the bounds coincide.
  double log_uniform(double lo, double hi) {
    const double u = unit();
    if (lo == hi) return lo;
    return lo * std::pow(hi / lo, u);
  }
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(unit() * n); }

 private:
  std::mt19937_64 eng_;
};

Nanos draw_retention(RowRng& rng, const RetentionTail& tail) {
  const double ns = rng.log_uniform(static_cast<double>(tail.min_retention.count()),
                                    static_cast<double>(tail.min_retention.count()) * tail.spread);
  return Nanos{static_cast<Nanos::rep>(ns)};
}

}  // namespace

RowVulnerability materialize_row(const DeviceProfile& p, RowIndex row, std::uint32_t cells_per_row,
                                 std::uint64_t seed) {
  if (cells_per_row == 0) throw ProfileError("cells_per_row must be >= 1");
  if (p.row_variation.min_factor > p.row_variation.max_factor || !(p.row_variation.min_factor > 0.0)) {
    throw ProfileError("row variation bounds are degenerate (need 0 < min_factor <= max_factor)");
  }

  RowRng rng(seed, row);
  RowVulnerability out;
  out.row_factor = rng.log_uniform(p.row_variation.min_factor, p.row_variation.max_factor);

  std::vector<CellVuln> dense(cells_per_row);
  const double press_cut = p.press_cell_fraction;
  const double hammer_cut = press_cut + p.hammer_cell_fraction;
  const double ret_cut = hammer_cut + p.retention_tail.fraction;
  for (std::uint32_t i = 0; i < cells_per_row; ++i) {
    CellVuln& c = dense[i];
    c.cell = i;
    const double u = rng.unit();
    if (u < press_cut) {
      const bool both = rng.chance(p.overlap_rh);
      c.vuln_class = both ? VulnClass::Both : VulnClass::PressOnly;
      c.threshold_mult = rng.log_uniform(1.0, p.max_threshold_mult);
      c.direction = (both || rng.chance(p.press_direction_bias)) ? FlipDirection::OneToZero
                                                                  : FlipDirection::ZeroToOne;
      if (rng.chance(p.overlap_ret)) c.retention_time = draw_retention(rng, p.retention_tail);
    } else if (u < hammer_cut) {
      c.vuln_class = VulnClass::HammerOnly;
      c.threshold_mult = rng.log_uniform(1.0, p.max_threshold_mult);
      c.direction = rng.chance(p.hammer_direction_bias) ? FlipDirection::ZeroToOne : FlipDirection::OneToZero;
    } else if (u < ret_cut) {
      c.vuln_class = VulnClass::Retention;
      c.direction = FlipDirection::OneToZero;
      c.retention_time = draw_retention(rng, p.retention_tail);
    }
  }

  auto force_pair = [&](std::uint32_t at, VulnClass cls, FlipDirection dir) {
    for (std::uint32_t i = at; i < at + 2; ++i) {
      dense[i] = CellVuln{i, cls, 1.0, dir, kNoRetentionFailure};
    }
  };
  if (cells_per_row >= 5) {
    const std::uint32_t press_at = rng.below(cells_per_row - 1);
    std::uint32_t hammer_at = rng.below(cells_per_row - 1);
    while (hammer_at + 1 >= press_at && hammer_at <= press_at + 1) hammer_at = rng.below(cells_per_row - 1);
    if (p.press_cell_fraction > 0.0) force_pair(press_at, VulnClass::PressOnly, FlipDirection::OneToZero);
    if (p.hammer_cell_fraction > 0.0) force_pair(hammer_at, VulnClass::HammerOnly, FlipDirection::ZeroToOne);
  }

  for (const auto& c : dense) {
    if (c.vuln_class != VulnClass::None) out.cells.push_back(c);
  }
  return out;
}

std::vector<RowVulnerability> materialize_rows(const DeviceProfile& profile, RowIndex row_count,
                                               std::uint32_t cells_per_row, std::uint64_t seed) {
  if (row_count == 0) throw ProfileError("row_count must be >= 1");
  std::vector<RowVulnerability> rows;
  rows.reserve(row_count);
  for (RowIndex r = 0; r < row_count; ++r) rows.push_back(materialize_row(profile, r, cells_per_row, seed));
  return rows;
}

}  // namespace rowsim::device
