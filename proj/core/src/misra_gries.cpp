#include "rowsim/misra_gries.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace rowsim::mitigation {

MisraGries::MisraGries(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("Misra-Gries table needs at least one counter");
  counts_.reserve(capacity + 1);
}

double MisraGries::add(RowIndex key, double w) {
  if (!(w > 0.0)) throw ConfigError("Misra-Gries increment must be positive, got " + std::to_string(w));
  total_ += w;
  if (auto it = counts_.find(key); it != counts_.end()) return it->second += w;
  if (counts_.size() < capacity_) return counts_[key] = w;

  // Table full: decrement everyone (the newcomer included) by the smallest amount that either
  // frees a slot or absorbs the newcomer entirely.
  double m = w;
  for (const auto& [k, c] : counts_) m = std::min(m, c);
  for (auto it = counts_.begin(); it != counts_.end();) {
    it->second -= m;
    if (it->second <= 0.0) {
      it = counts_.erase(it);
    } else {
      ++it;
    }
  }
  const double rest = w - m;
  if (rest > 0.0 && counts_.size() < capacity_) return counts_[key] = rest;
  return 0.0;
}

double MisraGries::estimate(RowIndex key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0.0 : it->second;
}

void MisraGries::clear() {
  counts_.clear();
  total_ = 0.0;
}

std::vector<std::pair<RowIndex, double>> MisraGries::entries() const {
  std::vector<std::pair<RowIndex, double>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rowsim::mitigation
