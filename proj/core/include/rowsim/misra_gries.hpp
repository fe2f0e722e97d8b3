#pragma once

#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rowsim/types.hpp"

namespace rowsim::mitigation {

/// Weighted Misra-Gries summary over row indices.
///
/// Estimates never exceed the true weight of a key, and undershoot it by at most
/// total_weight() / (capacity() + 1). Removing keys (erase) never weakens that bound.
class MisraGries {
 public:
  explicit MisraGries(std::size_t capacity);

  /// Adds `w` > 0 to `key` and returns the key's estimate afterwards (0 when not tracked).
  double add(RowIndex key, double w);
  double estimate(RowIndex key) const;
  void erase(RowIndex key) { counts_.erase(key); }
  void clear();

  std::size_t size() const { return counts_.size(); }
  std::size_t capacity() const { return capacity_; }
  double total_weight() const { return total_; }
  /// Tracked (key, estimate) pairs sorted by key.
  std::vector<std::pair<RowIndex, double>> entries() const;

 private:
  std::size_t capacity_;
  double total_ = 0.0;
  std::unordered_map<RowIndex, double> counts_;
};

}  // namespace rowsim::mitigation
