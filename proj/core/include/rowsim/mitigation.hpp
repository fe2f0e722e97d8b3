#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "rowsim/misra_gries.hpp"
#include "rowsim/profile.hpp"
#include "rowsim/timing.hpp"

namespace rowsim::mitigation {

struct ParaConfig {
  /// Probability that a precharge refreshes one neighbor of the closed row.
  double p = 0.001;
  std::uint64_t rng_seed = 1;

  void validate() const;
  bool operator==(const ParaConfig&) const = default;
};

struct GrapheneConfig {
  std::size_t table_size = 64;
  /// Estimated (weighted) activation count that triggers a neighbor refresh.
  double threshold = 1'000.0;
  /// Increment by weight(tON) instead of 1.
  bool weighted_increments = true;

  void validate() const;
  bool operator==(const GrapheneConfig&) const = default;
};

struct TrrConfig {
  double sample_rate = 1.0;
  std::size_t table_size = 4;
  std::uint64_t rng_seed = 1;
  /// Only every ref_period-th REF performs a targeted refresh (1 = every REF).
  std::uint32_t ref_period = 1;

  void validate() const;
  bool operator==(const TrrConfig&) const = default;
};

using MitigationConfig = std::variant<ParaConfig, GrapheneConfig, TrrConfig>;

std::string_view kind_name(const MitigationConfig& cfg);

/// Bank geometry and device context a mitigation needs to pick victims and weigh activations.
struct Context {
  const device::DeviceProfile* profile = nullptr;
  int temp_c = 50;
  RowIndex rows = 65'536;
  std::uint32_t blast_radius = 1;
  dram::TimingParams timing;

  /// Rows within blast_radius of `row`, nearest first, inside the bank.
  std::vector<RowIndex> neighbors(RowIndex row) const;
};

using RefreshList = std::vector<RowIndex>;

/// Observer of the command stream. Each hook returns the rows to refresh right away.
class Mitigation {
 public:
  virtual ~Mitigation() = default;
  virtual std::string_view name() const = 0;
  virtual RefreshList on_activate(RowIndex /*row*/, Nanos /*at*/) { return {}; }
  virtual RefreshList on_precharge(RowIndex /*row*/, Nanos /*t_on*/, Nanos /*at*/) { return {}; }
  virtual RefreshList on_auto_refresh(Nanos /*at*/) { return {}; }
};

class Para final : public Mitigation {
 public:
  Para(ParaConfig cfg, Context ctx);
  std::string_view name() const override { return "para"; }
  RefreshList on_precharge(RowIndex row, Nanos t_on, Nanos at) override;

 private:
  ParaConfig cfg_;
  Context ctx_;
  std::uint64_t event_ = 0;
};

class Graphene final : public Mitigation {
 public:
  Graphene(GrapheneConfig cfg, Context ctx);
  std::string_view name() const override { return "graphene"; }
  RefreshList on_precharge(RowIndex row, Nanos t_on, Nanos at) override;

  const MisraGries& table() const { return table_; }
  std::uint64_t triggers() const { return triggers_; }

 private:
  GrapheneConfig cfg_;
  Context ctx_;
  MisraGries table_;
  Nanos window_start_{0};
  std::uint64_t triggers_ = 0;
};

class Trr final : public Mitigation {
 public:
  Trr(TrrConfig cfg, Context ctx);
  std::string_view name() const override { return "trr"; }
  RefreshList on_activate(RowIndex row, Nanos at) override;
  RefreshList on_auto_refresh(Nanos at) override;

  struct Entry {
    RowIndex row;
    std::uint64_t count;
  };
  /// Least recently sampled first.
  const std::deque<Entry>& table() const { return table_; }

 private:
  TrrConfig cfg_;
  Context ctx_;
  std::deque<Entry> table_;
  std::uint64_t act_index_ = 0;
  std::uint64_t refs_ = 0;
};

std::unique_ptr<Mitigation> make_mitigation(const MitigationConfig& cfg, const Context& ctx);

}  // namespace rowsim::mitigation
