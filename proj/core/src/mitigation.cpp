#include "rowsim/mitigation.hpp"

#include <algorithm>
#include <string>

#include "rowsim/rng.hpp"

namespace rowsim::mitigation {

void ParaConfig::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("PARA p must be in (0, 1], got " + std::to_string(p));
}

void GrapheneConfig::validate() const {
  if (table_size == 0) throw ConfigError("Graphene table_size must be >= 1");
  if (!(threshold > 0.0)) throw ConfigError("Graphene threshold must be > 0");
}

void TrrConfig::validate() const {
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) throw ConfigError("TRR sample_rate must be in (0, 1]");
  if (table_size == 0) throw ConfigError("TRR table_size must be >= 1");
  if (ref_period == 0) throw ConfigError("TRR ref_period must be >= 1");
}

std::string_view kind_name(const MitigationConfig& cfg) {
  switch (cfg.index()) {
    case 0: return "para";
    case 1: return "graphene";
    default: return "trr";
  }
}

std::vector<RowIndex> Context::neighbors(RowIndex row) const {
  std::vector<RowIndex> out;
  for (std::int64_t d = 1; d <= static_cast<std::int64_t>(blast_radius); ++d) {
    for (const std::int64_t v : {static_cast<std::int64_t>(row) - d, static_cast<std::int64_t>(row) + d}) {
      if (v >= 0 && v < rows) out.push_back(static_cast<RowIndex>(v));
    }
  }
  return out;
}

Para::Para(ParaConfig cfg, Context ctx) : cfg_(cfg), ctx_(ctx) { cfg_.validate(); }

RefreshList Para::on_precharge(RowIndex row, Nanos, Nanos) {
  const std::uint64_t e = event_++;
  if (to_unit(counter_hash(cfg_.rng_seed, 2 * e)) >= cfg_.p) return {};
  const auto nb = ctx_.neighbors(row);
  if (nb.empty()) return {};
  const auto pick = static_cast<std::size_t>(to_unit(counter_hash(cfg_.rng_seed, 2 * e + 1)) * nb.size());
  return {nb[pick]};
}

Graphene::Graphene(GrapheneConfig cfg, Context ctx) : cfg_(cfg), ctx_(ctx), table_(cfg.table_size) {
  cfg_.validate();
  if (cfg_.weighted_increments && !ctx_.profile) throw ConfigError("weighted Graphene needs a device profile");
}

RefreshList Graphene::on_precharge(RowIndex row, Nanos t_on, Nanos at) {
  if (at - window_start_ >= ctx_.timing.t_refw) {
    table_.clear();
    window_start_ = at - (at - window_start_) % ctx_.timing.t_refw;
  }
  double inc = 1.0;
  if (cfg_.weighted_increments) {
    inc = device::weight(*ctx_.profile, std::max(t_on, ctx_.profile->t_ras_min), Sidedness::Single, ctx_.temp_c);
  }
  if (table_.add(row, inc) < cfg_.threshold) return {};
  table_.erase(row);
  ++triggers_;
  return ctx_.neighbors(row);
}

Trr::Trr(TrrConfig cfg, Context ctx) : cfg_(cfg), ctx_(ctx) { cfg_.validate(); }

RefreshList Trr::on_activate(RowIndex row, Nanos) {
  const std::uint64_t i = act_index_++;
  if (cfg_.sample_rate < 1.0 && to_unit(counter_hash(cfg_.rng_seed, i)) >= cfg_.sample_rate) return {};
  auto it = std::find_if(table_.begin(), table_.end(), [&](const Entry& e) { return e.row == row; });
  Entry e{row, 1};
  if (it != table_.end()) {
    e.count = it->count + 1;
    table_.erase(it);
  } else if (table_.size() == cfg_.table_size) {
    table_.pop_front();
  }
  table_.push_back(e);
  return {};
}

RefreshList Trr::on_auto_refresh(Nanos) {
  ++refs_;
  if (refs_ % cfg_.ref_period != 0 || table_.empty()) return {};
  // Highest count wins; among equals the most recently sampled one.
  auto best = table_.begin();
  for (auto it = table_.begin(); it != table_.end(); ++it) {
    if (it->count >= best->count) best = it;
  }
  const RowIndex target = best->row;
  table_.erase(best);
  return ctx_.neighbors(target);
}

std::unique_ptr<Mitigation> make_mitigation(const MitigationConfig& cfg, const Context& ctx) {
  return std::visit(
      [&](const auto& c) -> std::unique_ptr<Mitigation> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ParaConfig>) return std::make_unique<Para>(c, ctx);
        if constexpr (std::is_same_v<T, GrapheneConfig>) return std::make_unique<Graphene>(c, ctx);
        if constexpr (std::is_same_v<T, TrrConfig>) return std::make_unique<Trr>(c, ctx);
      },
      cfg);
}

}  // namespace rowsim::mitigation
