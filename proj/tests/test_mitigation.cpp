#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rowsim/adaptation.hpp"
#include "rowsim/simulator.hpp"
#include "support.hpp"

using namespace rowsim;
using namespace rowsim::mitigation;
using support::builtin;

namespace {

Context ctx_for(const device::DeviceProfile* p, int temp, RowIndex rows = 64) {
  Context c;
  c.profile = p;
  c.temp_c = temp;
  c.rows = rows;
  return c;
}

}  // namespace

TEST(Para, CertainRefreshPicksANeighbor) {
  Para para({1.0, 3}, ctx_for(nullptr, 50));
  for (int i = 0; i < 1'000; ++i) {
    const auto r = para.on_precharge(20, Nanos{36}, Nanos{i});
    ASSERT_EQ(r.size(), 1U);
    EXPECT_TRUE(r[0] == 19 || r[0] == 21);
  }
  Para edge({1.0, 3}, ctx_for(nullptr, 50));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(edge.on_precharge(0, Nanos{36}, Nanos{i}), RefreshList{1});
}

TEST(Para, RefreshCountIsBinomial) {
  Para para({0.01, 77}, ctx_for(nullptr, 50));
  int hits = 0;
  int low = 0;
  for (int i = 0; i < 100'000; ++i) {
    const auto r = para.on_precharge(20, Nanos{36}, Nanos{i});
    hits += !r.empty();
    low += !r.empty() && r[0] == 19;
  }
  const double sigma = std::sqrt(100'000 * 0.01 * 0.99);
  EXPECT_NEAR(hits, 1'000, 3 * sigma);
  EXPECT_NEAR(low, hits / 2.0, 3 * std::sqrt(hits * 0.25));
}

TEST(Para, SeedFixesTheSchedule) {
  auto schedule = [](std::uint64_t seed) {
    Para para({0.05, seed}, ctx_for(nullptr, 50));
    std::vector<RefreshList> out;
    for (int i = 0; i < 2'000; ++i) out.push_back(para.on_precharge(7, Nanos{36}, Nanos{i}));
    return out;
  };
  EXPECT_EQ(schedule(5), schedule(5));
  EXPECT_NE(schedule(5), schedule(6));
}

TEST(Para, RejectsBadProbability) {
  EXPECT_THROW(ParaConfig({0.0, 1}).validate(), ConfigError);
  EXPECT_THROW(ParaConfig({1.5, 1}).validate(), ConfigError);
}

TEST(Graphene, UnitIncrementsTriggerOnceAtThreshold) {
  Graphene g({16, 50.0, false}, ctx_for(nullptr, 50));
  int triggers = 0;
  for (int i = 1; i <= 50; ++i) {
    const auto r = g.on_precharge(9, Nanos{36}, Nanos{i * 51});
    if (!r.empty()) {
      ++triggers;
      EXPECT_EQ(i, 50);
      EXPECT_EQ(r, (RefreshList{8, 10}));
    }
  }
  EXPECT_EQ(triggers, 1);
  EXPECT_EQ(g.table().estimate(9), 0.0);
}

TEST(Graphene, WeightedIncrementCanTriggerImmediately) {
  const auto& p = builtin("paper-mean-50C");
  Graphene g({16, 21.0, true}, ctx_for(&p, 50));
  EXPECT_EQ(g.on_precharge(30, Nanos{7'800}, Nanos{7'800}), (RefreshList{29, 31}));
  Graphene unit({16, 21.0, false}, ctx_for(&p, 50));
  EXPECT_TRUE(unit.on_precharge(30, Nanos{7'800}, Nanos{7'800}).empty());
  EXPECT_THROW(Graphene({16, 21.0, true}, ctx_for(nullptr, 50)), ConfigError);
}

TEST(Graphene, TableClearsEveryRefreshWindow) {
  Graphene g({4, 100.0, false}, ctx_for(nullptr, 50));
  for (int i = 0; i < 60; ++i) g.on_precharge(3, Nanos{36}, Nanos{i * 51});
  EXPECT_EQ(g.table().estimate(3), 60.0);
  for (int i = 0; i < 60; ++i) g.on_precharge(3, Nanos{36}, Nanos{64'000'000 + i * 51});
  EXPECT_EQ(g.table().estimate(3), 60.0);
  EXPECT_EQ(g.triggers(), 0U);
}

TEST(MisraGries, NeverOverestimatesAndBoundsUndercount) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    MisraGries mg(k);
    std::map<RowIndex, double> truth;
    const int n = 1 + static_cast<int>(rng() % 3'000);
    for (int i = 0; i < n; ++i) {
      const RowIndex key = static_cast<RowIndex>(std::min<std::uint64_t>(rng() % 40, rng() % 40));
      const double w = 1.0 + static_cast<double>(rng() % 100) / 10.0;
      mg.add(key, w);
      truth[key] += w;
      ASSERT_LE(mg.size(), k);
    }
    const double slack = mg.total_weight() / static_cast<double>(k + 1);
    for (const auto& [key, t] : truth) {
      EXPECT_LE(mg.estimate(key), t + 1e-9 * mg.total_weight());
      EXPECT_GE(mg.estimate(key), t - slack - 1e-9 * mg.total_weight());
    }
  }
  EXPECT_THROW(MisraGries(0), ConfigError);
  MisraGries one(1);
  EXPECT_THROW(one.add(1, 0.0), ConfigError);
}

TEST(Trr, RefreshesTheSampledAggressorsNeighbors) {
  Trr trr({1.0, 4, 1, 1}, ctx_for(nullptr, 50));
  EXPECT_TRUE(trr.on_auto_refresh(Nanos{0}).empty());  // nothing sampled yet
  for (int ref = 0; ref < 20; ++ref) {
    for (int i = 0; i < 3; ++i) trr.on_activate(40, Nanos{0});
    EXPECT_EQ(trr.on_auto_refresh(Nanos{0}), (RefreshList{39, 41}));
  }
}

TEST(Trr, RefreshPeriodSkipsRefs) {
  Trr trr({1.0, 4, 1, 3}, ctx_for(nullptr, 50));
  int fired = 0;
  for (int ref = 0; ref < 9; ++ref) {
    trr.on_activate(40, Nanos{0});
    fired += !trr.on_auto_refresh(Nanos{0}).empty();
  }
  EXPECT_EQ(fired, 3);
}

TEST(Trr, DummyRowsStarveTheVictim) {
  auto victim_refreshes = [](bool dummies) {
    Trr trr({1.0, 4, 1, 1}, ctx_for(nullptr, 50, 4'096));
    int n = 0;
    for (int ref = 0; ref < 200; ++ref) {
      for (int i = 0; i < 3; ++i) {
        trr.on_activate(100, Nanos{0});
        trr.on_activate(102, Nanos{0});
      }
      if (dummies) {
        for (RowIndex d = 0; d < 8; ++d) {
          for (int i = 0; i < 4; ++i) trr.on_activate(1'000 + 3 * d, Nanos{0});
        }
      }
      for (const auto r : trr.on_auto_refresh(Nanos{0})) n += r == 101;
    }
    return n;
  };
  EXPECT_LT(victim_refreshes(true), victim_refreshes(false));
  EXPECT_EQ(victim_refreshes(true), 0);
}

TEST(Simulator, CountsMitigationRefreshes) {
  const auto p = device::rescale_base(support::pinned(builtin("paper-mean-50C")), 100);
  dram::Trace t;
  for (long long i = 0; i < 400; ++i) {
    t.push_back(support::act(10, i * 51));
    t.push_back(support::pre(i * 51 + 36));
  }
  Simulator bare(p, support::quiet_bank(64, 50));
  EXPECT_GT(bare.run(t).flips, 0U);

  Simulator guarded(p, support::quiet_bank(64, 50), GrapheneConfig{8, 40.0, false});
  const auto r = guarded.run(t);
  EXPECT_EQ(r.flips, 0U);
  EXPECT_EQ(r.mitigation_refreshes, 20U);  // 10 triggers x 2 neighbors
  EXPECT_EQ(r.refreshed_rows.at(9), 10U);
  EXPECT_EQ(r.activations, 400U);
  EXPECT_EQ(r.end_time, Nanos{399 * 51 + 36});
}

TEST(Simulator, StopsEarlyOnRequest) {
  const auto p = device::rescale_base(support::pinned(builtin("paper-mean-50C")), 10);
  dram::Trace t;
  for (long long i = 0; i < 100; ++i) {
    t.push_back(support::act(10, i * 51));
    t.push_back(support::pre(i * 51 + 36));
  }
  Simulator sim(p, support::quiet_bank(64, 50));
  const auto r = sim.run(t, true);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.activations, 10U);
}

TEST(Adaptation, TrasCapIsIdentity) {
  const auto& p = builtin("paper-mean-50C");
  const MitigationConfig g = GrapheneConfig{64, 1'000.0, false};
  const auto a = adapt(g, {Nanos{36}, std::nullopt, std::nullopt, 50}, p);
  EXPECT_EQ(a.config, g);
  EXPECT_EQ(a.scale, 1.0);
  EXPECT_EQ(a.policy.t_on_cap, Nanos{36});
  const MitigationConfig para = ParaConfig{0.001, 1};
  EXPECT_EQ(adapt(para, {Nanos{36}, std::nullopt, std::nullopt, 50}, p).config, para);
}

TEST(Adaptation, GrapheneThresholdDividedByWeight) {
  const auto& p = builtin("paper-mean-50C");
  const auto a = adapt(GrapheneConfig{64, 10'000.0, false}, {Nanos{7'800}, std::nullopt, std::nullopt, 50}, p);
  const double t = std::get<GrapheneConfig>(a.config).threshold;
  EXPECT_NEAR(10'000.0 / t, 21.0, 0.21);
  EXPECT_EQ(a.scale, device::weight(p, Nanos{7'800}, Sidedness::Single, 50));

  const auto w = adapt(GrapheneConfig{64, 64.0, true}, {Nanos{7'800}, std::nullopt, std::nullopt, 50}, p);
  EXPECT_EQ(std::get<GrapheneConfig>(w.config).threshold, 64.0 - std::ceil(21.0 / 2.0));
  EXPECT_THROW(adapt(GrapheneConfig{64, 15.0, false}, {Nanos{7'800}, std::nullopt, std::nullopt, 50}, p),
               ConfigError);
}

TEST(Adaptation, GrapheneThresholdNonIncreasingInCap) {
  const auto& p = builtin("paper-mean-80C");
  for (const bool weighted : {false, true}) {
    double prev = 1e300;
    for (long long cap = 36; cap <= 70'200; cap = cap * 3 / 2 + 1) {
      const auto a = adapt(GrapheneConfig{64, 20'000.0, weighted}, {Nanos{cap}, std::nullopt, std::nullopt, 80}, p);
      const double t = std::get<GrapheneConfig>(a.config).threshold;
      EXPECT_LE(t, prev) << cap;
      prev = t;
    }
  }
}

TEST(Adaptation, ParaMissNotWorseAfterAdaptation) {
  const auto& p = builtin("paper-mean-80C");
  for (const double prob : {0.0005, 0.001, 0.01}) {
    for (const long long cap : {500LL, 2'000LL, 7'800LL}) {
      const auto a = adapt(ParaConfig{prob, 1}, {Nanos{cap}, std::nullopt, std::nullopt, 80}, p);
      const double n = a.parameters.at("N");
      const double w = a.scale;
      const double p1 = std::get<ParaConfig>(a.config).p;
      EXPECT_GE(p1, prob);
      EXPECT_LE(para_miss_probability(p1, n, w), para_miss_probability(prob, n, 1.0) * (1 + 1e-9));
      EXPECT_NEAR(a.parameters.at("miss_adapted"), para_miss_probability(p1, n, w), 1e-12);
    }
  }
}

TEST(Adaptation, RejectsCapOutsideJedecRange) {
  const auto& p = builtin("paper-mean-50C");
  EXPECT_THROW(adapt(ParaConfig{}, {Nanos{20}, std::nullopt, std::nullopt, 50}, p), ConfigError);
  EXPECT_THROW(adapt(ParaConfig{}, {Nanos{80'000}, std::nullopt, std::nullopt, 50}, p), ConfigError);
  EXPECT_THROW(adapt(ParaConfig{}, {Nanos{7'800}, 0.5, std::nullopt, 50}, p), ConfigError);
}
