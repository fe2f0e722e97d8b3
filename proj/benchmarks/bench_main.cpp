#include <benchmark/benchmark.h>

#include <random>

#include "rowsim/characterizer.hpp"
#include "rowsim/misra_gries.hpp"
#include "rowsim/profile.hpp"

using namespace rowsim;

namespace {

const device::DeviceProfile& mean80() { return *device::find_builtin("paper-mean-80C"); }

void BM_BankHammer(benchmark::State& state) {
  const Nanos t_on{state.range(0)};
  dram::BankConfig cfg;
  cfg.temp_c = 80;
  cfg.record_events = false;
  dram::Bank bank(mean80(), cfg);
  long long t = 0;
  for (auto _ : state) {
    bank.apply({dram::CommandKind::Activate, 1'001, Nanos{t}});
    bank.apply({dram::CommandKind::Precharge, 1'001, Nanos{t} + t_on});
    t += t_on.count() + 15;
    // Keep the victims from saturating.
    if (bank.activations() % 8'192 == 0) {
      bank.apply({dram::CommandKind::NeighborRefresh, 1'000, Nanos{t}});
      bank.apply({dram::CommandKind::NeighborRefresh, 1'002, Nanos{t}});
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BankHammer)->Arg(36)->Arg(7'800);

void BM_MisraGriesAdd(benchmark::State& state) {
  mitigation::MisraGries mg(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(1);
  std::geometric_distribution<int> hot(0.01);
  std::vector<RowIndex> keys(1 << 16);
  for (auto& k : keys) k = static_cast<RowIndex>(hot(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mg.add(keys[i++ & 0xFFFF], 1.5));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MisraGriesAdd)->Arg(16)->Arg(256);

void BM_CurveLookup(benchmark::State& state) {
  const auto& curve = mean80().curves.at({Sidedness::Single, 80});
  long long t = 36;
  for (auto _ : state) {
    benchmark::DoNotOptimize(curve.at(Nanos{t}));
    t = t < 30'000'000 ? t * 3 / 2 : 36;
  }
}
BENCHMARK(BM_CurveLookup);

void BM_MeasureAcmin(benchmark::State& state) {
  characterize::ProbeSetup setup;
  setup.temp_c = 80;
  const Nanos t_on{state.range(0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(characterize::measure_acmin(mean80(), setup, 4'000, t_on, Sidedness::Single, {1}));
  }
}
BENCHMARK(BM_MeasureAcmin)->Arg(36)->Arg(7'800)->Arg(70'200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
