#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "topc/grouping.hpp"
#include "topc/losses.hpp"
#include "topc/numerics.hpp"
#include "topc/simlab.hpp"

namespace {

topc::GroupingTable shaped_groups() {
  const std::size_t sizes[] = {2, 5, 2, 3, 6, 2};
  topc::GroupingTable t;
  std::size_t next = 0;
  for (std::size_t sz : sizes) {
    std::vector<std::string> g;
    for (std::size_t i = 0; i < sz; ++i)
      g.push_back("c" + std::to_string(next++));
    t.groups.push_back(std::move(g));
  }
  return t;
}

topc::MetaFeatureSet make_features(std::size_t dim) {
  topc::SimConfig cfg;
  cfg.grouping = shaped_groups();
  cfg.n_categories = 20;
  cfg.feature_dim = dim;
  cfg.seed = 11;
  return topc::init_features(cfg);
}

void BM_vector_stats(benchmark::State& state) {
  const auto x = make_features(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(topc::vector_stats(x.features[0]));
}
BENCHMARK(BM_vector_stats)->Arg(64)->Arg(1024);

void BM_tcl_loss(benchmark::State& state) {
  topc::ClassScores s;
  s.scores.resize(20);
  for (std::size_t i = 0; i < s.scores.size(); ++i)
    s.scores[i] = 0.03 + 0.045 * static_cast<double>(i);
  s.true_label = 4;
  const topc::TclParams p;
  for (auto _ : state) benchmark::DoNotOptimize(topc::tcl_loss(s, p));
}
BENCHMARK(BM_tcl_loss);

void BM_group_stats(benchmark::State& state) {
  const auto x = make_features(static_cast<std::size_t>(state.range(0)));
  const auto t = shaped_groups();
  for (auto _ : state) benchmark::DoNotOptimize(topc::group_stats(x, t));
}
BENCHMARK(BM_group_stats)->Arg(64)->Arg(1024);

void BM_re_meta_loss(benchmark::State& state) {
  const auto x = make_features(static_cast<std::size_t>(state.range(0)));
  const auto t = shaped_groups();
  const topc::GroupingParams p;
  for (auto _ : state) benchmark::DoNotOptimize(topc::re_meta_loss(x, t, p));
}
BENCHMARK(BM_re_meta_loss)->Arg(64)->Arg(1024);

void BM_descent_step(benchmark::State& state) {
  topc::SimConfig cfg;
  cfg.grouping = shaped_groups();
  cfg.n_categories = 20;
  cfg.feature_dim = 64;
  cfg.seed = 7;
  cfg.iterations = 1;
  cfg.step_size = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(topc::run_descent(cfg));
}
BENCHMARK(BM_descent_step);

}  // namespace

BENCHMARK_MAIN();
