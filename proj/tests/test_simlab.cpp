#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "reference.hpp"
#include "topc/simlab.hpp"

using topc::MetaFeatureSet;
using topc::SimConfig;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.grouping = {{{"c0", "c1"}, {"c2", "c3"}}};
  cfg.n_categories = 4;
  cfg.feature_dim = 4;
  cfg.seed = 42;
  cfg.init_sigma = 1.0;
  cfg.iterations = 10;
  cfg.step_size = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("gaussian source is reproducible and roughly standard") {
  topc::GaussianSource a(9);
  topc::GaussianSource b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  topc::GaussianSource g(123);
  double sum = 0.0;
  double ss = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = g.next();
    sum += v;
    ss += v * v;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(std::sqrt(ss / n - mean * mean) - 1.0) < 0.05);
}

TEST_CASE("init_features pins the seeded draw exactly") {
  const auto x = topc::init_features(small_config());
  REQUIRE(x.categories ==
          std::vector<std::string>{"c0", "c1", "c2", "c3"});
  const double want[4][4] = {
      {1.2938204232729367, 0.70498826642085988, 0.39797739618378869,
       -0.57409480672026136},
      {1.1185550524574781, -1.9066853448304657, -1.4922470037224238,
       -0.72412293190894161},
      {-0.30880867176374249, 0.015012782590840344, 1.4133667356902182,
       1.0477023474153664},
      {1.5932140601418707, -0.32141262582284907, 0.45046511223005892,
       -0.63799734534802455}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t f = 0; f < 4; ++f)
      CHECK(x.features[i][f] == want[i][f]);
}

TEST_CASE("init_features scales linearly in sigma") {
  SimConfig cfg = small_config();
  const auto base = topc::init_features(cfg);
  cfg.init_sigma = 2.0;
  const auto twice = topc::init_features(cfg);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t f = 0; f < 4; ++f)
      CHECK(twice.features[i][f] == 2.0 * base.features[i][f]);
  cfg.init_sigma = 0.0;
  for (const auto& row : topc::init_features(cfg).features)
    for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("config validation") {
  SimConfig cfg = small_config();
  cfg.feature_dim = 1;
  CHECK_THROWS_AS(topc::init_features(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.n_categories = 5;
  CHECK_THROWS_AS(topc::init_features(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.step_size = -1.0;
  CHECK_THROWS_AS(topc::run_descent(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.init_sigma = -0.5;
  CHECK_THROWS_AS(topc::init_features(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.grouping.groups.clear();
  CHECK_THROWS_AS(topc::init_features(cfg), std::invalid_argument);
}

TEST_CASE("descent trace shape and first row") {
  SimConfig cfg = small_config();
  MetaFeatureSet final_state;
  const auto trace = topc::run_descent(cfg, &final_state);
  REQUIRE(trace.size() == cfg.iterations + 1);
  CHECK(trace.front().iteration == 0);
  CHECK(trace.back().iteration == cfg.iterations);
  CHECK(trace.front().w_mean_std.size() == 2);

  const auto x0 = topc::init_features(cfg);
  CHECK(trace.front().loss ==
        topc::re_meta_loss(x0, cfg.grouping, cfg.grouping_params).value);
  // the reported final state is the one the last row was measured on
  CHECK(trace.back().loss ==
        topc::re_meta_loss(final_state, cfg.grouping, cfg.grouping_params)
            .value);
}

TEST_CASE("zero iterations and zero step size") {
  SimConfig cfg = small_config();
  cfg.iterations = 0;
  CHECK(topc::run_descent(cfg).size() == 1);

  cfg = small_config();
  cfg.step_size = 0.0;
  const auto trace = topc::run_descent(cfg);
  for (const auto& row : trace) CHECK(row.loss == trace.front().loss);
}

TEST_CASE("descent reduces the loss on a shaped instance") {
  SimConfig cfg;
  cfg.grouping = ref::shaped_groups();
  cfg.n_categories = 20;
  cfg.feature_dim = 64;
  cfg.seed = 7;
  cfg.iterations = 50;
  cfg.step_size = 0.01;
  const auto trace = topc::run_descent(cfg);
  CHECK(trace.back().loss < trace.front().loss);
  CHECK(trace.front().min_mean_gap >= 0.0);
  CHECK(trace.front().min_std_gap >= 0.0);
}

TEST_CASE("histogram binning convention") {
  const MetaFeatureSet x{{"a"}, {{1.0, 2.0, 3.0}}};
  const auto counts = topc::histogram(x, 2, 1.0, 3.0);
  REQUIRE(counts.size() == 1);
  // [1,2) gets 1.0; [2,3] gets 2.0 and the closing 3.0
  CHECK(counts[0] == std::vector<std::size_t>{1, 2});

  const MetaFeatureSet y{{"a", "b"}, {{0.0, 0.5, 1.0, 2.5}, {-1.0, 9.0, 1.2, 1.3}}};
  const auto c2 = topc::histogram(y, 2, 0.0, 2.0);
  CHECK(c2[0] == std::vector<std::size_t>{2, 2});  // 2.5 clamps into the top bin
  CHECK(c2[1] == std::vector<std::size_t>{1, 3});  // -1 and 9 clamp inward
}

TEST_CASE("histogram argument validation") {
  const MetaFeatureSet x{{"a"}, {{1.0}}};
  CHECK_THROWS_AS(topc::histogram(x, 0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(topc::histogram(x, 4, 2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(topc::histogram(x, 4, 3.0, 1.0), std::invalid_argument);
}
