#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "topc/grouping.hpp"

namespace topc {

struct SimConfig {
  std::size_t n_categories = 20;
  std::size_t feature_dim = 64;
  GroupingTable grouping;
  GroupingParams grouping_params;
  double step_size = 0.01;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  double init_sigma = 1.0;
};

struct TraceRow {
  std::size_t iteration = 0;
  double loss = 0.0;
  std::vector<double> w_mean_std;  // per group
  double min_mean_gap = 0.0;       // min over group pairs |W_mean^j - W_mean^k|
  double min_std_gap = 0.0;
};

// Deterministic standard-normal source (Marsaglia polar on mt19937_64).
// std::normal_distribution is implementation-defined, this one is not.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double unit();  // uniform in [0,1)
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Gaussian(0, init_sigma^2) features for the categories listed by the
// grouping table, in table order; identical seed gives identical output.
MetaFeatureSet init_features(const SimConfig& cfg);

// Plain fixed-step gradient descent on re_meta_loss. Row 0 is the initial
// state; one row per iteration after that. When final_state is given it
// receives the feature set the last row was evaluated on.
std::vector<TraceRow> run_descent(const SimConfig& cfg,
                                  MetaFeatureSet* final_state = nullptr);

// Per-category counts over `bins` uniform bins on [lo, hi); the last bin is
// closed and out-of-range entries land in the nearest edge bin.
std::vector<std::vector<std::size_t>> histogram(const MetaFeatureSet& x,
                                                std::size_t bins, double lo,
                                                double hi);

}  // namespace topc
