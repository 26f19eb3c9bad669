#include "topc/simlab.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace topc {
namespace {

std::vector<std::string> flatten(const GroupingTable& t) {
  std::vector<std::string> names;
  for (const auto& group : t.groups)
    names.insert(names.end(), group.begin(), group.end());
  return names;
}

void validate_config(const SimConfig& cfg) {
  if (cfg.feature_dim < 2)
    throw std::invalid_argument("sim: feature_dim must be >= 2");
  if (!(cfg.step_size >= 0.0) || !std::isfinite(cfg.step_size))
    throw std::invalid_argument("sim: step_size must be nonnegative");
  if (!(cfg.init_sigma >= 0.0) || !std::isfinite(cfg.init_sigma))
    throw std::invalid_argument("sim: init_sigma must be nonnegative");
  if (cfg.grouping.groups.empty())
    throw std::invalid_argument("sim: grouping table is empty");
  const auto names = flatten(cfg.grouping);
  if (names.size() != cfg.n_categories)
    throw std::invalid_argument(
        "sim: grouping lists " + std::to_string(names.size()) +
        " categories, config says " + std::to_string(cfg.n_categories));
}

TraceRow make_row(std::size_t iteration, double loss,
                  const std::vector<GroupStats>& stats) {
  TraceRow row;
  row.iteration = iteration;
  row.loss = loss;
  row.w_mean_std.reserve(stats.size());
  for (const auto& g : stats) row.w_mean_std.push_back(g.w_mean_std);
  double mean_gap = std::numeric_limits<double>::infinity();
  double std_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < stats.size(); ++j)
    for (std::size_t k = j + 1; k < stats.size(); ++k) {
      mean_gap = std::min(mean_gap, std::abs(stats[j].w_mean - stats[k].w_mean));
      std_gap = std::min(std_gap, std::abs(stats[j].w_std - stats[k].w_std));
    }
  row.min_mean_gap = stats.size() > 1 ? mean_gap : 0.0;
  row.min_std_gap = stats.size() > 1 ? std_gap : 0.0;
  return row;
}

}  // namespace

double GaussianSource::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u;
  double v;
  double s;
  do {
    u = 2.0 * unit() - 1.0;
    v = 2.0 * unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

MetaFeatureSet init_features(const SimConfig& cfg) {
  validate_config(cfg);
  MetaFeatureSet x;
  x.categories = flatten(cfg.grouping);
  x.features.assign(x.categories.size(),
                    std::vector<double>(cfg.feature_dim, 0.0));
  GaussianSource gen(cfg.seed);
  for (auto& row : x.features)
    for (double& v : row) v = cfg.init_sigma * gen.next();
  return x;
}

std::vector<TraceRow> run_descent(const SimConfig& cfg,
                                  MetaFeatureSet* final_state) {
  MetaFeatureSet x = init_features(cfg);
  const std::size_t dim = cfg.feature_dim;
  std::vector<TraceRow> trace;
  trace.reserve(cfg.iterations + 1);

  GradedValue g = re_meta_loss(x, cfg.grouping, cfg.grouping_params);
  if (!std::isfinite(g.value))
    throw std::runtime_error("run_descent: non-finite loss at iteration 0");
  trace.push_back(make_row(0, g.value, group_stats(x, cfg.grouping)));

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    for (std::size_t i = 0; i < x.features.size(); ++i)
      for (std::size_t f = 0; f < dim; ++f)
        x.features[i][f] -= cfg.step_size * g.gradient[i * dim + f];
    g = re_meta_loss(x, cfg.grouping, cfg.grouping_params);
    if (!std::isfinite(g.value))
      throw std::runtime_error("run_descent: non-finite loss at iteration " +
                               std::to_string(it));
    trace.push_back(make_row(it, g.value, group_stats(x, cfg.grouping)));
  }
  if (final_state) *final_state = std::move(x);
  return trace;
}

std::vector<std::vector<std::size_t>> histogram(const MetaFeatureSet& x,
                                                std::size_t bins, double lo,
                                                double hi) {
  validate_features(x);
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("histogram: invalid range");
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::vector<std::size_t>> counts(
      x.features.size(), std::vector<std::size_t>(bins, 0));
  for (std::size_t i = 0; i < x.features.size(); ++i) {
    for (double v : x.features[i]) {
      double t = std::floor((v - lo) / width);
      if (t < 0.0) t = 0.0;
      if (t > static_cast<double>(bins - 1)) t = static_cast<double>(bins - 1);
      ++counts[i][static_cast<std::size_t>(t)];
    }
  }
  return counts;
}

}  // namespace topc
