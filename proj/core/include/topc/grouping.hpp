#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "topc/numerics.hpp"

namespace topc {

// N category-labelled feature vectors, one row per category, equal dimension.
struct MetaFeatureSet {
  std::vector<std::string> categories;
  std::vector<std::vector<double>> features;
};

// Partition of category names into K disjoint, nonempty groups.
struct GroupingTable {
  std::vector<std::vector<std::string>> groups;
};

enum class Strategy { best, std_only, std_mean, intra_std };

Strategy strategy_from_name(std::string_view name);  // "S-BEST", "S-STD-ONLY", ...
const char* strategy_name(Strategy s);

struct GroupingParams {
  double tau = 1.0;
  double epsilon = 0.00005;
  Strategy strategy = Strategy::best;
};

struct GroupStats {
  std::size_t size = 0;
  double u_group = 0.0;      // mean of member means
  double delta_group = 0.0;  // mean of member stddevs
  double w_mean = 0.0;
  double w_std = 0.0;
  double w_mean_std = 0.0;
};

void validate_features(const MetaFeatureSet& x);

std::vector<GroupStats> group_stats(const MetaFeatureSet& x,
                                    const GroupingTable& t);

// exp((dW_std)^2) + exp((dW_mean)^2)
double pairwise_term(const GroupStats& a, const GroupStats& b);

// Per-group term W_mean_std / (epsilon + 1/W_mean_std + sum_{k>j} pair terms),
// defined as 0 when W_mean_std vanishes. Groups are indexed from 0.
double group_loss(std::size_t j, const std::vector<GroupStats>& stats,
                  const GroupingParams& p);

// Total grouping loss under the selected strategy; the gradient covers all
// N*|F| feature entries, rows flattened in category order.
GradedValue re_meta_loss(const MetaFeatureSet& x, const GroupingTable& t,
                         const GroupingParams& p);

// Pascal VOC partition shipped as the default configuration.
GroupingTable default_grouping();

}  // namespace topc
