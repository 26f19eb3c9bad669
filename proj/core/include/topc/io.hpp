#pragma once

#include <string>
#include <vector>

#include "topc/grouping.hpp"
#include "topc/losses.hpp"

namespace topc::io {

struct ApTable {
  std::vector<std::string> names;
  std::vector<double> values;  // AP percentages in [0,100]
};

// Feature matrix: header `category,<f0>,...`, one comma-separated row per
// category. Parse errors carry `path:line:column` diagnostics.
MetaFeatureSet read_features_csv(const std::string& path);
void write_features_csv(const std::string& path, const MetaFeatureSet& x);

// One group per line, comma-separated names; '#' starts a comment.
GroupingTable read_grouping(const std::string& path);

// Line 1 `true_label=<index>`, line 2 comma-separated scores.
ClassScores read_scores(const std::string& path);

// `name,value` rows; '#' starts a comment.
ApTable read_ap_csv(const std::string& path);

}  // namespace topc::io
