#include "topc/grouping.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace topc {
namespace {

// Below this, a group's W_mean_std term is treated as exactly 0. The term
// behaves like W^2 near 0, so the value and all partials vanish with it.
constexpr double kWmsGuard = 1e-12;

void validate_params(const GroupingParams& p) {
  if (!(p.tau >= 1.0))
    throw std::invalid_argument("grouping: tau must be >= 1");
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("grouping: epsilon must be positive");
}

// Group membership as row indices into the feature set, table order kept.
std::vector<std::vector<std::size_t>> resolve_groups(const MetaFeatureSet& x,
                                                     const GroupingTable& t) {
  validate_features(x);
  if (t.groups.empty())
    throw std::invalid_argument("grouping: need at least one group");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < x.categories.size(); ++i)
    index.emplace(x.categories[i], i);
  std::vector<std::vector<std::size_t>> members;
  std::vector<char> used(x.categories.size(), 0);
  std::string missing;
  for (const auto& group : t.groups) {
    if (group.empty()) throw std::invalid_argument("grouping: empty group");
    std::vector<std::size_t> ids;
    ids.reserve(group.size());
    for (const auto& name : group) {
      auto it = index.find(name);
      if (it == index.end()) {
        missing += " " + name;
        continue;
      }
      if (used[it->second])
        throw std::invalid_argument("grouping: category '" + name +
                                    "' listed twice");
      used[it->second] = 1;
      ids.push_back(it->second);
    }
    members.push_back(std::move(ids));
  }
  if (!missing.empty())
    throw std::invalid_argument("grouping: categories not in feature set:" +
                                missing);
  std::string ungrouped;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) ungrouped += " " + x.categories[i];
  if (!ungrouped.empty())
    throw std::invalid_argument("grouping: categories missing from table:" +
                                ungrouped);
  return members;
}

std::vector<GroupStats> stats_for(
    const std::vector<VectorStats>& per,
    const std::vector<std::vector<std::size_t>>& members) {
  std::vector<GroupStats> out;
  out.reserve(members.size());
  for (const auto& ids : members) {
    GroupStats g;
    g.size = ids.size();
    const double n = static_cast<double>(ids.size());
    for (std::size_t m : ids) {
      g.u_group += per[m].mean;
      g.delta_group += per[m].stddev;
    }
    g.u_group /= n;
    g.delta_group /= n;
    if (ids.size() == 1) {
      g.w_mean = per[ids[0]].mean;
      g.w_std = per[ids[0]].stddev;
      g.w_mean_std = 0.0;
    } else {
      g.w_mean = g.u_group;
      double sd = 0.0;
      double su = 0.0;
      for (std::size_t m : ids) {
        const double dd = per[m].stddev - g.delta_group;
        const double du = per[m].mean - g.u_group;
        sd += dd * dd;
        su += du * du;
      }
      g.w_std = std::sqrt(sd / n);
      g.w_mean_std = std::sqrt(su / n);
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace

void validate_features(const MetaFeatureSet& x) {
  if (x.categories.empty())
    throw std::invalid_argument("features: need at least one category");
  if (x.features.size() != x.categories.size())
    throw std::invalid_argument(
        "features: row count does not match category count");
  const std::size_t dim = x.features.front().size();
  if (dim == 0)
    throw std::invalid_argument("features: dimension must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& name : x.categories)
    if (!seen.insert(name).second)
      throw std::invalid_argument("features: duplicate category '" + name +
                                  "'");
  for (const auto& row : x.features) {
    if (row.size() != dim)
      throw std::invalid_argument("features: rows must share one dimension");
    for (double v : row)
      if (!std::isfinite(v))
        throw std::invalid_argument("features: entries must be finite");
  }
}

std::vector<GroupStats> group_stats(const MetaFeatureSet& x,
                                    const GroupingTable& t) {
  const auto members = resolve_groups(x, t);
  std::vector<VectorStats> per(x.features.size());
  for (std::size_t i = 0; i < x.features.size(); ++i)
    per[i] = vector_stats(x.features[i]);
  return stats_for(per, members);
}

double pairwise_term(const GroupStats& a, const GroupStats& b) {
  const double ds = a.w_std - b.w_std;
  const double dm = a.w_mean - b.w_mean;
  return std::exp(ds * ds) + std::exp(dm * dm);
}

double group_loss(std::size_t j, const std::vector<GroupStats>& stats,
                  const GroupingParams& p) {
  validate_params(p);
  if (j >= stats.size())
    throw std::invalid_argument("group_loss: group index out of range");
  const double w = stats[j].w_mean_std;
  if (w < kWmsGuard) return 0.0;
  double pair_sum = 0.0;
  for (std::size_t k = j + 1; k < stats.size(); ++k)
    pair_sum += pairwise_term(stats[j], stats[k]);
  return w / (p.epsilon + 1.0 / w + pair_sum);
}

GradedValue re_meta_loss(const MetaFeatureSet& x, const GroupingTable& t,
                         const GroupingParams& p) {
  validate_params(p);
  const auto members = resolve_groups(x, t);
  const std::size_t n_cat = x.categories.size();
  const std::size_t dim = x.features.front().size();
  const std::size_t n_groups = members.size();

  std::vector<VectorStats> per(n_cat);
  for (std::size_t i = 0; i < n_cat; ++i) per[i] = vector_stats(x.features[i]);
  const auto gs = stats_for(per, members);

  // q_j/Q_j involve W_mean_std only for the intra strategies; the pairwise
  // sum uses the mean part only for the full-pair strategies.
  const bool intra =
      p.strategy == Strategy::best || p.strategy == Strategy::intra_std;
  const bool full_pairs =
      p.strategy == Strategy::best || p.strategy == Strategy::std_mean;

  double value = 0.0;
  std::vector<double> g_wms(n_groups, 0.0);
  std::vector<double> g_wstd(n_groups, 0.0);
  std::vector<double> g_wmean(n_groups, 0.0);

  for (std::size_t j = 0; j < n_groups; ++j) {
    const double wms = gs[j].w_mean_std;
    if (intra && wms < kWmsGuard) continue;
    double pair_sum = 0.0;
    for (std::size_t k = j + 1; k < n_groups; ++k) {
      const double ds = gs[j].w_std - gs[k].w_std;
      pair_sum += std::exp(ds * ds);
      if (full_pairs) {
        const double dm = gs[j].w_mean - gs[k].w_mean;
        pair_sum += std::exp(dm * dm);
      }
    }
    const double q = intra ? wms : 1.0;
    const double den = p.epsilon + (intra ? 1.0 / wms : 0.0) + pair_sum;
    const double term = q / den;
    value += std::log(p.tau + term);

    const double g_term = 1.0 / (p.tau + term);
    const double g_den = -g_term * q / (den * den);
    if (intra) g_wms[j] += g_term / den + g_den * (-1.0 / (wms * wms));
    for (std::size_t k = j + 1; k < n_groups; ++k) {
      const double ds = gs[j].w_std - gs[k].w_std;
      const double es = g_den * std::exp(ds * ds) * 2.0 * ds;
      g_wstd[j] += es;
      g_wstd[k] -= es;
      if (full_pairs) {
        const double dm = gs[j].w_mean - gs[k].w_mean;
        const double em = g_den * std::exp(dm * dm) * 2.0 * dm;
        g_wmean[j] += em;
        g_wmean[k] -= em;
      }
    }
  }

  // Push group-level gradients down to per-category mean/stddev.
  std::vector<double> g_u(n_cat, 0.0);
  std::vector<double> g_delta(n_cat, 0.0);
  for (std::size_t j = 0; j < n_groups; ++j) {
    const auto& ids = members[j];
    const double n = static_cast<double>(ids.size());
    for (std::size_t m : ids) {
      g_u[m] += g_wmean[j] / n;
      if (ids.size() == 1) {
        g_delta[m] += g_wstd[j];
      } else if (gs[j].w_std > 0.0) {
        g_delta[m] += g_wstd[j] * (per[m].stddev - gs[j].delta_group) /
                      (n * gs[j].w_std);
      }
      if (gs[j].w_mean_std > 0.0)
        g_u[m] +=
            g_wms[j] * (per[m].mean - gs[j].u_group) / (n * gs[j].w_mean_std);
    }
  }

  GradedValue out;
  out.value = value;
  out.gradient.assign(n_cat * dim, 0.0);
  const double inv_dim = 1.0 / static_cast<double>(dim);
  for (std::size_t i = 0; i < n_cat; ++i) {
    const auto& row = x.features[i];
    for (std::size_t f = 0; f < dim; ++f) {
      double g = g_u[i] * inv_dim;
      if (per[i].stddev > 0.0)
        g += g_delta[i] * (row[f] - per[i].mean) * inv_dim / per[i].stddev;
      out.gradient[i * dim + f] = g;
    }
  }
  return out;
}

Strategy strategy_from_name(std::string_view name) {
  if (name == "S-BEST") return Strategy::best;
  if (name == "S-STD-ONLY") return Strategy::std_only;
  if (name == "S-STD-MEAN") return Strategy::std_mean;
  if (name == "S-INTRA-STD") return Strategy::intra_std;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::best:
      return "S-BEST";
    case Strategy::std_only:
      return "S-STD-ONLY";
    case Strategy::std_mean:
      return "S-STD-MEAN";
    case Strategy::intra_std:
      return "S-INTRA-STD";
  }
  return "?";
}

GroupingTable default_grouping() {
  return {{
      {"aero", "bird"},
      {"cow", "horse", "cat", "sheep", "dog"},
      {"sofa", "chair"},
      {"tv", "plant", "table"},
      {"boat", "bicycle", "train", "car", "bus", "mbike"},
      {"bottle", "person"},
  }};
}

}  // namespace topc
