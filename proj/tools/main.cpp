#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "topc/grouping.hpp"
#include "topc/io.hpp"
#include "topc/losses.hpp"
#include "topc/numerics.hpp"
#include "topc/simlab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// reported with exit code 2, like CLI11 parse errors
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join9(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt9(v[i]);
  }
  return out;
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------- loss ----

struct LossOpts {
  std::string name;
  std::string file;
  double eta = 1.0;
  double gamma = 1.0;
  double beta_plus = 1.0;
  std::vector<double> beta_minus;
  std::size_t c = 2;
  double gamma_f = 2.0;
  double alpha_f = 0.25;
  bool gradient = false;
};

topc::TclParams tcl_params(const LossOpts& o) {
  topc::TclParams p;
  p.beta_plus = o.beta_plus;
  p.eta = o.eta;
  p.gamma = o.gamma;
  p.c = o.c;
  if (o.beta_minus.empty())
    p.beta_minus.assign(o.c - 1, 0.5);
  else
    p.beta_minus = o.beta_minus;
  return p;
}

topc::GradedValue eval_loss(const std::string& name,
                            const topc::ClassScores& s, const LossOpts& o) {
  if (name == "tcl") return topc::tcl_loss(s, tcl_params(o));
  if (name == "tcl2") return topc::tcl2_loss(s, tcl_params(o));
  if (name == "bce") return topc::bce_loss(s);
  if (name == "focal") return topc::focal_loss(s, o.gamma_f, o.alpha_f);
  return topc::cross_entropy_loss(s);
}

void run_loss(const LossOpts& o) {
  const topc::ClassScores s = topc::io::read_scores(o.file);
  if (o.c < 2) throw std::invalid_argument("tcl: C must satisfy 2 <= C <= N");
  const topc::GradedValue r = eval_loss(o.name, s, o);
  std::printf("%s\n", fmt9(r.value).c_str());
  if (o.gradient) std::printf("%s\n", join9(r.gradient).c_str());
}

// ------------------------------------------------------------ grouping ----

struct GroupingOpts {
  std::string features;
  std::string groups;
  std::string strategy = "S-BEST";
  double tau = 1.0;
  double epsilon = 0.00005;
  bool all_strategies = false;
};

void run_grouping(const GroupingOpts& o) {
  const topc::MetaFeatureSet x = topc::io::read_features_csv(o.features);
  const topc::GroupingTable t = topc::io::read_grouping(o.groups);
  topc::GroupingParams p;
  p.tau = o.tau;
  p.epsilon = o.epsilon;
  std::vector<topc::Strategy> run;
  if (o.all_strategies)
    run = {topc::Strategy::best, topc::Strategy::std_only,
           topc::Strategy::std_mean, topc::Strategy::intra_std};
  else
    run = {topc::strategy_from_name(o.strategy)};
  for (topc::Strategy s : run) {
    p.strategy = s;
    const topc::GradedValue r = topc::re_meta_loss(x, t, p);
    std::printf("loss %s %s\n", topc::strategy_name(s), fmt9(r.value).c_str());
  }
  const auto stats = topc::group_stats(x, t);
  std::printf("group,size,u_group,delta_group,w_mean,w_std,w_mean_std\n");
  for (std::size_t j = 0; j < stats.size(); ++j)
    std::printf("%zu,%zu,%s,%s,%s,%s,%s\n", j, stats[j].size,
                fmt9(stats[j].u_group).c_str(),
                fmt9(stats[j].delta_group).c_str(),
                fmt9(stats[j].w_mean).c_str(), fmt9(stats[j].w_std).c_str(),
                fmt9(stats[j].w_mean_std).c_str());
}

// ------------------------------------------------------------ gradcheck ----

struct GradcheckOpts {
  std::string selector;
  std::string features;
  std::string groups;
  std::string scores;
  std::string strategy;
  std::uint64_t seed = 1;
  std::size_t trials = 10;
  bool corrupt = false;
};

constexpr double kGradTol = 1e-5;
constexpr double kFdStep = 1e-5;
// instance-regularity thresholds; closer than this counts as singular
constexpr double kTieSkip = 1e-4;
constexpr double kRegular = 1e-3;

topc::GroupingTable shaped_groups() {
  const std::size_t sizes[] = {2, 5, 2, 3, 6, 2};
  topc::GroupingTable t;
  std::size_t next = 0;
  for (std::size_t sz : sizes) {
    std::vector<std::string> g;
    for (std::size_t i = 0; i < sz; ++i) g.push_back("c" + std::to_string(next++));
    t.groups.push_back(std::move(g));
  }
  return t;
}

topc::ClassScores random_scores(std::mt19937_64& eng, std::size_t n) {
  topc::ClassScores s;
  s.scores.resize(n);
  for (double& v : s.scores) v = 0.02 + 0.96 * uniform01(eng);
  s.true_label = static_cast<std::size_t>(eng() % n);
  return s;
}

// gap between the weakest selected false class and the best non-selected one
double selection_margin(const topc::ClassScores& s, std::size_t c) {
  const auto full = topc::top_false_classes(s, s.scores.size() - 1);
  if (full.size() < c) return std::numeric_limits<double>::infinity();
  return s.scores[full[c - 2]] - s.scores[full[c - 1]];
}

bool near_boundary(const topc::ClassScores& s) {
  for (double v : s.scores)
    if (v < kTieSkip || v > 1.0 - kTieSkip) return true;
  return false;
}

bool regular_features(const topc::MetaFeatureSet& x,
                      const topc::GroupingTable& t) {
  for (const auto& row : x.features)
    if (topc::vector_stats(row).stddev <= kRegular) return false;
  for (const auto& g : topc::group_stats(x, t)) {
    if (g.size == 1) continue;
    if (g.w_mean_std <= kRegular || g.w_std <= kRegular) return false;
  }
  return true;
}

struct CheckOutcome {
  bool failed = false;
};

void report_check(const std::string& label, double err, CheckOutcome& out) {
  const bool ok = err < kGradTol;
  if (!ok) out.failed = true;
  std::printf("%s max_rel_err %s %s\n", label.c_str(), fmt9(err).c_str(),
              ok ? "PASS" : "FAIL");
}

double check_class_loss(const std::string& name, const topc::ClassScores& s,
                        const GradcheckOpts& o) {
  LossOpts lo;
  lo.name = name;
  lo.c = name == "tcl" ? 3 : 2;
  if (lo.c > s.scores.size()) lo.c = 2;
  topc::GradedValue analytic = eval_loss(name, s, lo);
  if (o.corrupt) analytic.gradient[0] += 0.5;
  const auto numeric = topc::finite_diff_gradient(
      [&](const std::vector<double>& v) {
        return eval_loss(name, {v, s.true_label}, lo).value;
      },
      s.scores, kFdStep);
  return topc::relative_gradient_error(analytic.gradient, numeric);
}

double check_re_meta(const topc::MetaFeatureSet& x,
                     const topc::GroupingTable& t,
                     const topc::GroupingParams& p, const GradcheckOpts& o) {
  const std::size_t dim = x.features.front().size();
  topc::GradedValue analytic = topc::re_meta_loss(x, t, p);
  if (o.corrupt) analytic.gradient[0] += 0.5;
  std::vector<double> flat(x.categories.size() * dim);
  for (std::size_t i = 0; i < x.categories.size(); ++i)
    for (std::size_t f = 0; f < dim; ++f) flat[i * dim + f] = x.features[i][f];
  const auto numeric = topc::finite_diff_gradient(
      [&](const std::vector<double>& v) {
        topc::MetaFeatureSet probe = x;
        for (std::size_t i = 0; i < probe.categories.size(); ++i)
          for (std::size_t f = 0; f < dim; ++f)
            probe.features[i][f] = v[i * dim + f];
        return topc::re_meta_loss(probe, t, p).value;
      },
      flat, kFdStep);
  return topc::relative_gradient_error(analytic.gradient, numeric);
}

void gradcheck_class_loss(const std::string& name, const GradcheckOpts& o,
                          CheckOutcome& out) {
  const bool selective = name == "tcl" || name == "tcl2";
  if (!o.scores.empty()) {
    const topc::ClassScores s = topc::io::read_scores(o.scores);
    if (near_boundary(s)) {
      std::printf("%s skipped (score at domain boundary)\n", name.c_str());
      return;
    }
    if (selective) {
      const std::size_t c = name == "tcl" && s.scores.size() > 3 ? 3 : 2;
      if (selection_margin(s, c) < kTieSkip) {
        std::printf("%s skipped (top-false selection tie)\n", name.c_str());
        return;
      }
    }
    report_check(name, check_class_loss(name, s, o), out);
    return;
  }
  std::mt19937_64 eng(o.seed);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < o.trials; ++trial) {
    topc::ClassScores s = random_scores(eng, 20);
    while (selective && selection_margin(s, name == "tcl" ? 3 : 2) < kRegular)
      s = random_scores(eng, 20);
    worst = std::max(worst, check_class_loss(name, s, o));
  }
  report_check(name, worst, out);
}

void gradcheck_re_meta(const GradcheckOpts& o, CheckOutcome& out) {
  std::vector<topc::Strategy> strategies;
  if (o.strategy.empty())
    strategies = {topc::Strategy::best, topc::Strategy::std_only,
                  topc::Strategy::std_mean, topc::Strategy::intra_std};
  else
    strategies = {topc::strategy_from_name(o.strategy)};

  if (!o.features.empty()) {
    const topc::MetaFeatureSet x = topc::io::read_features_csv(o.features);
    const topc::GroupingTable t = topc::io::read_grouping(o.groups);
    if (!regular_features(x, t)) {
      std::printf(
          "re_meta skipped (zero-variance vector or degenerate group)\n");
      return;
    }
    for (topc::Strategy s : strategies) {
      topc::GroupingParams p;
      p.strategy = s;
      const std::string label =
          std::string("re_meta[") + topc::strategy_name(s) + "]";
      report_check(label, check_re_meta(x, t, p, o), out);
    }
    return;
  }

  const topc::GroupingTable t = shaped_groups();
  for (topc::Strategy s : strategies) {
    topc::GroupingParams p;
    p.strategy = s;
    double worst = 0.0;
    for (std::size_t trial = 0; trial < o.trials; ++trial) {
      topc::SimConfig cfg;
      cfg.grouping = t;
      cfg.n_categories = 20;
      cfg.feature_dim = 64;
      std::uint64_t attempt = 0;
      topc::MetaFeatureSet x;
      do {
        cfg.seed = o.seed + 1000 * trial + attempt++;
        x = topc::init_features(cfg);
      } while (!regular_features(x, t));
      worst = std::max(worst, check_re_meta(x, t, p, o));
    }
    const std::string label =
        std::string("re_meta[") + topc::strategy_name(s) + "]";
    report_check(label, worst, out);
  }
}

void run_gradcheck(const GradcheckOpts& o, CheckOutcome& out) {
  if (!o.features.empty() && o.groups.empty())
    throw usage_error("gradcheck: --features requires --groups");
  const std::vector<std::string> class_losses = {"tcl", "tcl2", "bce", "focal",
                                                 "ce"};
  const bool all = o.selector == "all";
  for (const auto& name : class_losses)
    if (all || o.selector == name) gradcheck_class_loss(name, o, out);
  if (all || o.selector == "re_meta") gradcheck_re_meta(o, out);
}

// ----------------------------------------------------------- dispersion ----

struct DispersionOpts {
  std::string file;
  std::string metric = "std";
};

void run_dispersion(const DispersionOpts& o) {
  const topc::io::ApTable table = topc::io::read_ap_csv(o.file);
  const topc::VectorStats vs = topc::vector_stats(table.values);
  std::printf("mean %s\n", fmt9(vs.mean).c_str());
  const auto [lo, hi] =
      std::minmax_element(table.values.begin(), table.values.end());
  const bool all = o.metric == "all";
  if (all || o.metric == "std")
    std::printf("std %s\n", fmt9(vs.stddev).c_str());
  if (all || o.metric == "cv") {
    if (vs.mean == 0.0)
      throw std::invalid_argument("dispersion: cv undefined for zero mean");
    std::printf("cv %s\n", fmt9(100.0 * vs.stddev / vs.mean).c_str());
  }
  if (all || o.metric == "range")
    std::printf("range %s\n", fmt9(*hi - *lo).c_str());
}

// ------------------------------------------------------------- simulate ----

struct SimulateOpts {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double step_size = 0.0;
  bool seed_set = false;
  bool steps_set = false;
  bool step_size_set = false;
};

struct SimFileConfig {
  topc::SimConfig cfg;
  std::size_t hist_bins = 32;
  bool has_hist_range = false;
  double hist_lo = 0.0;
  double hist_hi = 0.0;
};

SimFileConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error(path + ": cannot open config");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!j.is_object())
    throw std::runtime_error(path + ": config must be a JSON object");
  static const std::vector<std::string> known = {
      "grouping_file", "n_categories", "feature_dim", "iterations",
      "step_size",     "seed",         "init_sigma",  "tau",
      "epsilon",       "strategy",     "hist_bins",   "hist_range"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::runtime_error(path + ": unknown config key '" + key + "'");
  if (!j.contains("grouping_file"))
    throw usage_error(path + ": missing required key 'grouping_file'");

  SimFileConfig out;
  try {
    fs::path gpath = j.at("grouping_file").get<std::string>();
    if (gpath.is_relative()) gpath = fs::path(path).parent_path() / gpath;
    if (!fs::exists(gpath))
      throw usage_error(gpath.string() + ": grouping file not found");
    out.cfg.grouping = topc::io::read_grouping(gpath.string());
    out.cfg.feature_dim = j.value("feature_dim", std::size_t{64});
    out.cfg.iterations = j.value("iterations", std::size_t{100});
    out.cfg.step_size = j.value("step_size", 0.01);
    out.cfg.seed = j.value("seed", std::uint64_t{0});
    out.cfg.init_sigma = j.value("init_sigma", 1.0);
    out.cfg.grouping_params.tau = j.value("tau", 1.0);
    out.cfg.grouping_params.epsilon = j.value("epsilon", 0.00005);
    out.cfg.grouping_params.strategy =
        topc::strategy_from_name(j.value("strategy", "S-BEST"));
    std::size_t listed = 0;
    for (const auto& g : out.cfg.grouping.groups) listed += g.size();
    out.cfg.n_categories = j.value("n_categories", listed);
    out.hist_bins = j.value("hist_bins", std::size_t{32});
    if (j.contains("hist_range")) {
      const auto& r = j.at("hist_range");
      if (!r.is_array() || r.size() != 2)
        throw std::runtime_error(path + ": hist_range must be [lo, hi]");
      out.has_hist_range = true;
      out.hist_lo = r[0].get<double>();
      out.hist_hi = r[1].get<double>();
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return out;
}

void write_trace_csv(const fs::path& path,
                     const std::vector<topc::TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << "iteration,loss";
  for (std::size_t g = 0; g < trace.front().w_mean_std.size(); ++g)
    out << ",w_mean_std_g" << g;
  out << ",min_mean_gap,min_std_gap\n";
  for (const auto& row : trace) {
    out << row.iteration << "," << fmt17(row.loss);
    for (double v : row.w_mean_std) out << "," << fmt17(v);
    out << "," << fmt17(row.min_mean_gap) << "," << fmt17(row.min_std_gap)
        << "\n";
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_hist_csv(const fs::path& path, const topc::MetaFeatureSet& x,
                    const std::vector<std::vector<std::size_t>>& counts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << "category";
  for (std::size_t b = 0; b < counts.front().size(); ++b) out << ",bin" << b;
  out << "\n";
  for (std::size_t i = 0; i < x.categories.size(); ++i) {
    out << x.categories[i];
    for (std::size_t c : counts[i]) out << "," << c;
    out << "\n";
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void run_simulate(const SimulateOpts& o) {
  SimFileConfig file_cfg = load_sim_config(o.config);
  topc::SimConfig& cfg = file_cfg.cfg;
  if (o.seed_set) cfg.seed = o.seed;
  if (o.steps_set) cfg.iterations = o.steps;
  if (o.step_size_set) cfg.step_size = o.step_size;

  topc::MetaFeatureSet x;
  const auto trace = topc::run_descent(cfg, &x);

  fs::create_directories(o.out_dir);
  write_trace_csv(fs::path(o.out_dir) / "trace.csv", trace);
  topc::io::write_features_csv((fs::path(o.out_dir) / "features_final.csv").string(), x);

  double lo = file_cfg.hist_lo;
  double hi = file_cfg.hist_hi;
  if (!file_cfg.has_hist_range) {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : x.features)
      for (double v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const auto counts = topc::histogram(x, file_cfg.hist_bins, lo, hi);
  write_hist_csv(fs::path(o.out_dir) / "hist_final.csv", x, counts);

  const topc::TraceRow& first = trace.front();
  const topc::TraceRow& last = trace.back();
  const double w0 = mean_of(first.w_mean_std);
  const double w1 = mean_of(last.w_mean_std);
  std::printf("initial_loss %s\n", fmt9(first.loss).c_str());
  std::printf("final_loss %s\n", fmt9(last.loss).c_str());
  std::printf("initial_mean_w_mean_std %s\n", fmt9(w0).c_str());
  std::printf("final_mean_w_mean_std %s\n", fmt9(w1).c_str());
  if (w0 > 0.0)
    std::printf("compaction_ratio %s\n", fmt9(w1 / w0).c_str());
  else
    std::printf("compaction_ratio nan\n");
}

// ----------------------------------------------------------------- hist ----

struct HistOpts {
  std::string features;
  std::size_t bins = 10;
  std::vector<double> range;
  std::string out;
};

void run_hist(const HistOpts& o) {
  const topc::MetaFeatureSet x = topc::io::read_features_csv(o.features);
  double lo;
  double hi;
  if (!o.range.empty()) {
    lo = o.range[0];
    hi = o.range[1];
  } else {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : x.features)
      for (double v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const auto counts = topc::histogram(x, o.bins, lo, hi);
  if (!o.out.empty()) {
    write_hist_csv(o.out, x, counts);
    return;
  }
  std::printf("category");
  for (std::size_t b = 0; b < counts.front().size(); ++b)
    std::printf(",bin%zu", b);
  std::printf("\n");
  for (std::size_t i = 0; i < x.categories.size(); ++i) {
    std::printf("%s", x.categories[i].c_str());
    for (std::size_t c : counts[i]) std::printf(",%zu", c);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-C classification loss and category-based grouping loss"};
  app.require_subcommand(1);

  LossOpts loss_opts;
  auto* loss_cmd =
      app.add_subcommand("loss", "Evaluate a classification loss on a scores file");
  loss_cmd->add_option("name", loss_opts.name, "One of tcl, tcl2, bce, focal, ce")
      ->required()
      ->check(CLI::IsMember({"tcl", "tcl2", "bce", "focal", "ce"}));
  loss_cmd->add_option("scores", loss_opts.file, "Scores file")
      ->required()
      ->check(CLI::ExistingFile);
  loss_cmd->add_option("--eta", loss_opts.eta, "TCL eta");
  loss_cmd->add_option("--gamma", loss_opts.gamma, "TCL gamma");
  loss_cmd->add_option("--beta-plus", loss_opts.beta_plus, "TCL beta+");
  loss_cmd->add_option("--beta-minus", loss_opts.beta_minus,
                       "TCL per-rank beta- (repeatable, C-1 values)");
  loss_cmd->add_option("--c", loss_opts.c, "TCL top count C");
  loss_cmd->add_option("--gamma-f", loss_opts.gamma_f, "Focal gamma");
  loss_cmd->add_option("--alpha-f", loss_opts.alpha_f, "Focal alpha");
  loss_cmd->add_flag("--gradient", loss_opts.gradient,
                     "Also print the gradient w.r.t. the scores");
  loss_cmd->callback([&] { run_loss(loss_opts); });

  GroupingOpts grouping_opts;
  auto* grouping_cmd = app.add_subcommand(
      "grouping", "Evaluate the grouping loss on a feature matrix");
  grouping_cmd->add_option("features", grouping_opts.features, "Features CSV")
      ->required()
      ->check(CLI::ExistingFile);
  grouping_cmd->add_option("groups", grouping_opts.groups, "Grouping file")
      ->required()
      ->check(CLI::ExistingFile);
  grouping_cmd
      ->add_option("--strategy", grouping_opts.strategy, "Loss strategy")
      ->check(CLI::IsMember(
          {"S-BEST", "S-STD-ONLY", "S-STD-MEAN", "S-INTRA-STD"}));
  grouping_cmd->add_option("--tau", grouping_opts.tau, "tau (>= 1)");
  grouping_cmd->add_option("--epsilon", grouping_opts.epsilon, "epsilon (> 0)");
  grouping_cmd->add_flag("--all-strategies", grouping_opts.all_strategies,
                         "Print the loss under every strategy");
  grouping_cmd->callback([&] { run_grouping(grouping_opts); });

  GradcheckOpts gradcheck_opts;
  CheckOutcome gradcheck_outcome;
  auto* gradcheck_cmd = app.add_subcommand(
      "gradcheck", "Compare analytic gradients against central differences");
  gradcheck_cmd
      ->add_option("selector", gradcheck_opts.selector, "Loss to check")
      ->required()
      ->check(CLI::IsMember(
          {"tcl", "tcl2", "bce", "focal", "ce", "re_meta", "all"}));
  gradcheck_cmd
      ->add_option("--features", gradcheck_opts.features,
                   "Feature matrix to check at (re_meta)")
      ->check(CLI::ExistingFile);
  gradcheck_cmd
      ->add_option("--groups", gradcheck_opts.groups,
                   "Grouping file for --features")
      ->check(CLI::ExistingFile);
  gradcheck_cmd
      ->add_option("--scores", gradcheck_opts.scores,
                   "Scores file to check at (classification losses)")
      ->check(CLI::ExistingFile);
  gradcheck_cmd->add_option("--strategy", gradcheck_opts.strategy,
                            "Only this re_meta strategy")
      ->check(CLI::IsMember(
          {"S-BEST", "S-STD-ONLY", "S-STD-MEAN", "S-INTRA-STD"}));
  gradcheck_cmd->add_option("--seed", gradcheck_opts.seed, "RNG seed");
  gradcheck_cmd->add_option("--trials", gradcheck_opts.trials,
                            "Random instances per loss");
  gradcheck_cmd->add_flag("--corrupt", gradcheck_opts.corrupt)->group("");
  gradcheck_cmd->callback(
      [&] { run_gradcheck(gradcheck_opts, gradcheck_outcome); });

  DispersionOpts dispersion_opts;
  auto* dispersion_cmd = app.add_subcommand(
      "dispersion", "Dispersion of per-class APs from a name,value CSV");
  dispersion_cmd->add_option("aps", dispersion_opts.file, "AP CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  dispersion_cmd
      ->add_option("--metric", dispersion_opts.metric, "Dispersion metric")
      ->check(CLI::IsMember({"std", "cv", "range", "all"}));
  dispersion_cmd->callback([&] { run_dispersion(dispersion_opts); });

  SimulateOpts simulate_opts;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Gradient-descent lab on a synthetic feature set");
  simulate_cmd->add_option("config", simulate_opts.config, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", simulate_opts.out_dir, "Output directory")
      ->required();
  auto* seed_opt =
      simulate_cmd->add_option("--seed", simulate_opts.seed, "Override seed");
  auto* steps_opt = simulate_cmd->add_option("--steps", simulate_opts.steps,
                                             "Override iteration count");
  auto* step_size_opt = simulate_cmd->add_option(
      "--step-size", simulate_opts.step_size, "Override step size");
  simulate_cmd->callback([&] {
    simulate_opts.seed_set = seed_opt->count() > 0;
    simulate_opts.steps_set = steps_opt->count() > 0;
    simulate_opts.step_size_set = step_size_opt->count() > 0;
    run_simulate(simulate_opts);
  });

  HistOpts hist_opts;
  auto* hist_cmd = app.add_subcommand(
      "hist", "Per-category histogram of a feature matrix");
  hist_cmd->add_option("features", hist_opts.features, "Features CSV")
      ->required()
      ->check(CLI::ExistingFile);
  hist_cmd->add_option("--bins", hist_opts.bins, "Bin count");
  hist_cmd->add_option("--range", hist_opts.range, "Bin range: lo hi")
      ->expected(2);
  hist_cmd->add_option("--out", hist_opts.out, "Write CSV here instead of stdout");
  hist_cmd->callback([&] { run_hist(hist_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const usage_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return gradcheck_outcome.failed ? 1 : 0;
}
