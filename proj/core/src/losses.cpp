#include "topc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topc {
namespace {

constexpr double kLogClamp = 1e-12;

void validate_scores(const ClassScores& s) {
  if (s.scores.size() < 2)
    throw std::invalid_argument("scores: need at least 2 classes");
  if (s.true_label >= s.scores.size())
    throw std::invalid_argument("scores: true_label out of range");
  for (double v : s.scores)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("scores: entries must lie in [0,1]");
}

void validate_tcl(const ClassScores& s, const TclParams& p) {
  if (p.c < 2 || p.c > s.scores.size())
    throw std::invalid_argument("tcl: C must satisfy 2 <= C <= N");
  if (p.beta_minus.size() != p.c - 1)
    throw std::invalid_argument("tcl: beta_minus needs exactly C-1 entries");
  if (!(p.eta > 0.0) || !(p.gamma > 0.0))
    throw std::invalid_argument("tcl: eta and gamma must be positive");
  if (!(p.beta_plus >= 0.0 && p.beta_plus <= 1.0))
    throw std::invalid_argument("tcl: beta_plus must lie in [0,1]");
  for (double b : p.beta_minus)
    if (!(b >= 0.0 && b <= 1.0))
      throw std::invalid_argument("tcl: beta_minus entries must lie in [0,1]");
}

}  // namespace

std::vector<std::size_t> top_false_classes(const ClassScores& s,
                                           std::size_t count) {
  validate_scores(s);
  const std::size_t n = s.scores.size();
  if (count < 1 || count > n - 1)
    throw std::invalid_argument("top_false_classes: count out of range");
  std::vector<std::size_t> idx;
  idx.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (i != s.true_label) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] > s.scores[b];
  });
  idx.resize(count);
  return idx;
}

GradedValue tcl_loss(const ClassScores& s, const TclParams& p) {
  validate_scores(s);
  validate_tcl(s, p);
  const auto ranked = top_false_classes(s, p.c - 1);
  GradedValue out;
  out.gradient.assign(s.scores.size(), 0.0);
  const double zp = p.gamma * (p.beta_plus - s.scores[s.true_label]);
  out.value = log_eta_exp(p.eta, zp);
  out.gradient[s.true_label] = -p.gamma * log_eta_exp_grad(p.eta, zp);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const double zf = p.gamma * (s.scores[ranked[r]] - p.beta_minus[r]);
    out.value += log_eta_exp(p.eta, zf);
    out.gradient[ranked[r]] = p.gamma * log_eta_exp_grad(p.eta, zf);
  }
  return out;
}

GradedValue tcl2_loss(const ClassScores& s, const TclParams& p) {
  if (p.c != 2) throw std::invalid_argument("tcl2: C must be 2");
  return tcl_loss(s, p);
}

GradedValue bce_loss(const ClassScores& s) {
  validate_scores(s);
  GradedValue out;
  out.gradient.assign(s.scores.size(), 0.0);
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool is_true = i == s.true_label;
    const double p = is_true ? s.scores[i] : 1.0 - s.scores[i];
    const double q = std::clamp(p, kLogClamp, 1.0 - kLogClamp);
    out.value -= std::log(q);
    if (p > kLogClamp && p < 1.0 - kLogClamp)
      out.gradient[i] = (is_true ? -1.0 : 1.0) / q;
  }
  return out;
}

GradedValue focal_loss(const ClassScores& s, double gamma_f, double alpha_f) {
  validate_scores(s);
  if (!(gamma_f >= 0.0))
    throw std::invalid_argument("focal: gamma_f must be nonnegative");
  if (!(alpha_f >= 0.0 && alpha_f <= 1.0))
    throw std::invalid_argument("focal: alpha_f must lie in [0,1]");
  GradedValue out;
  out.gradient.assign(s.scores.size(), 0.0);
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool is_true = i == s.true_label;
    const double p = is_true ? s.scores[i] : 1.0 - s.scores[i];
    const double w = is_true ? alpha_f : 1.0 - alpha_f;
    const double q = std::clamp(p, kLogClamp, 1.0 - kLogClamp);
    const double mod = gamma_f == 0.0 ? 1.0 : std::pow(1.0 - q, gamma_f);
    out.value -= w * mod * std::log(q);
    if (p > kLogClamp && p < 1.0 - kLogClamp) {
      // d/dq of -(1-q)^g ln q
      const double ddq =
          gamma_f == 0.0
              ? -1.0 / q
              : gamma_f * std::pow(1.0 - q, gamma_f - 1.0) * std::log(q) -
                    mod / q;
      out.gradient[i] = w * (is_true ? 1.0 : -1.0) * ddq;
    }
  }
  return out;
}

GradedValue cross_entropy_loss(const ClassScores& s) {
  validate_scores(s);
  const std::size_t n = s.scores.size();
  const double top = *std::max_element(s.scores.begin(), s.scores.end());
  std::vector<double> soft(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    soft[i] = std::exp(s.scores[i] - top);
    z += soft[i];
  }
  for (double& v : soft) v /= z;
  GradedValue out;
  out.value = -std::log(std::max(soft[s.true_label], kLogClamp));
  out.gradient.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    out.gradient[i] = soft[i] - (i == s.true_label ? 1.0 : 0.0);
  return out;
}

double combined_loss(double l_cls, double l_re_meta, double l_loc,
                     const LossWeights& w) {
  if (!std::isfinite(l_cls) || !std::isfinite(l_re_meta) ||
      !std::isfinite(l_loc))
    throw std::invalid_argument("combined_loss: inputs must be finite");
  if (!(w.alpha >= 0.0) || !(w.omega >= 0.0) || !(w.lambda >= 0.0) ||
      !std::isfinite(w.alpha) || !std::isfinite(w.omega) ||
      !std::isfinite(w.lambda))
    throw std::invalid_argument(
        "combined_loss: weights must be nonnegative and finite");
  return w.alpha * l_cls + w.omega * l_re_meta + w.lambda * l_loc;
}

}  // namespace topc
