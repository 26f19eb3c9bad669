#include "topc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace topc {

VectorStats vector_stats(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("vector_stats: empty vector");
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) {
    const double d = v - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

double log_eta_exp(double eta, double z) {
  if (z > 0.0) return z + std::log1p(eta * std::exp(-z));
  return std::log(eta + std::exp(z));
}

double log_eta_exp_grad(double eta, double z) {
  if (z > 0.0) return 1.0 / (1.0 + eta * std::exp(-z));
  const double e = std::exp(z);
  return e / (eta + e);
}

std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be positive");
  std::vector<double> probe = x;
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = probe[k];
    probe[k] = orig + h;
    const double up = f(probe);
    probe[k] = orig - h;
    const double down = f(probe);
    probe[k] = orig;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw std::runtime_error(
          "finite_diff_gradient: non-finite evaluation at coordinate " +
          std::to_string(k));
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_gradient_error(const std::vector<double>& analytic,
                               const std::vector<double>& numeric) {
  if (analytic.size() != numeric.size())
    throw std::invalid_argument("relative_gradient_error: length mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double denom =
        std::max({1.0, std::abs(analytic[k]), std::abs(numeric[k])});
    worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / denom);
  }
  return worst;
}

}  // namespace topc
