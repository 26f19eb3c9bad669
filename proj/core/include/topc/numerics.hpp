#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace topc {

inline constexpr std::size_t default_feature_dim = 1024;

// Scalar result paired with d(value)/d(input), flattened in the input's order.
struct GradedValue {
  double value = 0.0;
  std::vector<double> gradient;
};

// Population mean and standard deviation of one feature vector.
struct VectorStats {
  double mean = 0.0;
  double stddev = 0.0;
};

VectorStats vector_stats(const std::vector<double>& x);

// log(eta + exp(z)) and its derivative, stable for large z.
double log_eta_exp(double eta, double z);
double log_eta_exp_grad(double eta, double z);

// Central differences (f(x + h e_k) - f(x - h e_k)) / 2h per coordinate.
std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h = 1e-5);

// max_k |a_k - n_k| / max(1, |a_k|, |n_k|)
double relative_gradient_error(const std::vector<double>& analytic,
                               const std::vector<double>& numeric);

}  // namespace topc
