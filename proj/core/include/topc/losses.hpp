#pragma once

#include <cstddef>
#include <vector>

#include "topc/numerics.hpp"

namespace topc {

// Per-class prediction scores in [0,1] plus the true-label index.
struct ClassScores {
  std::vector<double> scores;
  std::size_t true_label = 0;
};

struct TclParams {
  double beta_plus = 1.0;
  std::vector<double> beta_minus = {0.5};  // one threshold per rank, C-1 entries
  double eta = 1.0;
  double gamma = 1.0;
  std::size_t c = 2;
};

struct LossWeights {
  double alpha = 1.0;
  double omega = 6.0;
  double lambda = 1.0;
};

// Indices of the `count` highest-scoring classes other than the true label,
// descending by score, ties broken by ascending index.
std::vector<std::size_t> top_false_classes(const ClassScores& s, std::size_t count);

// Gradients are taken with respect to the full scores vector. The top-false
// selection is held fixed, so non-selected false classes get gradient 0.
GradedValue tcl_loss(const ClassScores& s, const TclParams& p);
GradedValue tcl2_loss(const ClassScores& s, const TclParams& p);

GradedValue bce_loss(const ClassScores& s);
GradedValue focal_loss(const ClassScores& s, double gamma_f = 2.0,
                       double alpha_f = 0.25);
GradedValue cross_entropy_loss(const ClassScores& s);

// alpha * l_cls + omega * l_re_meta + lambda * l_loc
double combined_loss(double l_cls, double l_re_meta, double l_loc,
                     const LossWeights& w = {});

}  // namespace topc
