#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "topc/losses.hpp"
#include "topc/numerics.hpp"

using topc::ClassScores;
using topc::TclParams;

namespace {

double fd_check(const topc::GradedValue& analytic, const ClassScores& s,
                const std::function<double(const ClassScores&)>& f) {
  const auto numeric = topc::finite_diff_gradient(
      [&](const std::vector<double>& v) { return f({v, s.true_label}); },
      s.scores);
  return topc::relative_gradient_error(analytic.gradient, numeric);
}

}  // namespace

TEST_CASE("top_false_classes ranks by score, ties by index") {
  const ClassScores s{{0.9, 0.2, 0.8, 0.5}, 0};
  CHECK(topc::top_false_classes(s, 1) == std::vector<std::size_t>{2});
  CHECK(topc::top_false_classes(s, 3) == std::vector<std::size_t>{2, 3, 1});
  const ClassScores tie{{0.5, 0.7, 0.7, 0.7}, 0};
  CHECK(topc::top_false_classes(tie, 2) == std::vector<std::size_t>{1, 2});
  CHECK_THROWS_AS(topc::top_false_classes(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(topc::top_false_classes(s, 4), std::invalid_argument);
}

TEST_CASE("tcl2 hits the saturated spot value") {
  // P_t = 1, F_t = beta_minus: both terms collapse to ln 2
  const auto r = topc::tcl2_loss({{1.0, 0.5}, 0}, {});
  CHECK(std::abs(r.value - 1.3862943611198906) < 1e-12);
}

TEST_CASE("tcl2 mid-range value and gradient") {
  const auto r = topc::tcl2_loss({{0.5, 0.5}, 0}, {});
  CHECK(std::abs(r.value - 1.6672241647400519) < 1e-12);
  REQUIRE(r.gradient.size() == 2);
  CHECK(std::abs(r.gradient[0] - -0.6224593312018546) < 1e-12);
  CHECK(std::abs(r.gradient[1] - 0.5) < 1e-12);

  const auto m = topc::tcl2_loss({{0.7, 0.3}, 0}, {});
  CHECK(std::abs(m.gradient[0] - -0.5744425168116589) < 1e-12);
  CHECK(std::abs(m.gradient[1] - 0.45016600268752216) < 1e-12);
}

TEST_CASE("tcl equals tcl2 at C=2 and extends per rank") {
  const ClassScores s{{0.6, 0.4, 0.3, 0.2}, 0};
  const auto a = topc::tcl_loss(s, {});
  const auto b = topc::tcl2_loss(s, {});
  CHECK(a.value == b.value);
  CHECK(a.gradient == b.gradient);

  TclParams p3;
  p3.c = 3;
  p3.beta_minus = {0.5, 0.5};
  const auto c3 = topc::tcl_loss(s, p3);
  CHECK(c3.value > b.value);  // one extra nonnegative log term
  CHECK(c3.gradient[1] > 0.0);
  CHECK(c3.gradient[2] > 0.0);
  CHECK(c3.gradient[3] == 0.0);  // not selected
  CHECK(c3.gradient[0] < 0.0);
}

TEST_CASE("tcl ignores scores outside the selected top set") {
  const ClassScores a{{0.9, 0.8, 0.3, 0.2}, 0};
  ClassScores b = a;
  b.scores[3] = 0.25;  // still below the selected false class
  const auto ra = topc::tcl2_loss(a, {});
  const auto rb = topc::tcl2_loss(b, {});
  CHECK(ra.value == rb.value);
  CHECK(ra.gradient == rb.gradient);
}

TEST_CASE("tcl value stays above C ln eta") {
  TclParams p;
  p.eta = 1.0;  // bound is 0
  for (double t : {0.1, 0.5, 0.9})
    CHECK(topc::tcl2_loss({{t, 1.0 - t}, 0}, p).value > 0.0);
}

TEST_CASE("tcl monotone in the anchor scores") {
  double prev_p = topc::tcl2_loss({{0.0, 0.5}, 0}, {}).value;
  double prev_f = topc::tcl2_loss({{0.7, 0.0}, 0}, {}).value;
  for (int i = 1; i <= 20; ++i) {
    const double t = i / 20.0;
    const double vp = topc::tcl2_loss({{t, 0.5}, 0}, {}).value;
    const double vf = topc::tcl2_loss({{0.7, t}, 0}, {}).value;
    CHECK(vp < prev_p);
    CHECK(vf > prev_f);
    prev_p = vp;
    prev_f = vf;
  }
}

TEST_CASE("tcl parameter validation") {
  const ClassScores s{{0.6, 0.4}, 0};
  TclParams p;
  p.c = 3;
  CHECK_THROWS_AS(topc::tcl_loss(s, p), std::invalid_argument);  // C > N
  p = {};
  p.eta = 0.0;
  CHECK_THROWS_AS(topc::tcl_loss(s, p), std::invalid_argument);
  p = {};
  p.gamma = -1.0;
  CHECK_THROWS_AS(topc::tcl_loss(s, p), std::invalid_argument);
  p = {};
  p.beta_plus = 1.5;
  CHECK_THROWS_AS(topc::tcl_loss(s, p), std::invalid_argument);
  p = {};
  p.beta_minus = {0.5, 0.5};  // wrong count for C=2
  CHECK_THROWS_AS(topc::tcl_loss(s, p), std::invalid_argument);
  p = {};
  p.beta_minus = {-0.1};
  CHECK_THROWS_AS(topc::tcl_loss(s, p), std::invalid_argument);
  p = {};
  CHECK_THROWS_AS(topc::tcl2_loss(s, [] {
                    TclParams q;
                    q.c = 3;
                    q.beta_minus = {0.5, 0.5};
                    return q;
                  }()),
                  std::invalid_argument);
}

TEST_CASE("score validation is shared by every loss") {
  CHECK_THROWS_AS(topc::bce_loss({{0.5}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(topc::bce_loss({{0.5, 0.5}, 2}), std::invalid_argument);
  CHECK_THROWS_AS(topc::bce_loss({{0.5, 1.1}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(topc::bce_loss({{0.5, -0.1}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(topc::focal_loss({{0.5, std::nan("")}, 0}),
                  std::invalid_argument);
}

TEST_CASE("bce spot value and gradient") {
  const auto r = topc::bce_loss({{0.9, 0.2}, 0});
  CHECK(std::abs(r.value - 0.328504066972036) < 1e-12);
  CHECK(std::abs(r.gradient[0] - -1.1111111111111112) < 1e-12);
  CHECK(std::abs(r.gradient[1] - 1.25) < 1e-12);
}

TEST_CASE("bce clamps at the boundary and zeroes the gradient there") {
  const auto r = topc::bce_loss({{1.0, 0.0}, 0});
  CHECK(r.value < 1e-11);
  CHECK(r.gradient[0] == 0.0);
  CHECK(r.gradient[1] == 0.0);
}

TEST_CASE("focal spot value and gradient") {
  const auto r = topc::focal_loss({{0.9, 0.2}, 0});
  CHECK(std::abs(r.value - 0.0069577078285708539) < 1e-12);
  CHECK(std::abs(r.gradient[0] - -0.0080458035606690882) < 1e-12);
  CHECK(std::abs(r.gradient[1] - 0.10444306539426289) < 1e-12);
}

TEST_CASE("focal with gamma_f=0 is alpha-weighted bce") {
  const ClassScores s{{0.7, 0.4, 0.3}, 1};
  const auto f = topc::focal_loss(s, 0.0, 0.5);
  const auto b = topc::bce_loss(s);
  CHECK(std::abs(f.value - 0.5 * b.value) < 1e-12);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(f.gradient[i] - 0.5 * b.gradient[i]) < 1e-12);
}

TEST_CASE("focal parameter validation") {
  const ClassScores s{{0.6, 0.4}, 0};
  CHECK_THROWS_AS(topc::focal_loss(s, -1.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(topc::focal_loss(s, 2.0, 1.5), std::invalid_argument);
}

TEST_CASE("cross entropy spot value and gradient identities") {
  const auto r = topc::cross_entropy_loss({{1.0, 0.0}, 0});
  CHECK(std::abs(r.value - 0.3132616875182228) < 1e-12);
  const double sig = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(std::abs(r.gradient[0] - (sig - 1.0)) < 1e-12);
  CHECK(std::abs(r.gradient[1] - (1.0 - sig)) < 1e-12);

  const auto u = topc::cross_entropy_loss({{0.5, 0.5}, 1});
  CHECK(std::abs(u.value - 0.6931471805599453) < 1e-12);

  // softmax gradient mass cancels
  const auto m = topc::cross_entropy_loss({{0.8, 0.1, 0.4, 0.6}, 2});
  double sum = 0.0;
  for (double g : m.gradient) sum += g;
  CHECK(std::abs(sum) < 1e-15);
}

TEST_CASE("analytic gradients track central differences") {
  const ClassScores s{{0.62, 0.41, 0.23, 0.87, 0.15}, 3};
  CHECK(fd_check(topc::bce_loss(s), s, [](const ClassScores& v) {
          return topc::bce_loss(v).value;
        }) < 1e-6);
  CHECK(fd_check(topc::focal_loss(s), s, [](const ClassScores& v) {
          return topc::focal_loss(v).value;
        }) < 1e-6);
  CHECK(fd_check(topc::cross_entropy_loss(s), s, [](const ClassScores& v) {
          return topc::cross_entropy_loss(v).value;
        }) < 1e-6);
  TclParams p3;
  p3.c = 3;
  p3.beta_minus = {0.5, 0.4};
  CHECK(fd_check(topc::tcl_loss(s, p3), s, [&](const ClassScores& v) {
          return topc::tcl_loss(v, p3).value;
        }) < 1e-6);
}

TEST_CASE("combined loss weighting") {
  CHECK(topc::combined_loss(2.0, 0.5, 1.0) == 2.0 + 6.0 * 0.5 + 1.0);
  CHECK(topc::combined_loss(1.0, 1.0, 1.0, {2.0, 0.0, 3.0}) == 5.0);
  CHECK_THROWS_AS(topc::combined_loss(std::nan(""), 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(topc::combined_loss(0.0, 0.0, 0.0, {-1.0, 6.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("default weights and thresholds") {
  const topc::LossWeights w;
  CHECK(w.alpha == 1.0);
  CHECK(w.omega == 6.0);
  CHECK(w.lambda == 1.0);
  const TclParams p;
  CHECK(p.beta_plus == 1.0);
  CHECK(p.beta_minus == std::vector<double>{0.5});
  CHECK(p.eta == 1.0);
  CHECK(p.gamma == 1.0);
  CHECK(p.c == 2);
}
