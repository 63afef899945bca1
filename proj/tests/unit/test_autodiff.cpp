#include <cmath>
#include <random>

#include "doctest.h"
#include "gsaudio/core/gradcheck.hpp"
#include "gsaudio/core/linear.hpp"
#include "gsaudio/core/tape.hpp"
#include "gsaudio/error.hpp"

using namespace gsaudio;
using namespace gsaudio::core;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t = Tensor::zeros(r, c);
  for (double& x : t.data()) x = dist(rng);
  return t;
}

// Values bounded away from zero so relu/abs kinks stay out of the stencil.
Tensor away_from_zero(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Tensor t = random_tensor(r, c, rng, 0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  for (double& x : t.data())
    if (sign(rng)) x = -x;
  return t;
}

// Wraps a graph builder as a ScalarFunction of one parameter.
ScalarFunction as_function(std::function<Var(Var)> build) {
  return [build](const Tensor& x, Tensor* grad) {
    Tape tape;
    Var p = tape.parameter(ParamId{0}, x);
    Var out = build(p);
    const double value = out.value().item();
    if (grad) *grad = tape.backward(out).at(ParamId{0});
    return value;
  };
}

}  // namespace

TEST_CASE("polynomial and sigmoid derivatives") {
  Tape tape;
  Var x = tape.parameter(ParamId{1}, Tensor::scalar(3.0));
  auto g = tape.backward(x * x);
  CHECK(g.at(ParamId{1}).item() == doctest::Approx(6.0));

  Tape t2;
  Var z = t2.parameter(ParamId{0}, Tensor::scalar(0.0));
  CHECK(t2.backward(sigmoid(z)).at(ParamId{0}).item() == doctest::Approx(0.25));
}

TEST_CASE("seed shape must match the output") {
  Tape tape;
  Var x = tape.parameter(ParamId{0}, Tensor::zeros(2, 3));
  Var y = relu(x);
  CHECK_THROWS_AS(tape.backward(y, Tensor::zeros(3, 2)), ContractViolation);
}

TEST_CASE("constants receive no gradient entry") {
  Tape tape;
  Var c = tape.constant(Tensor::scalar(2.0));
  Var p = tape.parameter(ParamId{4}, Tensor::scalar(5.0));
  auto g = tape.backward(c * p);
  CHECK(g.size() == 1);
  CHECK(g.at(ParamId{4}).item() == doctest::Approx(2.0));
}

TEST_CASE("two-layer perceptron gradients match central differences") {
  std::mt19937_64 rng(2024);
  Linear l1 = Linear::uniform(8, 16, rng);
  Linear l2 = Linear::uniform(16, 1, rng);
  const Tensor input = random_tensor(1, 8, rng);

  // Check the first-layer weights through the whole network.
  ScalarFunction f = [&](const Tensor& w1, Tensor* grad) {
    Tape tape;
    Var W = tape.parameter(ParamId{0}, w1);
    Var x = tape.constant(input);
    Var h = relu(matmul(x, W) + tape.constant(l1.bias));
    Var y = matmul(h, tape.constant(l2.weight)) + tape.constant(l2.bias);
    if (grad) *grad = tape.backward(y).at(ParamId{0});
    return y.value().item();
  };
  CHECK(finite_difference_check(f, l1.weight, 1e-5) < 1e-4);
}

TEST_CASE("every primitive is exact against central differences") {
  std::mt19937_64 rng(99);
  const Tensor A = away_from_zero(3, 4, rng);
  const Tensor B = random_tensor(4, 2, rng);
  const Tensor row = random_tensor(1, 4, rng);
  const Tensor col = random_tensor(3, 1, rng);
  const Tensor same = random_tensor(3, 4, rng);
  const double tol = 1e-6;

  auto check = [&](const char* name, std::function<Var(Var)> build, const Tensor& at) {
    CAPTURE(name);
    CHECK(finite_difference_check(as_function(build), at, 1e-5) < tol);
  };

  check("matmul-lhs", [&](Var p) { return sum(matmul(p, p.tape().constant(B))); }, A);
  check("matmul-rhs", [&](Var p) { return sum(matmul(p.tape().constant(A), p)); }, B);
  check("add", [&](Var p) { return sum(square(p + p.tape().constant(same))); }, A);
  check("broadcast-add-row", [&](Var p) { return sum(square(p.tape().constant(same) + p)); }, row);
  check("broadcast-add-col", [&](Var p) { return sum(square(p.tape().constant(same) + p)); }, col);
  check("sub", [&](Var p) { return sum(square(p.tape().constant(same) - p)); }, A);
  check("mul", [&](Var p) { return sum(p * p.tape().constant(same)); }, A);
  check("mul-broadcast-col", [&](Var p) { return sum(square(p * p.tape().constant(same))); }, col);
  check("scale", [&](Var p) { return sum(square(-2.5 * p)); }, A);
  check("relu", [&](Var p) { return sum(square(relu(p))); }, A);
  check("sigmoid", [&](Var p) { return sum(sigmoid(p)); }, A);
  check("square", [&](Var p) { return sum(square(p)); }, A);
  check("abs", [&](Var p) { return sum(square(abs(p))); }, A);
  check("concat", [&](Var p) {
    Var parts[] = {p, p.tape().constant(same), square(p)};
    return sum(square(concat_cols(parts)));
  }, A);
  check("mean_rows", [&](Var p) { return sum(square(mean_rows(p))); }, A);
  check("mean", [&](Var p) { return square(mean(p)); }, A);
  check("row_prod", [&](Var p) { return sum(row_prod(p)); }, A);
  check("gather_rows", [&](Var p) { return sum(square(gather_rows(p, {2, 0, 2}))); }, A);
}

TEST_CASE("row product gradient handles exact zeros") {
  Tape tape;
  Var p = tape.parameter(ParamId{0}, Tensor({1, 3}, {0.0, 2.0, 3.0}));
  auto g = tape.backward(sum(row_prod(p))).at(ParamId{0});
  CHECK(g[0] == 6.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
}

TEST_CASE("backward is linear in the output") {
  std::mt19937_64 rng(5);
  const Tensor w = random_tensor(4, 3, rng);
  const Tensor x = random_tensor(2, 4, rng);
  const double a = 0.7, b = -1.9;

  auto grads = [&](double ca, double cb) {
    Tape tape;
    Var W = tape.parameter(ParamId{0}, w);
    Var h = matmul(tape.constant(x), W);
    Var f = sum(square(h));
    Var g = sum(sigmoid(h));
    Var out = ca * f + cb * g;
    return tape.backward(out).at(ParamId{0});
  };
  const Tensor combined = grads(a, b);
  const Tensor gf = grads(1.0, 0.0);
  const Tensor gg = grads(0.0, 1.0);
  for (std::size_t i = 0; i < combined.size(); ++i)
    CHECK(std::fabs(combined[i] - (a * gf[i] + b * gg[i])) < 1e-12);
}

TEST_CASE("forward values and gradients are bit-identical on repeat") {
  auto run = [] {
    std::mt19937_64 rng(11);
    Linear l = Linear::uniform(55, 64, rng);
    Tensor x = random_tensor(40, 55, rng);
    Tape tape;
    ParamBinder binder(tape);
    binder.track(l.weight, ParamId{0});
    binder.track(l.bias, ParamId{1});
    Var y = mean(square(relu(apply(l, tape.constant(x), binder))));
    auto g = tape.backward(y);
    return std::make_pair(y.value().item(), g.at(ParamId{0}));
  };
  auto r1 = run();
  auto r2 = run();
  CHECK(r1.first == r2.first);
  CHECK(r1.second == r2.second);
}

TEST_CASE("finite_difference_check reference cases") {
  ScalarFunction sum_fn = [](const Tensor& x, Tensor* grad) {
    double s = 0;
    for (double v : x.data()) s += v;
    if (grad) grad->fill(1.0);
    return s;
  };
  CHECK(finite_difference_check(sum_fn, Tensor::row({0.3, -1.0, 7.0}), 1e-5) < 1e-10);

  ScalarFunction sq = [](const Tensor& x, Tensor* grad) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += x[i] * x[i];
      if (grad) (*grad)[i] = 2 * x[i];
    }
    return s;
  };
  CHECK(finite_difference_check(sq, Tensor::row({1, 2, 3}), 1e-5) < 1e-7);

  ScalarFunction bad = [](const Tensor&, Tensor*) { return std::nan(""); };
  CHECK_THROWS_AS(finite_difference_check(bad, Tensor::scalar(1.0), 1e-5), NumericError);
  CHECK_THROWS_AS(finite_difference_check(sq, Tensor::scalar(1.0), 0.0), ContractViolation);
}

TEST_CASE("non-finite values are rejected at the operation that makes them") {
  Tape tape;
  Var x = tape.constant(Tensor::scalar(1e200));
  CHECK_THROWS_AS(square(x), NumericError);
}
