#include <set>

#include "doctest.h"
#include "epmotion/model.hpp"

using namespace epmotion;

namespace {

ToyModelSpec spec(int n, Parity p, double omega = 1.0) {
  ToyModelSpec s;
  s.n = n;
  s.omega = omega;
  s.parity = p;
  return s;
}

}  // namespace

TEST_CASE("N=1 sector matrices match the hand-evaluated 2x2 forms") {
  const Complex lambda(0.3, 0.1);
  const double delta = 0.7;

  // odd sector basis {|-1/2,-1/2>, |+1/2,+1/2>}: [[-w, l*d], [l*d, w]]
  const CMatrix h_odd = toy_matrix(spec(1, Parity::Odd), lambda, delta);
  CHECK(std::abs(h_odd(0, 0) - Complex(-1.0, 0.0)) <= 1e-14);
  CHECK(std::abs(h_odd(1, 1) - Complex(1.0, 0.0)) <= 1e-14);
  CHECK(std::abs(h_odd(0, 1) - lambda * delta) <= 1e-14);
  CHECK(std::abs(h_odd(1, 0) - lambda * delta) <= 1e-14);

  // even sector basis {|-1/2,+1/2>, |+1/2,-1/2>}: [[0, l], [l, 0]]
  const CMatrix h_even = toy_matrix(spec(1, Parity::Even), lambda, delta);
  CHECK(std::abs(h_even(0, 0)) <= 1e-14);
  CHECK(std::abs(h_even(1, 1)) <= 1e-14);
  CHECK(std::abs(h_even(0, 1) - lambda) <= 1e-14);
}

TEST_CASE("lambda=0 leaves only the diagonal omega*(I3+J3) term") {
  for (Parity p : {Parity::Odd, Parity::Even}) {
    const ToyModel model(spec(9, p, 1.5));
    const CMatrix h = model.eval(Complex(0.0, 0.0), 0.8);
    for (int i = 0; i < model.dim(); ++i) {
      const double k_val =
          0.5 * (model.basis()[i].first + model.basis()[i].second);
      CHECK(std::abs(h(i, i) - 1.5 * k_val) <= 1e-13);
      for (int j = 0; j < model.dim(); ++j) {
        if (i != j) CHECK(std::abs(h(i, j)) <= 1e-15);
      }
    }
  }
}

TEST_CASE("sector dimension is N+1 and the matrix is exactly symmetric") {
  for (int n : {1, 7, 19}) {
    for (Parity p : {Parity::Odd, Parity::Even}) {
      const ToyModel model(spec(n, p));
      CHECK(model.dim() == n + 1);
      const CMatrix h = model.eval(Complex(0.2, 0.4), 0.6);
      CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("toy matrix is affine in lambda") {
  const ToyModelSpec s = spec(7, Parity::Even);
  const double delta = 0.35;
  const Complex lambda(0.4, -0.2);
  const CMatrix h0 = toy_matrix(s, Complex(0.0, 0.0), delta);
  const CMatrix h1 = toy_matrix(s, Complex(1.0, 0.0), delta);
  const CMatrix expected = h0 + lambda * (h1 - h0);
  const CMatrix actual = toy_matrix(s, lambda, delta);
  CHECK((actual - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("delta=0 Hamiltonian is block diagonal in K = I3+J3") {
  const ToyModel model(spec(19, Parity::Even));
  const CMatrix h = model.eval(Complex(0.7, 0.0), 0.0);
  for (int i = 0; i < model.dim(); ++i) {
    const int ki = model.basis()[i].first + model.basis()[i].second;
    for (int j = 0; j < model.dim(); ++j) {
      const int kj = model.basis()[j].first + model.basis()[j].second;
      if (ki != kj) CHECK(std::abs(h(i, j)) == 0.0);
    }
  }
}

TEST_CASE("all basis states in a sector share the parity of I3+J3") {
  for (Parity p : {Parity::Odd, Parity::Even}) {
    const ToyModel model(spec(9, p));
    std::set<int> parities;
    for (const auto& [two_i3, two_j3] : model.basis()) {
      parities.insert(((two_i3 + two_j3) / 2) & 1);
    }
    CHECK(parities.size() == 1);
  }
}

TEST_CASE("spectrum negation symmetry holds across the sampled examples") {
  CHECK(spectrum_symmetry_check(spec(1, Parity::Odd), Complex(0.5, 0.0), 0.7));
  CHECK(spectrum_symmetry_check(spec(1, Parity::Odd), Complex(0.0, 0.0), 0.3));
  CHECK(spectrum_symmetry_check(spec(19, Parity::Even), Complex(0.4, 0.0), 1.0));
  CHECK(spectrum_symmetry_check(spec(19, Parity::Odd), Complex(0.3, 0.2), 0.5));
}

TEST_CASE("analytic derivatives agree with centered finite differences") {
  const ToyModel model(spec(19, Parity::Odd));
  const DerivativeCheckReport at_complex =
      finite_difference_derivative_check(model, Complex(0.3, 0.2), 0.5);
  CHECK(at_complex.pass);
  CHECK(at_complex.max_rel_err_lambda <= 1e-6);
  CHECK(at_complex.max_rel_err_delta <= 1e-6);
}

TEST_CASE("a deliberately wrong derivative is flagged") {
  struct Corrupted : HamiltonianFamily {
    ToyModel inner{ToyModelSpec{7, 1.0, Parity::Odd}};
    int dim() const override { return inner.dim(); }
    CMatrix eval(Complex l, double d) const override { return inner.eval(l, d); }
    CMatrix d_lambda(Complex l, double d) const override {
      return inner.d_lambda(l, d);
    }
    CMatrix d_delta(Complex l, double d) const override {
      return 2.0 * inner.d_delta(l, d);
    }
  } corrupted;
  const DerivativeCheckReport report =
      finite_difference_derivative_check(corrupted, Complex(0.4, 0.0), 0.6);
  CHECK_FALSE(report.pass);
}

TEST_CASE("spec validation rejects even N and bad parameters") {
  ToyModelSpec bad = spec(4, Parity::Odd);
  CHECK_THROWS_AS(bad.validate(), ContractViolationError);
  ToyModelSpec neg = spec(3, Parity::Odd, -1.0);
  CHECK_THROWS_AS(neg.validate(), ContractViolationError);
}

TEST_CASE("parity strings round-trip") {
  CHECK(parity_from_string("odd") == Parity::Odd);
  CHECK(parity_from_string("even") == Parity::Even);
  CHECK(to_string(Parity::Odd) == "odd");
  CHECK_THROWS_AS(parity_from_string("sideways"), ContractViolationError);
}
