#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "epmotion/oracle.hpp"

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

TEST_CASE("N=1 odd sweep matches the closed-form eigenvalues") {
  const ToyModel model(spec(1, Parity::Odd));
  const std::vector<double> lambdas = {0.0, 0.3, 0.7, 1.0};
  const std::vector<double> deltas = {0.2, 0.9};
  const SpectrumSweep sweep = sweep_spectrum(model, lambdas, deltas);
  REQUIRE(sweep.energies.size() == deltas.size());
  for (size_t d = 0; d < deltas.size(); ++d) {
    for (size_t l = 0; l < lambdas.size(); ++l) {
      const double expected =
          std::sqrt(1.0 + lambdas[l] * lambdas[l] * deltas[d] * deltas[d]);
      REQUIRE(sweep.energies[d][l].size() == 2);
      CHECK(std::abs(sweep.energies[d][l][0] + expected) <= 1e-12);
      CHECK(std::abs(sweep.energies[d][l][1] - expected) <= 1e-12);
    }
  }
}

TEST_CASE("lambda=0 column is delta-independent") {
  const ToyModel model(spec(9, Parity::Even));
  const SpectrumSweep sweep = sweep_spectrum(model, {0.0}, {0.0, 0.5, 1.0});
  for (size_t d = 1; d < sweep.delta_values.size(); ++d) {
    CHECK((sweep.energies[d][0] - sweep.energies[0][0]).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("real-lambda toy spectra are symmetric under negation") {
  const ToyModel model(spec(19, Parity::Odd));
  const SpectrumSweep sweep =
      sweep_spectrum(model, {0.1, 0.45, 0.8}, {0.0, 0.6, 1.0});
  for (const auto& row : sweep.energies) {
    for (const CVector& eigs : row) {
      for (Eigen::Index k = 0; k < eigs.size(); ++k) {
        double best = 1e300;
        for (Eigen::Index j = 0; j < eigs.size(); ++j) {
          best = std::min(best, std::abs(eigs[k] + eigs[j]));
        }
        CHECK(best <= 1e-10);
      }
    }
  }
}

TEST_CASE("delta=0 sweep reproduces the block-analytic straight lines") {
  const ToyModel model(spec(19, Parity::Even));
  const std::vector<double> lambdas = {0.1, 0.35, 0.62, 0.97};
  const SpectrumSweep sweep = sweep_spectrum(model, lambdas, {0.0});

  // Straight lines E = omega*K + lambda*t with t an eigenvalue of the
  // lambda-coupling restricted to the K block.
  std::vector<std::vector<int>> blocks;
  std::vector<double> block_k;
  for (int i = 0; i < model.dim(); ++i) {
    const double k_val =
        0.5 * (model.basis()[i].first + model.basis()[i].second);
    bool found = false;
    for (size_t b = 0; b < block_k.size(); ++b) {
      if (std::abs(block_k[b] - k_val) < 1e-12) {
        blocks[b].push_back(i);
        found = true;
      }
    }
    if (!found) {
      block_k.push_back(k_val);
      blocks.push_back({i});
    }
  }
  for (size_t l = 0; l < lambdas.size(); ++l) {
    std::vector<double> expected;
    for (size_t b = 0; b < blocks.size(); ++b) {
      RMatrix sub(blocks[b].size(), blocks[b].size());
      for (size_t p = 0; p < blocks[b].size(); ++p)
        for (size_t q = 0; q < blocks[b].size(); ++q)
          sub(p, q) = model.v0()(blocks[b][p], blocks[b][q]);
      Eigen::SelfAdjointEigenSolver<RMatrix> solver(sub);
      for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        expected.push_back(block_k[b] + lambdas[l] * solver.eigenvalues()[k]);
      }
    }
    std::sort(expected.begin(), expected.end());
    for (size_t k = 0; k < expected.size(); ++k) {
      CHECK(std::abs(sweep.energies[0][l][k].real() - expected[k]) <= 1e-10);
      CHECK(std::abs(sweep.energies[0][l][k].imag()) <= 1e-10);
    }
  }
}

TEST_CASE("locate_ep finds the closed-form N=1 odd exceptional point") {
  const ToyModel model(spec(1, Parity::Odd));
  const EpCandidate at_one = locate_ep(model, 1.0, Complex(0.0, 0.9));
  CHECK(std::abs(at_one.lambda - Complex(0.0, 1.0)) <= 1e-8);
  CHECK(at_one.gap <= 1e-8 * 2.0);
  CHECK(at_one.condition <= 1e-4);

  const EpCandidate at_half = locate_ep(model, 0.5, Complex(0.0, 1.8));
  CHECK(std::abs(at_half.lambda - Complex(0.0, 2.0)) <= 1e-7);
}

TEST_CASE("locate_ep is stable under seed perturbation") {
  const ToyModel model(spec(1, Parity::Odd));
  const EpCandidate base = locate_ep(model, 1.0, Complex(0.0, 0.9));
  const EpCandidate moved =
      locate_ep(model, 1.0, base.lambda + Complex(1e-3, -1e-3));
  CHECK(std::abs(moved.lambda - base.lambda) <= 1e-8);
}

TEST_CASE("locate_ep rejects a diagonalizable crossing") {
  // N=1 even sector: H = [[0, l], [l, 0]] degenerates at lambda=0 but stays
  // diagonalizable there, so the locator must refuse to call it an EP.
  const ToyModel model(spec(1, Parity::Even));
  CHECK_THROWS_AS(locate_ep(model, 0.5, Complex(0.1, 0.0)), Error);
  try {
    locate_ep(model, 0.5, Complex(0.1, 0.0));
  } catch (const NotAnEpError&) {
  } catch (const EpNotFoundError&) {
  }
}

TEST_CASE("validate_trajectory recovers the analytic N=1 trajectory") {
  const ToyModel model(spec(1, Parity::Odd));
  TrajectoryRecord record;
  for (double delta : {0.5, 0.7, 0.9, 1.0}) {
    TrajectorySample s;
    s.delta = delta;
    s.lambda = Complex(0.0, 1.0 / delta);
    record.samples.push_back(s);
  }
  const std::vector<ValidationPoint> points =
      validate_trajectory(record, model, {0.5, 0.9, 1.0});
  REQUIRE(points.size() == 3);
  for (const auto& p : points) {
    CHECK(p.discrepancy <= 1e-6);
    CHECK(p.condition <= 1e-4);
  }
}
