#include "epmotion/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epmotion {

namespace {

CVector sorted_eigenvalues(const CMatrix& h) {
  Eigen::ComplexEigenSolver<CMatrix> solver(h, /*computeEigenvectors=*/false);
  std::vector<Complex> eigs(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + h.rows());
  std::sort(eigs.begin(), eigs.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return Eigen::Map<CVector>(eigs.data(), static_cast<Eigen::Index>(eigs.size()));
}

struct GapProbe {
  Complex squared_gap;   // (E_a - E_b)^2 for the closest pair
  double gap;
  double diameter;
  int pair_a = 0, pair_b = 0;
  Complex pair_mean;
};

GapProbe probe_gap(const HamiltonianFamily& family, double delta,
                   Complex lambda) {
  const CVector eigs = sorted_eigenvalues(family.eval(lambda, delta));
  GapProbe out;
  double best = std::numeric_limits<double>::max();
  out.diameter = 0.0;
  for (Eigen::Index p = 0; p < eigs.size(); ++p) {
    for (Eigen::Index q = p + 1; q < eigs.size(); ++q) {
      const double d = std::abs(eigs[p] - eigs[q]);
      out.diameter = std::max(out.diameter, d);
      if (d < best) {
        best = d;
        out.pair_a = static_cast<int>(p);
        out.pair_b = static_cast<int>(q);
        out.squared_gap = (eigs[p] - eigs[q]) * (eigs[p] - eigs[q]);
        out.pair_mean = 0.5 * (eigs[p] + eigs[q]);
      }
    }
  }
  out.gap = best;
  return out;
}

}  // namespace

SpectrumSweep sweep_spectrum(const HamiltonianFamily& family,
                             const std::vector<double>& lambda_values,
                             const std::vector<double>& delta_values) {
  SpectrumSweep sweep;
  sweep.lambda_values = lambda_values;
  sweep.delta_values = delta_values;
  sweep.energies.resize(delta_values.size());
  for (size_t d = 0; d < delta_values.size(); ++d) {
    sweep.energies[d].reserve(lambda_values.size());
    for (double lambda : lambda_values) {
      sweep.energies[d].push_back(
          sorted_eigenvalues(family.eval(lambda, delta_values[d])));
    }
  }
  return sweep;
}

EpCandidate locate_ep(const HamiltonianFamily& family, double delta,
                      Complex lambda_seed, const LocateOptions& options) {
  Complex lambda = lambda_seed;
  GapProbe probe = probe_gap(family, delta, lambda);
  const double diameter_floor = std::max(probe.diameter, 1e-12);

  bool converged = probe.gap <= options.gap_rel_tol * diameter_floor;
  for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
    const double eps = 1e-7 * std::max(1.0, std::abs(lambda));
    const Complex qp = probe_gap(family, delta, lambda + eps).squared_gap;
    const Complex qm = probe_gap(family, delta, lambda - eps).squared_gap;
    const Complex dq = (qp - qm) / (2.0 * eps);
    if (std::abs(dq) < 1e-300) {
      throw EpNotFoundError("locate_ep: flat squared-gap objective");
    }
    Complex delta_lambda = -probe.squared_gap / dq;
    // Damped update: shrink until the squared gap actually decreases.
    bool improved = false;
    for (int halvings = 0; halvings < 25; ++halvings) {
      const GapProbe trial = probe_gap(family, delta, lambda + delta_lambda);
      if (std::abs(trial.squared_gap) < std::abs(probe.squared_gap) ||
          trial.gap <= options.gap_rel_tol * diameter_floor) {
        lambda += delta_lambda;
        probe = trial;
        improved = true;
        break;
      }
      delta_lambda *= 0.5;
    }
    if (!improved) {
      throw EpNotFoundError("locate_ep: damping failed to reduce the gap");
    }
    converged = probe.gap <= options.gap_rel_tol * diameter_floor;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "locate_ep: no convergence after " << options.max_iterations
        << " iterations (gap " << probe.gap << ")";
    throw EpNotFoundError(msg.str());
  }

  // EP evidence: the coalescing eigenvector must be (nearly) self-orthogonal.
  Eigen::ComplexEigenSolver<CMatrix> solver(family.eval(lambda, delta), true);
  const CVector eigs = solver.eigenvalues();
  Eigen::Index closest = 0;
  double best = std::numeric_limits<double>::max();
  for (Eigen::Index k = 0; k < eigs.size(); ++k) {
    const double d = std::abs(eigs[k] - probe.pair_mean);
    if (d < best) {
      best = d;
      closest = k;
    }
  }
  CVector vec = solver.eigenvectors().col(closest);
  vec.normalize();
  const double condition = std::abs(c_product(vec, vec));

  EpCandidate out{lambda, probe.pair_mean, probe.gap, condition};
  if (condition > options.ep_condition_tol) {
    std::ostringstream msg;
    msg << "locate_ep: coalescence at lambda=(" << lambda.real() << ","
        << lambda.imag() << ") is diagonalizable (self-overlap " << condition
        << ")";
    throw NotAnEpError(msg.str());
  }
  return out;
}

std::vector<ValidationPoint> validate_trajectory(
    const TrajectoryRecord& record, const HamiltonianFamily& family,
    const std::vector<double>& checkpoints, const LocateOptions& options) {
  if (record.samples.empty()) {
    throw ContractViolationError("validate_trajectory: empty record");
  }
  std::vector<ValidationPoint> out;
  out.reserve(checkpoints.size());
  for (double delta : checkpoints) {
    // Linear interpolation of the recorded lambda at the checkpoint.
    const auto& samples = record.samples;
    Complex lambda_rec;
    if (delta <= samples.front().delta) {
      lambda_rec = samples.front().lambda;
    } else if (delta >= samples.back().delta) {
      lambda_rec = samples.back().lambda;
    } else {
      size_t hi = 1;
      while (hi + 1 < samples.size() && samples[hi].delta < delta) ++hi;
      const auto& a = samples[hi - 1];
      const auto& b = samples[hi];
      const double t = (delta - a.delta) / (b.delta - a.delta);
      lambda_rec = a.lambda + t * (b.lambda - a.lambda);
    }
    const EpCandidate candidate = locate_ep(family, delta, lambda_rec, options);
    out.push_back({delta, lambda_rec, candidate.lambda,
                   std::abs(lambda_rec - candidate.lambda),
                   candidate.condition});
  }
  return out;
}

}  // namespace epmotion
