#ifndef EPMOTION_ORACLE_HPP
#define EPMOTION_ORACLE_HPP

#include <vector>

#include "epmotion/eom.hpp"
#include "epmotion/linalg.hpp"
#include "epmotion/model.hpp"

namespace epmotion {

/// Dense spectra of H(lambda, delta) over a real (lambda, delta) grid;
/// eigenvalues sorted by real part then imaginary part.
struct SpectrumSweep {
  std::vector<double> lambda_values;
  std::vector<double> delta_values;
  /// energies[d][l] holds the sorted eigenvalue set at (lambda_values[l],
  /// delta_values[d]).
  std::vector<std::vector<CVector>> energies;
};

SpectrumSweep sweep_spectrum(const HamiltonianFamily& family,
                             const std::vector<double>& lambda_values,
                             const std::vector<double>& delta_values);

struct EpCandidate {
  Complex lambda{0.0, 0.0};
  Complex coalescing_energy{0.0, 0.0};
  double gap = 0.0;        // |E_a - E_b| at convergence
  double condition = 0.0;  // |(v|v)| of the unit-norm coalescing eigenvector
};

struct LocateOptions {
  double gap_rel_tol = 1e-8;      // converged when gap <= tol * diameter
  int max_iterations = 200;
  double ep_condition_tol = 1e-4; // self-overlap bound declaring a genuine EP
};

/// Brute-force EP locator: damped complex Newton iteration on the squared
/// gap of the closest eigenvalue pair (holomorphic near a binary EP).
/// Throws EpNotFoundError on non-convergence and NotAnEpError when the
/// coalescence is diagonalizable.
EpCandidate locate_ep(const HamiltonianFamily& family, double delta,
                      Complex lambda_seed, const LocateOptions& options = {});

struct ValidationPoint {
  double delta = 0.0;
  Complex lambda_record{0.0, 0.0};
  Complex lambda_oracle{0.0, 0.0};
  double discrepancy = 0.0;
  double condition = 0.0;
};

/// Re-locates the EP independently at each checkpoint, seeded by the recorded
/// trajectory, and reports |lambda_record - lambda_oracle|.
std::vector<ValidationPoint> validate_trajectory(
    const TrajectoryRecord& record, const HamiltonianFamily& family,
    const std::vector<double>& checkpoints, const LocateOptions& options = {});

}  // namespace epmotion

#endif
