#ifndef EPMOTION_EOM_HPP
#define EPMOTION_EOM_HPP

#include <string>
#include <vector>

#include "epmotion/linalg.hpp"
#include "epmotion/model.hpp"

namespace epmotion {

/// Full eigensolution of H(lambda(delta), delta) at one delta: M binary EPs
/// (energy, self-orthogonal eigenvector, complement vector, f coefficient)
/// plus N - 2M ordinary eigenpairs.
struct EpState {
  double delta = 0.0;
  Complex lambda{0.0, 0.0};
  CVector ep_energies;          // M
  CVector f_coeffs;             // M
  CVector ordinary_energies;    // N - 2M
  CMatrix ep_vectors;           // N x M, columns |c~_m)
  CMatrix complement_vectors;   // N x M, columns |b~_m)
  CMatrix ordinary_vectors;     // N x (N - 2M), columns |c_j)

  int dim() const { return static_cast<int>(ep_vectors.rows()); }
  int num_eps() const { return static_cast<int>(ep_energies.size()); }
  int num_ordinary() const { return static_cast<int>(ordinary_energies.size()); }

  /// Largest pairwise distance within the current eigenvalue set.
  double spectral_diameter() const;

  /// Entrywise complex conjugate (conjugate-trajectory initial state).
  EpState conjugate() const;
};

struct EpRates {
  Complex lambda_dot{0.0, 0.0};
  double lambda_dot_spread = 0.0;  // max relative disagreement over m
  CVector ep_energy_rates;
  CVector f_rates;
  CVector ordinary_energy_rates;
  CMatrix ep_vector_rates;
  CMatrix complement_vector_rates;
  CMatrix ordinary_vector_rates;
};

struct ResidualReport {
  double max_eigen_residual = 0.0;
  double max_orthonormality_residual = 0.0;
  double max_closure_residual = 0.0;
  double lambda_dot_spread = 0.0;

  double max() const;
  bool pass(double tol) const { return max() <= tol; }
};

/// Fractional gap (relative to the spectral diameter) below which two
/// eigenvalues count as colliding.
inline constexpr double kGapThresholdRel = 1e-8;

/// Single-member lambda velocity, Hellmann-Feynman style ratio of the two
/// derivative matrix elements.  Throws SingularDenominatorError when
/// (c~_m | dH/dlambda | c~_m) vanishes.
Complex lambda_dot(const EpState& state, const HamiltonianFamily& family, int m);

struct LambdaDotResult {
  Complex mean{0.0, 0.0};
  double spread = 0.0;  // max_m |ldot_m - mean| / max_m |ldot_m|
};

/// Evaluates every cluster member and averages; the spread across members is
/// the internal-consistency diagnostic.
LambdaDotResult lambda_dot(const EpState& state, const HamiltonianFamily& family);

/// V(delta) = dH/dlambda * lambda_dot + dH/ddelta at the state's point.
CMatrix effective_perturbation(const EpState& state,
                               const HamiltonianFamily& family,
                               Complex lambda_dot_value);
CMatrix effective_perturbation(const EpState& state,
                               const HamiltonianFamily& family);

/// All seven rate groups.  Throws NearCollisionError when an eigenvalue pair
/// entering a denominator drops below the gap threshold while still coupled.
EpRates rates(const EpState& state, const HamiltonianFamily& family);

enum class Integrator { Euler, Rk4 };

/// One explicit step x <- x + h * xdot (or the classical 4th-order update);
/// no re-orthogonalization, drift is monitored rather than repaired.
EpState step(const EpState& state, const HamiltonianFamily& family, double h,
             Integrator integrator = Integrator::Euler);

/// Max-norm residuals of the eigen-equations, orthonormality relations and
/// closure, plus the lambda_dot spread.
ResidualReport check_consistency(const EpState& state,
                                 const HamiltonianFamily& family);

struct TrajectorySample {
  double delta = 0.0;
  Complex lambda{0.0, 0.0};
  CVector ep_energies;
  CVector ordinary_energies;
  ResidualReport residuals;
};

enum class RunStatus {
  Completed,
  ToleranceBreach,
  NearCollision,
  SingularDenominator
};

std::string to_string(RunStatus status);

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  RunStatus status = RunStatus::Completed;
  double halt_delta = 0.0;
  std::string halt_message;
  EpState final_state;
};

struct PropagationOptions {
  double delta_end = 1.0;
  long grid = 100000;            // G equidistant steps
  double tolerance = 0.0005;     // per-step consistency tolerance
  long sample_every = 1000;      // consistency check / sampling cadence
  Integrator integrator = Integrator::Euler;
};

/// Uniform-step propagation from state.delta to delta_end.  Consistency is
/// checked every sample_every steps and at the final step; the record ends at
/// the last passing sample when a halt condition fires.
TrajectoryRecord propagate(const EpState& initial,
                           const HamiltonianFamily& family,
                           const PropagationOptions& options);

/// Flat complex packing so generic integrators can treat the EOM as a plain
/// first-order system.  Layout: lambda, Ep energies, ordinary energies, f,
/// vec(ep_vectors), vec(ordinary_vectors), vec(complement_vectors).
CVector pack(const EpState& state);
void unpack(const CVector& flat, EpState& state);

}  // namespace epmotion

#endif
