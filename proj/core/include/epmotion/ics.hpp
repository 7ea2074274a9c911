#ifndef EPMOTION_ICS_HPP
#define EPMOTION_ICS_HPP

#include <utility>
#include <vector>

#include "epmotion/eom.hpp"
#include "epmotion/linalg.hpp"
#include "epmotion/model.hpp"

namespace epmotion {

/// One simple binary crossing: two eigenvalue lines with distinct slopes
/// meeting at (lambda_in, energy).  v_a, v_b are the slope-adapted real
/// orthonormal eigenvectors of the degenerate pair (slope_a < slope_b).
struct CrossingPair {
  int level_a = 0;
  int level_b = 0;
  double energy = 0.0;
  double slope_a = 0.0;
  double slope_b = 0.0;
  RVector v_a;
  RVector v_b;
};

/// All simple binary crossings sharing one lambda_in at delta_in.
struct CrossingMultiplet {
  double lambda_in = 0.0;
  double delta_in = 0.0;
  std::vector<CrossingPair> pairs;
};

struct CrossingScanOptions {
  double lambda_min = 0.02;
  double lambda_max = 1.0;
  int scan_points = 2001;
  double crossing_tol = 1e-10;    // accepted |E_a - E_b| after refinement
  double grouping_tol = 1e-8;     // multiplet grouping in lambda
  double slope_separation = 1e-6; // minimum |slope_a - slope_b|
};

/// Scans H(lambda, delta_in) for real lambda, pairs eigenvalue lines by slope
/// continuity, and bisects sign changes of the tracked signed gap.  Throws
/// UnsupportedDegeneracyError on triple-or-higher degeneracies.
std::vector<CrossingMultiplet> detect_crossings(
    const HamiltonianFamily& family, double delta_in,
    const CrossingScanOptions& options = {});

/// |c~) = (v1 + sigma i v2)/sqrt(2), |b~) = (v1 - sigma i v2)/sqrt(2).
std::pair<CVector, CVector> build_ep_basis(const RVector& v1, const RVector& v2,
                                           int sigma);

/// Rotates a doubly degenerate non-EP eigenpair so the two vectors are
/// c-orthonormal and uncoupled by V.  Throws DefectiveMatrixError when the
/// projected 2x2 matrix carries a Jordan block (a missed EP).
std::pair<CVector, CVector> rectify_degenerate_ordinary(const CVector& v1,
                                                        const CVector& v2,
                                                        const CMatrix& v);

struct ClusterHypothesis {
  std::vector<int> member_pairs;  // indices into CrossingMultiplet::pairs
  std::vector<int> signs;         // sigma_m in {-1, +1}, signs[0] == +1
};

struct ResolvedCluster {
  ClusterHypothesis hypothesis;
  EpState state;
  Complex lambda_dot_in{0.0, 0.0};
  /// Other sign vectors that also passed the probe (recorded, not used).
  std::vector<std::vector<int>> alternate_signs;
};

struct ResolveOptions {
  int trial_steps = 2000;
  double step_size = 5e-5;      // signed; probe span = trial_steps * step_size
  double tolerance = 0.0005;    // probe consistency tolerance
  double lambda_dot_rel_tol = 1e-6;
  /// The probe must separate wrong hypotheses from integrator error, so it
  /// defaults to the high-order scheme regardless of the production run.
  Integrator integrator = Integrator::Rk4;
};

/// Splits a multiplet into clusters and assigns sign factors by trial and
/// error: hypotheses are enumerated from the coarsest partition to all
/// singletons, signs lexicographically with sigma_1 = +1 fixed; a hypothesis
/// passes when lambda_dot agrees across members and a short probe propagation
/// keeps all residuals below tolerance.  Throws ResolutionFailedError when no
/// hypothesis passes.
std::vector<ResolvedCluster> resolve_clusters_and_signs(
    const CrossingMultiplet& multiplet, const HamiltonianFamily& family,
    const ResolveOptions& options = {});

/// Assembles the full initial EpState for one cluster: EP entities from the
/// cluster pairs, rectified ordinary pairs for the remaining multiplet
/// members, plain Hermitian eigenpairs for everything else, f_m = 0.
EpState assemble_initial_state(const CrossingMultiplet& multiplet,
                               const ClusterHypothesis& cluster,
                               const HamiltonianFamily& family);

/// Direct EP start: refines lambda_seed to a coalescence of H(., delta) and
/// builds the Jordan-chain EP basis there, bypassing Hermitian crossings.
EpState ep_state_from_seed(const HamiltonianFamily& family, double delta,
                           Complex lambda_seed);

}  // namespace epmotion

#endif
