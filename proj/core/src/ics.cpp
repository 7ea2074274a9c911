#include "epmotion/ics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "epmotion/oracle.hpp"

namespace epmotion {

namespace {

struct LinePoint {
  RVector energies;
  RVector slopes;  // Hellmann-Feynman, per sorted level
};

LinePoint eval_lines(const HamiltonianFamily& family, double delta_in,
                     double lambda) {
  const HermitianEigen eig =
      hermitian_eigensolve(family.eval(lambda, delta_in));
  const RMatrix h_lambda = family.d_lambda(lambda, delta_in).real();
  LinePoint point;
  point.energies = eig.values;
  point.slopes.resize(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    point.slopes[k] = eig.vectors.col(k).dot(h_lambda * eig.vectors.col(k));
  }
  return point;
}

// Signed gap of the sorted pair (i, i+1): negative while the faster line is
// still below the slower one, positive after they have swapped.
double signed_gap(const LinePoint& point, int i) {
  const double gap = point.energies[i + 1] - point.energies[i];
  return (point.slopes[i] > point.slopes[i + 1]) ? -gap : gap;
}

void canonical_sign(RVector& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
}

struct RawCrossing {
  double lambda = 0.0;
  CrossingPair pair;
};

// All set partitions of {0..n-1} as restricted-growth strings, ordered from
// coarsest (one block) to finest (all singletons), lexicographic within.
std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<int>> rgs_list;
  std::vector<int> rgs(n, 0);
  std::function<void(int, int)> gen = [&](int pos, int max_used) {
    if (pos == n) {
      rgs_list.push_back(rgs);
      return;
    }
    for (int v = 0; v <= max_used + 1; ++v) {
      rgs[pos] = v;
      gen(pos + 1, std::max(max_used, v));
    }
  };
  if (n > 0) gen(1, 0);
  std::stable_sort(rgs_list.begin(), rgs_list.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     const int na = *std::max_element(a.begin(), a.end()) + 1;
                     const int nb = *std::max_element(b.begin(), b.end()) + 1;
                     if (na != nb) return na < nb;
                     return a < b;
                   });
  std::vector<std::vector<std::vector<int>>> out;
  out.reserve(rgs_list.size());
  for (const auto& r : rgs_list) {
    const int blocks = *std::max_element(r.begin(), r.end()) + 1;
    std::vector<std::vector<int>> partition(blocks);
    for (int k = 0; k < n; ++k) partition[r[k]].push_back(k);
    out.push_back(std::move(partition));
  }
  return out;
}

}  // namespace

std::vector<CrossingMultiplet> detect_crossings(
    const HamiltonianFamily& family, double delta_in,
    const CrossingScanOptions& options) {
  if (options.scan_points < 2 || options.lambda_max <= options.lambda_min) {
    throw ContractViolationError("detect_crossings: invalid scan window");
  }
  const double h =
      (options.lambda_max - options.lambda_min) / (options.scan_points - 1);
  // A crossing sitting exactly on a window edge has no sign-change bracket
  // inside the window, so the internal grid overshoots both edges by two
  // spacings; out-of-window results are dropped after refinement.
  const int pad = 2;
  const int points = options.scan_points + 2 * pad;

  std::vector<LinePoint> grid(points);
  std::vector<double> grid_lambda(points);
  for (int g = 0; g < points; ++g) {
    grid_lambda[g] = options.lambda_min + (g - pad) * h;
    grid[g] = eval_lines(family, delta_in, grid_lambda[g]);
  }
  const int dim = static_cast<int>(grid[0].energies.size());

  std::vector<RawCrossing> crossings;
  auto refine = [&](double a, double b, int i) {
    // Bisection on the sign of the tracked pair gap.
    double fa = signed_gap(eval_lines(family, delta_in, a), i);
    for (int iter = 0; iter < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b));
         ++iter) {
      const double mid = 0.5 * (a + b);
      const double fm = signed_gap(eval_lines(family, delta_in, mid), i);
      if ((fa < 0.0) == (fm < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    const double lambda_star = 0.5 * (a + b);
    if (lambda_star < options.lambda_min - options.grouping_tol ||
        lambda_star > options.lambda_max + options.grouping_tol) {
      return;  // overshoot bracket refined to a point outside the window
    }
    const HermitianEigen eig =
        hermitian_eigensolve(family.eval(lambda_star, delta_in));
    const double gap = eig.values[i + 1] - eig.values[i];
    if (gap > options.crossing_tol) return;  // avoided crossing, not exact

    // Triple-or-higher degeneracy is outside the binary-crossing scope.
    if ((i > 0 && eig.values[i] - eig.values[i - 1] <= options.crossing_tol) ||
        (i + 2 < dim &&
         eig.values[i + 2] - eig.values[i + 1] <= options.crossing_tol)) {
      std::ostringstream msg;
      msg << "triple-or-higher degeneracy at lambda=" << lambda_star
          << ", delta=" << delta_in;
      throw UnsupportedDegeneracyError(msg.str());
    }

    // Slope-adapted basis of the degenerate plane: diagonalize the projected
    // lambda-derivative (degenerate Hellmann-Feynman).
    const RMatrix h_lambda = family.d_lambda(lambda_star, delta_in).real();
    const RVector va = eig.vectors.col(i);
    const RVector vb = eig.vectors.col(i + 1);
    Eigen::Matrix2d proj;
    proj(0, 0) = va.dot(h_lambda * va);
    proj(0, 1) = va.dot(h_lambda * vb);
    proj(1, 0) = proj(0, 1);
    proj(1, 1) = vb.dot(h_lambda * vb);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> slope_solver(proj);
    const double slope_a = slope_solver.eigenvalues()[0];
    const double slope_b = slope_solver.eigenvalues()[1];
    if (slope_b - slope_a < options.slope_separation) return;

    RawCrossing crossing;
    crossing.lambda = lambda_star;
    crossing.pair.level_a = i;
    crossing.pair.level_b = i + 1;
    crossing.pair.energy = 0.5 * (eig.values[i] + eig.values[i + 1]);
    crossing.pair.slope_a = slope_a;
    crossing.pair.slope_b = slope_b;
    crossing.pair.v_a = va * slope_solver.eigenvectors()(0, 0) +
                        vb * slope_solver.eigenvectors()(1, 0);
    crossing.pair.v_b = va * slope_solver.eigenvectors()(0, 1) +
                        vb * slope_solver.eigenvectors()(1, 1);
    canonical_sign(crossing.pair.v_a);
    canonical_sign(crossing.pair.v_b);

    for (const auto& known : crossings) {
      if (known.pair.level_a == i &&
          std::abs(known.lambda - lambda_star) < options.grouping_tol) {
        return;  // duplicate from an adjacent bracket
      }
    }
    crossings.push_back(std::move(crossing));
  };

  for (int g = 0; g + 1 < points; ++g) {
    for (int i = 0; i + 1 < dim; ++i) {
      const double left = signed_gap(grid[g], i);
      const double right = signed_gap(grid[g + 1], i);
      if (left < 0.0 && right >= 0.0) {
        refine(grid_lambda[g], grid_lambda[g + 1], i);
      }
    }
  }

  std::sort(crossings.begin(), crossings.end(),
            [](const RawCrossing& a, const RawCrossing& b) {
              if (a.lambda != b.lambda) return a.lambda < b.lambda;
              return a.pair.energy < b.pair.energy;
            });

  std::vector<CrossingMultiplet> multiplets;
  for (auto& crossing : crossings) {
    if (!multiplets.empty() &&
        std::abs(crossing.lambda - multiplets.back().lambda_in) <
            options.grouping_tol) {
      multiplets.back().pairs.push_back(std::move(crossing.pair));
    } else {
      CrossingMultiplet multiplet;
      multiplet.lambda_in = crossing.lambda;
      multiplet.delta_in = delta_in;
      multiplet.pairs.push_back(std::move(crossing.pair));
      multiplets.push_back(std::move(multiplet));
    }
  }

  for (const auto& multiplet : multiplets) {
    for (size_t p = 0; p < multiplet.pairs.size(); ++p) {
      for (size_t q = p + 1; q < multiplet.pairs.size(); ++q) {
        if (std::abs(multiplet.pairs[p].energy - multiplet.pairs[q].energy) <
            1e-8) {
          std::ostringstream msg;
          msg << "coinciding pair energies within one multiplet at lambda="
              << multiplet.lambda_in;
          throw UnsupportedDegeneracyError(msg.str());
        }
      }
    }
  }
  return multiplets;
}

std::pair<CVector, CVector> build_ep_basis(const RVector& v1, const RVector& v2,
                                           int sigma) {
  if (v1.size() != v2.size()) {
    throw DimensionError("build_ep_basis: length mismatch");
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex is(0.0, static_cast<double>(sigma));
  CVector c = inv_sqrt2 * (v1.cast<Complex>() + is * v2.cast<Complex>());
  CVector b = inv_sqrt2 * (v1.cast<Complex>() - is * v2.cast<Complex>());
  return {std::move(c), std::move(b)};
}

std::pair<CVector, CVector> rectify_degenerate_ordinary(const CVector& v1,
                                                        const CVector& v2,
                                                        const CMatrix& v) {
  Eigen::Matrix2cd projected;
  projected(0, 0) = c_product(v1, v * v1);
  projected(0, 1) = c_product(v1, v * v2);
  projected(1, 0) = c_product(v2, v * v1);
  projected(1, 1) = c_product(v2, v * v2);
  const Eigen2x2 eig = diag_2x2(projected);
  CVector c1 = eig.vectors[0](0) * v1 + eig.vectors[0](1) * v2;
  CVector c2 = eig.vectors[1](0) * v1 + eig.vectors[1](1) * v2;
  return {c_normalize(c1), c_normalize(c2)};
}

EpState assemble_initial_state(const CrossingMultiplet& multiplet,
                               const ClusterHypothesis& cluster,
                               const HamiltonianFamily& family) {
  const int n = family.dim();
  const int m_count = static_cast<int>(cluster.member_pairs.size());
  if (m_count == 0 ||
      cluster.signs.size() != static_cast<size_t>(m_count)) {
    throw ContractViolationError("assemble_initial_state: malformed cluster");
  }

  EpState state;
  state.delta = multiplet.delta_in;
  state.lambda = multiplet.lambda_in;
  state.ep_energies.resize(m_count);
  state.f_coeffs = CVector::Zero(m_count);
  state.ep_vectors.resize(n, m_count);
  state.complement_vectors.resize(n, m_count);

  for (int m = 0; m < m_count; ++m) {
    const CrossingPair& pair = multiplet.pairs[cluster.member_pairs[m]];
    state.ep_energies[m] = pair.energy;
    auto [c, b] = build_ep_basis(pair.v_a, pair.v_b, cluster.signs[m]);
    state.ep_vectors.col(m) = c;
    state.complement_vectors.col(m) = b;
  }

  // lambda_dot is needed before the ordinary sector can be rectified.
  const CMatrix h_lambda = family.d_lambda(state.lambda, state.delta);
  const CMatrix h_delta = family.d_delta(state.lambda, state.delta);
  Complex ldot_mean(0.0, 0.0);
  for (int m = 0; m < m_count; ++m) {
    const CVector c = state.ep_vectors.col(m);
    const Complex den = c_product(c, h_lambda * c);
    const double scale = std::max(1.0, h_lambda.cwiseAbs().maxCoeff());
    if (std::abs(den) < 1e-12 * scale) {
      throw SingularDenominatorError(
          "assemble_initial_state: (c~|dH/dlambda|c~) vanishes");
    }
    ldot_mean += -c_product(c, h_delta * c) / den;
  }
  ldot_mean /= static_cast<double>(m_count);
  const CMatrix v_in = h_lambda * ldot_mean + h_delta;

  const HermitianEigen eig =
      hermitian_eigensolve(family.eval(state.lambda, state.delta));

  std::set<int> cluster_levels;
  for (int idx : cluster.member_pairs) {
    cluster_levels.insert(multiplet.pairs[idx].level_a);
    cluster_levels.insert(multiplet.pairs[idx].level_b);
  }
  // Map level_a -> multiplet pair index for the non-cluster pairs.
  std::set<int> skip_levels;
  std::vector<std::pair<int, int>> rectify_at;  // (level_a, pair index)
  for (size_t idx = 0; idx < multiplet.pairs.size(); ++idx) {
    if (std::find(cluster.member_pairs.begin(), cluster.member_pairs.end(),
                  static_cast<int>(idx)) != cluster.member_pairs.end()) {
      continue;
    }
    rectify_at.emplace_back(multiplet.pairs[idx].level_a,
                            static_cast<int>(idx));
    skip_levels.insert(multiplet.pairs[idx].level_b);
  }

  const int j_count = n - 2 * m_count;
  state.ordinary_energies.resize(j_count);
  state.ordinary_vectors.resize(n, j_count);
  // Degenerate non-cluster pairs on which V acts as a scalar: the first-order
  // rotation is undetermined and must be fixed at second order below.
  struct FlatPair {
    int col;
    const CrossingPair* pair;
  };
  std::vector<FlatPair> flat_pairs;
  const double v_scale = std::max(1.0, v_in.cwiseAbs().maxCoeff());
  int j = 0;
  for (int level = 0; level < n; ++level) {
    if (cluster_levels.count(level) || skip_levels.count(level)) continue;
    const auto rect = std::find_if(
        rectify_at.begin(), rectify_at.end(),
        [level](const std::pair<int, int>& r) { return r.first == level; });
    if (rect != rectify_at.end()) {
      const CrossingPair& pair = multiplet.pairs[rect->second];
      const CVector va = pair.v_a.cast<Complex>();
      const CVector vb = pair.v_b.cast<Complex>();
      Eigen::Matrix2cd w;
      w(0, 0) = c_product(va, v_in * va);
      w(0, 1) = c_product(va, v_in * vb);
      w(1, 0) = c_product(vb, v_in * va);
      w(1, 1) = c_product(vb, v_in * vb);
      Eigen::Matrix2cd dev = w;
      const Complex mean_diag = 0.5 * (w(0, 0) + w(1, 1));
      dev(0, 0) -= mean_diag;
      dev(1, 1) -= mean_diag;
      if (dev.cwiseAbs().maxCoeff() < 1e-8 * v_scale) {
        flat_pairs.push_back({j, &pair});
        state.ordinary_energies[j] = pair.energy;
        state.ordinary_vectors.col(j++) = va;
        state.ordinary_energies[j] = pair.energy;
        state.ordinary_vectors.col(j++) = vb;
      } else {
        auto [c1, c2] = rectify_degenerate_ordinary(va, vb, v_in);
        state.ordinary_energies[j] = pair.energy;
        state.ordinary_vectors.col(j++) = c1;
        state.ordinary_energies[j] = pair.energy;
        state.ordinary_vectors.col(j++) = c2;
      }
    } else {
      state.ordinary_energies[j] = eig.values[level];
      state.ordinary_vectors.col(j++) = eig.vectors.col(level).cast<Complex>();
    }
  }
  if (j != j_count) {
    throw ContractViolationError(
        "assemble_initial_state: ordinary level bookkeeping mismatch");
  }

  if (!flat_pairs.empty()) {
    // Second-order rectification.  Along the trajectory the degenerate pair
    // splits as E(delta) = E + delta^2 * eig(M2) with
    //   M2 = 1/2 P A'' P + P V Q (E - H)^-1 Q V P,
    // where A'' is the second delta-derivative of H along the path; the
    // adapted basis diagonalizes M2.  A'' needs lambda_ddot, obtained by
    // differentiating the lambda_dot ratio; the vector rates entering it are
    // invariant under rotations inside the degenerate subspace, so the
    // provisional basis used above is good enough to evaluate them.
    const EpRates r0 = rates(state, family);
    const Complex ld = ldot_mean;
    const double fd_eps = 1e-6;
    const CMatrix hl_dot =
        (family.d_lambda(state.lambda + fd_eps * ld, state.delta + fd_eps) -
         family.d_lambda(state.lambda - fd_eps * ld, state.delta - fd_eps)) /
        (2.0 * fd_eps);
    const CMatrix hd_dot =
        (family.d_delta(state.lambda + fd_eps * ld, state.delta + fd_eps) -
         family.d_delta(state.lambda - fd_eps * ld, state.delta - fd_eps)) /
        (2.0 * fd_eps);
    Complex lddot(0.0, 0.0);
    for (int m = 0; m < m_count; ++m) {
      const CVector c = state.ep_vectors.col(m);
      const CVector cdot = r0.ep_vector_rates.col(m);
      const Complex num = c_product(c, h_delta * c);
      const Complex den = c_product(c, h_lambda * c);
      const Complex num_dot =
          2.0 * c_product(cdot, h_delta * c) + c_product(c, hd_dot * c);
      const Complex den_dot =
          2.0 * c_product(cdot, h_lambda * c) + c_product(c, hl_dot * c);
      lddot += -(num_dot * den - num * den_dot) / (den * den);
    }
    lddot /= static_cast<double>(m_count);
    const CMatrix a2 = hl_dot * ld + h_lambda * lddot + hd_dot;

    const double energy_scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    for (const FlatPair& flat : flat_pairs) {
      const CVector va = flat.pair->v_a.cast<Complex>();
      const CVector vb = flat.pair->v_b.cast<Complex>();
      const double e_pair = flat.pair->energy;
      auto resolvent = [&](const CVector& x) {
        CVector out = CVector::Zero(n);
        for (int k = 0; k < n; ++k) {
          const double de = e_pair - eig.values[k];
          if (std::abs(de) < 1e-8 * energy_scale) continue;
          const CVector uk = eig.vectors.col(k).cast<Complex>();
          out += uk * (c_product(uk, x) / de);
        }
        return out;
      };
      const CVector gva = resolvent(v_in * va);
      const CVector gvb = resolvent(v_in * vb);
      Eigen::Matrix2cd m2;
      m2(0, 0) = 0.5 * c_product(va, a2 * va) + c_product(v_in * va, gva);
      m2(0, 1) = 0.5 * c_product(va, a2 * vb) + c_product(v_in * va, gvb);
      m2(1, 0) = 0.5 * c_product(vb, a2 * va) + c_product(v_in * vb, gva);
      m2(1, 1) = 0.5 * c_product(vb, a2 * vb) + c_product(v_in * vb, gvb);
      const Eigen2x2 sec = diag_2x2(m2);
      const CVector c1 =
          c_normalize(sec.vectors[0](0) * va + sec.vectors[0](1) * vb);
      const CVector c2 =
          c_normalize(sec.vectors[1](0) * va + sec.vectors[1](1) * vb);
      state.ordinary_vectors.col(flat.col) = c1;
      state.ordinary_vectors.col(flat.col + 1) = c2;
    }
  }

  const ResidualReport report = check_consistency(state, family);
  const double structural =
      std::max({report.max_eigen_residual, report.max_orthonormality_residual,
                report.max_closure_residual});
  if (structural > 1e-10) {
    std::ostringstream msg;
    msg << "assemble_initial_state: construction residual " << structural
        << " exceeds 1e-10 at lambda_in=" << multiplet.lambda_in;
    throw ContractViolationError(msg.str());
  }
  return state;
}

std::vector<ResolvedCluster> resolve_clusters_and_signs(
    const CrossingMultiplet& multiplet, const HamiltonianFamily& family,
    const ResolveOptions& options) {
  const int pair_count = static_cast<int>(multiplet.pairs.size());
  if (pair_count == 0) {
    throw ContractViolationError("resolve_clusters_and_signs: empty multiplet");
  }
  if (pair_count > 10) {
    throw UnsupportedDegeneracyError(
        "resolve_clusters_and_signs: multiplet too large to enumerate");
  }

  std::vector<std::string> failures;

  auto try_block = [&](const std::vector<int>& block)
      -> std::optional<ResolvedCluster> {
    const int m_count = static_cast<int>(block.size());
    std::optional<ResolvedCluster> resolved;
    // sigma_1 = +1 fixed; the conjugate branch is recovered a posteriori.
    for (int mask = 0; mask < (1 << (m_count - 1)); ++mask) {
      ClusterHypothesis hypothesis;
      hypothesis.member_pairs = block;
      hypothesis.signs.assign(m_count, 1);
      for (int b = 0; b < m_count - 1; ++b) {
        if (mask & (1 << b)) hypothesis.signs[b + 1] = -1;
      }
      EpState state;
      try {
        state = assemble_initial_state(multiplet, hypothesis, family);
      } catch (const Error& e) {
        failures.push_back(std::string("assembly: ") + e.what());
        continue;
      }
      LambdaDotResult ld;
      try {
        ld = lambda_dot(state, family);
      } catch (const SingularDenominatorError& e) {
        failures.push_back(std::string("lambda_dot: ") + e.what());
        continue;
      }
      if (ld.spread > options.lambda_dot_rel_tol) {
        std::ostringstream msg;
        msg << "lambda_dot spread " << ld.spread << " for signs(";
        for (int s : hypothesis.signs) msg << (s > 0 ? "+" : "-");
        msg << ")";
        failures.push_back(msg.str());
        continue;
      }
      PropagationOptions probe;
      probe.delta_end =
          multiplet.delta_in + options.trial_steps * options.step_size;
      probe.grid = options.trial_steps;
      probe.tolerance = options.tolerance;
      probe.sample_every = std::max(1, options.trial_steps / 10);
      probe.integrator = options.integrator;
      const TrajectoryRecord probe_record = propagate(state, family, probe);
      if (probe_record.status != RunStatus::Completed) {
        failures.push_back("probe: " + probe_record.halt_message);
        continue;
      }
      if (!resolved) {
        resolved = ResolvedCluster{hypothesis, std::move(state), ld.mean, {}};
        if (m_count > 3) break;  // skip alternate-sign bookkeeping when costly
      } else {
        resolved->alternate_signs.push_back(hypothesis.signs);
      }
    }
    return resolved;
  };

  for (const auto& partition : set_partitions(pair_count)) {
    std::vector<ResolvedCluster> clusters;
    bool all_passed = true;
    for (const auto& block : partition) {
      auto resolved = try_block(block);
      if (!resolved) {
        all_passed = false;
        break;
      }
      clusters.push_back(std::move(*resolved));
    }
    if (all_passed) return clusters;
  }

  std::ostringstream msg;
  msg << "no cluster/sign hypothesis passed for multiplet at lambda_in="
      << multiplet.lambda_in << "; attempts:";
  for (const auto& f : failures) msg << "\n  " << f;
  throw ResolutionFailedError(msg.str());
}

EpState ep_state_from_seed(const HamiltonianFamily& family, double delta,
                           Complex lambda_seed) {
  const EpCandidate candidate = locate_ep(family, delta, lambda_seed);
  const int n = family.dim();
  const CMatrix h = family.eval(candidate.lambda, delta);
  const CMatrix shifted = h - candidate.coalescing_energy * CMatrix::Identity(n, n);

  Eigen::JacobiSVD<CMatrix> svd(shifted,
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
  CVector c = svd.matrixV().col(n - 1);
  // Deterministic gauge: rotate the largest entry onto the positive real axis.
  Eigen::Index imax = 0;
  c.cwiseAbs().maxCoeff(&imax);
  c *= std::abs(c[imax]) / c[imax];
  c.normalize();

  // Jordan chain: solve (H - E) x = c, then fix the gauge freedom so that
  // (c|b) = 1 and (b|b) = 0.
  const CVector x = svd.solve(c);
  const Complex t = c_product(c, x);
  if (std::abs(t) < 1e-12) {
    throw NotAnEpError("ep_state_from_seed: degenerate Jordan-chain overlap");
  }
  const Complex f = 1.0 / t;
  const Complex alpha = -f * c_product(x, x) / (2.0 * t);
  const CVector b = f * x + alpha * c;

  EpState state;
  state.delta = delta;
  state.lambda = candidate.lambda;
  state.ep_energies = CVector::Constant(1, candidate.coalescing_energy);
  state.f_coeffs = CVector::Constant(1, f);
  state.ep_vectors = c;
  state.complement_vectors = b;

  // Remaining eigenpairs, c-normalized; skip the two closest to the EP energy.
  Eigen::ComplexEigenSolver<CMatrix> solver(h, true);
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int bidx) {
    return std::abs(solver.eigenvalues()[a] - candidate.coalescing_energy) <
           std::abs(solver.eigenvalues()[bidx] - candidate.coalescing_energy);
  });
  std::vector<int> keep(order.begin() + 2, order.end());
  std::sort(keep.begin(), keep.end(), [&](int a, int bidx) {
    const Complex ea = solver.eigenvalues()[a];
    const Complex eb = solver.eigenvalues()[bidx];
    if (ea.real() != eb.real()) return ea.real() < eb.real();
    return ea.imag() < eb.imag();
  });
  state.ordinary_energies.resize(n - 2);
  state.ordinary_vectors.resize(n, n - 2);
  for (size_t j = 0; j < keep.size(); ++j) {
    state.ordinary_energies[j] = solver.eigenvalues()[keep[j]];
    state.ordinary_vectors.col(j) =
        c_normalize(solver.eigenvectors().col(keep[j]));
  }
  return state;
}

}  // namespace epmotion
