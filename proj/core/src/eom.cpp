#include "epmotion/eom.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace epmotion {

namespace {

std::vector<Complex> all_energies(const EpState& state) {
  std::vector<Complex> out;
  out.reserve(state.num_eps() + state.num_ordinary());
  for (int m = 0; m < state.num_eps(); ++m) out.push_back(state.ep_energies[m]);
  for (int j = 0; j < state.num_ordinary(); ++j) {
    out.push_back(state.ordinary_energies[j]);
  }
  return out;
}

}  // namespace

double EpState::spectral_diameter() const {
  const auto energies = all_energies(*this);
  double diam = 0.0;
  for (size_t p = 0; p < energies.size(); ++p) {
    for (size_t q = p + 1; q < energies.size(); ++q) {
      diam = std::max(diam, std::abs(energies[p] - energies[q]));
    }
  }
  return diam;
}

EpState EpState::conjugate() const {
  EpState out = *this;
  out.lambda = std::conj(lambda);
  out.ep_energies = ep_energies.conjugate();
  out.f_coeffs = f_coeffs.conjugate();
  out.ordinary_energies = ordinary_energies.conjugate();
  out.ep_vectors = ep_vectors.conjugate();
  out.complement_vectors = complement_vectors.conjugate();
  out.ordinary_vectors = ordinary_vectors.conjugate();
  return out;
}

double ResidualReport::max() const {
  return std::max({max_eigen_residual, max_orthonormality_residual,
                   max_closure_residual, lambda_dot_spread});
}

Complex lambda_dot(const EpState& state, const HamiltonianFamily& family,
                   int m) {
  const CMatrix h_lambda = family.d_lambda(state.lambda, state.delta);
  const CMatrix h_delta = family.d_delta(state.lambda, state.delta);
  const CVector c = state.ep_vectors.col(m);
  const Complex den = c.transpose() * h_lambda * c;
  const double scale = std::max(1.0, h_lambda.cwiseAbs().maxCoeff());
  if (std::abs(den) < 1e-12 * scale) {
    throw SingularDenominatorError(
        "lambda_dot: (c~|dH/dlambda|c~) vanishes at delta=" +
        std::to_string(state.delta));
  }
  const Complex num = c.transpose() * h_delta * c;
  return -num / den;
}

LambdaDotResult lambda_dot(const EpState& state,
                           const HamiltonianFamily& family) {
  const int m_count = state.num_eps();
  if (m_count == 0) {
    throw ContractViolationError("lambda_dot: state carries no EPs");
  }
  std::vector<Complex> values(m_count);
  Complex mean(0.0, 0.0);
  double max_abs = 0.0;
  for (int m = 0; m < m_count; ++m) {
    values[m] = lambda_dot(state, family, m);
    mean += values[m];
    max_abs = std::max(max_abs, std::abs(values[m]));
  }
  mean /= static_cast<double>(m_count);
  double spread = 0.0;
  const double denom = std::max(max_abs, 1e-300);
  for (const auto& v : values) {
    spread = std::max(spread, std::abs(v - mean) / denom);
  }
  return {mean, spread};
}

CMatrix effective_perturbation(const EpState& state,
                               const HamiltonianFamily& family,
                               Complex lambda_dot_value) {
  return family.d_lambda(state.lambda, state.delta) * lambda_dot_value +
         family.d_delta(state.lambda, state.delta);
}

CMatrix effective_perturbation(const EpState& state,
                               const HamiltonianFamily& family) {
  return effective_perturbation(state, family,
                                lambda_dot(state, family).mean);
}

namespace {

// Guards the pre-scan of all eigenvalue pairs entering EOM denominators.
// A small gap is tolerated in two situations: every coupling element between
// the levels is negligible (rectified degenerate pairs, term dropped), or
// coupling and gap vanish together so the term coupling/gap stays bounded
// (cluster birth at delta_in, term kept).  Only an exploding term halts.
void scan_near_collisions(const EpState& state, const CMatrix& overlaps,
                          double gap_threshold, double coupling_tol,
                          double term_bound) {
  const int j_count = state.num_ordinary();
  const int m_count = state.num_eps();
  const auto energies = all_energies(state);

  auto columns_of = [&](int level) -> std::vector<int> {
    if (level < m_count) {
      return {j_count + level, j_count + m_count + level};  // c~_m, b~_m
    }
    return {level - m_count};  // c_j
  };
  auto label_of = [&](int level) -> std::string {
    if (level < m_count) return "E~_" + std::to_string(level + 1);
    return "E_" + std::to_string(level - m_count + 1);
  };

  const int total = static_cast<int>(energies.size());
  for (int p = 0; p < total; ++p) {
    for (int q = p + 1; q < total; ++q) {
      if (std::abs(energies[p] - energies[q]) >= gap_threshold) continue;
      double coupling = 0.0;
      for (int cp : columns_of(p)) {
        for (int cq : columns_of(q)) {
          coupling = std::max(coupling, std::abs(overlaps(cp, cq)));
        }
      }
      const double gap = std::abs(energies[p] - energies[q]);
      if (coupling > coupling_tol &&
          coupling > term_bound * std::max(gap, 1e-300)) {
        std::ostringstream msg;
        msg << "near-collision of " << label_of(p) << " and " << label_of(q)
            << " at delta=" << state.delta << " (gap " << gap << ", coupling "
            << coupling << ")";
        throw NearCollisionError(msg.str(), state.delta);
      }
    }
  }
}

}  // namespace

EpRates rates(const EpState& state, const HamiltonianFamily& family) {
  const int n = state.dim();
  const int m_count = state.num_eps();
  const int j_count = state.num_ordinary();
  const int j0 = 0, ct0 = j_count, bt0 = j_count + m_count;

  const LambdaDotResult ld = lambda_dot(state, family);
  const CMatrix v = effective_perturbation(state, family, ld.mean);

  // Basis matrix B = [c_j | c~_m | b~_m]; all overlaps in two products.
  CMatrix basis(n, n);
  basis.leftCols(j_count) = state.ordinary_vectors;
  basis.middleCols(ct0, m_count) = state.ep_vectors;
  basis.rightCols(m_count) = state.complement_vectors;
  const CMatrix vb = v * basis;
  const CMatrix s = basis.transpose() * vb;  // s(x, y) = (x|V|y)

  const double diam = state.spectral_diameter();
  const double gap_threshold = kGapThresholdRel * std::max(diam, 1.0);
  const double vmax = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double coupling_tol = 1e-8 * vmax;
  const double term_bound = 1e8 * vmax;
  scan_near_collisions(state, s, gap_threshold, coupling_tol, term_bound);

  // Post-scan, a denominator too small to divide by can only belong to a
  // negligibly coupled pair, so that expansion term is dropped; all other
  // small gaps carry proportionally small couplings and are kept.
  const double den_floor = 1e-14 * std::max(diam, 1.0);
  auto frac = [&](Complex num, Complex den, int power) -> Complex {
    if (std::abs(den) < den_floor) return Complex(0.0, 0.0);
    Complex r = num / den;
    for (int p = 1; p < power; ++p) r /= den;
    return r;
  };

  const CVector& te = state.ep_energies;        // E~_m
  const CVector& oe = state.ordinary_energies;  // E_j
  const CVector& f = state.f_coeffs;

  EpRates out;
  out.lambda_dot = ld.mean;
  out.lambda_dot_spread = ld.spread;
  out.ep_energy_rates.resize(m_count);
  out.f_rates.resize(m_count);
  out.ordinary_energy_rates.resize(j_count);
  for (int m = 0; m < m_count; ++m) {
    out.ep_energy_rates[m] = s(bt0 + m, ct0 + m);
    out.f_rates[m] = s(bt0 + m, bt0 + m);
  }
  for (int j = 0; j < j_count; ++j) {
    out.ordinary_energy_rates[j] = s(j0 + j, j0 + j);
  }

  // Closure-expansion coefficients: rate of basis column k is B * coeff.col(k).
  CMatrix coeff = CMatrix::Zero(n, n);

  for (int j = 0; j < j_count; ++j) {
    for (int jp = 0; jp < j_count; ++jp) {
      if (jp == j) continue;
      coeff(j0 + jp, j0 + j) = frac(s(j0 + jp, j0 + j), oe[j] - oe[jp], 1);
    }
    for (int m = 0; m < m_count; ++m) {
      coeff(ct0 + m, j0 + j) =
          frac(s(bt0 + m, j0 + j), oe[j] - te[m], 1) +
          f[m] * frac(s(ct0 + m, j0 + j), oe[j] - te[m], 2);
      coeff(bt0 + m, j0 + j) = frac(s(ct0 + m, j0 + j), oe[j] - te[m], 1);
    }
  }

  for (int m = 0; m < m_count; ++m) {
    for (int j = 0; j < j_count; ++j) {
      coeff(j0 + j, ct0 + m) = frac(s(j0 + j, ct0 + m), te[m] - oe[j], 1);
      coeff(j0 + j, bt0 + m) =
          frac(s(j0 + j, bt0 + m), te[m] - oe[j], 1) -
          f[m] * frac(s(j0 + j, ct0 + m), te[m] - oe[j], 2);
    }
    for (int mp = 0; mp < m_count; ++mp) {
      if (mp == m) continue;
      const Complex gap = te[m] - te[mp];
      coeff(ct0 + mp, ct0 + m) =
          frac(s(bt0 + mp, ct0 + m), gap, 1) +
          f[mp] * frac(s(ct0 + mp, ct0 + m), gap, 2);
      coeff(bt0 + mp, ct0 + m) = frac(s(ct0 + mp, ct0 + m), gap, 1);

      coeff(ct0 + mp, bt0 + m) =
          frac(s(bt0 + mp, bt0 + m), gap, 1) +
          f[mp] * frac(s(ct0 + mp, bt0 + m), gap, 2) -
          f[m] * frac(s(bt0 + mp, ct0 + m), gap, 2) -
          2.0 * f[m] * f[mp] * frac(s(ct0 + mp, ct0 + m), gap, 3);
      coeff(bt0 + mp, bt0 + m) =
          frac(s(ct0 + mp, bt0 + m), gap, 1) -
          f[m] * frac(s(ct0 + mp, ct0 + m), gap, 2);
    }
  }

  const CMatrix rate_vectors = basis * coeff;
  out.ordinary_vector_rates = rate_vectors.leftCols(j_count);
  out.ep_vector_rates = rate_vectors.middleCols(ct0, m_count);
  out.complement_vector_rates = rate_vectors.rightCols(m_count);
  return out;
}

CVector pack(const EpState& state) {
  const int n = state.dim();
  const int m_count = state.num_eps();
  const int j_count = state.num_ordinary();
  CVector flat(1 + 2 * m_count + j_count + n * (2 * m_count + j_count));
  Eigen::Index pos = 0;
  flat[pos++] = state.lambda;
  flat.segment(pos, m_count) = state.ep_energies;
  pos += m_count;
  flat.segment(pos, j_count) = state.ordinary_energies;
  pos += j_count;
  flat.segment(pos, m_count) = state.f_coeffs;
  pos += m_count;
  flat.segment(pos, n * m_count) = state.ep_vectors.reshaped();
  pos += n * m_count;
  flat.segment(pos, n * j_count) = state.ordinary_vectors.reshaped();
  pos += n * j_count;
  flat.segment(pos, n * m_count) = state.complement_vectors.reshaped();
  return flat;
}

void unpack(const CVector& flat, EpState& state) {
  const int n = state.dim();
  const int m_count = state.num_eps();
  const int j_count = state.num_ordinary();
  Eigen::Index pos = 0;
  state.lambda = flat[pos++];
  state.ep_energies = flat.segment(pos, m_count);
  pos += m_count;
  state.ordinary_energies = flat.segment(pos, j_count);
  pos += j_count;
  state.f_coeffs = flat.segment(pos, m_count);
  pos += m_count;
  state.ep_vectors = flat.segment(pos, n * m_count).reshaped(n, m_count);
  pos += n * m_count;
  state.ordinary_vectors = flat.segment(pos, n * j_count).reshaped(n, j_count);
  pos += n * j_count;
  state.complement_vectors = flat.segment(pos, n * m_count).reshaped(n, m_count);
}

namespace {

CVector pack_rates(const EpRates& r, int n, int m_count, int j_count) {
  CVector flat(1 + 2 * m_count + j_count + n * (2 * m_count + j_count));
  Eigen::Index pos = 0;
  flat[pos++] = r.lambda_dot;
  flat.segment(pos, m_count) = r.ep_energy_rates;
  pos += m_count;
  flat.segment(pos, j_count) = r.ordinary_energy_rates;
  pos += j_count;
  flat.segment(pos, m_count) = r.f_rates;
  pos += m_count;
  flat.segment(pos, n * m_count) = r.ep_vector_rates.reshaped();
  pos += n * m_count;
  flat.segment(pos, n * j_count) = r.ordinary_vector_rates.reshaped();
  pos += n * j_count;
  flat.segment(pos, n * m_count) = r.complement_vector_rates.reshaped();
  return flat;
}

}  // namespace

EpState step(const EpState& state, const HamiltonianFamily& family, double h,
             Integrator integrator) {
  const int n = state.dim();
  const int m_count = state.num_eps();
  const int j_count = state.num_ordinary();

  auto flat_rates = [&](const EpState& s) {
    return pack_rates(rates(s, family), n, m_count, j_count);
  };

  EpState out = state;
  if (h == 0.0) return out;

  if (integrator == Integrator::Euler) {
    const CVector y = pack(state) + h * flat_rates(state);
    unpack(y, out);
    out.delta = state.delta + h;
    return out;
  }

  // Classical 4th-order one-step scheme.
  const CVector y0 = pack(state);
  EpState scratch = state;
  const CVector k1 = flat_rates(state);
  scratch.delta = state.delta + 0.5 * h;
  unpack(y0 + 0.5 * h * k1, scratch);
  scratch.delta = state.delta + 0.5 * h;
  const CVector k2 = flat_rates(scratch);
  unpack(y0 + 0.5 * h * k2, scratch);
  scratch.delta = state.delta + 0.5 * h;
  const CVector k3 = flat_rates(scratch);
  unpack(y0 + h * k3, scratch);
  scratch.delta = state.delta + h;
  const CVector k4 = flat_rates(scratch);
  unpack(y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), out);
  out.delta = state.delta + h;
  return out;
}

ResidualReport check_consistency(const EpState& state,
                                 const HamiltonianFamily& family) {
  const int n = state.dim();
  const int m_count = state.num_eps();
  const int j_count = state.num_ordinary();

  const CMatrix h = family.eval(state.lambda, state.delta);
  ResidualReport report;

  double eig = 0.0;
  if (j_count > 0) {
    const CMatrix rc = h * state.ordinary_vectors -
                       state.ordinary_vectors *
                           state.ordinary_energies.asDiagonal();
    eig = std::max(eig, rc.cwiseAbs().maxCoeff());
  }
  const CMatrix rct =
      h * state.ep_vectors - state.ep_vectors * state.ep_energies.asDiagonal();
  eig = std::max(eig, rct.cwiseAbs().maxCoeff());
  const CMatrix rbt = h * state.complement_vectors -
                      state.complement_vectors * state.ep_energies.asDiagonal() -
                      state.ep_vectors * state.f_coeffs.asDiagonal();
  eig = std::max(eig, rbt.cwiseAbs().maxCoeff());
  report.max_eigen_residual = eig;

  CMatrix basis(n, n);
  basis.leftCols(j_count) = state.ordinary_vectors;
  basis.middleCols(j_count, m_count) = state.ep_vectors;
  basis.rightCols(m_count) = state.complement_vectors;
  CMatrix gram = basis.transpose() * basis;
  gram.topLeftCorner(j_count, j_count) -= CMatrix::Identity(j_count, j_count);
  gram.block(j_count, j_count + m_count, m_count, m_count) -=
      CMatrix::Identity(m_count, m_count);
  gram.block(j_count + m_count, j_count, m_count, m_count) -=
      CMatrix::Identity(m_count, m_count);
  report.max_orthonormality_residual = gram.cwiseAbs().maxCoeff();

  CMatrix closure =
      state.ep_vectors * state.complement_vectors.transpose() +
      state.complement_vectors * state.ep_vectors.transpose() -
      CMatrix::Identity(n, n);
  if (j_count > 0) {
    closure += state.ordinary_vectors * state.ordinary_vectors.transpose();
  }
  report.max_closure_residual = closure.cwiseAbs().maxCoeff();

  try {
    report.lambda_dot_spread = lambda_dot(state, family).spread;
  } catch (const SingularDenominatorError&) {
    report.lambda_dot_spread = std::numeric_limits<double>::max();
  }
  return report;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::ToleranceBreach:
      return "tolerance_breach";
    case RunStatus::NearCollision:
      return "near_collision";
    case RunStatus::SingularDenominator:
      return "singular_denominator";
  }
  return "unknown";
}

TrajectoryRecord propagate(const EpState& initial,
                           const HamiltonianFamily& family,
                           const PropagationOptions& options) {
  if (options.grid < 1) {
    throw ContractViolationError("propagate: grid must be >= 1");
  }
  TrajectoryRecord record;
  EpState state = initial;

  auto sample = [&](const EpState& s) -> bool {
    ResidualReport residuals = check_consistency(s, family);
    if (!residuals.pass(options.tolerance)) {
      record.status = RunStatus::ToleranceBreach;
      record.halt_delta = s.delta;
      std::ostringstream msg;
      msg << "consistency tolerance breached at delta=" << s.delta
          << " (max residual " << residuals.max() << " > "
          << options.tolerance << ")";
      record.halt_message = msg.str();
      return false;
    }
    record.samples.push_back(
        {s.delta, s.lambda, s.ep_energies, s.ordinary_energies, residuals});
    return true;
  };

  if (!sample(state)) {
    record.final_state = state;
    return record;
  }
  if (options.delta_end == initial.delta) {
    record.final_state = state;
    return record;
  }

  const double h = (options.delta_end - initial.delta) /
                   static_cast<double>(options.grid);
  const long cadence = std::max<long>(1, options.sample_every);
  for (long g = 1; g <= options.grid; ++g) {
    try {
      state = step(state, family, h, options.integrator);
      // Pin delta to the exact grid point; repeated addition drifts.
      state.delta = (g == options.grid)
                        ? options.delta_end
                        : initial.delta + static_cast<double>(g) * h;
    } catch (const NearCollisionError& e) {
      record.status = RunStatus::NearCollision;
      record.halt_delta = e.delta;
      record.halt_message = e.what();
      break;
    } catch (const SingularDenominatorError& e) {
      record.status = RunStatus::SingularDenominator;
      record.halt_delta = state.delta;
      record.halt_message = e.what();
      break;
    }
    if (g % cadence == 0 || g == options.grid) {
      if (!sample(state)) break;
    }
  }
  record.final_state = state;
  return record;
}

}  // namespace epmotion
