#include "epmotion/linalg.hpp"

#include <cmath>

namespace epmotion {

Complex c_product(const CVector& u, const CVector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("c_product: length mismatch (" +
                         std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()) + ")");
  }
  // Plain left-to-right accumulation; adequate at the N <= 64 scale.
  Complex acc(0.0, 0.0);
  for (Eigen::Index n = 0; n < u.size(); ++n) {
    acc += u[n] * v[n];
  }
  return acc;
}

bool is_self_orthogonal(const CVector& v) {
  const double scale = v.squaredNorm();
  if (scale == 0.0) return true;
  return std::abs(c_product(v, v)) < kSelfOrthogonalThreshold * scale;
}

CVector c_normalize(const CVector& v) {
  const Complex s = c_product(v, v);
  if (is_self_orthogonal(v)) {
    throw SelfOrthogonalError("c_normalize: (v|v) vanishes; use the EP branch");
  }
  return v / std::sqrt(s);  // principal branch
}

HermitianEigen hermitian_eigensolve(const CMatrix& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (h.imag().cwiseAbs().maxCoeff() > 1e-12 * scale ||
      (h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractViolationError("hermitian_eigensolve: input not real symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(h.real());
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eigensolve: eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen2x2 diag_2x2(const Eigen::Matrix2cd& m) {
  const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const Complex half_tr = 0.5 * (a + d);
  const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  Eigen2x2 out;
  out.values[0] = half_tr + disc;
  out.values[1] = half_tr - disc;

  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double offdiag = std::max(std::abs(b), std::abs(c));
  if (std::abs(out.values[0] - out.values[1]) < 1e-12 * scale) {
    if (offdiag > 1e-12 * scale) {
      throw DefectiveMatrixError("diag_2x2: Jordan block (defective matrix)");
    }
    // Scalar matrix: any basis diagonalizes it.
    out.vectors[0] = Eigen::Vector2cd(1.0, 0.0);
    out.vectors[1] = Eigen::Vector2cd(0.0, 1.0);
    return out;
  }

  for (int k = 0; k < 2; ++k) {
    const Complex mu = out.values[k];
    // Pick the better-conditioned row of (m - mu I) to read off the kernel.
    Eigen::Vector2cd w1(b, mu - a);
    Eigen::Vector2cd w2(mu - d, c);
    Eigen::Vector2cd w = (w1.norm() >= w2.norm()) ? w1 : w2;
    const Complex self = w(0) * w(0) + w(1) * w(1);
    if (std::abs(self) > kSelfOrthogonalThreshold * w.squaredNorm()) {
      w /= std::sqrt(self);
    } else {
      w.normalize();
    }
    out.vectors[k] = w;
  }
  return out;
}

}  // namespace epmotion
