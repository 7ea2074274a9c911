#ifndef EPMOTION_LINALG_HPP
#define EPMOTION_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace epmotion {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Base class of all epmotion errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};
struct SelfOrthogonalError : Error {
  using Error::Error;
};
struct DefectiveMatrixError : Error {
  using Error::Error;
};
struct ContractViolationError : Error {
  using Error::Error;
};
struct SingularDenominatorError : Error {
  using Error::Error;
};
/// Two eigenvalues approached each other below the gap threshold while still
/// coupled; propagation cannot continue past this point.
struct NearCollisionError : Error {
  NearCollisionError(const std::string& msg, double delta_at)
      : Error(msg), delta(delta_at) {}
  double delta = 0.0;
};
struct ToleranceBreachError : Error {
  using Error::Error;
};
struct UnsupportedDegeneracyError : Error {
  using Error::Error;
};
struct ResolutionFailedError : Error {
  using Error::Error;
};
struct EpNotFoundError : Error {
  using Error::Error;
};
struct NotAnEpError : Error {
  using Error::Error;
};

/// Bilinear pairing (u|v) = sum_n u_n v_n, without conjugation.
Complex c_product(const CVector& u, const CVector& v);

/// Relative threshold below which |(v|v)| / sum |v_n|^2 counts as self
/// orthogonal.
inline constexpr double kSelfOrthogonalThreshold = 1e-8;

bool is_self_orthogonal(const CVector& v);

/// Rescale v so that (w|w) = 1.  The divisor is the principal branch of
/// sqrt((v|v)).  Throws SelfOrthogonalError when (v|v) vanishes; the caller
/// must switch to the exceptional-point branch in that case.
CVector c_normalize(const CVector& v);

struct HermitianEigen {
  RVector values;   // ascending
  RMatrix vectors;  // orthonormal columns
};

/// Dense eigensolve of a real symmetric matrix handed over as a complex one.
/// Throws ContractViolationError if the input is not real symmetric.
HermitianEigen hermitian_eigensolve(const CMatrix& h);

struct Eigen2x2 {
  Complex values[2];
  Eigen::Vector2cd vectors[2];  // c-normalized when (w|w) != 0
};

/// Closed-form eigenpairs of a 2x2 complex matrix.  Throws
/// DefectiveMatrixError when the matrix carries a Jordan block.
Eigen2x2 diag_2x2(const Eigen::Matrix2cd& m);

}  // namespace epmotion

#endif
