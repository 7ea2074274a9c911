#include "epmotion/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>

namespace epmotion {

namespace {

// gamma_pm(l, l') = sqrt(l(l+1) - l'(l' +/- 1)), with doubled quantum numbers.
double gamma_plus(int two_l, int two_lp) {
  return std::sqrt((two_l * (two_l + 2) - two_lp * (two_lp + 2)) / 4.0);
}
double gamma_minus(int two_l, int two_lp) {
  return std::sqrt((two_l * (two_l + 2) - two_lp * (two_lp - 2)) / 4.0);
}

}  // namespace

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  throw ContractViolationError("unknown parity: " + s);
}

std::string to_string(Parity p) {
  return p == Parity::Even ? "even" : "odd";
}

void ToyModelSpec::validate() const {
  if (n < 1 || n % 2 == 0) {
    throw ContractViolationError("ToyModelSpec: n must be an odd positive integer");
  }
  if (!(omega > 0.0)) {
    throw ContractViolationError("ToyModelSpec: omega must be positive");
  }
}

ToyModel::ToyModel(const ToyModelSpec& spec) : spec_(spec) {
  spec_.validate();
  const int two_it = spec_.n;  // I_T = N/2
  const int two_jt = 1;        // J_T = 1/2
  const int want = (spec_.parity == Parity::Even) ? 0 : 1;
  for (int two_i3 = -two_it; two_i3 <= two_it; two_i3 += 2) {
    for (int two_j3 = -two_jt; two_j3 <= two_jt; two_j3 += 2) {
      const int k = (two_i3 + two_j3) / 2;  // I3 + J3, an integer
      if (((k % 2) + 2) % 2 == want) {
        basis_.emplace_back(two_i3, two_j3);
      }
    }
  }

  const int dim = static_cast<int>(basis_.size());
  h0_diag_.resize(dim);
  v0_ = RMatrix::Zero(dim, dim);
  v1_ = RMatrix::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto [i3, j3] = basis_[r];
    h0_diag_[r] = spec_.omega * (i3 + j3) / 2.0;
    for (int c = 0; c < dim; ++c) {
      const auto [i3p, j3p] = basis_[c];
      // I+ J-
      if (i3 == i3p + 2 && j3 == j3p - 2) {
        v0_(r, c) += gamma_plus(two_it, i3p) * gamma_minus(two_jt, j3p);
      }
      // I- J+
      if (i3 == i3p - 2 && j3 == j3p + 2) {
        v0_(r, c) += gamma_minus(two_it, i3p) * gamma_plus(two_jt, j3p);
      }
      // I+ J+
      if (i3 == i3p + 2 && j3 == j3p + 2) {
        v1_(r, c) += gamma_plus(two_it, i3p) * gamma_plus(two_jt, j3p);
      }
      // I- J-
      if (i3 == i3p - 2 && j3 == j3p - 2) {
        v1_(r, c) += gamma_minus(two_it, i3p) * gamma_minus(two_jt, j3p);
      }
    }
  }
}

CMatrix ToyModel::eval(Complex lambda, double delta) const {
  CMatrix h = (lambda * (v0_ + delta * v1_)).cast<Complex>();
  h.diagonal() += h0_diag_.cast<Complex>();
  return h;
}

CMatrix ToyModel::d_lambda(Complex /*lambda*/, double delta) const {
  return (v0_ + delta * v1_).cast<Complex>();
}

CMatrix ToyModel::d_delta(Complex lambda, double /*delta*/) const {
  return lambda * v1_.cast<Complex>();
}

CMatrix toy_matrix(const ToyModelSpec& spec, Complex lambda, double delta) {
  return ToyModel(spec).eval(lambda, delta);
}

bool spectrum_symmetry_check(const ToyModelSpec& spec, Complex lambda,
                             double delta, double tol) {
  const CMatrix h = toy_matrix(spec, lambda, delta);
  Eigen::ComplexEigenSolver<CMatrix> solver(h, /*computeEigenvectors=*/false);
  std::vector<Complex> eigs(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + h.rows());
  auto by_re_im = [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::vector<Complex> neg;
  neg.reserve(eigs.size());
  for (const auto& e : eigs) neg.push_back(-e);
  std::sort(eigs.begin(), eigs.end(), by_re_im);
  std::sort(neg.begin(), neg.end(), by_re_im);
  for (size_t k = 0; k < eigs.size(); ++k) {
    if (std::abs(eigs[k] - neg[k]) > tol) return false;
  }
  return true;
}

DerivativeCheckReport finite_difference_derivative_check(
    const HamiltonianFamily& family, Complex lambda, double delta) {
  const double step = 1e-6;
  const CMatrix fd_lambda =
      (family.eval(lambda + step, delta) - family.eval(lambda - step, delta)) /
      (2.0 * step);
  const CMatrix fd_delta =
      (family.eval(lambda, delta + step) - family.eval(lambda, delta - step)) /
      (2.0 * step);
  const CMatrix an_lambda = family.d_lambda(lambda, delta);
  const CMatrix an_delta = family.d_delta(lambda, delta);

  auto rel_err = [](const CMatrix& a, const CMatrix& b) {
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() / scale;
  };
  DerivativeCheckReport report;
  report.max_rel_err_lambda = rel_err(fd_lambda, an_lambda);
  report.max_rel_err_delta = rel_err(fd_delta, an_delta);
  report.pass = report.max_rel_err_lambda <= 1e-6 &&
                report.max_rel_err_delta <= 1e-6;
  return report;
}

namespace {

std::map<std::string, FamilyFactory>& family_registry() {
  static std::map<std::string, FamilyFactory> registry = {
      {"toy", [](const nlohmann::json& config) -> std::shared_ptr<HamiltonianFamily> {
         ToyModelSpec spec;
         spec.n = config.value("n", 1);
         spec.omega = config.value("omega", 1.0);
         spec.parity = parity_from_string(config.value("parity", "odd"));
         return std::make_shared<ToyModel>(spec);
       }}};
  return registry;
}

std::mutex registry_mutex;

}  // namespace

void register_family(const std::string& name, FamilyFactory factory) {
  std::lock_guard<std::mutex> lock(registry_mutex);
  family_registry()[name] = std::move(factory);
}

std::shared_ptr<HamiltonianFamily> make_family(const nlohmann::json& config) {
  const std::string name = config.value("model", "toy");
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto it = family_registry().find(name);
  if (it == family_registry().end()) {
    throw ContractViolationError("unknown model family: " + name);
  }
  return it->second(config);
}

}  // namespace epmotion
