#ifndef EPMOTION_MODEL_HPP
#define EPMOTION_MODEL_HPP

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "epmotion/linalg.hpp"

namespace epmotion {

/// Evaluator contract for a parametric complex symmetric Hamiltonian
/// H(lambda, delta) with analytic lambda- and delta-derivatives.
class HamiltonianFamily {
 public:
  virtual ~HamiltonianFamily() = default;
  virtual int dim() const = 0;
  virtual CMatrix eval(Complex lambda, double delta) const = 0;
  virtual CMatrix d_lambda(Complex lambda, double delta) const = 0;
  virtual CMatrix d_delta(Complex lambda, double delta) const = 0;
};

enum class Parity { Even, Odd };

Parity parity_from_string(const std::string& s);
std::string to_string(Parity p);

/// Two coupled angular momenta I_T = N/2, J_T = 1/2 restricted to one parity
/// sector of (I3 + J3).  N must be odd; the sector dimension is N + 1.
struct ToyModelSpec {
  int n = 1;
  double omega = 1.0;
  Parity parity = Parity::Odd;

  void validate() const;
};

class ToyModel : public HamiltonianFamily {
 public:
  explicit ToyModel(const ToyModelSpec& spec);

  int dim() const override { return static_cast<int>(basis_.size()); }
  CMatrix eval(Complex lambda, double delta) const override;
  CMatrix d_lambda(Complex lambda, double delta) const override;
  CMatrix d_delta(Complex lambda, double delta) const override;

  const ToyModelSpec& spec() const { return spec_; }
  /// Sector basis as (2*I3, 2*J3) pairs, (I3, J3) lexicographic ascending.
  const std::vector<std::pair<int, int>>& basis() const { return basis_; }
  const RMatrix& v0() const { return v0_; }
  const RMatrix& v1() const { return v1_; }
  const RVector& h0_diagonal() const { return h0_diag_; }

 private:
  ToyModelSpec spec_;
  std::vector<std::pair<int, int>> basis_;
  RVector h0_diag_;
  RMatrix v0_;
  RMatrix v1_;
};

CMatrix toy_matrix(const ToyModelSpec& spec, Complex lambda, double delta);

/// True iff the spectrum of the toy Hamiltonian is invariant under E -> -E.
bool spectrum_symmetry_check(const ToyModelSpec& spec, Complex lambda,
                             double delta, double tol = 1e-8);

struct DerivativeCheckReport {
  double max_rel_err_lambda = 0.0;
  double max_rel_err_delta = 0.0;
  bool pass = false;
};

/// Compares the analytic derivative matrices against centered finite
/// differences of eval (step 1e-6, relative tolerance 1e-6).
DerivativeCheckReport finite_difference_derivative_check(
    const HamiltonianFamily& family, Complex lambda, double delta);

using FamilyFactory =
    std::function<std::shared_ptr<HamiltonianFamily>(const nlohmann::json&)>;

/// Named registry so user-defined families can be attached from the CLI.
void register_family(const std::string& name, FamilyFactory factory);

/// Builds the family named by config["model"]; "toy" is always registered and
/// reads fields n, omega, parity.
std::shared_ptr<HamiltonianFamily> make_family(const nlohmann::json& config);

}  // namespace epmotion

#endif
