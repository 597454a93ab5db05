#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holderlab/normed_space.hpp"
#include "holderlab/quadratic_norms.hpp"

namespace holderlab {

/// Exact constants attached to a corpus function: the gradient variation
/// constant and the first-order approximation parameter for one exponent,
/// with a provenance label ("PAPER" for published reference values, "DERIVED"
/// for values produced by an independent brute-force computation).
struct ConstantPair {
  double holder_constant = 0.0;
  double approx_parameter = 0.0;
  std::string provenance;
};

/// A differentiable function with a gradient oracle.
///
/// Functions are defined on all of R^n; samplers elsewhere restrict to a box.
/// Instances are immutable value types: evaluation is pure and thread-safe.
class SmoothFunction {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  SmoothFunction(std::string id, Eigen::Index dim, ValueFn value, GradientFn gradient);

  const std::string& id() const { return id_; }
  Eigen::Index dim() const { return dim_; }

  double value(const Eigen::VectorXd& x) const;
  DualVector gradient(const Eigen::VectorXd& x) const;

  /// Constant Hessian when the function is quadratic (plus affine terms).
  const std::optional<Eigen::MatrixXd>& hessian() const { return hessian_; }

  /// Exact constants for the exponent `nu` under the norm `spec`, when
  /// available: stored values take precedence; quadratic functions fall back
  /// to the exact operator/form norms of the Hessian at nu = 1.
  std::optional<ConstantPair> known_constants(const NormSpec& spec, double nu) const;

  /// Builder-style mutators used by the factory functions.
  SmoothFunction& with_hessian(Eigen::MatrixXd B);
  SmoothFunction& with_stored_constants(double nu, std::optional<NormKind> kind,
                                        ConstantPair constants);

  struct StoredConstants {
    double nu;
    /// The norm the entry applies to; empty means every 1-D p-norm kind
    /// (they coincide with |x| in one dimension).
    std::optional<NormKind> kind;
    ConstantPair constants;
  };
  const std::vector<StoredConstants>& stored_constants() const { return stored_; }

 private:
  std::string id_;
  Eigen::Index dim_;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<Eigen::MatrixXd> hessian_;
  std::vector<StoredConstants> stored_;
};

/// f(x) = (1/2) x'Bx with gradient Bx. Rejects asymmetric B.
SmoothFunction make_quadratic(const SymmetricOperator& B, std::string id = "quadratic");

/// One-dimensional f(x) = |x|^{1+nu} / (1+nu) with gradient sign(x)|x|^nu,
/// for 0 < nu <= 1. Exact constants for this exponent are computed at
/// construction by a dense-grid supremum over pairs in [-2,2], polished by
/// coordinate descent, and stored with provenance DERIVED.
SmoothFunction make_power(double nu);

/// g(x) = f(x + a) + <phi, x> + c. Stored constants and the Hessian carry
/// over unchanged (both are invariant under translation and addition of
/// affine terms).
SmoothFunction affine_shift(const SmoothFunction& f, const Eigen::VectorXd& a,
                            const DualVector& phi, double c);

/// Named corpus entries: "zero", "linear", "example51", "quad1d", "quadpsd",
/// "cubic", "power:<nu>". Returns nothing for unknown ids.
std::optional<SmoothFunction> corpus_lookup(const std::string& id);

/// Ids of the named corpus entries, in manifest order.
std::vector<std::string> corpus_ids();

}  // namespace holderlab
