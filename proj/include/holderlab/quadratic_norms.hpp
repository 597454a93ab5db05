#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "holderlab/normed_space.hpp"

namespace holderlab {

/// A self-adjoint operator on R^n in the standard pairing, i.e. a symmetric
/// matrix. Construction rejects matrices that are asymmetric beyond 1e-12
/// (relative) and symmetrizes exactly afterwards.
class SymmetricOperator {
 public:
  explicit SymmetricOperator(const Eigen::MatrixXd& m);

  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Eigen::MatrixXd m_;
};

struct QuadNormConfig {
  /// Cap on the sign-vector enumeration for the LInf operator norm (2^n).
  int bilinear_enum_cap = 14;
  /// Cap on the face enumeration for form norms (3^n faces).
  int form_enum_cap = 10;
  /// Sphere samples for the flagged fallback above the caps.
  int fallback_samples = 20000;
  std::uint64_t seed = 0;
};

struct OperatorNormResult {
  double value = 0.0;
  Eigen::VectorXd x, y;  // witness pair, ||x|| = ||y|| = 1, <Bx,y> = value
  bool exact = true;
};

struct FormNormResult {
  double value = 0.0;
  Eigen::VectorXd x;  // witness, ||x|| = 1, |x'Bx| = value
  bool exact = true;
};

/// ||B|| = max { <Bx,y> : ||x|| = ||y|| = 1 }.
///
/// Exact routes: spectral for L2/WeightedEuclidean, max |B_ij| for L1,
/// sign-vector enumeration for LInf (the maximum of a function linear in each
/// argument over a product of cubes is attained at vertices), and reduction
/// through the map for Transformed. Above the enumeration cap the result is a
/// sampled lower bound with exact = false.
OperatorNormResult operator_norm(const SymmetricOperator& B, const NormSpec& spec,
                                 const QuadNormConfig& config = {});

/// ||Q_B|| = max { |x'Bx| : ||x|| = 1 }.
///
/// Exact routes: spectral for the Euclidean kinds; for LInf/L1 an enumeration
/// of the faces of the unit sphere, solving the stationary system of the
/// restricted quadratic on each face and keeping feasible candidates plus the
/// vertices. Above the cap: sampled lower bound, exact = false.
FormNormResult quadratic_form_norm(const SymmetricOperator& B, const NormSpec& spec,
                                   const QuadNormConfig& config = {});

struct GapReport {
  double opnorm = 0.0;
  double qnorm = 0.0;
  double ratio = 1.0;  // qnorm / opnorm (1 when opnorm = 0)
  bool sandwich_pass = false;
  bool equality_expected = false;  // Euclidean kind or positive semidefinite B
  bool equality_pass = true;
  bool pass = false;
  Eigen::VectorXd op_x, op_y, form_x;
  std::string detail;
};

/// Checks (1/2)||B|| <= ||Q_B|| <= ||B||, plus equality for Euclidean kinds
/// and for positive semidefinite B. Requires exact norm computation for the
/// given kind and size and throws when only the sampled fallback is
/// available.
GapReport gap_report(const SymmetricOperator& B, const NormSpec& spec,
                     const QuadNormConfig& config = {});

/// The rank-2 operator x -> <phi,x> phi + sign <psi,x> psi. Throws when phi
/// and psi are linearly dependent.
SymmetricOperator rank2_operator(const DualVector& phi, const DualVector& psi, int sign);

}  // namespace holderlab
