#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "holderlab/normed_space.hpp"
#include "holderlab/quadratic_norms.hpp"

namespace holderlab {

struct MveeResult {
  Eigen::MatrixXd A;  // ellipsoid { x : x'Ax <= 1 } containing the points
  std::vector<int> contact_indices;
  double residual = 0.0;  // optimality measure at termination
  long iterations = 0;
};

/// Origin-centered minimum-volume enclosing ellipsoid of a symmetric point
/// set, via the multiplicative-weights iteration with away steps. Terminates
/// when max_p p'Ap <= 1 + tol and the optimality residual is <= tol. Contact
/// points are those with p'Ap >= 1 - 10 tol. Rejects point sets that are not
/// symmetric or do not span R^n; throws on non-convergence.
MveeResult mvee_origin(const std::vector<Eigen::VectorXd>& points, double tol,
                       long max_iter = 500000);

/// The normalized frame of a norm: the enclosing ellipsoid E of the unit
/// ball K, a linear map sending E to the Euclidean unit ball, and the mapped
/// contact points (on the unit sphere). In the mapped frame the unit ball
/// K' = map K sits inside the Euclidean ball and touches it at the contacts.
struct EllipsoidModel {
  Eigen::MatrixXd A;    // ellipsoid matrix for the original unit ball
  Eigen::MatrixXd map;  // A^{1/2}, sends E to the unit ball
  std::vector<Eigen::VectorXd> contact_points;  // unit 2-norm, in the mapped frame
  double residual = 0.0;
};

/// Samples the unit sphere of the norm (vertices included for polyhedral
/// kinds), computes the enclosing ellipsoid, and maps contacts onto the
/// Euclidean sphere. Throws when the contact set fails to span R^n or the
/// ellipsoid iteration fails.
EllipsoidModel lowner_transform(const NormSpec& spec, int samples, std::uint64_t seed,
                                double tol);

struct PairSearchConfig {
  /// Cap on the n-subset enumeration in the fallback polytope search.
  long combination_cap = 200000;
};

/// Searches contact pairs (u, v) whose normalized midpoint leaves the mapped
/// unit ball by at least `margin`: ||(u+v)/||u+v||_2||' >= 1 + margin. Falls
/// back to vertices of { x : x'y <= 1 for all contacts y } (enumerated at
/// desk scale) and the contacts active at the norm-maximal vertex. Returns
/// nothing when no pair clears the margin.
std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> find_witness_pair(
    const EllipsoidModel& model, const NormSpec& kprime_spec, double margin,
    const PairSearchConfig& config = {});

/// A machine-checkable witness that a norm is not induced by a scalar
/// product: a rank-2 self-adjoint operator whose quadratic-form norm is
/// certified below its operator norm.
struct WitnessCertificate {
  Eigen::VectorXd u, v;    // contact pair in the mapped frame, unit 2-norm
  Eigen::VectorXd e1, e2;  // orthonormal: (u+v)/alpha and (u-v)/beta
  double alpha = 0.0;      // ||u+v||_2
  double beta = 0.0;       // ||u-v||_2
  double kappa = 0.0;      // max { |e1'x| : x in K' }, in (0,1) for a witness
  Eigen::MatrixXd map;     // frame map (copied from the model)
  Eigen::MatrixXd B_tilde; // (1/kappa^2) e1 e1' - e2 e2'
  Eigen::MatrixXd B;       // pullback map' B_tilde map, acts on the original space
  double qnorm_upper = 0.0;   // exact ||Q_{B_tilde}|| in the mapped frame, <= 1 + tol
  double opnorm_lower = 0.0;  // <B_tilde u, v> = (1/kappa^2) alpha^2/4 + beta^2/4 > 1
};

struct CertifyConfig {
  double euclid_tol = 1e-9;  // fast-path threshold on the parallelogram residual
  int fast_pairs = 1000;
  int mvee_samples = 256;
  double mvee_tol = 1e-7;
  double witness_margin = 1e-3;
  std::uint64_t seed = 0;
  bool skip_fast_path = false;  // force the full pipeline (testing)
  long mvee_max_iter = 500000;
  PairSearchConfig pair_search;
};

/// Builds the witness certificate from a pair produced by find_witness_pair.
/// kappa is evaluated exactly as a dual norm through the map. Throws when the
/// pair is not numerically a witness (kappa too close to 1, or the certified
/// gap fails to open).
WitnessCertificate build_witness(const EllipsoidModel& model, const NormSpec& spec,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                 const CertifyConfig& config = {});

enum class CertifyVerdict { Euclidean, NonEuclidean, Inconclusive };

struct CertifyResult {
  CertifyVerdict verdict = CertifyVerdict::Inconclusive;
  double residual = 0.0;  // max parallelogram residual seen on the fast path
  std::optional<WitnessCertificate> certificate;
  std::string diagnostics;
};

/// Decides whether the norm is induced by a scalar product. Fast path: the
/// parallelogram residual over seeded unit-vector pairs. When the residual is
/// above the threshold, runs the ellipsoid pipeline; a returned certificate
/// is a constructive disproof. A large residual with no witness found yields
/// Inconclusive, never a Euclidean claim.
CertifyResult certify(const NormSpec& spec, const CertifyConfig& config = {});

struct CertificateCheck {
  bool pass = false;
  std::string detail;
};

/// Re-verifies a certificate from scratch against the norm: contact
/// membership, the orthonormal frame and parallelogram identity, kappa, the
/// bilinear value, the exact form norm, and the pullback consistency.
CertificateCheck verify_certificate(const WitnessCertificate& cert, const NormSpec& spec,
                                    double tol = 1e-7);

const char* to_string(CertifyVerdict verdict);

}  // namespace holderlab
