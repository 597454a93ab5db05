#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace holderlab {

enum class NormKind { L1, L2, LInf, WeightedEuclidean, Transformed };

/// A linear functional on R^n, represented through the standard pairing
/// <phi, h> = sum_i phi_i h_i. Kept as a distinct type so primal vectors and
/// gradients do not mix silently.
struct DualVector {
  Eigen::VectorXd coeffs;

  DualVector() = default;
  explicit DualVector(Eigen::VectorXd c) : coeffs(std::move(c)) {}
  Eigen::Index dim() const { return coeffs.size(); }
};

inline double pairing(const DualVector& phi, const Eigen::VectorXd& h) {
  return phi.coeffs.dot(h);
}

/// Immutable description of a norm on R^n.
///
/// Supported kinds:
///   L1, L2, LInf          -- the classical p-norms,
///   WeightedEuclidean     -- ||x|| = sqrt(x' H x) for symmetric positive
///                            definite H,
///   Transformed           -- ||x||' = ||A^{-1} x|| of a base norm, for an
///                            invertible map A (the image norm of the base
///                            unit ball under A).
///
/// Construction validates the parameters (SPD weight, invertible map) and
/// precomputes the factorizations the evaluators need. Copies are cheap and
/// the object is safe to share across threads.
class NormSpec {
 public:
  static NormSpec l1(Eigen::Index dim);
  static NormSpec l2(Eigen::Index dim);
  static NormSpec linf(Eigen::Index dim);
  static NormSpec weighted_euclidean(const Eigen::MatrixXd& weight);
  static NormSpec transformed(NormSpec base, const Eigen::MatrixXd& map);

  NormKind kind() const;
  Eigen::Index dim() const;

  /// Weight matrix H (WeightedEuclidean only).
  const Eigen::MatrixXd& weight() const;
  const Eigen::MatrixXd& weight_inverse() const;
  /// H^{1/2} and H^{-1/2} (WeightedEuclidean only).
  const Eigen::MatrixXd& whitener() const;
  const Eigen::MatrixXd& whitener_inverse() const;

  /// Map A and its inverse (Transformed only).
  const Eigen::MatrixXd& map() const;
  const Eigen::MatrixXd& map_inverse() const;
  const NormSpec& base() const;

  /// True when the norm is induced by a scalar product by construction.
  bool euclidean_kind() const;
  /// True when the unit ball is a polytope (L1, LInf, or a transform of one).
  bool polyhedral_kind() const;

  /// "l1", "l2", "linf", "weighted", "transformed".
  std::string kind_name() const;

 private:
  struct Impl;
  explicit NormSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// ||x|| under the given spec. Throws std::invalid_argument on a dimension
/// mismatch.
double norm_eval(const NormSpec& spec, const Eigen::VectorXd& x);

/// Dual norm ||phi||_* = max { <phi,h> : ||h|| = 1 }, in closed form for all
/// supported kinds (Transformed reduces to the base through the map).
double dual_norm_eval(const NormSpec& spec, const DualVector& phi);

/// A unit vector d with <phi, d> = ||phi||_*. Ties are broken
/// deterministically: LInf uses sign(phi_i) with zeros mapped to +1; L1 picks
/// the smallest index of maximal |phi_i|. Throws if phi = 0.
Eigen::VectorXd steepest_ascent_direction(const NormSpec& spec, const DualVector& phi);

/// | ||u+v||^2 + ||u-v||^2 - 2||u||^2 - 2||v||^2 |. Identically zero exactly
/// for norms induced by a scalar product (Jordan-von Neumann).
double parallelogram_residual(const NormSpec& spec, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v);

/// Deterministic sample of the unit sphere of the norm. The result always
/// contains the normalized axis points +-e_i; for polyhedral kinds it also
/// contains every unit-ball vertex when the mandatory points fit into
/// `count`. Remaining slots are filled with gaussian directions scaled onto
/// the sphere. The returned list has max(count, #mandatory) entries, each
/// with | ||x|| - 1 | <= 1e-12.
std::vector<Eigen::VectorXd> sample_unit_sphere(const NormSpec& spec, int count,
                                                std::uint64_t seed);

/// Vertices of the unit ball for polyhedral kinds (L1: +-e_i, LInf: {+-1}^n,
/// Transformed: mapped base vertices, rescaled onto the sphere). Throws for
/// non-polyhedral kinds and for LInf-like kinds with dim > 20.
std::vector<Eigen::VectorXd> unit_ball_vertices(const NormSpec& spec);

struct DualSamplingConfig {
  int samples = 10000;
  int refine = 100;
  std::uint64_t seed = 0;
};

/// Sampled-sphere maximization of <phi, h> with coordinate-ascent polish.
/// A lower bound on the dual norm for any norm-evaluation oracle; used as an
/// independent cross-check of the closed forms.
double dual_norm_sampled(const NormSpec& spec, const DualVector& phi,
                         const DualSamplingConfig& config = {});

}  // namespace holderlab
