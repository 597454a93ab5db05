#include "holderlab/quadratic_norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace holderlab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Odometer over {0,1,2}^n. Starts at the all-zero pattern; next() advances
// and reports false once every pattern has been visited.
struct TernaryOdometer {
  std::vector<int> digit;
  explicit TernaryOdometer(int n) : digit(static_cast<std::size_t>(n), 0) {}
  bool next() {
    for (auto& d : digit) {
      if (++d < 3) return true;
      d = 0;
    }
    return false;
  }
};

// Skip one of each antipodal pattern pair: x and -x carry the same |x'Bx|.
bool antipodal_skip(const std::vector<int>& digit) {
  for (int d : digit) {
    if (d == 1) return false;
    if (d == 2) return true;
  }
  return true;  // all-free pattern, skipped by callers anyway
}

double sign_of(int digit) { return digit == 1 ? 1.0 : -1.0; }

// Pseudo-solve of the symmetric system A z = rhs via the spectral
// decomposition. Returns the minimum-norm solution, the kernel basis, and
// whether the system is consistent.
struct SymSolve {
  Eigen::VectorXd z0;
  Eigen::MatrixXd kernel;  // columns span ker(A) (may have 0 columns)
  bool consistent = false;
};

SymSolve pseudo_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs,
                      double scale) {
  SymSolve out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lam_max = lam.cwiseAbs().maxCoeff();
  const double thresh = 1e-11 * std::max(lam_max, scale);

  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(A.rows());
  std::vector<Eigen::Index> kernel_idx;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam[i]) <= thresh) {
      kernel_idx.push_back(i);
    } else {
      z0 += es.eigenvectors().col(i) * (es.eigenvectors().col(i).dot(rhs) / lam[i]);
    }
  }
  out.z0 = z0;
  out.kernel.resize(A.rows(), static_cast<Eigen::Index>(kernel_idx.size()));
  for (std::size_t j = 0; j < kernel_idx.size(); ++j)
    out.kernel.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(kernel_idx[j]);
  const double resid = (A * z0 - rhs).cwiseAbs().maxCoeff();
  out.consistent = resid <= 1e-8 * std::max({1.0, scale, z0.cwiseAbs().maxCoeff()});
  return out;
}

// Representatives of the affine solution set z0 + span(kernel), bounded to a
// small grid. The restricted quadratic is constant on the set, so any
// feasible representative realizes the face value.
template <class Feasible, class Consider>
void try_representatives(const SymSolve& sol, Feasible feasible, Consider consider) {
  if (feasible(sol.z0)) {
    consider(sol.z0);
    return;
  }
  const Eigen::Index r = sol.kernel.cols();
  if (r < 1 || r > 2) return;
  static const double grid[] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  if (r == 1) {
    for (double t : grid) {
      Eigen::VectorXd z = sol.z0 + t * sol.kernel.col(0);
      if (feasible(z)) {
        consider(z);
        return;
      }
    }
  } else {
    for (double t0 : grid)
      for (double t1 : grid) {
        Eigen::VectorXd z = sol.z0 + t0 * sol.kernel.col(0) + t1 * sol.kernel.col(1);
        if (feasible(z)) {
          consider(z);
          return;
        }
      }
  }
}

// --- spectral route (L2 and WeightedEuclidean) ------------------------------

struct SpectralResult {
  double value;
  Eigen::VectorXd x;  // unit vector in the norm, |x'Bx| = value
  double lambda;      // signed extreme eigenvalue of the whitened matrix
};

SpectralResult spectral_extreme(const Eigen::MatrixXd& Bm, const NormSpec& spec) {
  Eigen::MatrixXd W;
  if (spec.kind() == NormKind::WeightedEuclidean) {
    W = spec.whitener_inverse() * Bm * spec.whitener_inverse();
  } else {
    W = Bm;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()));
  const Eigen::VectorXd& lam = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < lam.size(); ++i)
    if (std::abs(lam[i]) > std::abs(lam[best])) best = i;
  Eigen::VectorXd v = es.eigenvectors().col(best);
  if (spec.kind() == NormKind::WeightedEuclidean) v = spec.whitener_inverse() * v;
  return {std::abs(lam[best]), v, lam[best]};
}

// --- LInf operator norm ------------------------------------------------------

OperatorNormResult opnorm_linf_enum(const Eigen::MatrixXd& Bm) {
  const int n = static_cast<int>(Bm.rows());
  double best = -1.0;
  Eigen::VectorXd best_s;
  for (std::uint64_t mask = 0; mask < (1ull << (n - 1)); ++mask) {
    // First coordinate fixed to +1; the antipodal vector gives the same value.
    Eigen::VectorXd s(n);
    s[0] = 1.0;
    for (int i = 1; i < n; ++i) s[i] = (mask >> (i - 1)) & 1u ? -1.0 : 1.0;
    const double v = (Bm * s).lpNorm<1>();
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  OperatorNormResult out;
  out.value = best;
  out.x = best_s;
  Eigen::VectorXd bs = Bm * best_s;
  out.y.resize(n);
  for (int i = 0; i < n; ++i) out.y[i] = bs[i] < 0.0 ? -1.0 : 1.0;
  out.exact = true;
  return out;
}

// --- face enumeration for form norms ----------------------------------------

// max |x'Bx| over the boundary of the LInf ball. Each face of the cube fixes
// a nonempty set of coordinates at +-1; a maximizer interior to a face is a
// stationary point of the restricted quadratic in the free coordinates.
FormNormResult form_linf_enum(const Eigen::MatrixXd& Bm) {
  const int n = static_cast<int>(Bm.rows());
  const double scale = std::max(1.0, Bm.cwiseAbs().maxCoeff());
  FormNormResult out;
  out.value = -1.0;

  auto consider = [&](const Eigen::VectorXd& x) {
    const double q = std::abs(x.dot(Bm * x));
    if (q > out.value) {
      out.value = q;
      out.x = x;
    }
  };

  TernaryOdometer od(n);
  while (od.next()) {
    if (antipodal_skip(od.digit)) continue;
    std::vector<int> fixed, free_idx;
    for (int i = 0; i < n; ++i)
      (od.digit[static_cast<std::size_t>(i)] == 0 ? free_idx : fixed).push_back(i);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i : fixed) x[i] = sign_of(od.digit[static_cast<std::size_t>(i)]);

    if (free_idx.empty()) {
      consider(x);
      continue;
    }

    const Eigen::Index k = static_cast<Eigen::Index>(free_idx.size());
    Eigen::MatrixXd Bff(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b)
        Bff(a, b) = Bm(free_idx[static_cast<std::size_t>(a)],
                       free_idx[static_cast<std::size_t>(b)]);
      double dot = 0.0;
      for (int i : fixed) dot += Bm(free_idx[static_cast<std::size_t>(a)], i) * x[i];
      rhs[a] = -dot;
    }

    SymSolve sol = pseudo_solve(Bff, rhs, scale);
    if (!sol.consistent) continue;

    auto feasible = [](const Eigen::VectorXd& z) {
      return z.cwiseAbs().maxCoeff() <= 1.0 + 1e-9;
    };
    auto consider_z = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd full = x;
      for (Eigen::Index a = 0; a < k; ++a)
        full[free_idx[static_cast<std::size_t>(a)]] =
            std::clamp(z[a], -1.0, 1.0);
      consider(full);
    };
    try_representatives(sol, feasible, consider_z);
  }
  out.exact = true;
  return out;
}

// max |x'Bx| over the boundary of the L1 ball (the cross-polytope). Faces are
// the sign-pattern simplices conv{ sigma_i e_i : i in S }; on the affine hull
// sum_i sigma_i x_i = 1 a stationary point satisfies the bordered system
// 2 B_SS z = lambda sigma.
FormNormResult form_l1_enum(const Eigen::MatrixXd& Bm) {
  const int n = static_cast<int>(Bm.rows());
  const double scale = std::max(1.0, Bm.cwiseAbs().maxCoeff());
  FormNormResult out;
  out.value = -1.0;

  auto consider = [&](const Eigen::VectorXd& x) {
    const double q = std::abs(x.dot(Bm * x));
    if (q > out.value) {
      out.value = q;
      out.x = x;
    }
  };

  TernaryOdometer od(n);
  while (od.next()) {
    if (antipodal_skip(od.digit)) continue;
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (od.digit[static_cast<std::size_t>(i)] != 0) support.push_back(i);
    const Eigen::Index k = static_cast<Eigen::Index>(support.size());

    Eigen::VectorXd sigma(k);
    for (Eigen::Index a = 0; a < k; ++a)
      sigma[a] = sign_of(od.digit[static_cast<std::size_t>(support[static_cast<std::size_t>(a)])]);

    if (k == 1) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x[support[0]] = sigma[0];
      consider(x);
      continue;
    }

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b)
        kkt(a, b) = 2.0 * Bm(support[static_cast<std::size_t>(a)],
                             support[static_cast<std::size_t>(b)]);
    kkt.col(k).head(k) = -sigma;
    kkt.row(k).head(k) = -sigma.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs[k] = -1.0;

    SymSolve sol = pseudo_solve(kkt, rhs, scale);
    if (!sol.consistent) continue;

    auto feasible = [&](const Eigen::VectorXd& w) {
      for (Eigen::Index a = 0; a < k; ++a)
        if (sigma[a] * w[a] < -1e-9) return false;
      const double t = sigma.dot(w.head(k));
      return t > 0.5;
    };
    auto consider_w = [&](const Eigen::VectorXd& w) {
      Eigen::VectorXd z = w.head(k);
      for (Eigen::Index a = 0; a < k; ++a)
        if (sigma[a] * z[a] < 0.0) z[a] = 0.0;
      z /= sigma.dot(z);
      Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
      for (Eigen::Index a = 0; a < k; ++a)
        full[support[static_cast<std::size_t>(a)]] = z[a];
      consider(full);
    };
    try_representatives(sol, feasible, consider_w);
  }
  out.exact = true;
  return out;
}

// --- sampled fallbacks -------------------------------------------------------

OperatorNormResult opnorm_sampled(const Eigen::MatrixXd& Bm, const NormSpec& spec,
                                  const QuadNormConfig& config) {
  OperatorNormResult out;
  out.exact = false;
  out.value = -1.0;
  for (const auto& x : sample_unit_sphere(spec, config.fallback_samples, config.seed)) {
    const DualVector bx(Bm * x);
    const double v = dual_norm_eval(spec, bx);
    if (v > out.value) {
      out.value = v;
      out.x = x;
      out.y = v > 0.0 ? steepest_ascent_direction(spec, bx) : x;
    }
  }
  return out;
}

FormNormResult form_sampled(const Eigen::MatrixXd& Bm, const NormSpec& spec,
                            const QuadNormConfig& config) {
  FormNormResult out;
  out.exact = false;
  out.value = -1.0;
  for (const auto& x : sample_unit_sphere(spec, config.fallback_samples, config.seed)) {
    const double q = std::abs(x.dot(Bm * x));
    if (q > out.value) {
      out.value = q;
      out.x = x;
    }
  }
  return out;
}

}  // namespace

SymmetricOperator::SymmetricOperator(const Eigen::MatrixXd& m) {
  require(m.rows() >= 1 && m.rows() == m.cols(), "SymmetricOperator: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "SymmetricOperator: matrix must be symmetric");
  m_ = 0.5 * (m + m.transpose());
}

OperatorNormResult operator_norm(const SymmetricOperator& B, const NormSpec& spec,
                                 const QuadNormConfig& config) {
  require(B.dim() == spec.dim(), "operator_norm: dimension mismatch");
  const Eigen::MatrixXd& Bm = B.matrix();
  switch (spec.kind()) {
    case NormKind::L2:
    case NormKind::WeightedEuclidean: {
      SpectralResult s = spectral_extreme(Bm, spec);
      OperatorNormResult out;
      out.value = s.value;
      out.x = s.x;
      out.y = s.lambda < 0.0 ? Eigen::VectorXd(-s.x) : s.x;
      out.exact = true;
      return out;
    }
    case NormKind::L1: {
      OperatorNormResult out;
      Eigen::Index bi = 0, bj = 0;
      double best = -1.0;
      for (Eigen::Index i = 0; i < Bm.rows(); ++i)
        for (Eigen::Index j = 0; j < Bm.cols(); ++j)
          if (std::abs(Bm(i, j)) > best) {
            best = std::abs(Bm(i, j));
            bi = i;
            bj = j;
          }
      out.value = best;
      out.x = Eigen::VectorXd::Zero(Bm.rows());
      out.y = Eigen::VectorXd::Zero(Bm.rows());
      out.x[bi] = Bm(bi, bj) < 0.0 ? -1.0 : 1.0;
      out.y[bj] = 1.0;
      out.exact = true;
      return out;
    }
    case NormKind::LInf: {
      if (spec.dim() <= config.bilinear_enum_cap) return opnorm_linf_enum(Bm);
      return opnorm_sampled(Bm, spec, config);
    }
    case NormKind::Transformed: {
      const Eigen::MatrixXd& A = spec.map();
      SymmetricOperator pulled(A.transpose() * Bm * A);
      OperatorNormResult out = operator_norm(pulled, spec.base(), config);
      out.x = A * out.x;
      out.y = A * out.y;
      return out;
    }
  }
  return {};
}

FormNormResult quadratic_form_norm(const SymmetricOperator& B, const NormSpec& spec,
                                   const QuadNormConfig& config) {
  require(B.dim() == spec.dim(), "quadratic_form_norm: dimension mismatch");
  const Eigen::MatrixXd& Bm = B.matrix();
  switch (spec.kind()) {
    case NormKind::L2:
    case NormKind::WeightedEuclidean: {
      SpectralResult s = spectral_extreme(Bm, spec);
      FormNormResult out;
      out.value = s.value;
      out.x = s.x;
      out.exact = true;
      return out;
    }
    case NormKind::LInf: {
      if (spec.dim() <= config.form_enum_cap) return form_linf_enum(Bm);
      return form_sampled(Bm, spec, config);
    }
    case NormKind::L1: {
      if (spec.dim() <= config.form_enum_cap) return form_l1_enum(Bm);
      return form_sampled(Bm, spec, config);
    }
    case NormKind::Transformed: {
      const Eigen::MatrixXd& A = spec.map();
      SymmetricOperator pulled(A.transpose() * Bm * A);
      FormNormResult out = quadratic_form_norm(pulled, spec.base(), config);
      out.x = A * out.x;
      return out;
    }
  }
  return {};
}

GapReport gap_report(const SymmetricOperator& B, const NormSpec& spec,
                     const QuadNormConfig& config) {
  OperatorNormResult op = operator_norm(B, spec, config);
  FormNormResult form = quadratic_form_norm(B, spec, config);
  require(op.exact && form.exact,
          "gap_report: exact computation is not available for this kind/size");

  GapReport rep;
  rep.opnorm = op.value;
  rep.qnorm = form.value;
  rep.op_x = op.x;
  rep.op_y = op.y;
  rep.form_x = form.x;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.matrix());
  const double lam_scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const bool psd = es.eigenvalues().minCoeff() >= -1e-12 * lam_scale;
  rep.equality_expected = spec.euclidean_kind() || psd;

  const double tol = 1e-9 * std::max(1.0, rep.opnorm);
  rep.sandwich_pass =
      rep.qnorm <= rep.opnorm + tol && rep.qnorm >= 0.5 * rep.opnorm - tol;
  rep.equality_pass =
      !rep.equality_expected || std::abs(rep.qnorm - rep.opnorm) <= tol;
  rep.ratio = rep.opnorm > tol ? rep.qnorm / rep.opnorm : 1.0;
  rep.pass = rep.sandwich_pass && rep.equality_pass;
  rep.detail = rep.pass ? "sandwich holds" : "sandwich or equality violated";
  return rep;
}

SymmetricOperator rank2_operator(const DualVector& phi, const DualVector& psi, int sign) {
  require(sign == 1 || sign == -1, "rank2_operator: sign must be +1 or -1");
  require(phi.dim() == psi.dim() && phi.dim() >= 2,
          "rank2_operator: functionals must share a dimension >= 2");
  const double g11 = phi.coeffs.squaredNorm();
  const double g22 = psi.coeffs.squaredNorm();
  const double g12 = phi.coeffs.dot(psi.coeffs);
  require(g11 * g22 - g12 * g12 > 1e-12 * std::max(1.0, g11 * g22),
          "rank2_operator: functionals are linearly dependent");
  Eigen::MatrixXd m = phi.coeffs * phi.coeffs.transpose() +
                      static_cast<double>(sign) * psi.coeffs * psi.coeffs.transpose();
  return SymmetricOperator(m);
}

}  // namespace holderlab
