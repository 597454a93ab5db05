#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "holderlab/rng.hpp"

namespace oracles {

using holderlab::NormKind;

Eigen::VectorXd fd_gradient(const holderlab::SmoothFunction& f, const Eigen::VectorXd& x,
                            double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (f.value(hi) - f.value(lo)) / (2.0 * h);
  }
  return g;
}

double fd_gradient_error(const holderlab::SmoothFunction& f, const Eigen::VectorXd& x,
                         double h) {
  const Eigen::VectorXd fd = fd_gradient(f, x, h);
  const Eigen::VectorXd g = f.gradient(x).coeffs;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(fd[i] - g[i]) / std::max(1.0, std::abs(g[i])));
  return worst;
}

double power_iteration_spectral_radius(const Eigen::MatrixXd& B, int iters, double tol) {
  const Eigen::Index n = B.rows();
  holderlab::SeededRng rng(12345);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  v.normalize();
  double lambda2 = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = B * (B * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    const double rq = w.dot(B * (B * w));
    if (it > 2 && std::abs(rq - lambda2) <= tol * std::max(1.0, std::abs(rq))) {
      lambda2 = rq;
      break;
    }
    lambda2 = rq;
    v = w;
  }
  return std::sqrt(std::max(lambda2, 0.0));
}

namespace {

double pnorm(const double* x, int n, NormKind kind) {
  double v = 0.0;
  switch (kind) {
    case NormKind::L1:
      for (int i = 0; i < n; ++i) v += std::abs(x[i]);
      return v;
    case NormKind::L2:
      for (int i = 0; i < n; ++i) v += x[i] * x[i];
      return std::sqrt(v);
    case NormKind::LInf:
      for (int i = 0; i < n; ++i) v = std::max(v, std::abs(x[i]));
      return v;
    default:
      throw std::invalid_argument("grid oracle: p-norm kinds only");
  }
}

double pdual(const double* x, int n, NormKind kind) {
  switch (kind) {
    case NormKind::L1:
      return pnorm(x, n, NormKind::LInf);
    case NormKind::L2:
      return pnorm(x, n, NormKind::L2);
    case NormKind::LInf:
      return pnorm(x, n, NormKind::L1);
    default:
      throw std::invalid_argument("grid oracle: p-norm kinds only");
  }
}

template <class Eval>
double grid_scan(const Eigen::MatrixXd& B, NormKind kind, double step, Eval eval) {
  const int n = static_cast<int>(B.rows());
  if (n != 2 && n != 3) throw std::invalid_argument("grid oracle: dims 2 and 3 only");
  const int m = static_cast<int>(std::lround(2.0 / step)) + 1;
  double best = 0.0;
  double x[3] = {0.0, 0.0, 0.0};
  const int kmax = n == 3 ? m : 1;
  for (int i = 0; i < m; ++i) {
    x[0] = -1.0 + step * i;
    for (int j = 0; j < m; ++j) {
      x[1] = -1.0 + step * j;
      for (int k = 0; k < kmax; ++k) {
        if (n == 3) x[2] = -1.0 + step * k;
        const double nrm = pnorm(x, n, kind);
        if (nrm < 0.25) continue;  // normalization keeps directions intact
        best = std::max(best, eval(x, nrm));
      }
    }
  }
  return best;
}

}  // namespace

double grid_form_norm(const Eigen::MatrixXd& B, NormKind kind, double step) {
  const int n = static_cast<int>(B.rows());
  return grid_scan(B, kind, step, [&](const double* x, double nrm) {
    double q = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) q += x[a] * B(a, b) * x[b];
    return std::abs(q) / (nrm * nrm);
  });
}

double grid_operator_norm(const Eigen::MatrixXd& B, NormKind kind, double step) {
  const int n = static_cast<int>(B.rows());
  return grid_scan(B, kind, step, [&](const double* x, double nrm) {
    double bx[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) bx[a] += B(a, b) * x[b];
    return pdual(bx, n, kind) / nrm;
  });
}

PowerConstants grid_power_constants(double nu, int grid, int refine) {
  auto g = [nu](double x) {
    return x == 0.0 ? 0.0 : (x > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), nu);
  };
  auto f = [nu](double x) { return std::pow(std::abs(x), 1.0 + nu) / (1.0 + nu); };
  // scale invariance of the family makes a large separation floor lossless
  auto ratio_m = [&](double x, double y) {
    const double sep = std::abs(x - y);
    return sep < 1e-2 ? -1.0 : std::abs(g(x) - g(y)) / std::pow(sep, nu);
  };
  auto ratio_l = [&](double x, double y) {
    const double sep = std::abs(x - y);
    if (sep < 1e-2) return -1.0;
    return (1.0 + nu) * std::abs(f(y) - f(x) - g(x) * (y - x)) / std::pow(sep, 1.0 + nu);
  };

  auto maximize = [&](auto ratio) {
    double best = 0.0, bx = 0.0, by = 1.0;
    for (int i = 0; i < grid; ++i) {
      const double x = -2.0 + 4.0 * i / (grid - 1);
      for (int j = i + 1; j < grid; ++j) {
        const double y = -2.0 + 4.0 * j / (grid - 1);
        const double r = ratio(x, y);
        if (r > best) {
          best = r;
          bx = x;
          by = y;
        }
      }
    }
    double step = 0.02;
    for (int sweep = 0; sweep < refine; ++sweep) {
      bool improved = false;
      for (int c = 0; c < 2; ++c)
        for (double s : {step, -step}) {
          double x = std::clamp(c == 0 ? bx + s : bx, -2.0, 2.0);
          double y = std::clamp(c == 1 ? by + s : by, -2.0, 2.0);
          const double r = ratio(x, y);
          if (r > best) {
            best = r;
            bx = x;
            by = y;
            improved = true;
          }
        }
      if (!improved) {
        step *= 0.5;
        if (step < 1e-14) break;
      }
    }
    return best;
  };
  return {maximize(ratio_m), maximize(ratio_l)};
}

bool mvee_locally_optimal(const std::vector<Eigen::VectorXd>& points,
                          const Eigen::MatrixXd& A, int trials, std::uint64_t seed) {
  holderlab::SeededRng rng(seed);
  const Eigen::Index n = A.rows();
  const double base_det = A.determinant();
  const double scale = A.cwiseAbs().maxCoeff();
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) D(i, j) = rng.gaussian();
    D = 0.5 * (D + D.transpose());
    D *= scale / D.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd Ap = A + 1e-4 * D;
    bool contains = true;
    for (const auto& p : points)
      if (p.dot(Ap * p) > 1.0 + 1e-12) {
        contains = false;
        break;
      }
    // a feasible perturbation must not shrink the ellipsoid volume
    if (contains && Ap.determinant() > base_det * (1.0 + 1e-7)) return false;
  }
  return true;
}

}  // namespace oracles
