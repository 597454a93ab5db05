#include "holderlab/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "holderlab/rng.hpp"

namespace holderlab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::MatrixXd spd_power(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                          double exponent) {
  Eigen::VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::pow(d[i], exponent);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

struct NormSpec::Impl {
  NormKind kind = NormKind::L2;
  Eigen::Index dim = 0;

  // WeightedEuclidean
  Eigen::MatrixXd weight;
  Eigen::MatrixXd weight_inv;
  Eigen::MatrixXd weight_sqrt;
  Eigen::MatrixXd weight_sqrt_inv;

  // Transformed
  Eigen::MatrixXd map;
  Eigen::MatrixXd map_inv;
  std::shared_ptr<const NormSpec> base;
};

NormSpec NormSpec::l1(Eigen::Index dim) {
  require(dim >= 1, "NormSpec: dim must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = NormKind::L1;
  impl->dim = dim;
  return NormSpec(std::move(impl));
}

NormSpec NormSpec::l2(Eigen::Index dim) {
  require(dim >= 1, "NormSpec: dim must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = NormKind::L2;
  impl->dim = dim;
  return NormSpec(std::move(impl));
}

NormSpec NormSpec::linf(Eigen::Index dim) {
  require(dim >= 1, "NormSpec: dim must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = NormKind::LInf;
  impl->dim = dim;
  return NormSpec(std::move(impl));
}

NormSpec NormSpec::weighted_euclidean(const Eigen::MatrixXd& weight) {
  require(weight.rows() >= 1 && weight.rows() == weight.cols(),
          "NormSpec: weight must be a square matrix");
  const double scale = std::max(1.0, weight.cwiseAbs().maxCoeff());
  require((weight - weight.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "NormSpec: weight matrix must be symmetric");
  Eigen::MatrixXd sym = 0.5 * (weight + weight.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  require(es.info() == Eigen::Success, "NormSpec: eigendecomposition failed");
  require(es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()),
          "NormSpec: weight matrix must be positive definite");

  auto impl = std::make_shared<Impl>();
  impl->kind = NormKind::WeightedEuclidean;
  impl->dim = sym.rows();
  impl->weight = sym;
  impl->weight_inv = spd_power(es, -1.0);
  impl->weight_sqrt = spd_power(es, 0.5);
  impl->weight_sqrt_inv = spd_power(es, -0.5);
  return NormSpec(std::move(impl));
}

NormSpec NormSpec::transformed(NormSpec base, const Eigen::MatrixXd& map) {
  require(map.rows() == map.cols() && map.rows() == base.dim(),
          "NormSpec: map must be square and match the base dimension");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  require(smin > 0.0 && smax / smin < 1e12, "NormSpec: map must be invertible");

  auto impl = std::make_shared<Impl>();
  impl->kind = NormKind::Transformed;
  impl->dim = base.dim();
  impl->map = map;
  impl->map_inv = map.inverse();
  impl->base = std::make_shared<const NormSpec>(std::move(base));
  return NormSpec(std::move(impl));
}

NormKind NormSpec::kind() const { return impl_->kind; }
Eigen::Index NormSpec::dim() const { return impl_->dim; }
const Eigen::MatrixXd& NormSpec::weight() const { return impl_->weight; }
const Eigen::MatrixXd& NormSpec::weight_inverse() const { return impl_->weight_inv; }
const Eigen::MatrixXd& NormSpec::whitener() const { return impl_->weight_sqrt; }
const Eigen::MatrixXd& NormSpec::whitener_inverse() const { return impl_->weight_sqrt_inv; }
const Eigen::MatrixXd& NormSpec::map() const { return impl_->map; }
const Eigen::MatrixXd& NormSpec::map_inverse() const { return impl_->map_inv; }
const NormSpec& NormSpec::base() const { return *impl_->base; }

bool NormSpec::euclidean_kind() const {
  switch (impl_->kind) {
    case NormKind::L2:
    case NormKind::WeightedEuclidean:
      return true;
    case NormKind::Transformed:
      return base().euclidean_kind();
    default:
      return false;
  }
}

bool NormSpec::polyhedral_kind() const {
  switch (impl_->kind) {
    case NormKind::L1:
    case NormKind::LInf:
      return true;
    case NormKind::Transformed:
      return base().polyhedral_kind();
    default:
      return false;
  }
}

std::string NormSpec::kind_name() const {
  switch (impl_->kind) {
    case NormKind::L1:
      return "l1";
    case NormKind::L2:
      return "l2";
    case NormKind::LInf:
      return "linf";
    case NormKind::WeightedEuclidean:
      return "weighted";
    case NormKind::Transformed:
      return "transformed";
  }
  return "?";
}

double norm_eval(const NormSpec& spec, const Eigen::VectorXd& x) {
  require(x.size() == spec.dim(), "norm_eval: dimension mismatch");
  switch (spec.kind()) {
    case NormKind::L1:
      return x.lpNorm<1>();
    case NormKind::L2:
      return x.norm();
    case NormKind::LInf:
      return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    case NormKind::WeightedEuclidean: {
      const double q = x.dot(spec.weight() * x);
      return std::sqrt(std::max(q, 0.0));
    }
    case NormKind::Transformed:
      return norm_eval(spec.base(), spec.map_inverse() * x);
  }
  return 0.0;
}

double dual_norm_eval(const NormSpec& spec, const DualVector& phi) {
  require(phi.dim() == spec.dim(), "dual_norm_eval: dimension mismatch");
  switch (spec.kind()) {
    case NormKind::L1:
      return phi.coeffs.size() == 0 ? 0.0 : phi.coeffs.cwiseAbs().maxCoeff();
    case NormKind::L2:
      return phi.coeffs.norm();
    case NormKind::LInf:
      return phi.coeffs.lpNorm<1>();
    case NormKind::WeightedEuclidean: {
      const double q = phi.coeffs.dot(spec.weight_inverse() * phi.coeffs);
      return std::sqrt(std::max(q, 0.0));
    }
    case NormKind::Transformed:
      return dual_norm_eval(spec.base(), DualVector(spec.map().transpose() * phi.coeffs));
  }
  return 0.0;
}

Eigen::VectorXd steepest_ascent_direction(const NormSpec& spec, const DualVector& phi) {
  require(phi.dim() == spec.dim(), "steepest_ascent_direction: dimension mismatch");
  require(phi.coeffs.cwiseAbs().maxCoeff() > 0.0,
          "steepest_ascent_direction: zero functional");
  switch (spec.kind()) {
    case NormKind::L1: {
      // Smallest index attaining max |phi_i|.
      Eigen::Index best = 0;
      double best_abs = std::abs(phi.coeffs[0]);
      for (Eigen::Index i = 1; i < phi.coeffs.size(); ++i) {
        const double a = std::abs(phi.coeffs[i]);
        if (a > best_abs) {
          best_abs = a;
          best = i;
        }
      }
      Eigen::VectorXd d = Eigen::VectorXd::Zero(spec.dim());
      d[best] = phi.coeffs[best] > 0.0 ? 1.0 : -1.0;
      return d;
    }
    case NormKind::L2:
      return phi.coeffs / phi.coeffs.norm();
    case NormKind::LInf: {
      Eigen::VectorXd d(spec.dim());
      for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = phi.coeffs[i] < 0.0 ? -1.0 : 1.0;
      return d;
    }
    case NormKind::WeightedEuclidean: {
      const Eigen::VectorXd h = spec.weight_inverse() * phi.coeffs;
      return h / dual_norm_eval(spec, phi);
    }
    case NormKind::Transformed: {
      const DualVector pulled(spec.map().transpose() * phi.coeffs);
      return spec.map() * steepest_ascent_direction(spec.base(), pulled);
    }
  }
  return Eigen::VectorXd();
}

double parallelogram_residual(const NormSpec& spec, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v) {
  require(u.size() == spec.dim() && v.size() == spec.dim(),
          "parallelogram_residual: dimension mismatch");
  const double a = norm_eval(spec, u + v);
  const double b = norm_eval(spec, u - v);
  const double c = norm_eval(spec, u);
  const double d = norm_eval(spec, v);
  return std::abs(a * a + b * b - 2.0 * c * c - 2.0 * d * d);
}

std::vector<Eigen::VectorXd> unit_ball_vertices(const NormSpec& spec) {
  switch (spec.kind()) {
    case NormKind::L1: {
      std::vector<Eigen::VectorXd> out;
      out.reserve(2 * spec.dim());
      for (Eigen::Index i = 0; i < spec.dim(); ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(spec.dim());
        e[i] = 1.0;
        out.push_back(e);
        out.push_back(-e);
      }
      return out;
    }
    case NormKind::LInf: {
      require(spec.dim() <= 20, "unit_ball_vertices: dimension too large");
      const std::uint64_t n = 1ull << spec.dim();
      std::vector<Eigen::VectorXd> out;
      out.reserve(n);
      for (std::uint64_t mask = 0; mask < n; ++mask) {
        Eigen::VectorXd v(spec.dim());
        for (Eigen::Index i = 0; i < spec.dim(); ++i)
          v[i] = (mask >> i) & 1u ? -1.0 : 1.0;
        out.push_back(v);
      }
      return out;
    }
    case NormKind::Transformed: {
      std::vector<Eigen::VectorXd> out = unit_ball_vertices(spec.base());
      for (auto& v : out) {
        v = spec.map() * v;
        v /= norm_eval(spec, v);  // kill fp drift from the multiply
      }
      return out;
    }
    default:
      throw std::invalid_argument("unit_ball_vertices: norm is not polyhedral");
  }
}

std::vector<Eigen::VectorXd> sample_unit_sphere(const NormSpec& spec, int count,
                                                std::uint64_t seed) {
  require(count >= 1, "sample_unit_sphere: count must be positive");
  const Eigen::Index n = spec.dim();
  std::vector<Eigen::VectorXd> points;

  auto push_unique = [&](Eigen::VectorXd v) {
    for (const auto& p : points)
      if ((p - v).cwiseAbs().maxCoeff() <= 1e-14) return;
    points.push_back(std::move(v));
  };

  // Mandatory axis points, scaled onto the sphere.
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    e /= norm_eval(spec, e);
    push_unique(e);
    push_unique(-e);
  }

  // Unit-ball vertices for polyhedral kinds, when they fit the budget
  // together with the axis points.
  if (spec.polyhedral_kind() && n <= 20) {
    std::vector<Eigen::VectorXd> verts = unit_ball_vertices(spec);
    if (2 * static_cast<std::size_t>(n) + verts.size() <= static_cast<std::size_t>(count))
      for (auto& v : verts) push_unique(std::move(v));
  }

  // Random fill; collisions have probability zero, no dedupe needed.
  SeededRng rng(seed);
  while (points.size() < static_cast<std::size_t>(count)) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.gaussian();
    const double nrm = norm_eval(spec, g);
    if (nrm < 1e-300) continue;
    points.push_back(g / nrm);
  }
  return points;
}

double dual_norm_sampled(const NormSpec& spec, const DualVector& phi,
                         const DualSamplingConfig& config) {
  require(phi.dim() == spec.dim(), "dual_norm_sampled: dimension mismatch");
  const auto sphere = sample_unit_sphere(spec, config.samples, config.seed);
  double best = 0.0;
  Eigen::VectorXd best_h = sphere.front();
  for (const auto& h : sphere) {
    const double v = pairing(phi, h);
    if (v > best) {
      best = v;
      best_h = h;
    }
    if (-v > best) {
      best = -v;
      best_h = -h;
    }
  }

  // Coordinate-ascent polish of the best direction, renormalizing after each
  // trial move.
  double step = 0.5;
  for (int it = 0; it < config.refine; ++it) {
    bool improved = false;
    for (Eigen::Index i = 0; i < spec.dim(); ++i) {
      for (double s : {step, -step}) {
        Eigen::VectorXd cand = best_h;
        cand[i] += s;
        const double nrm = norm_eval(spec, cand);
        if (nrm < 1e-300) continue;
        cand /= nrm;
        const double v = pairing(phi, cand);
        if (v > best) {
          best = v;
          best_h = cand;
          improved = true;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-14) break;
    }
  }
  return best;
}

}  // namespace holderlab
