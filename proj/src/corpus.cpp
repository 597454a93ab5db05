#include "holderlab/corpus.hpp"

#include <cmath>
#include <stdexcept>

namespace holderlab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kBoxHalfWidth = 2.0;

// Dense-grid supremum of the two pairwise ratios for the 1-D power family,
// with a coordinate-descent polish. Both ratios are scale-invariant for this
// family, so the box restriction is lossless.
ConstantPair power_constants_by_grid(double nu) {
  auto grad = [nu](double x) {
    return x == 0.0 ? 0.0 : (x > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), nu);
  };
  auto val = [nu](double x) { return std::pow(std::abs(x), 1.0 + nu) / (1.0 + nu); };

  // Both ratios are invariant under (x, y) -> (tx, ty), so any value attained
  // at a small separation is also attained at a large one inside the box.
  // The floor keeps the quotient clear of floating-point cancellation.
  constexpr double kSepFloor = 1e-2;
  auto holder_ratio = [&](double x, double y) {
    const double sep = std::abs(x - y);
    if (sep < kSepFloor) return -1.0;
    return std::abs(grad(x) - grad(y)) / std::pow(sep, nu);
  };
  auto approx_ratio = [&](double x, double y) {
    const double sep = std::abs(x - y);
    if (sep < kSepFloor) return -1.0;
    const double err = std::abs(val(y) - val(x) - grad(x) * (y - x));
    return (1.0 + nu) * err / std::pow(sep, 1.0 + nu);
  };

  auto maximize = [&](auto ratio) {
    const int grid = 801;
    double best = 0.0, bx = 0.0, by = 1.0;
    for (int i = 0; i < grid; ++i) {
      const double x = -kBoxHalfWidth + 2.0 * kBoxHalfWidth * i / (grid - 1);
      for (int j = i + 1; j < grid; ++j) {
        const double y = -kBoxHalfWidth + 2.0 * kBoxHalfWidth * j / (grid - 1);
        const double r = ratio(x, y);
        if (r > best) {
          best = r;
          bx = x;
          by = y;
        }
      }
    }
    double step = 0.05;
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool improved = false;
      for (int c = 0; c < 2; ++c) {
        for (double s : {step, -step}) {
          double x = bx, y = by;
          (c == 0 ? x : y) += s;
          x = std::clamp(x, -kBoxHalfWidth, kBoxHalfWidth);
          y = std::clamp(y, -kBoxHalfWidth, kBoxHalfWidth);
          const double r = ratio(x, y);
          if (r > best) {
            best = r;
            bx = x;
            by = y;
            improved = true;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
        if (step < 1e-13) break;
      }
    }
    return best;
  };

  ConstantPair out;
  out.holder_constant = maximize(holder_ratio);
  out.approx_parameter = maximize(approx_ratio);
  out.provenance = "DERIVED";
  return out;
}

}  // namespace

SmoothFunction::SmoothFunction(std::string id, Eigen::Index dim, ValueFn value,
                               GradientFn gradient)
    : id_(std::move(id)), dim_(dim), value_(std::move(value)),
      gradient_(std::move(gradient)) {
  require(dim_ >= 1, "SmoothFunction: dim must be positive");
  require(static_cast<bool>(value_) && static_cast<bool>(gradient_),
          "SmoothFunction: value and gradient oracles are required");
}

double SmoothFunction::value(const Eigen::VectorXd& x) const {
  require(x.size() == dim_, "SmoothFunction::value: dimension mismatch");
  return value_(x);
}

DualVector SmoothFunction::gradient(const Eigen::VectorXd& x) const {
  require(x.size() == dim_, "SmoothFunction::gradient: dimension mismatch");
  return DualVector(gradient_(x));
}

SmoothFunction& SmoothFunction::with_hessian(Eigen::MatrixXd B) {
  hessian_ = std::move(B);
  return *this;
}

SmoothFunction& SmoothFunction::with_stored_constants(double nu,
                                                      std::optional<NormKind> kind,
                                                      ConstantPair constants) {
  stored_.push_back({nu, kind, std::move(constants)});
  return *this;
}

std::optional<ConstantPair> SmoothFunction::known_constants(const NormSpec& spec,
                                                            double nu) const {
  if (spec.dim() != dim_) return std::nullopt;
  const bool one_dim_pnorm =
      dim_ == 1 && (spec.kind() == NormKind::L1 || spec.kind() == NormKind::L2 ||
                    spec.kind() == NormKind::LInf);
  for (const auto& entry : stored_) {
    if (std::abs(entry.nu - nu) > 1e-12) continue;
    if (entry.kind.has_value() ? *entry.kind == spec.kind() : one_dim_pnorm)
      return entry.constants;
  }
  if (hessian_ && std::abs(nu - 1.0) <= 1e-12) {
    try {
      SymmetricOperator B(*hessian_);
      OperatorNormResult op = operator_norm(B, spec);
      FormNormResult form = quadratic_form_norm(B, spec);
      if (op.exact && form.exact)
        return ConstantPair{op.value, form.value, "DERIVED"};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

SmoothFunction make_quadratic(const SymmetricOperator& B, std::string id) {
  const Eigen::MatrixXd m = B.matrix();
  SmoothFunction f(
      std::move(id), m.rows(),
      [m](const Eigen::VectorXd& x) { return 0.5 * x.dot(m * x); },
      [m](const Eigen::VectorXd& x) { return Eigen::VectorXd(m * x); });
  f.with_hessian(m);
  return f;
}

SmoothFunction make_power(double nu) {
  require(nu > 0.0 && nu <= 1.0, "make_power: nu must lie in (0, 1]");
  SmoothFunction f(
      "power:" + std::to_string(nu), 1,
      [nu](const Eigen::VectorXd& x) {
        return std::pow(std::abs(x[0]), 1.0 + nu) / (1.0 + nu);
      },
      [nu](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(1);
        g[0] = x[0] == 0.0 ? 0.0
                           : (x[0] > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x[0]), nu);
        return g;
      });
  f.with_stored_constants(nu, std::nullopt, power_constants_by_grid(nu));
  return f;
}

SmoothFunction affine_shift(const SmoothFunction& f, const Eigen::VectorXd& a,
                            const DualVector& phi, double c) {
  require(a.size() == f.dim() && phi.dim() == f.dim(),
          "affine_shift: dimension mismatch");
  SmoothFunction base = f;
  const Eigen::VectorXd shift = a;
  const Eigen::VectorXd lin = phi.coeffs;
  SmoothFunction g(
      f.id() + "+affine", f.dim(),
      [base, shift, lin, c](const Eigen::VectorXd& x) {
        return base.value(x + shift) + lin.dot(x) + c;
      },
      [base, shift, lin](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(base.gradient(x + shift).coeffs + lin);
      });
  if (f.hessian()) g.with_hessian(*f.hessian());
  for (const auto& entry : f.stored_constants())
    g.with_stored_constants(entry.nu, entry.kind, entry.constants);
  return g;
}

std::vector<std::string> corpus_ids() {
  return {"zero", "linear", "example51", "quad1d", "quadpsd", "cubic", "power:0.5"};
}

std::optional<SmoothFunction> corpus_lookup(const std::string& id) {
  if (id == "zero") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    return make_quadratic(SymmetricOperator(z), "zero");
  }
  if (id == "linear") {
    Eigen::VectorXd phi(2);
    phi << 1.0, 2.0;
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    return affine_shift(make_quadratic(SymmetricOperator(z), "linear"),
                        Eigen::VectorXd::Zero(2), DualVector(phi), 0.0);
  }
  if (id == "example51") {
    // f(x) = x1^2 - x2^2, the indefinite plane quadratic with Hessian
    // diag(2,-2). Constants under the max norm are the published pair (4, 2).
    Eigen::MatrixXd b(2, 2);
    b << 2.0, 0.0, 0.0, -2.0;
    SmoothFunction f = make_quadratic(SymmetricOperator(b), "example51");
    f.with_stored_constants(1.0, NormKind::LInf, ConstantPair{4.0, 2.0, "PAPER"});
    return f;
  }
  if (id == "quad1d") {
    Eigen::MatrixXd b(1, 1);
    b << 1.0;
    return make_quadratic(SymmetricOperator(b), "quad1d");
  }
  if (id == "quadpsd") {
    Eigen::MatrixXd b(2, 2);
    b << 2.0, 1.0, 1.0, 2.0;
    return make_quadratic(SymmetricOperator(b), "quadpsd");
  }
  if (id == "cubic") {
    // x^3 has no gradient-variation bound of any exponent; estimates grow
    // with the sampling box. Kept for the divergence demonstrations.
    return SmoothFunction(
        "cubic", 1, [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0]; },
        [](const Eigen::VectorXd& x) {
          Eigen::VectorXd g(1);
          g[0] = 3.0 * x[0] * x[0];
          return g;
        });
  }
  if (id.rfind("power:", 0) == 0) {
    try {
      const double nu = std::stod(id.substr(6));
      if (nu > 0.0 && nu <= 1.0) return make_power(nu);
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace holderlab
