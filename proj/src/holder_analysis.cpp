#include "holderlab/holder_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "holderlab/rng.hpp"

namespace holderlab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

struct RatioSample {
  double value;
  Eigen::VectorXd x, y;
};

// Fixed-capacity elite list, sorted by decreasing value.
class EliteList {
 public:
  explicit EliteList(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {}

  void offer(double value, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (capacity_ == 0) return;
    if (items_.size() == capacity_ && value <= items_.back().value) return;
    auto pos = std::find_if(items_.begin(), items_.end(),
                            [&](const RatioSample& s) { return s.value < value; });
    items_.insert(pos, RatioSample{value, x, y});
    if (items_.size() > capacity_) items_.pop_back();
  }

  const std::vector<RatioSample>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::vector<RatioSample> items_;
};

// Greedy coordinate search over the 2n coordinates of a pair, shrinking the
// step after sweeps without improvement. The objective returns -inf for
// invalid pairs (outside the box or inside the exclusion radius).
template <class Objective>
RatioSample coordinate_ascent(Objective objective, RatioSample start, int sweeps,
                              double box_halfwidth) {
  RatioSample cur = std::move(start);
  double step = box_halfwidth / 4.0;
  const Eigen::Index n = cur.x.size();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool improved = false;
    for (Eigen::Index c = 0; c < 2 * n; ++c) {
      for (double s : {step, -step}) {
        Eigen::VectorXd x = cur.x, y = cur.y;
        Eigen::VectorXd& target = c < n ? x : y;
        const Eigen::Index idx = c < n ? c : c - n;
        target[idx] = std::clamp(target[idx] + s, -box_halfwidth, box_halfwidth);
        const double v = objective(x, y);
        if (v > cur.value) {
          cur = RatioSample{v, std::move(x), std::move(y)};
          improved = true;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-14) break;
    }
  }
  return cur;
}

}  // namespace

double holder_ratio(const SmoothFunction& f, const NormSpec& spec, double nu,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    double exclusion_radius) {
  require(nu >= 0.0 && nu <= 1.0, "holder_ratio: nu must lie in [0, 1]");
  const double sep = norm_eval(spec, x - y);
  require(sep >= exclusion_radius, "holder_ratio: pair closer than the exclusion radius");
  const DualVector diff(f.gradient(x).coeffs - f.gradient(y).coeffs);
  return dual_norm_eval(spec, diff) / std::pow(sep, nu);
}

std::pair<double, double> approx_ratios(const SmoothFunction& f, const NormSpec& spec,
                                        double nu, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y,
                                        double exclusion_radius) {
  require(nu >= 0.0 && nu <= 1.0, "approx_ratios: nu must lie in [0, 1]");
  const double sep = norm_eval(spec, y - x);
  require(sep >= exclusion_radius, "approx_ratios: pair closer than the exclusion radius");
  const double e = f.value(y) - f.value(x) - pairing(f.gradient(x), y - x);
  const double d = std::pow(sep, 1.0 + nu) / (1.0 + nu);
  return {std::max(-e, 0.0) / d, std::max(e, 0.0) / d};
}

HolderReport estimate_constants(const SmoothFunction& f, const NormSpec& spec,
                                double nu, const SamplingConfig& budget) {
  require(budget.pairs >= 1, "estimate_constants: budget.pairs must be positive");
  require(f.dim() == spec.dim(), "estimate_constants: dimension mismatch");
  require(nu >= 0.0 && nu <= 1.0, "estimate_constants: nu must lie in [0, 1]");

  const Eigen::Index n = f.dim();
  const double box = budget.box_halfwidth;
  const double delta = budget.exclusion_radius;

  // Raw ratio evaluations without the precondition throws; invalid pairs
  // yield -inf so they never win.
  auto eval_m = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double sep = norm_eval(spec, x - y);
    if (sep < delta) return -std::numeric_limits<double>::infinity();
    const DualVector diff(f.gradient(x).coeffs - f.gradient(y).coeffs);
    return dual_norm_eval(spec, diff) / std::pow(sep, nu);
  };
  auto eval_signed = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         double sign) {
    const double sep = norm_eval(spec, y - x);
    if (sep < delta) return -std::numeric_limits<double>::infinity();
    const double e = f.value(y) - f.value(x) - pairing(f.gradient(x), y - x);
    return std::max(sign * e, 0.0) * (1.0 + nu) / std::pow(sep, 1.0 + nu);
  };
  auto eval_minus = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return eval_signed(x, y, -1.0);
  };
  auto eval_plus = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return eval_signed(x, y, 1.0);
  };

  SeededRng rng(budget.seed);
  EliteList elites_m(budget.elite), elites_minus(budget.elite), elites_plus(budget.elite);
  RatioSample best_m{-1.0, Eigen::VectorXd(), Eigen::VectorXd()};
  RatioSample best_minus = best_m, best_plus = best_m;
  Eigen::VectorXd first_x, first_y;

  for (long i = 0; i < budget.pairs; ++i) {
    Eigen::VectorXd x(n), y(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = rng.uniform(-box, box);
    for (Eigen::Index k = 0; k < n; ++k) y[k] = rng.uniform(-box, box);
    const double sep = norm_eval(spec, x - y);
    if (sep < delta) continue;
    if (first_x.size() == 0) {
      first_x = x;
      first_y = y;
    }

    const double m = eval_m(x, y);
    if (m > best_m.value) best_m = RatioSample{m, x, y};
    elites_m.offer(m, x, y);

    const DualVector gx = f.gradient(x);
    const double e = f.value(y) - f.value(x) - pairing(gx, y - x);
    const double d = std::pow(sep, 1.0 + nu) / (1.0 + nu);
    const double rm = std::max(-e, 0.0) / d;
    const double rp = std::max(e, 0.0) / d;
    if (rm > best_minus.value) best_minus = RatioSample{rm, x, y};
    if (rp > best_plus.value) best_plus = RatioSample{rp, x, y};
    elites_minus.offer(rm, x, y);
    elites_plus.offer(rp, x, y);
  }

  // Refinement: polish every elite, keep the best result per objective.
  auto refine = [&](auto objective, const EliteList& elites, RatioSample best) {
    for (const auto& elite : elites.items()) {
      RatioSample polished = coordinate_ascent(objective, elite, budget.refine, box);
      if (polished.value > best.value) best = polished;
    }
    return best;
  };
  best_m = refine(eval_m, elites_m, best_m);
  best_minus = refine(eval_minus, elites_minus, best_minus);
  best_plus = refine(eval_plus, elites_plus, best_plus);

  // Degenerate cases (constant gradient, zero error everywhere) keep the
  // first valid pair as witness with a zero ratio.
  auto finalize = [&](const RatioSample& s) {
    WitnessPair w;
    if (s.x.size() > 0) {
      w.x = s.x;
      w.y = s.y;
      w.ratio = std::max(s.value, 0.0);
    } else {
      w.x = first_x;
      w.y = first_y;
      w.ratio = 0.0;
    }
    return w;
  };

  HolderReport report;
  report.nu = nu;
  report.budget = budget;
  report.witness_M = finalize(best_m);
  report.witness_Lminus = finalize(best_minus);
  report.witness_Lplus = finalize(best_plus);
  report.M_lb = report.witness_M.ratio;
  report.Lminus_lb = report.witness_Lminus.ratio;
  report.Lplus_lb = report.witness_Lplus.ratio;
  report.L_lb = std::max(report.Lminus_lb, report.Lplus_lb);
  return report;
}

double coefficient_general(double nu) {
  require(nu >= 0.0 && nu <= 1.0, "coefficient_general: nu must lie in [0, 1]");
  if (nu == 0.0) return 2.0;  // 0^0 = 1 convention
  return std::pow(2.0, 1.0 - nu) * std::pow((1.0 + nu) / nu, nu);
}

double coefficient_euclidean(double nu) {
  require(nu >= 0.0 && nu <= 1.0, "coefficient_euclidean: nu must lie in [0, 1]");
  if (nu == 0.0) return 2.0;
  // Algebraically 2^{1-nu} / sqrt(1+nu) * ((1+nu)/nu)^{nu/2}; this grouping
  // evaluates to exactly 1 at nu = 1.
  return std::pow(2.0, 1.0 - nu) * std::pow(1.0 + nu, 0.5 * (nu - 1.0)) *
         std::pow(nu, -0.5 * nu);
}

double coefficient_convex(double nu) { return 0.5 * coefficient_general(nu); }

BoundsVerdict verify_bounds(const HolderReport& report,
                            std::optional<std::pair<double, double>> truth,
                            BoundFlags flags, const VerifyOptions& options) {
  BoundsVerdict verdict;
  double coeff = coefficient_general(report.nu);
  if (flags.euclidean) coeff = std::min(coeff, coefficient_euclidean(report.nu));
  if (flags.convex) coeff = std::min(coeff, coefficient_convex(report.nu));
  verdict.coefficient = coeff;

  if (truth) {
    const double M = truth->first;
    const double L = truth->second;
    const double tol = options.truth_tol * std::max({1.0, M, L});
    if (L > M + tol) {
      verdict.status = BoundStatus::DataError;
      verdict.detail = "truth violates L <= M";
      return verdict;
    }
    verdict.ratio = L > tol ? M / L : 1.0;
    const bool interval_ok = L <= M + tol && M <= coeff * L + tol;
    const bool lb_ok = report.M_lb <= M + tol && report.L_lb <= L + tol &&
                       report.Lminus_lb <= L + tol && report.Lplus_lb <= L + tol;
    verdict.status = interval_ok && lb_ok ? BoundStatus::Pass : BoundStatus::Fail;
    verdict.detail = interval_ok
                         ? (lb_ok ? "interval and lower bounds hold"
                                  : "a sampled lower bound exceeds the exact value")
                         : "M outside [L, c(nu) L]";
    return verdict;
  }

  // Estimate-only diagnostic. Lower bounds cannot falsify the interval; an
  // out-of-range ratio only flags the estimates as mutually inconsistent.
  const double tiny = 1e-12;
  if (report.M_lb <= tiny && report.L_lb <= tiny) {
    verdict.status = BoundStatus::Consistent;
    verdict.ratio = 0.0;
    verdict.detail = "all estimates are zero (degenerate); diagnostic only";
    return verdict;
  }
  verdict.ratio = report.L_lb > tiny ? report.M_lb / report.L_lb
                                     : std::numeric_limits<double>::infinity();
  const bool ok = verdict.ratio >= 1.0 - options.slack &&
                  verdict.ratio <= coeff + options.slack;
  verdict.status = ok ? BoundStatus::Consistent : BoundStatus::Inconsistent;
  verdict.detail = "estimate-only check: lower bounds cannot falsify the interval";
  return verdict;
}

std::vector<Figure1Row> figure1_table(std::span<const double> nu_grid) {
  std::vector<Figure1Row> rows;
  rows.reserve(nu_grid.size());
  for (double nu : nu_grid) {
    require(nu > 0.0 && nu <= 1.0, "figure1_table: grid values must lie in (0, 1]");
    rows.push_back({nu, coefficient_general(nu), coefficient_euclidean(nu)});
  }
  return rows;
}

}  // namespace holderlab
