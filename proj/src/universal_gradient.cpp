#include "holderlab/universal_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace holderlab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double canonical_xi(double nu) { return std::pow(1.0 / (1.0 + nu), 1.0 / nu); }

void validate(const DescentConfig& config) {
  require(config.L > 0.0, "DescentConfig: L must be positive");
  require(config.nu > 0.0 && config.nu <= 1.0, "DescentConfig: nu must lie in (0, 1]");
  require(config.xi > 0.0 && config.xi < 1.0, "DescentConfig: xi must lie in (0, 1)");
  require(config.epsilon > 0.0, "DescentConfig: epsilon must be positive");
  require(config.x0.size() >= 1, "DescentConfig: x0 is required");
}

double decrease_coefficient(double xi, double nu, double L) {
  return xi * (1.0 - std::pow(xi, nu)) * std::pow((1.0 + nu) / L, 1.0 / nu);
}

long long saturate_to_count(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 9.0e18) return std::numeric_limits<long long>::max();
  return static_cast<long long>(std::ceil(v));
}

}  // namespace

double step_size(const DescentConfig& config, double grad_dual_norm) {
  require(grad_dual_norm >= 0.0, "step_size: gradient norm must be nonnegative");
  return config.xi * std::pow((1.0 + config.nu) / config.L, 1.0 / config.nu) *
         std::pow(grad_dual_norm, 1.0 / config.nu);
}

long long iteration_bound(const DescentConfig& config, double f_x0) {
  require(config.epsilon > 0.0, "iteration_bound: epsilon must be positive");
  require(config.nu > 0.0 && config.nu <= 1.0, "iteration_bound: nu must lie in (0, 1]");
  const double nu = config.nu;
  const double gap = std::max(0.0, f_x0 - config.f_star);
  const double eps_pow = std::pow(config.epsilon, 1.0 + 1.0 / nu);
  const double xi = config.xi < 0.0 ? canonical_xi(nu) : config.xi;

  double v;
  if (std::abs(xi - canonical_xi(nu)) <= 1e-12) {
    v = (1.0 / eps_pow) * ((1.0 + nu) / nu) * std::pow(config.L, 1.0 / nu) * gap;
  } else {
    v = (1.0 / eps_pow) * std::pow(config.L / (1.0 + nu), 1.0 / nu) * gap /
        (xi * (1.0 - std::pow(xi, nu)));
  }
  return saturate_to_count(v);
}

DescentTrace run(const SmoothFunction& f, const NormSpec& spec, DescentConfig config) {
  require(f.dim() == spec.dim(), "run: function and norm dimensions differ");
  require(config.x0.size() == f.dim(), "run: x0 dimension mismatch");
  if (config.xi < 0.0) config.xi = canonical_xi(config.nu);
  validate(config);

  const double f0 = f.value(config.x0);
  require(f0 >= config.f_star, "run: f(x0) must be at least f_star");
  if (config.max_iter < 0) {
    const long long bound = iteration_bound(config, f0);
    config.max_iter = bound > std::numeric_limits<long long>::max() / 10
                          ? std::numeric_limits<long long>::max()
                          : std::max(1LL, 10 * bound);
  }

  DescentTrace trace;
  trace.config = config;
  Eigen::VectorXd x = config.x0;

  while (true) {
    const double fx = f.value(x);
    const DualVector g = f.gradient(x);
    const double nk = dual_norm_eval(spec, g);
    if (!std::isfinite(fx) || !std::isfinite(nk)) {
      trace.reason = TerminationReason::NonFinite;
      trace.diagnostics =
          "non-finite value encountered; L is likely below the true "
          "approximation parameter or the objective is unbounded";
      break;
    }
    trace.x_final = x;
    trace.f_final = fx;
    trace.n_final = nk;
    if (nk <= config.epsilon) {
      trace.reason = TerminationReason::Converged;
      break;
    }
    if (static_cast<long long>(trace.steps.size()) >= config.max_iter) {
      trace.reason = TerminationReason::MaxIterations;
      break;
    }

    DescentStep step;
    step.x = x;
    step.f = fx;
    step.grad_dual_norm = nk;
    step.direction = steepest_ascent_direction(spec, g);
    step.step = step_size(config, nk);
    step.direction_residual = std::abs(pairing(g, step.direction) - nk) / nk;
    trace.max_direction_residual =
        std::max(trace.max_direction_residual, step.direction_residual);
    x -= step.step * step.direction;
    trace.steps.push_back(std::move(step));
  }
  trace.iterations = static_cast<long long>(trace.steps.size());

  // When exact constants are known and the supplied L covers the true
  // parameter, the per-step decrease guarantee must hold; record the first
  // violation for the verifier and the tests.
  if (auto constants = f.known_constants(spec, config.nu);
      constants && config.L >= constants->approx_parameter - 1e-12) {
    const double coeff = decrease_coefficient(config.xi, config.nu, config.L);
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
      const double next_f =
          k + 1 < trace.steps.size() ? trace.steps[k + 1].f : trace.f_final;
      const double required =
          coeff * std::pow(trace.steps[k].grad_dual_norm, 1.0 + 1.0 / config.nu);
      const double tol = 1e-9 * std::max({1.0, std::abs(trace.steps[k].f), required});
      if (next_f > trace.steps[k].f - required + tol) {
        trace.first_decrease_violation = static_cast<long long>(k);
        break;
      }
    }
  }
  return trace;
}

TraceVerdict verify_trace(const DescentTrace& trace, std::optional<double> L_check) {
  const DescentConfig& config = trace.config;
  const double L = L_check.value_or(config.L);
  const double coeff = decrease_coefficient(config.xi, config.nu, L);

  TraceVerdict verdict;
  verdict.iterations = trace.iterations;
  verdict.max_direction_residual = trace.max_direction_residual;

  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const double next_f =
        k + 1 < trace.steps.size() ? trace.steps[k + 1].f : trace.f_final;
    const double required =
        coeff * std::pow(trace.steps[k].grad_dual_norm, 1.0 + 1.0 / config.nu);
    const double tol = 1e-9 * std::max({1.0, std::abs(trace.steps[k].f), required});
    if (next_f > trace.steps[k].f - required + tol) {
      verdict.violating_step = static_cast<long long>(k);
      break;
    }
  }

  DescentConfig bound_config = config;
  bound_config.L = L;
  const double f0 = trace.steps.empty() ? trace.f_final : trace.steps.front().f;
  verdict.bound = iteration_bound(bound_config, f0);

  if (trace.reason == TerminationReason::NonFinite) {
    verdict.pass = false;
    verdict.detail = "run aborted on non-finite values: " + trace.diagnostics;
    return verdict;
  }
  const bool decrease_ok = !verdict.violating_step.has_value();
  const bool bound_ok = verdict.iterations <= verdict.bound;
  verdict.pass = decrease_ok && bound_ok;
  if (verdict.pass)
    verdict.detail = "per-step decrease and iteration bound hold";
  else if (!decrease_ok)
    verdict.detail =
        "decrease inequality violated at step " + std::to_string(*verdict.violating_step);
  else
    verdict.detail = "iterations exceed the bound (" + std::to_string(verdict.iterations) +
                     " > " + std::to_string(verdict.bound) + ")";
  return verdict;
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::Converged:
      return "converged";
    case TerminationReason::MaxIterations:
      return "max_iterations";
    case TerminationReason::NonFinite:
      return "non_finite";
  }
  return "?";
}

}  // namespace holderlab
