#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holderlab/corpus.hpp"
#include "holderlab/normed_space.hpp"

namespace holderlab {

/// Parameters of the norm-adapted gradient method. The method consumes a
/// caller-supplied approximation parameter L; any L at or above the
/// function's true parameter makes the per-step decrease guarantee hold.
struct DescentConfig {
  double L = 1.0;
  double nu = 1.0;       // exponent in (0, 1]; the method needs nu > 0
  double xi = -1.0;      // relaxation in (0,1); < 0 selects (1/(1+nu))^{1/nu}
  double epsilon = 1e-3; // target dual norm of the gradient
  Eigen::VectorXd x0;
  double f_star = 0.0;   // lower bound on f, used by the complexity bound
  long long max_iter = -1;  // < 0 selects 10x the computed iteration bound
};

enum class TerminationReason { Converged, MaxIterations, NonFinite };

struct DescentStep {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_dual_norm = 0.0;  // n_k
  Eigen::VectorXd direction;    // d_k, unit vector with <f'(x_k), d_k> = n_k
  double step = 0.0;            // h_k
  double direction_residual = 0.0;  // | <f'(x_k), d_k> - n_k | / n_k
};

struct DescentTrace {
  std::vector<DescentStep> steps;  // one record per step taken
  Eigen::VectorXd x_final;
  double f_final = 0.0;
  double n_final = 0.0;
  TerminationReason reason = TerminationReason::Converged;
  long long iterations = 0;
  double max_direction_residual = 0.0;
  /// First step violating the guaranteed decrease, checked during the run
  /// when exact constants are known and config.L covers them.
  std::optional<long long> first_decrease_violation;
  std::string diagnostics;
  DescentConfig config;  // with defaults filled in
};

/// h_k = xi ((1+nu)/L)^{1/nu} n_k^{1/nu}.
double step_size(const DescentConfig& config, double grad_dual_norm);

/// Worst-case iteration count to reach a gradient dual norm <= epsilon,
/// starting from objective value f_x0. Uses the specialized form
/// ceil( (1/eps^{1+1/nu}) ((1+nu)/nu) L^{1/nu} (f_x0 - f_star) ) when xi is
/// the canonical (1/(1+nu))^{1/nu}, and the pre-specialization bound with the
/// factor 1/(xi(1-xi^nu)) otherwise. Saturates instead of overflowing.
long long iteration_bound(const DescentConfig& config, double f_x0);

/// Runs x_{k+1} = x_k - h_k d_k with the norm's steepest-ascent direction
/// until the gradient dual norm reaches epsilon or max_iter is hit.
/// Non-finite values abort the run with a diagnostic (an undersized L or an
/// unbounded objective). Deterministic: the trace is a function of x0 and the
/// config.
DescentTrace run(const SmoothFunction& f, const NormSpec& spec, DescentConfig config);

struct TraceVerdict {
  bool pass = false;
  std::optional<long long> violating_step;
  long long iterations = 0;
  long long bound = 0;
  double max_direction_residual = 0.0;
  std::string detail;
};

/// PASS iff every recorded step satisfies
///   f(x_{k+1}) <= f(x_k) - xi (1 - xi^nu) ((1+nu)/L)^{1/nu} n_k^{1+1/nu}
/// to 1e-9 relative and the number of iterations does not exceed the
/// iteration bound. `L_check` overrides the L used for both checks (defaults
/// to the trace's own L). Reports the first violating step on failure.
TraceVerdict verify_trace(const DescentTrace& trace,
                          std::optional<double> L_check = std::nullopt);

const char* to_string(TerminationReason reason);

}  // namespace holderlab
