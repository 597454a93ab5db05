#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "holderlab/corpus.hpp"
#include "holderlab/normed_space.hpp"

namespace holderlab {

struct SamplingConfig {
  long pairs = 200000;
  int refine = 200;
  int elite = 16;
  double box_halfwidth = 2.0;
  double exclusion_radius = 1e-6;
  std::uint64_t seed = 0;
};

struct WitnessPair {
  Eigen::VectorXd x, y;
  double ratio = 0.0;
};

/// Sampled lower bounds for the pairwise-ratio suprema of one function under
/// one norm and one exponent. The fields are lower bounds of suprema, never
/// the constants themselves: sampling cannot certify a supremum over an
/// unbounded domain, only exhibit witnesses.
struct HolderReport {
  double nu = 1.0;
  double M_lb = 0.0;       // gradient-variation ratio supremum, lower bound
  double L_lb = 0.0;       // = max(Lminus_lb, Lplus_lb)
  double Lminus_lb = 0.0;  // one-sided ratio for negative Taylor error
  double Lplus_lb = 0.0;   // one-sided ratio for positive Taylor error
  WitnessPair witness_M, witness_Lminus, witness_Lplus;
  SamplingConfig budget;
};

/// || f'(x) - f'(y) ||_* / || x - y ||^nu for one pair. Throws when the pair
/// is closer than `exclusion_radius` in the norm (numerical guard).
double holder_ratio(const SmoothFunction& f, const NormSpec& spec, double nu,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    double exclusion_radius = 1e-6);

/// One-sided Taylor-error ratios (r_minus, r_plus): with
/// e = f(y) - f(x) - <f'(x), y-x> and d = ||y-x||^{1+nu} / (1+nu),
/// r_plus = max(e,0)/d and r_minus = max(-e,0)/d. The symmetric ratio is
/// max(r_minus, r_plus).
std::pair<double, double> approx_ratios(const SmoothFunction& f, const NormSpec& spec,
                                        double nu, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y,
                                        double exclusion_radius = 1e-6);

/// Seeded pair sampling over [-box, box]^n with running maxima, followed by
/// derivative-free coordinate ascent from the elite pairs of each objective.
/// Deterministic given the seed; enlarging pairs/refine with the same seed
/// never decreases an estimate (the pair stream is a prefix and refinement
/// only adds candidates).
HolderReport estimate_constants(const SmoothFunction& f, const NormSpec& spec,
                                double nu, const SamplingConfig& budget = {});

/// Upper-bound coefficients tying the gradient-variation constant to the
/// approximation parameter. All three use the 0^0 = 1 convention at nu = 0.
double coefficient_general(double nu);    // 2^{1-nu} ((1+nu)/nu)^nu
double coefficient_euclidean(double nu);  // 2^{1-nu} (1+nu)^{(nu-1)/2} nu^{-nu/2}
double coefficient_convex(double nu);     // coefficient_general / 2, exactly

enum class BoundStatus { Pass, Fail, Consistent, Inconsistent, DataError };

struct BoundFlags {
  bool euclidean = false;
  bool convex = false;
};

struct BoundsVerdict {
  BoundStatus status = BoundStatus::Fail;
  double ratio = 0.0;        // M/L used for the check
  double coefficient = 0.0;  // the bound that applied
  std::string detail;
};

struct VerifyOptions {
  double truth_tol = 1e-9;  // relative slack for exact-truth comparisons
  double slack = 0.02;      // interval slack for estimate-only consistency
};

/// With exact truth (M, L): checks L <= M <= c(nu) L for the coefficient
/// selected by the flags and that the report's lower bounds do not exceed the
/// truth. Truth with L > M is flagged as a data error. Without truth: only a
/// consistency diagnostic on M_lb / L_lb -- lower-bound estimates cannot
/// falsify the bounds, which the verdict states.
BoundsVerdict verify_bounds(const HolderReport& report,
                            std::optional<std::pair<double, double>> truth,
                            BoundFlags flags, const VerifyOptions& options = {});

struct Figure1Row {
  double nu;
  double c_general;
  double c_euclidean;
};

/// Coefficient-curve table over a grid of exponents in (0, 1].
std::vector<Figure1Row> figure1_table(std::span<const double> nu_grid);

}  // namespace holderlab
