#pragma once

#include <vector>

#include "qdgd/graph.hpp"
#include "qdgd/objectives.hpp"
#include "qdgd/quantizers.hpp"

namespace qdgd {

/// Instance constants that the convergence bounds depend on.
struct TheoryParams {
  int n = 0;
  Index p = 0;
  double L = 0;
  double mu = 0;
  double beta = 0;
  double lambda_min = 0;
  double offdiag_norm = 0;  // ||W - W_D||_2
  VarianceClass variance = ConstantBound{0.0};
  double delta = 0;
  double c1 = 0;
  double c2 = 0;
  double d_squared = 0;  // 2L Σ (f_i(0) - f*_i)
  double f0 = 0;
  double fstar = 0;
  double x_star_norm = 0;
};

/// D² = 2L Σ_i (f_i(0) - f*_i).
double d_squared(const ObjectiveSet& obj);

TheoryParams theory_params(const SpectralReport& spectrum, const ObjectiveSet& obj, const VarianceClass& variance,
                           double delta, double c1, double c2);

/// Throws ParameterError for δ outside (0, 1/2) or non-positive constants.
void validate(const TheoryParams& params);

/// Iteration count that may exceed double range. `log_value` is ln T.
struct Threshold {
  double value = 1;  // +inf when saturated
  double log_value = 0;
  double loglog_value = 0;  // ln ln T, -inf when T <= e
  bool saturated = false;
};

struct ThresholdReport {
  Threshold T1, T2, T0, T1_tilde, T0_tilde;
};

ThresholdReport iteration_thresholds(const TheoryParams& params);

/// (3 + 2L/μ)² D² / (1 - β)², the consensus-bias constant shared by several bounds.
double bias_constant(const TheoryParams& params);

/// 4c2² D² (3 + 2L/μ)² / (1 - β)² + 4(f0 - f*)/μ.
double b_tilde_squared(const TheoryParams& params);

/// Constant-variance rate bound; throws ParameterError for a relative-variance quantizer.
double theorem1_bound(const TheoryParams& params, double T);
/// Relative-variance rate bound; throws ParameterError for a constant-variance quantizer.
double theorem2_bound(const TheoryParams& params, double T);

struct BoundReport {
  double T = 0;
  double alpha = 0;
  double theorem1_bound = 0;  // NaN for relative-variance quantizers
  double theorem2_bound = 0;  // NaN for constant-variance quantizers
  double lemma1_bound = 0;    // E||x_T - x*_α||² leading term
  double lemma2_bound = 0;    // ||x*_α - x*||² leading term
  double B1 = 0;
  double B2 = 0;
  double b_tilde_sq = 0;
  double e1 = 0;
  double e2 = 0;
  double c3_sq = 0;
  double c4_term = 0;  // c4 / sqrt(1 - c3²)
};

BoundReport bound_report(const TheoryParams& params, double T);

/// B1(T): full penalty-gap bound on ||x*_α - x*||² with α = c2/T^(δ/2).
double b1_bound(const TheoryParams& params, double T);
/// B2(T): full bound on E||x_T - x*_α||² for relative-variance quantizers.
double b2_bound(const TheoryParams& params, double T);

/// T(ρ) stored in log form so that differences far below double resolution
/// stay visible: ln T = log_floor + log_excess where log_floor comes from the
/// variance-free term alone.
struct IterationCount {
  double value = 0;
  double log_value = 0;
  double log_excess = 0;
};

/// Iterations needed for relative accuracy ρ under a relative-variance quantizer.
IterationCount required_iterations(double rho, const TheoryParams& params);
/// c²(3 + 2L/μ)² D² / ((1 - β)² ρ ||x̃*||²).
double dgd_required_iterations(double rho, const TheoryParams& params, double c);

struct TradeoffRow {
  double s = 0;
  IterationCount iterations;
  double code_length = 0;
  double total_cost = 0;  // n · T(ρ) · code length
};

struct TradeoffTable {
  std::vector<TradeoffRow> rows;
  double best_s = 0;  // argmin of total cost over the dense grid
  double best_cost = 0;
};

/// Rows for `s_values` with η² = min(p/s², √p/s); the argmin runs over the
/// integers 1..10^5 plus a log-spaced grid to the largest requested s.
TradeoffTable tradeoff_table(const std::vector<double>& s_values, double rho, const TheoryParams& params,
                             int float_bits);

/// Solves (c1, c2) so that T(ρ) tends to `asymptotic_iterations` as s → ∞ and
/// equals `iterations_at_s1` at s = 1.
std::pair<double, double> calibrate_tradeoff_constants(const TheoryParams& params, double rho,
                                                       double iterations_at_s1, double asymptotic_iterations);

struct Lemma3Report {
  double final_value = 0;
  double bound = 0;
  bool holds = false;
};

/// Runs e_{t+1} = (1 - a/T^{2δ}) e_t + b/T^{3δ} for T steps and compares e_T
/// with exp(-a T^{1-2δ}) e0 + b/(a T^δ). Rejects points outside the validity
/// regime T >= max{a^{1/(2δ)}, e^{e^{1/(1-2δ)}}}.
Lemma3Report lemma3_recursion_check(double a, double b, double delta, long long T, double e0);

}  // namespace qdgd
