#include "qdgd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdgd/errors.hpp"

namespace qdgd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Largest ln T whose exponential is comfortably representable.
constexpr double kLogRepresentable = 700.0;

Threshold from_log(double log_value) {
  Threshold t;
  t.log_value = log_value;
  t.saturated = log_value > kLogRepresentable;
  t.value = t.saturated ? kInf : std::exp(log_value);
  t.loglog_value = log_value > 0 ? std::log(log_value) : -kInf;
  return t;
}

// ⌈base^exponent⌉ with a log fallback once the power overflows.
Threshold ceil_power(double base, double exponent) {
  if (!(base > 0)) return from_log(0.0);
  const double log_value = exponent * std::log(base);
  if (log_value > kLogRepresentable) return from_log(log_value);
  const double v = std::ceil(std::pow(base, exponent));
  Threshold t = from_log(std::log(std::max(v, 1.0)));
  t.value = std::max(v, 1.0);
  return t;
}

// e^{e^x}.
Threshold double_exponential(double x) {
  const double log_value = std::exp(x);
  Threshold t = from_log(log_value);
  t.loglog_value = x;
  return t;
}

Threshold max_of(std::initializer_list<Threshold> ts) {
  Threshold best = from_log(0.0);
  for (const auto& t : ts) {
    if (t.log_value > best.log_value) best = t;
  }
  return best;
}

double relative_eta2(const TheoryParams& params) {
  return is_relative(params.variance) ? variance_constant(params.variance) : 0.0;
}

double condition_factor(const TheoryParams& params) { return 3.0 + 2.0 * params.L / params.mu; }

// 4 n c2² D² (3 + 2L/μ)² / (1 - β)².
double consensus_term(const TheoryParams& params) {
  return 4.0 * params.n * params.c2 * params.c2 * bias_constant(params);
}

// 4 c1 n B̃² η² ||W - W_D||² / (μ c2) for a given η².
double relative_noise_term(const TheoryParams& params, double eta2) {
  return 4.0 * params.c1 * params.n * b_tilde_squared(params) * eta2 * params.offdiag_norm * params.offdiag_norm /
         (params.mu * params.c2);
}

}  // namespace

double d_squared(const ObjectiveSet& obj) {
  const Vector zero = Vector::Zero(obj.p);
  double total = 0.0;
  for (int i = 0; i < obj.n; ++i) total += obj.local_value(i, zero) - obj.f_star_locals(i);
  return std::max(0.0, 2.0 * obj.L * total);
}

TheoryParams theory_params(const SpectralReport& spectrum, const ObjectiveSet& obj, const VarianceClass& variance,
                           double delta, double c1, double c2) {
  TheoryParams params;
  params.n = obj.n;
  params.p = obj.p;
  params.L = obj.L;
  params.mu = obj.mu;
  params.beta = spectrum.beta;
  params.lambda_min = spectrum.lambda_min;
  params.offdiag_norm = spectrum.offdiag_norm;
  params.variance = variance;
  params.delta = delta;
  params.c1 = c1;
  params.c2 = c2;
  params.d_squared = d_squared(obj);
  params.f0 = obj.f0;
  params.fstar = obj.fstar;
  params.x_star_norm = obj.optimum.norm();
  validate(params);
  return params;
}

void validate(const TheoryParams& params) {
  if (!(params.delta > 0 && params.delta < 0.5)) {
    throw ParameterError("delta must lie in (0, 1/2); the double-exponential threshold diverges at 1/2");
  }
  if (!(params.c1 > 0) || !(params.c2 > 0)) throw ParameterError("c1 and c2 must be > 0");
  if (!(params.mu > 0) || !(params.L >= params.mu)) throw ParameterError("need 0 < mu <= L");
  if (!(params.beta >= 0 && params.beta < 1)) throw ParameterError("need 0 <= beta < 1");
  if (params.n < 1) throw ParameterError("n must be >= 1");
  if (!(variance_constant(params.variance) >= 0)) throw ParameterError("variance constant must be >= 0");
}

ThresholdReport iteration_thresholds(const TheoryParams& params) {
  validate(params);
  const double delta = params.delta;
  const double c1 = params.c1;
  const double c2 = params.c2;
  const double mu = params.mu;
  const double L = params.L;
  const double eta2 = relative_eta2(params);
  const double w2 = params.offdiag_norm * params.offdiag_norm;

  const Threshold outer = double_exponential(1.0 / (1.0 - 2.0 * delta));
  const Threshold contraction = ceil_power(c1 * c2 * mu, 1.0 / (2.0 * delta));
  const double growth = (2.0 + c2 * L) * (2.0 + c2 * L);

  ThresholdReport r;
  r.T1 = max_of({outer, contraction, ceil_power(c1 * growth / (c2 * mu), 1.0 / delta)});
  r.T2 = max_of({ceil_power(c2 * L / (1.0 + params.lambda_min), 2.0 / delta),
                 ceil_power(std::pow(c2, 2.0 * delta) * (mu + L), 2.0 / delta)});
  r.T1_tilde = max_of({outer, contraction, ceil_power(c1 * (growth + 2.0 * eta2 * w2) / (c2 * mu), 1.0 / delta)});
  r.T0 = max_of({r.T1, r.T2});
  r.T0_tilde = max_of({r.T1_tilde, r.T2});
  return r;
}

double bias_constant(const TheoryParams& params) {
  const double k = condition_factor(params);
  const double gap = 1.0 - params.beta;
  return k * k * params.d_squared / (gap * gap);
}

double b_tilde_squared(const TheoryParams& params) {
  return 4.0 * params.c2 * params.c2 * bias_constant(params) + 4.0 * (params.f0 - params.fstar) / params.mu;
}

double theorem1_bound(const TheoryParams& params, double T) {
  if (is_relative(params.variance)) {
    throw ParameterError("theorem1_bound needs a constant-variance quantizer; use theorem2_bound for relative bounds");
  }
  const double sigma2 = variance_constant(params.variance);
  const double noise = 2.0 * params.c1 * params.n * sigma2 * params.offdiag_norm * params.offdiag_norm /
                       (params.mu * params.c2);
  return (consensus_term(params) + noise) / std::pow(T, params.delta);
}

double theorem2_bound(const TheoryParams& params, double T) {
  if (!is_relative(params.variance)) {
    throw ParameterError("theorem2_bound needs a relative-variance quantizer; use theorem1_bound for constant bounds");
  }
  return (consensus_term(params) + relative_noise_term(params, variance_constant(params.variance))) /
         std::pow(T, params.delta);
}

double b1_bound(const TheoryParams& params, double T) {
  const double alpha = params.c2 / std::pow(T, params.delta / 2.0);
  const double exponent = params.c2 * std::pow(T, 1.0 - params.delta / 2.0);
  const double e1 = std::exp(-exponent);
  const double e2 = std::exp(-0.5 * (params.mu * params.L / (params.mu + params.L)) * exponent);
  const double gap_ratio = (params.f0 - params.fstar) / params.mu;
  const double k = condition_factor(params);
  const double d = std::sqrt(params.d_squared);
  const double shrink = 1.0 - 4.0 * e1;
  const double a_ratio = alpha / (1.0 - params.beta);
  return 4.0 * params.n * (2.0 * e1 + e2 * e2) / shrink * gap_ratio +
         4.0 * std::sqrt(2.0) * params.n * e2 / shrink * std::sqrt(std::max(gap_ratio, 0.0)) * a_ratio * d * k +
         2.0 * params.n * params.d_squared * k * k / shrink * a_ratio * a_ratio;
}

double b2_bound(const TheoryParams& params, double T) {
  if (!is_relative(params.variance)) return std::numeric_limits<double>::quiet_NaN();
  const double eta2 = variance_constant(params.variance);
  const double bt2 = b_tilde_squared(params);
  const double w2 = params.offdiag_norm * params.offdiag_norm;
  const double td = std::pow(T, params.delta);
  return 2.0 * params.c1 * params.n * bt2 * eta2 * w2 / (params.mu * params.c2 * td) +
         std::exp(-params.c1 * params.c2 * params.mu * td) * std::sqrt(params.n * bt2);
}

BoundReport bound_report(const TheoryParams& params, double T) {
  validate(params);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  BoundReport r;
  r.T = T;
  r.alpha = params.c2 / std::pow(T, params.delta / 2.0);
  const bool relative = is_relative(params.variance);
  r.theorem1_bound = relative ? kNaN : theorem1_bound(params, T);
  r.theorem2_bound = relative ? theorem2_bound(params, T) : kNaN;
  const double td = std::pow(T, params.delta);
  const double w2 = params.offdiag_norm * params.offdiag_norm;
  const double v = variance_constant(params.variance);
  r.b_tilde_sq = b_tilde_squared(params);
  r.lemma1_bound = relative ? 2.0 * params.c1 * params.n * r.b_tilde_sq * v * w2 / (params.mu * params.c2 * td)
                            : params.c1 * params.n * v * w2 / (params.mu * params.c2 * td);
  r.lemma2_bound = 2.0 * params.n * params.c2 * params.c2 * bias_constant(params) / td;
  r.B1 = b1_bound(params, T);
  r.B2 = b2_bound(params, T);
  const double exponent = params.c2 * std::pow(T, 1.0 - params.delta / 2.0);
  const double harmonic = params.mu * params.L / (params.mu + params.L);
  r.e1 = std::exp(-exponent);
  r.e2 = std::exp(-0.5 * harmonic * exponent);
  r.c3_sq = 1.0 - 0.5 * harmonic * r.alpha;
  const double inv = 1.0 / harmonic;
  r.c4_term = r.alpha * params.L * std::sqrt(params.d_squared) / (1.0 - params.beta) *
              std::sqrt(std::max(0.0, 4.0 * inv * inv - 2.0 * inv * r.alpha));
  return r;
}

IterationCount required_iterations(double rho, const TheoryParams& params) {
  validate(params);
  if (!(rho > 0)) throw ParameterError("rho must be > 0");
  if (!(params.x_star_norm > 0)) throw ParameterError("required_iterations needs a nonzero optimum");
  const double base = consensus_term(params);
  const double noise = relative_noise_term(params, relative_eta2(params)) +
                       (is_relative(params.variance)
                            ? 0.0
                            : 2.0 * params.c1 * params.n * variance_constant(params.variance) * params.offdiag_norm *
                                  params.offdiag_norm / (params.mu * params.c2));
  const double scale = rho * params.x_star_norm * params.x_star_norm;
  IterationCount out;
  if (base > 0) {
    out.log_excess = std::log1p(noise / base) / params.delta;
    out.log_value = (std::log(base) - std::log(scale)) / params.delta + out.log_excess;
  } else {
    out.log_excess = noise > 0 ? kInf : 0.0;
    out.log_value = noise > 0 ? (std::log(noise) - std::log(scale)) / params.delta : -kInf;
  }
  out.value = std::exp(out.log_value);
  return out;
}

double dgd_required_iterations(double rho, const TheoryParams& params, double c) {
  if (!(rho > 0)) throw ParameterError("rho must be > 0");
  if (!(params.x_star_norm > 0)) throw ParameterError("dgd_required_iterations needs a nonzero optimum");
  return c * c * bias_constant(params) / (rho * params.x_star_norm * params.x_star_norm);
}

TradeoffTable tradeoff_table(const std::vector<double>& s_values, double rho, const TheoryParams& params,
                             int float_bits) {
  validate(params);
  auto row_for = [&](double s) {
    TheoryParams at = params;
    at.variance = RelativeBound{lowprec_eta2(s, params.p)};
    TradeoffRow row;
    row.s = s;
    row.iterations = required_iterations(rho, at);
    row.code_length = expected_code_length(s, params.p, float_bits);
    row.total_cost = params.n * row.iterations.value * row.code_length;
    return row;
  };

  TradeoffTable table;
  double largest = 1.0;
  for (double s : s_values) {
    if (!(s >= 1)) throw ParameterError("quantization levels must be >= 1");
    table.rows.push_back(row_for(s));
    largest = std::max(largest, s);
  }

  std::vector<double> grid;
  const double dense_limit = std::min(largest, 1e5);
  for (double s = 1; s <= dense_limit; s += 1) grid.push_back(s);
  if (largest > dense_limit) {
    const int steps = 2000;
    const double lo = std::log10(dense_limit);
    const double hi = std::log10(largest);
    for (int k = 1; k <= steps; ++k) grid.push_back(std::pow(10.0, lo + (hi - lo) * k / steps));
  }
  for (double s : s_values) grid.push_back(s);
  table.best_cost = kInf;
  for (double s : grid) {
    const TradeoffRow row = row_for(s);
    if (row.total_cost < table.best_cost) {
      table.best_cost = row.total_cost;
      table.best_s = s;
    }
  }
  return table;
}

std::pair<double, double> calibrate_tradeoff_constants(const TheoryParams& params, double rho,
                                                       double iterations_at_s1, double asymptotic_iterations) {
  if (!(iterations_at_s1 > asymptotic_iterations && asymptotic_iterations > 0)) {
    throw ParameterError("calibration needs iterations_at_s1 > asymptotic_iterations > 0");
  }
  const double scale = rho * params.x_star_norm * params.x_star_norm;
  const double per_c2_sq = 4.0 * params.n * bias_constant(params);
  if (!(per_c2_sq > 0)) throw ParameterError("calibration needs D² > 0");
  const double c2 = std::sqrt(std::pow(asymptotic_iterations, params.delta) * scale / per_c2_sq);

  TheoryParams at = params;
  at.c2 = c2;
  at.c1 = 1.0;
  const double noise_per_c1 = relative_noise_term(at, lowprec_eta2(1.0, params.p));
  if (!(noise_per_c1 > 0)) throw ParameterError("calibration needs a nonzero noise term at s = 1");
  const double target = std::pow(iterations_at_s1, params.delta) * scale;
  const double c1 = (target - per_c2_sq * c2 * c2) / noise_per_c1;
  return {c1, c2};
}

Lemma3Report lemma3_recursion_check(double a, double b, double delta, long long T, double e0) {
  if (!(a > 0)) throw ParameterError("recursion check needs a > 0");
  if (!(b >= 0) || !(e0 >= 0)) throw ParameterError("recursion check needs b >= 0 and e0 >= 0");
  if (!(delta > 0 && delta < 0.5)) throw ParameterError("delta must lie in (0, 1/2)");
  if (T < 1) throw ParameterError("T must be >= 1");
  const double t = static_cast<double>(T);
  const double log_t = std::log(t);
  if (log_t < std::log(a) / (2.0 * delta) || log_t < std::exp(1.0 / (1.0 - 2.0 * delta))) {
    std::ostringstream msg;
    msg << "T = " << T << " is below the validity regime max{a^(1/(2 delta)), e^(e^(1/(1-2 delta)))}";
    throw ParameterError(msg.str());
  }
  const double contraction = 1.0 - a / std::pow(t, 2.0 * delta);
  const double drive = b / std::pow(t, 3.0 * delta);
  double e = e0;
  for (long long k = 0; k < T; ++k) e = contraction * e + drive;
  Lemma3Report r;
  r.final_value = e;
  r.bound = std::exp(-a * std::pow(t, 1.0 - 2.0 * delta)) * e0 + b / (a * std::pow(t, delta));
  // Each step adds at most a few ulps of relative error.
  const double slack = 1e-12 + 4.0 * t * std::numeric_limits<double>::epsilon();
  r.holds = r.final_value <= r.bound * (1.0 + slack);
  return r;
}

}  // namespace qdgd
