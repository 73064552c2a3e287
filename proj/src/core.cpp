#include "qdgd/core.hpp"

#include <cmath>
#include <sstream>

#include "qdgd/errors.hpp"

namespace qdgd {

namespace {

void check_dimensions(const Vector& x, const MixingMatrix& w, const ObjectiveSet& obj) {
  if (w.size() != obj.n) throw ParameterError("mixing matrix size differs from the number of objectives");
  if (x.size() != obj.n * obj.p) throw ParameterError("stacked iterate has the wrong length");
}

class TraceRecorder {
 public:
  TraceRecorder(const ObjectiveSet& obj, const Vector& x0, double bits_per_step, const RunOptions& options)
      : obj_(obj), bits_per_step_(bits_per_step), options_(options) {
    target_ = obj.optimum.transpose().replicate(obj.n, 1);
    e0_ = (as_blocks(x0, obj.p) - target_).squaredNorm();
  }

  TraceRecord record(const Vector& x, long long t) const {
    const auto blocks = as_blocks(x, obj_.p);
    const Eigen::VectorXd node_errors = (blocks - target_).rowwise().squaredNorm();
    TraceRecord r;
    r.iteration = t;
    r.squared_error = node_errors.sum();
    r.relative_error = e0_ > 0 ? r.squared_error / e0_ : (r.squared_error == 0 ? 0.0 : INFINITY);
    r.max_node_sq_error = node_errors.maxCoeff();
    r.mean_node_sq_error = node_errors.mean();
    r.objective = obj_.value(blocks.colwise().mean().transpose());
    if (options_.node_objectives) {
      double total = 0.0;
      for (int i = 0; i < obj_.n; ++i) total += obj_.value(blocks.row(i).transpose());
      r.node_average_objective = total / obj_.n;
    }
    r.cumulative_bits = static_cast<double>(t) * bits_per_step_;
    return r;
  }

  bool due(long long t, long long last) const {
    return t == last || (options_.record_stride > 0 && t % options_.record_stride == 0);
  }

 private:
  const ObjectiveSet& obj_;
  RowBlocks<double> target_;
  double e0_ = 0;
  double bits_per_step_;
  const RunOptions& options_;
};

Vector initial_point(const ObjectiveSet& obj, const RunOptions& options) {
  if (!options.x0) return Vector::Zero(obj.n * obj.p);
  if (options.x0->size() != obj.n * obj.p) throw ParameterError("x0 has the wrong length");
  return *options.x0;
}

template <typename Step>
RunResult run_loop(const MixingMatrix& w, const ObjectiveSet& obj, const Quantizer& quantizer, long long T,
                   const RunOptions& options, Step step) {
  if (T < 0) throw ParameterError("T must be >= 0");
  StackedIterate state{initial_point(obj, options), 0};
  check_dimensions(state.x, w, obj);
  const TraceRecorder recorder(obj, state.x, bits_per_iteration(w, quantizer, obj.p, options.float_bits),
                               options);
  RunResult result;
  result.trace.records.push_back(recorder.record(state.x, 0));
  for (long long t = 0; t < T; ++t) {
    state = step(state);
    if (!state.x.allFinite()) {
      std::ostringstream msg;
      msg << "iterate became non-finite at iteration " << state.t;
      throw NumericError(msg.str());
    }
    if (recorder.due(state.t, T)) result.trace.records.push_back(recorder.record(state.x, state.t));
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace

StepSchedule make_schedule(long long T, double delta, double c1, double c2) {
  if (T < 1) throw ParameterError("schedule: T must be >= 1");
  if (!(delta > 0 && delta < 0.5)) throw ParameterError("schedule: delta must lie in (0, 1/2)");
  if (!(c1 > 0) || !(c2 > 0)) throw ParameterError("schedule: c1 and c2 must be > 0");
  const double t = static_cast<double>(T);
  return StepSchedule{T, delta, c1, c2, c1 / std::pow(t, 1.5 * delta), c2 / std::pow(t, 0.5 * delta)};
}

Vector quantize_broadcasts(const Vector& x, const MixingMatrix& w, Index p, const Quantizer& quantizer,
                           const DrawKeys& keys, long long t) {
  Vector z = Vector::Zero(x.size());
  const auto in = as_blocks(x, p);
  auto out = as_blocks(z, p);
  for (Index i = 0; i < w.size(); ++i) {
    if (w.degree(i) == 0) continue;
    Stream rng = keys.stream(static_cast<int>(i), t);
    try {
      out.row(i) = quantizer.apply(in.row(i).transpose(), rng).transpose();
    } catch (const RangeError& e) {
      std::ostringstream msg;
      msg << e.what() << " (node " << i << ", iteration " << t << ")";
      throw RangeError(msg.str());
    }
  }
  return z;
}

StackedIterate qdgd_step(const StackedIterate& state, const MixingMatrix& w, const ObjectiveSet& obj,
                         const Quantizer& quantizer, double epsilon, double alpha, const DrawKeys& keys) {
  check_dimensions(state.x, w, obj);
  const Index p = obj.p;
  const Vector z = quantize_broadcasts(state.x, w, p, quantizer, keys, state.t);
  const Vector grad = obj.stacked_gradient(state.x);
  StackedIterate next{Vector(state.x.size()), state.t + 1};
  const auto x = as_blocks(state.x, p);
  const auto zb = as_blocks(z, p);
  const auto g = as_blocks(grad, p);
  auto out = as_blocks(next.x, p);
  const Vector self = (1.0 - epsilon) + epsilon * w.diagonal().array();
  out = self.asDiagonal() * x + epsilon * (w.off_diagonal() * zb) - (alpha * epsilon) * g;
  return next;
}

RunResult run_qdgd(const MixingMatrix& w, const ObjectiveSet& obj, const Quantizer& quantizer,
                   const StepSchedule& schedule, const DrawKeys& keys, const RunOptions& options) {
  return run_loop(w, obj, quantizer, schedule.T, options, [&](const StackedIterate& s) {
    return qdgd_step(s, w, obj, quantizer, schedule.epsilon, schedule.alpha, keys);
  });
}

double dgd_stepsize(double c, long long T, DgdSchedule schedule) {
  if (!(c > 0)) throw ParameterError("DGD step constant must be > 0");
  if (T < 1) throw ParameterError("DGD horizon must be >= 1");
  const double t = static_cast<double>(T);
  return schedule == DgdSchedule::inverse_t ? c / t : c / std::sqrt(t);
}

StackedIterate dgd_quantized_step(const StackedIterate& state, const MixingMatrix& w, const ObjectiveSet& obj,
                                  const Quantizer& quantizer, double alpha, const DrawKeys& keys) {
  check_dimensions(state.x, w, obj);
  const Index p = obj.p;
  const Vector z = quantize_broadcasts(state.x, w, p, quantizer, keys, state.t);
  const Vector grad = obj.stacked_gradient(state.x);
  StackedIterate next{Vector(state.x.size()), state.t + 1};
  auto out = as_blocks(next.x, p);
  out = w.diagonal().asDiagonal() * as_blocks(state.x, p) + w.off_diagonal() * as_blocks(z, p) -
        alpha * as_blocks(grad, p);
  return next;
}

RunResult run_dgd_quantized(const MixingMatrix& w, const ObjectiveSet& obj, const Quantizer& quantizer,
                            double alpha, long long T, const DrawKeys& keys, const RunOptions& options) {
  if (!(alpha >= 0)) throw ParameterError("DGD step size must be >= 0");
  return run_loop(w, obj, quantizer, T, options, [&](const StackedIterate& s) {
    return dgd_quantized_step(s, w, obj, quantizer, alpha, keys);
  });
}

double bits_per_iteration(const MixingMatrix& w, const Quantizer& quantizer, Index p, int float_bits) {
  double receivers = 0.0;
  for (Index i = 0; i < w.size(); ++i) receivers += w.degree(i);
  return receivers == 0.0 ? 0.0 : receivers * quantizer.code_length_bits(p, float_bits);
}

PenaltyProblem::PenaltyProblem(const MixingMatrix& w, const ObjectiveSet& obj, double alpha)
    : w_(&w), obj_(&obj), alpha_(alpha) {
  if (!(alpha > 0)) throw ParameterError("penalty: alpha must be > 0");
  if (w.size() != obj.n) throw ParameterError("penalty: mixing matrix size differs from node count");
  lambda_min_ = symmetric_extremes(w.weights()).first;
}

Vector PenaltyProblem::laplacian_apply(const Vector& x) const {
  Vector out(x.size());
  auto o = as_blocks(out, obj_->p);
  const auto xb = as_blocks(x, obj_->p);
  o = xb - w_->weights() * xb;
  return out;
}

double PenaltyProblem::value(const Vector& x) const {
  return 0.5 * x.dot(laplacian_apply(x)) + alpha_ * obj_->stacked_value(x);
}

Vector PenaltyProblem::gradient(const Vector& x) const {
  return laplacian_apply(x) + alpha_ * obj_->stacked_gradient(x);
}

Vector PenaltyProblem::stochastic_gradient(const Vector& x, const Vector& z) const {
  Vector out(x.size());
  auto o = as_blocks(out, obj_->p);
  const Vector one_minus_diag = 1.0 - w_->diagonal().array();
  o = -(w_->off_diagonal() * as_blocks(z, obj_->p)) + one_minus_diag.asDiagonal() * as_blocks(x, obj_->p);
  out += alpha_ * obj_->stacked_gradient(x);
  return out;
}

PenaltyMinimum penalized_minimizer(const PenaltyProblem& prob, double tol, long long max_iterations) {
  const ObjectiveSet& obj = prob.objective();
  PenaltyMinimum out;
  out.step = prob.alpha() <= (1.0 + prob.lambda_min()) / obj.L ? 1.0 : 1.0 / prob.L_alpha();
  out.x = Vector::Zero(obj.n * obj.p);
  Vector g = prob.gradient(out.x);
  for (long long k = 0; k < max_iterations; ++k) {
    out.gradient_norm = g.norm();
    out.iterations = k;
    if (out.gradient_norm <= tol) return out;
    out.x -= out.step * g;
    g = prob.gradient(out.x);
  }
  out.gradient_norm = g.norm();
  if (out.gradient_norm <= tol) return out;
  std::ostringstream msg;
  msg << "penalized minimizer: " << max_iterations << " iterations reached with gradient norm "
      << out.gradient_norm;
  throw ConvergenceError(msg.str());
}

Vector penalized_direct_solve(const PenaltyProblem& prob) {
  const ObjectiveSet& obj = prob.objective();
  const auto quads = obj.quadratic_locals();
  if (quads.empty()) throw ParameterError("direct penalty solve needs quadratic local objectives");
  const Index n = obj.n;
  const Index p = obj.p;
  Matrix system = Matrix::Identity(n * p, n * p) - kron_identity(prob.mixing().weights(), p);
  Vector rhs(n * p);
  for (Index i = 0; i < n; ++i) {
    system.block(i * p, i * p, p, p) += prob.alpha() * quads[static_cast<size_t>(i)]->hessian();
    rhs.segment(i * p, p) = -prob.alpha() * quads[static_cast<size_t>(i)]->linear();
  }
  return system.ldlt().solve(rhs);
}

}  // namespace qdgd
