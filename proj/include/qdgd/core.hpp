#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qdgd/graph.hpp"
#include "qdgd/linalg.hpp"
#include "qdgd/objectives.hpp"
#include "qdgd/quantizers.hpp"

namespace qdgd {

/// x = [x_1; ...; x_n] with node i's block at offset i·p.
struct StackedIterate {
  Vector x;
  long long t = 0;
};

/// Fixed-horizon step sizes ε = c1 / T^(3δ/2), α = c2 / T^(δ/2).
struct StepSchedule {
  long long T = 0;
  double delta = 0;
  double c1 = 0;
  double c2 = 0;
  double epsilon = 0;
  double alpha = 0;
};

StepSchedule make_schedule(long long T, double delta, double c1, double c2);

/// Identifies the random substreams of one replication. Node i's draw at
/// iteration t comes from Stream::keyed(seed, quantize, {replication, i, t}).
struct DrawKeys {
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;

  Stream stream(int node, long long t) const {
    return Stream::keyed(seed, StreamDomain::quantize,
                         {replication, static_cast<std::uint64_t>(node), static_cast<std::uint64_t>(t)});
  }
};

struct TraceRecord {
  long long iteration = 0;
  double relative_error = 0;     // ||x_t - x*||² / ||x_0 - x*||²
  double squared_error = 0;      // ||x_t - x*||²
  double max_node_sq_error = 0;  // max_i ||x_i,t - x̃*||²
  double mean_node_sq_error = 0;
  double objective = 0;          // f(mean_i x_i,t)
  double node_average_objective = std::numeric_limits<double>::quiet_NaN();  // (1/n) Σ_i f(x_i,t)
  double cumulative_bits = 0;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
};

struct RunOptions {
  std::optional<Vector> x0;          // stacked; zero when absent
  long long record_stride = 1;       // the last iteration is always recorded
  bool node_objectives = false;      // fill node_average_objective (costs n evaluations of f)
  int float_bits = 64;
};

struct RunResult {
  ConvergenceTrace trace;
  StackedIterate final_state;
};

/// Nodes with at least one neighbour quantize their block once; every
/// neighbour receives that same draw.
Vector quantize_broadcasts(const Vector& x, const MixingMatrix& w, Index p, const Quantizer& quantizer,
                           const DrawKeys& keys, long long t);

/// x_i ← (1 - ε + ε w_ii) x_i + ε Σ_{j≠i} w_ij z_j - αε ∇f_i(x_i).
StackedIterate qdgd_step(const StackedIterate& state, const MixingMatrix& w, const ObjectiveSet& obj,
                         const Quantizer& quantizer, double epsilon, double alpha, const DrawKeys& keys);

RunResult run_qdgd(const MixingMatrix& w, const ObjectiveSet& obj, const Quantizer& quantizer,
                   const StepSchedule& schedule, const DrawKeys& keys, const RunOptions& options = {});

enum class DgdSchedule { inverse_t, inverse_sqrt_t };

/// α = c/T or c/√T.
double dgd_stepsize(double c, long long T, DgdSchedule schedule);

/// x_i ← w_ii x_i + Σ_{j≠i} w_ij z_j - α ∇f_i(x_i).
StackedIterate dgd_quantized_step(const StackedIterate& state, const MixingMatrix& w, const ObjectiveSet& obj,
                                  const Quantizer& quantizer, double alpha, const DrawKeys& keys);

RunResult run_dgd_quantized(const MixingMatrix& w, const ObjectiveSet& obj, const Quantizer& quantizer,
                            double alpha, long long T, const DrawKeys& keys, const RunOptions& options = {});

/// Total bits sent in one iteration: Σ_i deg_i · code length.
double bits_per_iteration(const MixingMatrix& w, const Quantizer& quantizer, Index p, int float_bits);

/// h_α(x) = ½ xᵀ(I - W⊗I)x + α F(x).
class PenaltyProblem {
 public:
  PenaltyProblem(const MixingMatrix& w, const ObjectiveSet& obj, double alpha);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// (W_D - W)z + (I - W_D)x + α∇F(x), lifted to blocks.
  Vector stochastic_gradient(const Vector& x, const Vector& z) const;

  double alpha() const { return alpha_; }
  double lambda_min() const { return lambda_min_; }
  double L_alpha() const { return 1.0 - lambda_min_ + alpha_ * obj_->L; }
  double mu_alpha() const { return alpha_ * obj_->mu; }
  const ObjectiveSet& objective() const { return *obj_; }
  const MixingMatrix& mixing() const { return *w_; }

 private:
  // (I - W) applied blockwise.
  Vector laplacian_apply(const Vector& x) const;

  const MixingMatrix* w_;
  const ObjectiveSet* obj_;
  double alpha_;
  double lambda_min_;
};

struct PenaltyMinimum {
  Vector x;
  double gradient_norm = 0;
  long long iterations = 0;
  double step = 0;
};

/// Gradient descent on h_α from 0 with unit step when α ≤ (1 + λ_n)/L, step
/// 1/L_α otherwise, until ||∇h_α|| ≤ tol.
PenaltyMinimum penalized_minimizer(const PenaltyProblem& prob, double tol,
                                   long long max_iterations = 10'000'000);

/// Solves (I - W⊗I + α blockdiag(H_i)) x = -α [g_i] for quadratic locals.
Vector penalized_direct_solve(const PenaltyProblem& prob);

}  // namespace qdgd
