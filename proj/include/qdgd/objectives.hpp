#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qdgd/linalg.hpp"

namespace qdgd {

/// One node's differentiable, strongly convex objective f_i : R^p -> R.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual double smoothness() const = 0;
  virtual double strong_convexity() const = 0;
  /// argmin f_i, closed form or numerical.
  virtual Vector minimizer() const = 0;
};

/// f(x) = ½ xᵀHx + gᵀx + c with H symmetric positive definite.
class QuadraticLocal final : public LocalObjective {
 public:
  QuadraticLocal(Matrix hessian, Vector linear, double constant = 0.0);

  Index dim() const override { return linear_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double smoothness() const override { return lmax_; }
  double strong_convexity() const override { return lmin_; }
  Vector minimizer() const override;

  const Matrix& hessian() const { return hessian_; }
  const Vector& linear() const { return linear_; }

 private:
  Matrix hessian_;
  Vector linear_;
  double constant_;
  double lmin_;
  double lmax_;
};

/// f(x) = scale Σ_j log(1 + exp(-b_j a_jᵀx)) + ½ ridge ||x||².
class LogisticLocal final : public LocalObjective {
 public:
  LogisticLocal(Matrix features, Vector labels, double scale, double ridge);

  Index dim() const override { return features_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double smoothness() const override { return smoothness_; }
  double strong_convexity() const override { return ridge_; }
  Vector minimizer() const override;

 private:
  Matrix features_;
  Vector labels_;
  double scale_;
  double ridge_;
  double smoothness_;
};

/// n local objectives over a shared p-dimensional decision variable.
struct ObjectiveSet {
  int n = 0;
  Index p = 0;
  std::string family;
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  double L = 0;   // max_i smoothness
  double mu = 0;  // min_i strong convexity
  Vector optimum;
  std::vector<Vector> local_minima;
  Vector f_star_locals;
  double f0 = 0;
  double fstar = 0;

  /// Builds the set and computes L, μ, the global and local minima.
  static ObjectiveSet from_locals(std::vector<std::shared_ptr<const LocalObjective>> locals,
                                  std::string family);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  double local_value(int i, const Vector& x) const;
  Vector local_gradient(int i, const Vector& x) const;

  /// F(x) = Σ f_i(x_i) and its gradient for a stacked n·p vector.
  double stacked_value(const Vector& stacked) const;
  Vector stacked_gradient(const Vector& stacked) const;

  /// Each local as a quadratic, or nullptr when some local is not quadratic.
  std::vector<const QuadraticLocal*> quadratic_locals() const;
};

struct Dataset {
  Matrix features;  // D × p, row j is a_j
  Vector labels;    // b_j
};

/// Row indices of each node's contiguous shard; with a seed, rows are first
/// permuted deterministically.
std::vector<std::vector<Index>> shard_rows(Index rows, int n,
                                           std::optional<std::uint64_t> shuffle_seed = std::nullopt);

struct QuadraticOptions {
  bool zero_linear = false;  // force b_i = 0
};

ObjectiveSet build_quadratic(int n, Index p, std::uint64_t seed, QuadraticOptions options = {});

/// f_i = ½ xᵀH_i x + g_iᵀx from explicit parts.
ObjectiveSet quadratic_from_parts(const std::vector<Matrix>& hessians, const std::vector<Vector>& linear);

ObjectiveSet build_least_squares(int n, Index p, double noise_std, std::uint64_t seed,
                                 Vector* planted = nullptr);

ObjectiveSet build_ridge(const Dataset& data, int n, double lambda,
                         std::optional<std::uint64_t> shuffle_seed = std::nullopt);

ObjectiveSet build_logistic(const Dataset& data, int n, double lambda,
                            std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// D/2 points from N(mean, var)^p labelled +1 and D/2 from N(-mean, var)^p
/// labelled -1, in a seed-determined order.
Dataset generate_gaussian_classes(Index samples, Index p, double mean, double var, std::uint64_t seed);

struct MinimizeResult {
  Vector x;
  double gradient_norm = 0;
  long iterations = 0;
};

/// Gradient descent with Barzilai-Borwein trial steps and Armijo backtracking.
MinimizeResult minimize_smooth(const std::function<double(const Vector&)>& value,
                               const std::function<Vector(const Vector&)>& gradient, Vector x0,
                               double initial_step, double tol, long max_iterations = 1000000);

}  // namespace qdgd
