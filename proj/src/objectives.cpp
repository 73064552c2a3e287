#include "qdgd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qdgd/errors.hpp"
#include "qdgd/random.hpp"

namespace qdgd {

namespace {

// log(1 + e^m) without overflow.
double softplus(double m) { return m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)); }

double sigmoid(double m) {
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

void require_positive(double v, const char* what) {
  if (!(v > 0)) throw ParameterError(std::string(what) + " must be > 0");
}

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
  return out;
}

Vector select_entries(const Vector& v, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) out(static_cast<Index>(r)) = v(rows[r]);
  return out;
}

}  // namespace

QuadraticLocal::QuadraticLocal(Matrix hessian, Vector linear, double constant)
    : hessian_(std::move(hessian)), linear_(std::move(linear)), constant_(constant) {
  if (hessian_.rows() != hessian_.cols() || hessian_.rows() != linear_.size()) {
    throw ParameterError("quadratic objective: dimension mismatch");
  }
  auto [lo, hi] = symmetric_extremes(hessian_);
  lmin_ = lo;
  lmax_ = hi;
  if (!(lmin_ > 1e-12 * std::max(1.0, lmax_))) {
    std::ostringstream msg;
    msg << "local objective is not strongly convex (smallest Hessian eigenvalue " << lmin_ << ")";
    throw ContractError(msg.str());
  }
}

double QuadraticLocal::value(const Vector& x) const {
  return 0.5 * x.dot(hessian_ * x) + linear_.dot(x) + constant_;
}

Vector QuadraticLocal::gradient(const Vector& x) const { return hessian_ * x + linear_; }

Vector QuadraticLocal::minimizer() const { return hessian_.ldlt().solve(-linear_); }

LogisticLocal::LogisticLocal(Matrix features, Vector labels, double scale, double ridge)
    : features_(std::move(features)), labels_(std::move(labels)), scale_(scale), ridge_(ridge) {
  if (features_.rows() != labels_.size()) throw DataError("logistic objective: feature/label count mismatch");
  require_positive(ridge_, "logistic regularizer");
  const Matrix gram = features_.transpose() * features_;
  smoothness_ = scale_ * symmetric_extremes(gram).second / 4.0 + ridge_;
}

double LogisticLocal::value(const Vector& x) const {
  const Vector margins = features_ * x;
  double loss = 0.0;
  for (Index j = 0; j < margins.size(); ++j) loss += softplus(-labels_(j) * margins(j));
  return scale_ * loss + 0.5 * ridge_ * x.squaredNorm();
}

Vector LogisticLocal::gradient(const Vector& x) const {
  const Vector margins = features_ * x;
  Vector weights(margins.size());
  for (Index j = 0; j < margins.size(); ++j) weights(j) = -labels_(j) * sigmoid(-labels_(j) * margins(j));
  return scale_ * (features_.transpose() * weights) + ridge_ * x;
}

Vector LogisticLocal::minimizer() const {
  auto f = [this](const Vector& x) { return value(x); };
  auto g = [this](const Vector& x) { return gradient(x); };
  return minimize_smooth(f, g, Vector::Zero(dim()), 1.0 / smoothness_, 1e-10).x;
}

ObjectiveSet ObjectiveSet::from_locals(std::vector<std::shared_ptr<const LocalObjective>> locals,
                                       std::string family) {
  if (locals.empty()) throw ParameterError("objective set needs at least one node");
  ObjectiveSet set;
  set.n = static_cast<int>(locals.size());
  set.p = locals.front()->dim();
  set.family = std::move(family);
  set.locals = std::move(locals);
  set.L = 0.0;
  set.mu = std::numeric_limits<double>::infinity();
  for (const auto& f : set.locals) {
    if (f->dim() != set.p) throw ParameterError("objective set: local dimensions differ");
    set.L = std::max(set.L, f->smoothness());
    set.mu = std::min(set.mu, f->strong_convexity());
  }

  const Vector zero = Vector::Zero(set.p);
  set.f_star_locals.resize(set.n);
  set.f0 = 0.0;
  for (int i = 0; i < set.n; ++i) {
    set.local_minima.push_back(set.locals[static_cast<size_t>(i)]->minimizer());
    set.f_star_locals(i) = set.local_value(i, set.local_minima.back());
    set.f0 += set.local_value(i, zero);
  }

  const auto quads = set.quadratic_locals();
  if (!quads.empty()) {
    Matrix h = Matrix::Zero(set.p, set.p);
    Vector g = Vector::Zero(set.p);
    for (const auto* q : quads) {
      h += q->hessian();
      g += q->linear();
    }
    set.optimum = h.ldlt().solve(-g);
  } else {
    double lsum = 0.0;
    for (const auto& f : set.locals) lsum += f->smoothness();
    auto f = [&set](const Vector& x) { return set.value(x); };
    auto grad = [&set](const Vector& x) { return set.gradient(x); };
    set.optimum = minimize_smooth(f, grad, zero, 1.0 / lsum, 1e-10).x;
  }
  set.fstar = set.value(set.optimum);
  return set;
}

double ObjectiveSet::value(const Vector& x) const {
  double total = 0.0;
  for (const auto& f : locals) total += f->value(x);
  return total;
}

Vector ObjectiveSet::gradient(const Vector& x) const {
  Vector total = Vector::Zero(p);
  for (const auto& f : locals) total += f->gradient(x);
  return total;
}

double ObjectiveSet::local_value(int i, const Vector& x) const {
  return locals.at(static_cast<size_t>(i))->value(x);
}

Vector ObjectiveSet::local_gradient(int i, const Vector& x) const {
  return locals.at(static_cast<size_t>(i))->gradient(x);
}

double ObjectiveSet::stacked_value(const Vector& stacked) const {
  const auto blocks = as_blocks(stacked, p);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += local_value(i, blocks.row(i).transpose());
  return total;
}

Vector ObjectiveSet::stacked_gradient(const Vector& stacked) const {
  Vector out(stacked.size());
  const auto in = as_blocks(stacked, p);
  auto blocks = as_blocks(out, p);
  for (int i = 0; i < n; ++i) blocks.row(i) = local_gradient(i, in.row(i).transpose()).transpose();
  return out;
}

std::vector<const QuadraticLocal*> ObjectiveSet::quadratic_locals() const {
  std::vector<const QuadraticLocal*> out;
  for (const auto& f : locals) {
    const auto* q = dynamic_cast<const QuadraticLocal*>(f.get());
    if (q == nullptr) return {};
    out.push_back(q);
  }
  return out;
}

std::vector<std::vector<Index>> shard_rows(Index rows, int n, std::optional<std::uint64_t> shuffle_seed) {
  if (n < 1) throw ParameterError("sharding: n must be >= 1");
  if (rows % n != 0) {
    std::ostringstream msg;
    msg << "sharding: " << rows << " rows are not divisible by n = " << n;
    throw DataError(msg.str());
  }
  std::vector<Index> order(static_cast<size_t>(rows));
  std::iota(order.begin(), order.end(), Index{0});
  if (shuffle_seed) {
    Stream rng = Stream::keyed(*shuffle_seed, StreamDomain::shuffle);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const Index d = rows / n;
  std::vector<std::vector<Index>> shards(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    shards[static_cast<size_t>(i)].assign(order.begin() + i * d, order.begin() + (i + 1) * d);
  }
  return shards;
}

ObjectiveSet build_quadratic(int n, Index p, std::uint64_t seed, QuadraticOptions options) {
  if (n < 1) throw ParameterError("quadratic: n must be >= 1");
  if (p < 2 || p % 2 != 0) throw ParameterError("quadratic: p must be even and positive");
  static constexpr double kLarge[] = {1.0, 2.0, 4.0};
  static constexpr double kSmall[] = {1.0, 0.5, 0.25};
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  for (int i = 0; i < n; ++i) {
    Stream rng = Stream::keyed(seed, StreamDomain::objective, {static_cast<std::uint64_t>(i)});
    Vector diag(p);
    for (Index k = 0; k < p; ++k) {
      const auto pick = static_cast<size_t>(rng() % 3);
      diag(k) = k < p / 2 ? kLarge[pick] : kSmall[pick];
    }
    Vector b(p);
    for (Index k = 0; k < p; ++k) b(k) = options.zero_linear ? 0.0 : rng.uniform();
    locals.push_back(std::make_shared<QuadraticLocal>(Matrix(diag.asDiagonal()), b));
  }
  return ObjectiveSet::from_locals(std::move(locals), "quadratic");
}

ObjectiveSet quadratic_from_parts(const std::vector<Matrix>& hessians, const std::vector<Vector>& linear) {
  if (hessians.size() != linear.size()) throw ParameterError("quadratic: part counts differ");
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  for (size_t i = 0; i < hessians.size(); ++i) {
    locals.push_back(std::make_shared<QuadraticLocal>(hessians[i], linear[i]));
  }
  return ObjectiveSet::from_locals(std::move(locals), "quadratic");
}

ObjectiveSet build_least_squares(int n, Index p, double noise_std, std::uint64_t seed, Vector* planted) {
  if (n < 1 || p < 1) throw ParameterError("least squares: n and p must be >= 1");
  if (!(noise_std >= 0)) throw ParameterError("least squares: noise_std must be >= 0");
  Stream plant_rng = Stream::keyed(seed, StreamDomain::objective, {static_cast<std::uint64_t>(n), 1});
  Vector truth(p);
  for (Index k = 0; k < p; ++k) truth(k) = plant_rng.normal();
  if (planted != nullptr) *planted = truth;

  std::vector<std::shared_ptr<const LocalObjective>> locals;
  for (int i = 0; i < n; ++i) {
    Stream rng = Stream::keyed(seed, StreamDomain::objective, {static_cast<std::uint64_t>(i)});
    Matrix a(p, p);
    for (Index r = 0; r < p; ++r)
      for (Index c = 0; c < p; ++c) a(r, c) = rng.normal();
    Vector b = a * truth;
    for (Index r = 0; r < p; ++r) b(r) += noise_std * rng.normal();
    locals.push_back(std::make_shared<QuadraticLocal>(a.transpose() * a, -(a.transpose() * b),
                                                      0.5 * b.squaredNorm()));
  }
  return ObjectiveSet::from_locals(std::move(locals), "least_squares");
}

ObjectiveSet build_ridge(const Dataset& data, int n, double lambda, std::optional<std::uint64_t> shuffle_seed) {
  require_positive(lambda, "ridge regularizer");
  const auto shards = shard_rows(data.features.rows(), n, shuffle_seed);
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  for (const auto& rows : shards) {
    const Matrix a = select_rows(data.features, rows);
    const Vector b = select_entries(data.labels, rows);
    Matrix h = a.transpose() * a;
    h.diagonal().array() += lambda / n;
    locals.push_back(std::make_shared<QuadraticLocal>(h, -(a.transpose() * b), 0.5 * b.squaredNorm()));
  }
  return ObjectiveSet::from_locals(std::move(locals), "ridge");
}

ObjectiveSet build_logistic(const Dataset& data, int n, double lambda,
                            std::optional<std::uint64_t> shuffle_seed) {
  require_positive(lambda, "logistic regularizer");
  for (Index j = 0; j < data.labels.size(); ++j) {
    if (data.labels(j) != 1.0 && data.labels(j) != -1.0) {
      std::ostringstream msg;
      msg << "logistic: label at row " << j << " is " << data.labels(j) << ", expected -1 or +1";
      throw DataError(msg.str());
    }
  }
  const auto shards = shard_rows(data.features.rows(), n, shuffle_seed);
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  for (const auto& rows : shards) {
    locals.push_back(std::make_shared<LogisticLocal>(select_rows(data.features, rows),
                                                     select_entries(data.labels, rows), 1.0 / n, lambda / n));
  }
  return ObjectiveSet::from_locals(std::move(locals), "logistic");
}

Dataset generate_gaussian_classes(Index samples, Index p, double mean, double var, std::uint64_t seed) {
  if (samples < 2 || samples % 2 != 0) throw ParameterError("gaussian classes: D must be even and >= 2");
  if (p < 1) throw ParameterError("gaussian classes: p must be >= 1");
  if (!(var >= 0)) throw ParameterError("gaussian classes: variance must be >= 0");
  Stream rng = Stream::keyed(seed, StreamDomain::dataset);
  const double sd = std::sqrt(var);
  Dataset raw{Matrix(samples, p), Vector(samples)};
  for (Index j = 0; j < samples; ++j) {
    const double label = j < samples / 2 ? 1.0 : -1.0;
    raw.labels(j) = label;
    for (Index k = 0; k < p; ++k) raw.features(j, k) = label * mean + sd * rng.normal();
  }
  std::vector<Index> order(static_cast<size_t>(samples));
  std::iota(order.begin(), order.end(), Index{0});
  Stream shuffle = Stream::keyed(seed, StreamDomain::shuffle);
  std::shuffle(order.begin(), order.end(), shuffle);
  return Dataset{select_rows(raw.features, order), select_entries(raw.labels, order)};
}

MinimizeResult minimize_smooth(const std::function<double(const Vector&)>& value,
                               const std::function<Vector(const Vector&)>& gradient, Vector x0,
                               double initial_step, double tol, long max_iterations) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  MinimizeResult out;
  out.x = std::move(x0);
  double f = value(out.x);
  Vector g = gradient(out.x);
  double step = initial_step;
  for (long k = 0; k < max_iterations; ++k) {
    const double gn2 = g.squaredNorm();
    out.gradient_norm = std::sqrt(gn2);
    out.iterations = k;
    if (out.gradient_norm <= tol) return out;
    double t = step;
    Vector trial;
    double ft = 0.0;
    for (int halvings = 0;; ++halvings) {
      trial = out.x - t * g;
      ft = value(trial);
      // Allow a few ulps of slack so that roundoff near the optimum cannot stall the search.
      if (ft <= f - 1e-4 * t * gn2 + 8 * kEps * std::abs(f)) break;
      if (halvings > 60) throw ConvergenceError("line search failed to find a decrease");
      t *= 0.5;
    }
    const Vector g_new = gradient(trial);
    const Vector s = trial - out.x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    step = sy > 0 ? s.squaredNorm() / sy : initial_step;
    out.x = std::move(trial);
    f = ft;
    g = g_new;
  }
  std::ostringstream msg;
  msg << "minimizer hit the iteration cap with gradient norm " << g.norm();
  throw ConvergenceError(msg.str());
}

}  // namespace qdgd
