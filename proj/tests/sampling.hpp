#pragma once

#include <cmath>
#include <functional>

#include "qdgd/linalg.hpp"
#include "qdgd/quantizers.hpp"
#include "qdgd/random.hpp"

namespace qdgd::testing {

struct DrawStats {
  Vector mean;
  Vector std_error;      // per-coordinate sample std / sqrt(N)
  double mean_sq_dev = 0;  // mean of ||Q(x) - x||²
  long draws = 0;
};

// Welford accumulation over N draws of Q(x), each from its own keyed substream.
inline DrawStats sample_quantizer(const Quantizer& q, const Vector& x, long draws, std::uint64_t seed) {
  const Index p = x.size();
  Vector mean = Vector::Zero(p);
  Vector m2 = Vector::Zero(p);
  double sq = 0;
  for (long k = 0; k < draws; ++k) {
    Stream rng = Stream::keyed(seed, StreamDomain::test, {static_cast<std::uint64_t>(k)});
    const Vector z = q.apply(x, rng);
    sq += (z - x).squaredNorm();
    const Vector d = z - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d.cwiseProduct(z - mean);
  }
  DrawStats s;
  s.mean = mean;
  s.std_error = (m2 / static_cast<double>(draws - 1)).cwiseSqrt() / std::sqrt(static_cast<double>(draws));
  s.mean_sq_dev = sq / static_cast<double>(draws);
  s.draws = draws;
  return s;
}

// Every coordinate of the sample mean lies within `k` standard errors of x.
// A coordinate with zero spread must match exactly.
inline bool mean_within(const DrawStats& s, const Vector& x, double k) {
  for (Index i = 0; i < x.size(); ++i) {
    const double dev = std::abs(s.mean(i) - x(i));
    const double tol = k * s.std_error(i) + 1e-12 * (1 + std::abs(x(i)));
    if (dev > tol) return false;
  }
  return true;
}

inline double declared_bound(const Quantizer& q, const Vector& x) {
  const VarianceClass v = variance_class_of(q, x.size());
  return is_relative(v) ? variance_constant(v) * x.squaredNorm() : variance_constant(v);
}

inline Vector random_vector(Index p, Stream& rng, double scale = 1.0) {
  Vector v(p);
  for (Index i = 0; i < p; ++i) v(i) = scale * rng.normal();
  return v;
}

}  // namespace qdgd::testing
