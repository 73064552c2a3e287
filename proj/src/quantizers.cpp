#include "qdgd/quantizers.hpp"

#include <cmath>
#include <sstream>

#include "qdgd/errors.hpp"

namespace qdgd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double probability_at(const Vector& q, Index i) { return q.size() == 1 ? q(0) : q(i); }

}  // namespace

double log_star(double x, LogStar convention) {
  if (convention == LogStar::leading_log2) return x > 0 ? std::log2(x) : 0.0;
  const bool base2 = convention == LogStar::iterated_log2;
  double sum = 0.0;
  double term = x;
  for (int depth = 0; depth < 64; ++depth) {
    if (!(term > 0)) break;
    term = base2 ? std::log2(term) : std::log(term);
    if (!(term > 0)) break;
    sum += term;
  }
  return sum;
}

double expected_code_length(double levels, Index dim, int float_bits, LogStar convention) {
  if (!(levels >= 1)) throw ParameterError("expected_code_length: s must be >= 1");
  if (dim < 1) throw ParameterError("expected_code_length: p must be >= 1");
  if (float_bits < 1) throw ParameterError("expected_code_length: b must be >= 1");
  const double p = static_cast<double>(dim);
  const double s2 = levels * levels;
  const double root_p = std::sqrt(p);
  const double dense_arg = 1.0 + (s2 + std::min(p, levels * root_p)) / p;
  const double dense = float_bits + (2.5 + 0.5 * log_star(dense_arg, convention)) * p;
  if (s2 + root_p <= p / 2.0) {
    // The dense scheme is also available here; the sender uses the cheaper one,
    // which keeps the cost monotone across the regime switch.
    const double arg = 2.0 * (s2 + p) / (s2 + root_p);
    return std::min(dense, float_bits + (3.0 + 1.5 * log_star(arg, convention)) * (s2 + root_p));
  }
  return dense;
}

double lowprec_eta2(double levels, Index dim) {
  const double p = static_cast<double>(dim);
  return std::min(p / (levels * levels), std::sqrt(p) / levels);
}

double quantize_scalar_lowprec(double x, double scale, int bits, Stream& rng) {
  if (!(scale > 0)) throw ParameterError("scalar quantizer: scale must be > 0");
  if (bits < 1 || bits > 62) throw ParameterError("scalar quantizer: bits must lie in [1, 62]");
  const double lo = -scale * std::ldexp(1.0, bits - 1);
  const double hi = scale * (std::ldexp(1.0, bits) - 1.0);
  if (!(x >= lo && x <= hi)) {
    std::ostringstream msg;
    msg << "scalar quantizer: " << x << " outside representable range [" << lo << ", " << hi << "]";
    throw RangeError(msg.str());
  }
  const double k = std::floor(x / scale);
  const double frac = x / scale - k;
  const double u = rng.uniform();
  return (u < frac ? k + 1.0 : k) * scale;
}

QuantizedVector quantize_vector_lowprec(const Vector& x, long long levels, Stream& rng,
                                        int float_bits) {
  if (levels < 1) throw ParameterError("vector quantizer: s must be >= 1");
  QuantizedVector out;
  out.values = Vector::Zero(x.size());
  out.expected_bits = expected_code_length(static_cast<double>(levels), x.size(), float_bits);
  const double norm = x.norm();
  if (norm == 0.0) return out;
  const double s = static_cast<double>(levels);
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x(i)) / norm;
    const double l = std::min(std::floor(a * s), s);
    const double q = a * s - l;  // zero on a level boundary
    const double u = rng.uniform();
    const double xi = (u < q ? l + 1.0 : l) / s;
    const double sign = x(i) > 0 ? 1.0 : (x(i) < 0 ? -1.0 : 0.0);
    out.values(i) = norm * sign * xi;
  }
  return out;
}

Vector quantize_sparsify(const Vector& x, const Vector& probabilities, Stream& rng) {
  if (probabilities.size() != 1 && probabilities.size() != x.size()) {
    throw ParameterError("sparsifier: probability vector length does not match input");
  }
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double q = probability_at(probabilities, i);
    if (!(q > 0.0 && q <= 1.0)) throw ParameterError("sparsifier: probabilities must lie in (0, 1]");
    out(i) = rng.uniform() < q ? x(i) / q : 0.0;
  }
  return out;
}

Vector quantize_gaussian(const Vector& x, double total_variance, Stream& rng) {
  if (!(total_variance >= 0.0)) throw ParameterError("gaussian quantizer: variance must be >= 0");
  if (total_variance == 0.0) return x;
  const double sd = std::sqrt(total_variance / static_cast<double>(x.size()));
  Vector out(x.size());
  std::normal_distribution<double> normal(0.0, sd);
  for (Index i = 0; i < x.size(); ++i) out(i) = x(i) + normal(rng);
  return out;
}

Quantizer::Quantizer(QuantizerKind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const ScalarLowPrecision& k) {
                   if (!(k.scale > 0)) throw ParameterError("scalar_lowprec: scale must be > 0");
                   if (k.bits < 1 || k.bits > 62)
                     throw ParameterError("scalar_lowprec: bits must lie in [1, 62]");
                 },
                 [](const VectorLowPrecision& k) {
                   if (k.levels < 1) throw ParameterError("vector_lowprec: s must be >= 1");
                 },
                 [](const Sparsifier& k) {
                   if (k.probabilities.size() == 0)
                     throw ParameterError("sparsifier: empty probability vector");
                   for (Index i = 0; i < k.probabilities.size(); ++i) {
                     if (!(k.probabilities(i) > 0.0 && k.probabilities(i) <= 1.0))
                       throw ParameterError("sparsifier: probabilities must lie in (0, 1]");
                   }
                 },
                 [](const GaussianNoise& k) {
                   if (!(k.total_variance >= 0.0))
                     throw ParameterError("gaussian: variance must be >= 0");
                 },
             },
             kind_);
}

std::string Quantizer::name() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const ScalarLowPrecision& k) {
                   out << "scalar_lowprec(gamma=" << k.scale << ",b=" << k.bits << ")";
                 },
                 [&](const VectorLowPrecision& k) { out << "vector_lowprec(s=" << k.levels << ")"; },
                 [&](const Sparsifier& k) { out << "sparsifier(q_min=" << k.probabilities.minCoeff() << ")"; },
                 [&](const GaussianNoise& k) { out << "gaussian(sigma2=" << k.total_variance << ")"; },
             },
             kind_);
  return out.str();
}

bool Quantizer::is_exact() const {
  if (const auto* g = std::get_if<GaussianNoise>(&kind_)) return g->total_variance == 0.0;
  if (const auto* s = std::get_if<Sparsifier>(&kind_)) return (s->probabilities.array() == 1.0).all();
  return false;
}

Vector Quantizer::apply(const Vector& x, Stream& rng) const {
  return std::visit(Overloaded{
                        [&](const ScalarLowPrecision& k) {
                          Vector out(x.size());
                          for (Index i = 0; i < x.size(); ++i)
                            out(i) = quantize_scalar_lowprec(x(i), k.scale, k.bits, rng);
                          return out;
                        },
                        [&](const VectorLowPrecision& k) {
                          return quantize_vector_lowprec(x, k.levels, rng).values;
                        },
                        [&](const Sparsifier& k) { return quantize_sparsify(x, k.probabilities, rng); },
                        [&](const GaussianNoise& k) { return quantize_gaussian(x, k.total_variance, rng); },
                    },
                    kind_);
}

double Quantizer::code_length_bits(Index dim, int float_bits) const {
  const double p = static_cast<double>(dim);
  return std::visit(Overloaded{
                        [&](const ScalarLowPrecision& k) { return p * k.bits; },
                        [&](const VectorLowPrecision& k) {
                          return expected_code_length(static_cast<double>(k.levels), dim, float_bits);
                        },
                        [&](const Sparsifier& k) {
                          double expected_nonzeros = 0.0;
                          for (Index i = 0; i < dim; ++i) expected_nonzeros += probability_at(k.probabilities, i);
                          const double index_bits = std::ceil(std::log2(std::max(p, 2.0)));
                          return expected_nonzeros * (float_bits + index_bits);
                        },
                        [&](const GaussianNoise&) { return p * float_bits; },
                    },
                    kind_);
}

VarianceClass variance_class_of(const Quantizer& quantizer, Index dim) {
  return std::visit(Overloaded{
                        [&](const ScalarLowPrecision& k) -> VarianceClass {
                          return ConstantBound{static_cast<double>(dim) * k.scale * k.scale / 4.0};
                        },
                        [&](const VectorLowPrecision& k) -> VarianceClass {
                          return RelativeBound{lowprec_eta2(static_cast<double>(k.levels), dim)};
                        },
                        [&](const Sparsifier& k) -> VarianceClass {
                          return RelativeBound{1.0 / k.probabilities.minCoeff() - 1.0};
                        },
                        [&](const GaussianNoise& k) -> VarianceClass {
                          return ConstantBound{k.total_variance};
                        },
                    },
                    quantizer.kind());
}

}  // namespace qdgd
