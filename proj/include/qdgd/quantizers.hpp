#pragma once

#include <string>
#include <variant>

#include "qdgd/linalg.hpp"
#include "qdgd/random.hpp"

namespace qdgd {

/// Example-1 style scalar grid: scale γ, b bits, representable range
/// [-γ 2^(b-1), γ (2^b - 1)], applied coordinate-wise to vectors.
struct ScalarLowPrecision {
  double scale = 1.0;
  int bits = 8;
};

/// Norm-scaled randomized rounding onto s levels per coordinate.
struct VectorLowPrecision {
  long long levels = 1;
};

/// Coordinate i survives with probability q_i and is rescaled by 1/q_i.
/// A single-entry probability vector is broadcast to every coordinate.
struct Sparsifier {
  Vector probabilities;
};

/// Additive N(0, σ²/p I_p) noise; σ² = 0 is the exact (identity) channel.
struct GaussianNoise {
  double total_variance = 0.0;
};

using QuantizerKind = std::variant<ScalarLowPrecision, VectorLowPrecision, Sparsifier, GaussianNoise>;

/// E||Q(x) - x||² <= sigma2 for every x.
struct ConstantBound {
  double sigma2 = 0.0;
};

/// E||Q(x) - x||² <= eta2 ||x||².
struct RelativeBound {
  double eta2 = 0.0;
};

using VarianceClass = std::variant<ConstantBound, RelativeBound>;

struct QuantizedVector {
  Vector values;
  double expected_bits = 0.0;  // accounting value, not an actual encoding
};

/// How log* in the code-length bounds is evaluated.
enum class LogStar {
  leading_log2,      // log2(x) only, the leading term of log* (default)
  iterated_natural,  // ln x + ln ln x + ... while terms stay positive
  iterated_log2,     // same with base 2
};

double log_star(double x, LogStar convention = LogStar::leading_log2);

/// Expected bits to transmit a p-vector quantized to s levels with b-bit
/// floats: the dense-regime bound, or the smaller of the two bounds when
/// s² + √p <= p/2 makes the sparse scheme available.
double expected_code_length(double levels, Index dim, int float_bits,
                            LogStar convention = LogStar::leading_log2);

double quantize_scalar_lowprec(double x, double scale, int bits, Stream& rng);
QuantizedVector quantize_vector_lowprec(const Vector& x, long long levels, Stream& rng,
                                        int float_bits = 64);
Vector quantize_sparsify(const Vector& x, const Vector& probabilities, Stream& rng);
Vector quantize_gaussian(const Vector& x, double total_variance, Stream& rng);

/// Immutable, validated quantizer description.
class Quantizer {
 public:
  explicit Quantizer(QuantizerKind kind);

  static Quantizer exact() { return Quantizer(GaussianNoise{0.0}); }
  static Quantizer gaussian(double sigma2) { return Quantizer(GaussianNoise{sigma2}); }
  static Quantizer scalar_lowprec(double scale, int bits) {
    return Quantizer(ScalarLowPrecision{scale, bits});
  }
  static Quantizer vector_lowprec(long long levels) { return Quantizer(VectorLowPrecision{levels}); }
  static Quantizer sparsifier(Vector probabilities) {
    return Quantizer(Sparsifier{std::move(probabilities)});
  }

  const QuantizerKind& kind() const { return kind_; }
  std::string name() const;
  bool is_exact() const;

  Vector apply(const Vector& x, Stream& rng) const;

  /// Per-vector bits used by the communication accountant.
  double code_length_bits(Index dim, int float_bits) const;

 private:
  QuantizerKind kind_;
};

VarianceClass variance_class_of(const Quantizer& quantizer, Index dim);

/// The bound constant: σ² for constant-bound quantizers, η² for relative ones.
inline double variance_constant(const VarianceClass& v) {
  return std::visit([](const auto& b) {
    if constexpr (std::is_same_v<std::decay_t<decltype(b)>, ConstantBound>) return b.sigma2;
    else return b.eta2;
  }, v);
}

inline bool is_relative(const VarianceClass& v) { return std::holds_alternative<RelativeBound>(v); }

/// η² = min(p/s², √p/s) for the vector low-precision quantizer.
double lowprec_eta2(double levels, Index dim);

}  // namespace qdgd
