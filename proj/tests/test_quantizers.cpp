#include <doctest.h>

#include <cmath>
#include <map>

#include "qdgd/errors.hpp"
#include "qdgd/quantizers.hpp"
#include "sampling.hpp"

using namespace qdgd;
using qdgd::testing::declared_bound;
using qdgd::testing::mean_within;
using qdgd::testing::random_vector;
using qdgd::testing::sample_quantizer;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Stream test_stream(std::uint64_t k) { return Stream::keyed(77, StreamDomain::test, {k}); }

}  // namespace

TEST_CASE("scalar low precision: grid points are fixed") {
  for (int k = -4; k <= 6; ++k) {
    Stream rng = test_stream(static_cast<std::uint64_t>(k + 10));
    for (int rep = 0; rep < 20; ++rep) CHECK(quantize_scalar_lowprec(0.5 * k, 0.5, 4, rng) == 0.5 * k);
  }
}

TEST_CASE("scalar low precision: two-outcome oracle at 0.3") {
  const long N = 100000;
  double sum = 0;
  double sum_sq = 0;
  std::map<double, long> counts;
  for (long k = 0; k < N; ++k) {
    Stream rng = test_stream(static_cast<std::uint64_t>(k));
    const double z = quantize_scalar_lowprec(0.3, 1.0, 4, rng);
    counts[z]++;
    sum += z;
    sum_sq += (z - 0.3) * (z - 0.3);
  }
  CHECK(counts.size() == 2);
  CHECK(counts.count(0.0) == 1);
  CHECK(counts.count(1.0) == 1);
  const double mean = sum / N;
  // Outcomes 1 (prob .3) and 0 (prob .7): variance .21.
  const double se = std::sqrt(0.21 / N);
  CHECK(std::abs(mean - 0.3) <= 4 * se);
  CHECK(sum_sq / N <= 0.25);
  CHECK(sum_sq / N == doctest::Approx(0.21).epsilon(0.03));
}

TEST_CASE("scalar low precision: range is enforced") {
  Stream rng = test_stream(1);
  // b = 3, γ = 1: range [-4, 7].
  CHECK_NOTHROW(quantize_scalar_lowprec(-4.0, 1.0, 3, rng));
  CHECK_NOTHROW(quantize_scalar_lowprec(7.0, 1.0, 3, rng));
  CHECK_THROWS_AS(quantize_scalar_lowprec(7.01, 1.0, 3, rng), RangeError);
  CHECK_THROWS_AS(quantize_scalar_lowprec(-4.5, 1.0, 3, rng), RangeError);
  CHECK_THROWS_AS(quantize_scalar_lowprec(1.0, 0.0, 3, rng), ParameterError);
  CHECK_THROWS_AS(Quantizer::scalar_lowprec(1.0, 0), ParameterError);
}

TEST_CASE("vector low precision: zero maps to zero") {
  Stream rng = test_stream(2);
  const auto q = quantize_vector_lowprec(Vector::Zero(5), 3, rng);
  CHECK(q.values.isZero(0));
}

TEST_CASE("vector low precision: enumeration oracle for (3, 4), s = 1") {
  // |x_i|/||x|| = .6, .8 → each coordinate is 5 or 0, independently.
  const Vector x = vec({3, 4});
  const double p1 = 0.6;
  const double p2 = 0.8;
  double mean1 = 0, mean2 = 0, var = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double prob = (a ? p1 : 1 - p1) * (b ? p2 : 1 - p2);
      const double z1 = a ? 5.0 : 0.0;
      const double z2 = b ? 5.0 : 0.0;
      mean1 += prob * z1;
      mean2 += prob * z2;
      var += prob * ((z1 - 3) * (z1 - 3) + (z2 - 4) * (z2 - 4));
    }
  }
  CHECK(mean1 == doctest::Approx(3));
  CHECK(mean2 == doctest::Approx(4));
  CHECK(var == doctest::Approx(10));
  CHECK(var <= lowprec_eta2(1, 2) * 25);
  CHECK(lowprec_eta2(1, 2) * 25 == doctest::Approx(std::sqrt(2.0) * 25));

  const long N = 100000;
  long first_is_five = 0;
  for (long k = 0; k < N; ++k) {
    Stream rng = test_stream(static_cast<std::uint64_t>(k));
    const Vector z = quantize_vector_lowprec(x, 1, rng).values;
    CHECK_MESSAGE((z(0) == 0.0 || z(0) == 5.0), "coordinate 1 outside {0, 5}");
    if (z(0) == 5.0) ++first_is_five;
  }
  const double freq = static_cast<double>(first_is_five) / N;
  CHECK(std::abs(freq - 0.6) <= 4 * std::sqrt(0.24 / N));

  const auto stats = sample_quantizer(Quantizer::vector_lowprec(1), x, N, 3);
  CHECK(mean_within(stats, x, 4));
  CHECK(stats.mean_sq_dev == doctest::Approx(10).epsilon(0.03));
}

TEST_CASE("vector low precision: level boundary is deterministic") {
  // x = (1, 0), s = 2: |x_1|/||x|| = 1 = 2/2 exactly.
  const Vector x = vec({1, 0});
  for (std::uint64_t k = 0; k < 50; ++k) {
    Stream rng = test_stream(k);
    CHECK(quantize_vector_lowprec(x, 2, rng).values == x);
  }
}

TEST_CASE("vector low precision: levels are scale free") {
  const Vector x = vec({0.3, -1.2, 2.5, 0.0, -0.7});
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    for (std::uint64_t k = 0; k < 200; ++k) {
      Stream r1 = test_stream(k);
      Stream r2 = test_stream(k);
      const Vector a = quantize_vector_lowprec(x, 3, r1).values;
      const Vector b = quantize_vector_lowprec(c * x, 3, r2).values;
      // Same uniforms, same levels: outputs differ only by the scale factor.
      CHECK((b - c * a).norm() <= 1e-12 * c * (1 + a.norm()));
    }
  }
}

TEST_CASE("sparsifier oracles") {
  const Vector x = vec({1, 1});
  Stream rng = test_stream(5);
  CHECK(quantize_sparsify(x, vec({1, 1}), rng) == x);
  for (std::uint64_t k = 0; k < 100; ++k) {
    Stream r = test_stream(k);
    const Vector z = quantize_sparsify(x, vec({0.5, 0.5}), r);
    for (Index i = 0; i < 2; ++i) CHECK((z(i) == 0.0 || z(i) == 2.0));
  }
  // Four equally likely outcomes: squared deviation 1 per coordinate.
  double var = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) var += 0.25 * (std::pow(2.0 * a - 1, 2) + std::pow(2.0 * b - 1, 2));
  CHECK(var == doctest::Approx(2));
  const auto q = Quantizer::sparsifier(vec({0.5, 0.5}));
  CHECK(declared_bound(q, x) == doctest::Approx(2));
  const auto stats = sample_quantizer(q, x, 100000, 4);
  CHECK(mean_within(stats, x, 4));
  CHECK(stats.mean_sq_dev == doctest::Approx(2).epsilon(0.03));

  CHECK_THROWS_AS(quantize_sparsify(x, vec({0.0, 0.5}), rng), ParameterError);
  CHECK_THROWS_AS(quantize_sparsify(x, vec({0.5, 1.5}), rng), ParameterError);
  CHECK_THROWS_AS(Quantizer::sparsifier(vec({-0.1})), ParameterError);
}

TEST_CASE("gaussian noise") {
  const Vector x = Vector::LinSpaced(20, -2, 3);
  Stream rng = test_stream(6);
  CHECK(quantize_gaussian(x, 0.0, rng) == x);
  const auto stats = sample_quantizer(Quantizer::gaussian(200), x, 100000, 9);
  CHECK(std::abs(stats.mean_sq_dev - 200) <= 0.02 * 200);
  CHECK(mean_within(stats, x, 4));
  CHECK_THROWS_AS(Quantizer::gaussian(-1), ParameterError);
}

TEST_CASE("variance classes") {
  const auto g = variance_class_of(Quantizer::gaussian(200), 20);
  CHECK_FALSE(is_relative(g));
  CHECK(variance_constant(g) == 200);
  const auto v = variance_class_of(Quantizer::vector_lowprec(1), 4);
  CHECK(is_relative(v));
  CHECK(variance_constant(v) == doctest::Approx(2));
  const auto s = variance_class_of(Quantizer::sparsifier(vec({0.5, 0.9, 1.0})), 3);
  CHECK(is_relative(s));
  CHECK(variance_constant(s) == doctest::Approx(1));
  const auto sc = variance_class_of(Quantizer::scalar_lowprec(0.5, 8), 4);
  CHECK_FALSE(is_relative(sc));
  CHECK(variance_constant(sc) == doctest::Approx(4 * 0.25 / 4));
}

TEST_CASE("unbiasedness and variance bounds on random inputs") {
  Stream gen = Stream::keyed(11, StreamDomain::test, {99});
  const std::vector<Quantizer> kinds = {
      Quantizer::scalar_lowprec(0.25, 10),
      Quantizer::vector_lowprec(2),
      Quantizer::sparsifier(vec({0.3, 0.6, 0.9, 0.5, 1.0})),
      Quantizer::gaussian(3.0),
  };
  for (const Quantizer& q : kinds) {
    CAPTURE(q.name());
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = random_vector(5, gen, 3.0);
      const auto stats = sample_quantizer(q, x, 20000, 1000 + static_cast<std::uint64_t>(trial));
      CHECK(mean_within(stats, x, 4.5));
      CHECK(stats.mean_sq_dev <= 1.05 * declared_bound(q, x));
    }
  }
}

TEST_CASE("draws are deterministic per stream key") {
  const Vector x = vec({0.4, -2.0, 1.1});
  for (const Quantizer& q : {Quantizer::vector_lowprec(3), Quantizer::gaussian(1.0),
                             Quantizer::scalar_lowprec(0.5, 6), Quantizer::sparsifier(vec({0.5}))}) {
    Stream a = Stream::keyed(3, StreamDomain::quantize, {0, 1, 2});
    Stream b = Stream::keyed(3, StreamDomain::quantize, {0, 1, 2});
    CHECK(q.apply(x, a) == q.apply(x, b));
  }
}

TEST_CASE("code length reproduces the published column") {
  const std::vector<std::pair<double, double>> table = {
      {1, 216.9}, {50, 949.8}, {77, 1062}, {1e3, 1793}, {1e5, 3122}, {1e10, 6443}, {1e15, 9765}, {1e19, 12420}};
  for (const auto& [s, bits] : table) {
    CAPTURE(s);
    CHECK(std::abs(expected_code_length(s, 200, 64) - bits) <= 0.10 * bits);
  }
}

TEST_CASE("code length is non-decreasing in s") {
  double prev = 0;
  for (double e = 0; e <= 19.0; e += 0.01) {
    const double s = std::pow(10.0, e);
    const double bits = expected_code_length(s, 200, 64);
    CHECK(bits >= prev - 1e-9 * prev);
    prev = bits;
  }
  CHECK_THROWS_AS(expected_code_length(0.5, 200, 64), ParameterError);
}

TEST_CASE("log star conventions") {
  CHECK(log_star(8.0) == doctest::Approx(3));
  CHECK(log_star(16.0, LogStar::iterated_log2) == doctest::Approx(4 + 2 + 1));
  CHECK(log_star(std::exp(std::exp(1.0)), LogStar::iterated_natural) == doctest::Approx(std::exp(1.0) + 1));
  CHECK(log_star(0.5, LogStar::iterated_natural) == 0);
}

TEST_CASE("communication accounting") {
  CHECK(Quantizer::gaussian(2).code_length_bits(20, 64) == 20 * 64);
  CHECK(Quantizer::scalar_lowprec(1, 8).code_length_bits(20, 64) == 160);
  // 10 coordinates, each kept w.p. .5, 64 value bits plus 4 index bits.
  CHECK(Quantizer::sparsifier(vec({0.5})).code_length_bits(10, 64) == doctest::Approx(5 * 68));
  CHECK(Quantizer::vector_lowprec(1).code_length_bits(200, 64) == expected_code_length(1, 200, 64));
  CHECK(Quantizer::exact().is_exact());
  CHECK_FALSE(Quantizer::gaussian(1).is_exact());
}
