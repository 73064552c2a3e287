#include <doctest.h>

#include <cmath>
#include <set>

#include "qdgd/errors.hpp"
#include "qdgd/graph.hpp"

using namespace qdgd;

namespace {

std::set<std::pair<int, int>> edge_set(const AdjacencyGraph& g) {
  std::set<std::pair<int, int>> out;
  for (const Edge& e : g.edges()) out.insert({e.u, e.v});
  return out;
}

}  // namespace

TEST_CASE("erdos renyi endpoints") {
  const auto two = generate_erdos_renyi(2, 1.0, 7);
  CHECK(edge_set(two) == std::set<std::pair<int, int>>{{0, 1}});
  const auto k5 = generate_erdos_renyi(5, 1.0, 99);
  CHECK(k5.edges().size() == 10);
}

TEST_CASE("erdos renyi is deterministic per seed") {
  const auto a = generate_erdos_renyi(50, 0.35, 1234);
  const auto b = generate_erdos_renyi(50, 0.35, 1234);
  CHECK(a == b);
  const auto c = generate_erdos_renyi(50, 0.35, 1235);
  CHECK_FALSE(a == c);
  const Network na = make_network(a);
  const Network nb = make_network(b);
  CHECK(na.mixing.weights() == nb.mixing.weights());
  CHECK(na.spectrum.beta == nb.spectrum.beta);
}

TEST_CASE("erdos renyi edge frequency matches the edge probability") {
  // Pooled over many draws, the fraction of present pairs should be close to
  // p_c (connectivity conditioning barely matters at this density).
  double present = 0;
  double pairs = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = generate_erdos_renyi(30, 0.4, seed);
    present += static_cast<double>(g.edges().size());
    pairs += 30.0 * 29.0 / 2.0;
  }
  const double frac = present / pairs;
  const double se = std::sqrt(0.4 * 0.6 / pairs);
  CHECK(std::abs(frac - 0.4) < 5 * se);
}

TEST_CASE("erdos renyi rejects bad parameters and exhausted retries") {
  CHECK_THROWS_AS(generate_erdos_renyi(1, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(generate_erdos_renyi(10, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(generate_erdos_renyi(10, 1.5, 1), ParameterError);
  try {
    generate_erdos_renyi(200, 1e-4, 1, 5);
    FAIL("expected a construction error");
  } catch (const ConstructionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("n=200") != std::string::npos);
    CHECK(msg.find("p_c=0.0001") != std::string::npos);
  }
}

TEST_CASE("named topologies") {
  CHECK(edge_set(generate_named(NamedTopology::complete, 3)) ==
        std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(edge_set(generate_named(NamedTopology::cycle, 4)) ==
        std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  CHECK(generate_named(NamedTopology::cycle, 3) == generate_named(NamedTopology::complete, 3));
  CHECK_THROWS_AS(generate_named(NamedTopology::cycle, 2), ConstructionError);
  CHECK_THROWS_AS(generate_named(NamedTopology::complete, 1), ConstructionError);
}

TEST_CASE("graph construction validates edges") {
  CHECK_THROWS_AS(AdjacencyGraph(3, {{0, 0}, {1, 2}}), ConstructionError);
  CHECK_THROWS_AS(AdjacencyGraph(3, {{0, 3}}), ConstructionError);
  CHECK_THROWS_AS(AdjacencyGraph(4, {{0, 1}, {2, 3}}), ConstructionError);
  const AdjacencyGraph g(3, {{1, 0}, {2, 1}, {0, 1}});
  CHECK(g.edges().size() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("edge list round trip") {
  const auto g = generate_erdos_renyi(12, 0.5, 3);
  CHECK(parse_edge_list(to_edge_list(g)) == g);
  CHECK(to_edge_list(generate_named(NamedTopology::cycle, 3)) == "3\n0 1\n0 2\n1 2\n");
  CHECK_THROWS_AS(parse_edge_list("3\n0 1\n1"), DataError);
  CHECK_THROWS_AS(parse_edge_list("3\n0 x\n"), DataError);
}

TEST_CASE("mixing matrix of the triangle") {
  // λ_max(L) = 3, so W = I - (2/9) L.
  const auto w = mixing_matrix(generate_named(NamedTopology::complete, 3));
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) CHECK(w.weights()(i, j) == doctest::Approx(i == j ? 5.0 / 9 : 2.0 / 9).epsilon(1e-14));
  }
  const auto r = spectral_report(w);
  CHECK(r.beta == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(r.lambda_min == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(r.gap == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("mixing matrix of the 4-cycle") {
  // L has eigenvalues {0, 2, 2, 4}; W = I - L/6.
  const auto w = mixing_matrix(generate_named(NamedTopology::cycle, 4));
  CHECK(w.weights()(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(w.weights()(0, 1) == doctest::Approx(1.0 / 6));
  CHECK(w.weights()(0, 3) == doctest::Approx(1.0 / 6));
  CHECK(w.weights()(0, 2) == 0.0);
  const auto r = spectral_report(w);
  CHECK(r.lambda_min == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(r.beta == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(r.eigenvalues(0) == doctest::Approx(1.0));
  // W - W_D is (1/6) times the cycle adjacency, whose largest eigenvalue is 2.
  CHECK(r.offdiag_norm == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("identity weights violate the rank condition") {
  try {
    spectral_report(MixingMatrix::from_weights(Matrix::Identity(4, 4)));
    FAIL("expected a contract error");
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()).find("rank(I - W) = 0") != std::string::npos);
  }
}

TEST_CASE("invariant checker names the failed condition") {
  Matrix asym(2, 2);
  asym << 0.5, 0.5, 0.4, 0.6;
  CHECK_THROWS_WITH_AS(check_mixing_invariants(asym), doctest::Contains("symmetric"), ContractError);
  Matrix rows(2, 2);
  rows << 0.5, 0.4, 0.4, 0.5;
  CHECK_THROWS_WITH_AS(check_mixing_invariants(rows), doctest::Contains("sum to 1"), ContractError);
  Matrix neg(2, 2);
  neg << 1.5, -0.5, -0.5, 1.5;
  CHECK_THROWS_WITH_AS(check_mixing_invariants(neg), doctest::Contains("[0, 1]"), ContractError);
  Matrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;  // eigenvalue -1
  CHECK_THROWS_WITH_AS(check_mixing_invariants(swap), doctest::Contains("(-1, 1]"), ContractError);
}

TEST_CASE("generated networks satisfy every mixing invariant") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int n = 5 + static_cast<int>(seed % 20);
    const double pc = 0.2 + 0.03 * static_cast<double>(seed % 10);
    const Network net = make_network(generate_erdos_renyi(n, pc, seed));
    const Matrix& w = net.mixing.weights();
    CHECK_NOTHROW(check_mixing_invariants(w, 1e-12));
    CHECK((w * Vector::Ones(n) - Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(net.spectrum.beta < 1.0);
    CHECK(net.spectrum.beta >= 0.0);
    CHECK(net.spectrum.gap > 0.0);
    CHECK(net.spectrum.lambda_min >= 1.0 / 3 - 1e-12);
    for (int i = 0; i < n; ++i) {
      CHECK(net.mixing.degree(i) == net.graph.degree(i));
      for (int j = 0; j < n; ++j) {
        if (i != j) CHECK((w(i, j) != 0.0) == net.graph.has_edge(i, j));
      }
    }
  }
}

TEST_CASE("single-node weights report zero beta") {
  Matrix one(1, 1);
  one << 1.0;
  const auto r = spectral_report(MixingMatrix::from_weights(one));
  CHECK(r.beta == 0.0);
  CHECK(r.lambda_min == 1.0);
}
