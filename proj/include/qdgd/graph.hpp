#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qdgd/linalg.hpp"

namespace qdgd {

struct Edge {
  int u;
  int v;  // u < v

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Connected undirected simple graph on nodes 0..n-1.
///
/// Edges are stored once with u < v, sorted. Construction rejects self-loops,
/// out-of-range endpoints and disconnected edge sets.
class AdjacencyGraph {
 public:
  AdjacencyGraph(int n, std::vector<Edge> edges);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_[static_cast<size_t>(i)]; }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  bool has_edge(int i, int j) const;

  /// Combinatorial Laplacian D - A.
  Matrix laplacian() const;

  friend bool operator==(const AdjacencyGraph& a, const AdjacencyGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

bool is_connected(int n, const std::vector<Edge>& edges);

/// Erdős–Rényi G(n, p_c) conditioned on connectivity. Draw k uses the keyed
/// substream (seed, k); disconnected draws are discarded. Fails after
/// `max_attempts` draws.
AdjacencyGraph generate_erdos_renyi(int n, double edge_prob, std::uint64_t seed,
                                    int max_attempts = 1000);

enum class NamedTopology { complete, cycle };

AdjacencyGraph generate_named(NamedTopology kind, int n);

/// Edge-list text: first line n, then one "u v" pair per line.
std::string to_edge_list(const AdjacencyGraph& graph);
AdjacencyGraph parse_edge_list(std::string_view text);

/// Symmetric doubly stochastic weight matrix together with its diagonal part.
class MixingMatrix {
 public:
  /// Wraps arbitrary weights without validation; `spectral_report` and
  /// `check_mixing_invariants` decide whether they are admissible.
  static MixingMatrix from_weights(Matrix weights);

  const Matrix& weights() const { return w_; }
  const Vector& diagonal() const { return diag_; }
  /// W - W_D.
  const Matrix& off_diagonal() const { return offdiag_; }
  Index size() const { return w_.rows(); }
  /// Number of nonzero off-diagonal weights in row i.
  int degree(Index i) const;

 private:
  Matrix w_;
  Vector diag_;
  Matrix offdiag_;
};

/// W = I - 2/(3 λ_max(L)) L with L the graph Laplacian.
MixingMatrix mixing_matrix(const AdjacencyGraph& graph);

struct SpectralReport {
  Vector eigenvalues;  // descending
  double beta = 0;          // max(|λ_2|, |λ_n|)
  double lambda_min = 0;    // λ_n(W)
  double gap = 0;           // 1 - beta
  double offdiag_norm = 0;  // ||W - W_D||_2
};

/// Throws ContractError naming the first violated condition: symmetry, row
/// sums, entry range, eigenvalue range, rank(I - W) = n - 1.
void check_mixing_invariants(const Matrix& w, double tol = 1e-8);

SpectralReport spectral_report(const MixingMatrix& w);

/// Graph plus its weights and spectral summary.
struct Network {
  AdjacencyGraph graph;
  MixingMatrix mixing;
  SpectralReport spectrum;
};

Network make_network(AdjacencyGraph graph);

}  // namespace qdgd
