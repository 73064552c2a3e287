#include "qdgd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdgd/errors.hpp"
#include "qdgd/random.hpp"

namespace qdgd {

namespace {

std::vector<Edge> normalize_edges(int n, std::vector<Edge> edges) {
  for (Edge& e : edges) {
    if (e.u == e.v) {
      throw ConstructionError("self-loop at node " + std::to_string(e.u));
    }
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw ConstructionError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") out of range for n=" + std::to_string(n));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

bool is_connected(int n, const std::vector<Edge>& edges) {
  if (n <= 1) return true;
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  int components = n;
  for (const Edge& e : edges) {
    int a = find(e.u);
    int b = find(e.v);
    if (a != b) {
      parent[static_cast<size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

AdjacencyGraph::AdjacencyGraph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 2) throw ConstructionError("graph needs n >= 2 nodes, got " + std::to_string(n));
  edges_ = normalize_edges(n, std::move(edges));
  if (!is_connected(n, edges_)) {
    throw ConstructionError("graph on " + std::to_string(n) + " nodes is disconnected");
  }
  adjacency_.resize(static_cast<size_t>(n));
  for (const Edge& e : edges_) {
    adjacency_[static_cast<size_t>(e.u)].push_back(e.v);
    adjacency_[static_cast<size_t>(e.v)].push_back(e.u);
  }
  for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

bool AdjacencyGraph::has_edge(int i, int j) const {
  const auto& row = neighbors(i);
  return std::binary_search(row.begin(), row.end(), j);
}

Matrix AdjacencyGraph::laplacian() const {
  Matrix lap = Matrix::Zero(n_, n_);
  for (const Edge& e : edges_) {
    lap(e.u, e.v) -= 1.0;
    lap(e.v, e.u) -= 1.0;
    lap(e.u, e.u) += 1.0;
    lap(e.v, e.v) += 1.0;
  }
  return lap;
}

AdjacencyGraph generate_erdos_renyi(int n, double edge_prob, std::uint64_t seed,
                                    int max_attempts) {
  if (n < 2) throw ParameterError("erdos_renyi: n must be >= 2, got " + std::to_string(n));
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    throw ParameterError("erdos_renyi: edge probability must lie in (0, 1], got " +
                         std::to_string(edge_prob));
  }
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Stream rng = Stream::keyed(seed, StreamDomain::graph, {static_cast<std::uint64_t>(attempt)});
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        // Always consume one draw per candidate pair so the edge set is a
        // pure function of (seed, attempt).
        const double draw = rng.uniform();
        if (draw < edge_prob) edges.push_back({u, v});
      }
    }
    if (is_connected(n, edges)) return AdjacencyGraph(n, std::move(edges));
  }
  std::ostringstream msg;
  msg << "erdos_renyi: no connected draw in " << max_attempts << " attempts (n=" << n
      << ", p_c=" << edge_prob << ")";
  throw ConstructionError(msg.str());
}

AdjacencyGraph generate_named(NamedTopology kind, int n) {
  std::vector<Edge> edges;
  switch (kind) {
    case NamedTopology::complete:
      if (n < 2) throw ConstructionError("complete graph needs n >= 2");
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
      break;
    case NamedTopology::cycle:
      if (n < 3) throw ConstructionError("cycle graph needs n >= 3");
      for (int u = 0; u < n; ++u) edges.push_back({u, (u + 1) % n});
      break;
  }
  return AdjacencyGraph(n, std::move(edges));
}

std::string to_edge_list(const AdjacencyGraph& graph) {
  std::ostringstream out;
  out << graph.size() << '\n';
  for (const Edge& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
  return out.str();
}

AdjacencyGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  int n = 0;
  if (!(in >> n)) throw DataError("edge list: missing node count");
  std::vector<Edge> edges;
  int u = 0;
  int v = 0;
  while (in >> u) {
    if (!(in >> v)) throw DataError("edge list: dangling endpoint after " + std::to_string(u));
    edges.push_back({u, v});
  }
  if (!in.eof()) throw DataError("edge list: non-numeric token");
  return AdjacencyGraph(n, std::move(edges));
}

MixingMatrix MixingMatrix::from_weights(Matrix weights) {
  if (weights.rows() != weights.cols() || weights.rows() == 0) {
    throw ParameterError("mixing matrix must be square and non-empty");
  }
  MixingMatrix m;
  m.diag_ = weights.diagonal();
  m.offdiag_ = weights;
  m.offdiag_.diagonal().setZero();
  m.w_ = std::move(weights);
  return m;
}

int MixingMatrix::degree(Index i) const {
  return static_cast<int>((offdiag_.row(i).array() != 0.0).count());
}

MixingMatrix mixing_matrix(const AdjacencyGraph& graph) {
  const Matrix lap = graph.laplacian();
  Eigen::SelfAdjointEigenSolver<Matrix> es(lap, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("mixing_matrix: Laplacian eigensolver failed");
  const double lambda_max = es.eigenvalues().maxCoeff();
  Matrix w = Matrix::Identity(graph.size(), graph.size()) - (2.0 / (3.0 * lambda_max)) * lap;
  check_mixing_invariants(w);
  return MixingMatrix::from_weights(std::move(w));
}

void check_mixing_invariants(const Matrix& w, double tol) {
  const Index n = w.rows();
  if (w.cols() != n) throw ContractError("mixing matrix is not square");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw ContractError("mixing matrix is not symmetric");
  }
  const Vector row_sums = w.rowwise().sum();
  if ((row_sums.array() - 1.0).abs().maxCoeff() > tol) {
    throw ContractError("mixing matrix rows do not sum to 1");
  }
  if (w.minCoeff() < -tol || w.maxCoeff() > 1.0 + tol) {
    throw ContractError("mixing matrix has entries outside [0, 1]");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("mixing matrix eigensolver failed");
  const Vector& ev = es.eigenvalues();
  if (ev.maxCoeff() > 1.0 + tol || ev.minCoeff() <= -1.0 + tol) {
    throw ContractError("mixing matrix eigenvalues outside (-1, 1]");
  }
  const double rank_tol = 1e-8 * static_cast<double>(n);
  const Index rank = ((1.0 - ev.array()).abs() > rank_tol).count();
  if (rank != n - 1) {
    throw ContractError("rank(I - W) = " + std::to_string(rank) + " != n - 1 = " +
                        std::to_string(n - 1));
  }
}

SpectralReport spectral_report(const MixingMatrix& w) {
  check_mixing_invariants(w.weights());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w.weights(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("spectral_report: eigensolver failed");
  SpectralReport r;
  r.eigenvalues = es.eigenvalues().reverse();
  const Index n = r.eigenvalues.size();
  r.lambda_min = r.eigenvalues(n - 1);
  r.beta = n > 1 ? std::max(std::abs(r.eigenvalues(1)), std::abs(r.lambda_min)) : 0.0;
  r.gap = 1.0 - r.beta;
  r.offdiag_norm = symmetric_spectral_norm(w.off_diagonal());
  return r;
}

Network make_network(AdjacencyGraph graph) {
  MixingMatrix mixing = mixing_matrix(graph);
  SpectralReport spectrum = spectral_report(mixing);
  return Network{std::move(graph), std::move(mixing), std::move(spectrum)};
}

}  // namespace qdgd
