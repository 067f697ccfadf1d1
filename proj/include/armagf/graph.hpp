#pragma once

#include <string>
#include <vector>

#include "armagf/chebyshev.hpp"
#include "armagf/common.hpp"

namespace armagf {

/// Undirected weighted graph as an edge list. Demonstration plumbing; dense
/// eigendecomposition caps the node count at 2000.
struct GraphEdge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

struct Graph {
  int num_nodes = 0;
  std::vector<GraphEdge> edges;

  void validate() const {
    if (num_nodes < 0) throw std::invalid_argument("Graph: negative node count");
    if (num_nodes > 2000)
      throw std::invalid_argument("Graph: dense spectral path capped at 2000 nodes");
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes)
        throw std::invalid_argument("Graph: edge index out of range");
      if (e.u == e.v) throw std::invalid_argument("Graph: self-loops not allowed");
      if (!(e.weight > 0.0)) throw std::invalid_argument("Graph: weights must be positive");
    }
  }
};

/// Symmetric normalized Laplacian L = I - D^{-1/2} A D^{-1/2}; its spectrum
/// lies in [0, 2], matching the design domain. Isolated nodes get diagonal 0.
inline Matrix normalized_laplacian(const Graph& graph) {
  graph.validate();
  const int n = graph.num_nodes;
  Matrix adj = Matrix::Zero(n, n);
  for (const auto& e : graph.edges) {
    adj(e.u, e.v) += e.weight;
    adj(e.v, e.u) += e.weight;
  }
  const Vector degree = adj.rowwise().sum();
  Vector inv_sqrt_deg(n);
  for (int i = 0; i < n; ++i)
    inv_sqrt_deg[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
  Matrix lap = -(inv_sqrt_deg.asDiagonal() * adj * inv_sqrt_deg.asDiagonal());
  for (int i = 0; i < n; ++i) lap(i, i) = degree[i] > 0.0 ? 1.0 : 0.0;
  return lap;
}

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending, clamped into [0, 2]
  Matrix eigenvectors;  // orthonormal columns
};

inline SpectralDecomposition spectral_decomposition(const Matrix& laplacian) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian);
  if (eig.info() != Eigen::Success)
    throw Error("spectral_decomposition: eigendecomposition failed");
  SpectralDecomposition dec;
  dec.eigenvalues = eig.eigenvalues();
  dec.eigenvectors = eig.eigenvectors();
  for (Index i = 0; i < dec.eigenvalues.size(); ++i) {
    double& ev = dec.eigenvalues[i];
    if (ev < -1e-8 || ev > 2.0 + 1e-8)
      throw Error("spectral_decomposition: eigenvalue outside [0, 2]; not a normalized Laplacian?");
    ev = std::min(2.0, std::max(0.0, ev));
  }
  return dec;
}

/// Spectral-domain filtering y = U diag(h(lambda_i)) U' x.
inline Vector apply_filter(const ArmaChebFilter& filter, const SpectralDecomposition& dec,
                           const Vector& signal) {
  if (signal.size() != dec.eigenvalues.size())
    throw std::invalid_argument("apply_filter: signal length does not match graph");
  Vector gains(dec.eigenvalues.size());
  for (Index i = 0; i < gains.size(); ++i)
    gains[i] = freq_response(filter, dec.eigenvalues[i]);
  return dec.eigenvectors * (gains.asDiagonal() * (dec.eigenvectors.transpose() * signal));
}

inline Vector apply_filter(const ArmaChebFilter& filter, const Graph& graph,
                           const Vector& signal) {
  return apply_filter(filter, spectral_decomposition(normalized_laplacian(graph)), signal);
}

}  // namespace armagf
