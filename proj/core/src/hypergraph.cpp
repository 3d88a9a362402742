#include "ihnn/hypergraph.hpp"

#include <algorithm>
#include <string>

#include "ihnn/errors.hpp"

namespace ihnn {

std::size_t Hypergraph::max_edge_size() const {
  std::size_t m = 0;
  for (const auto& e : hyperedges) m = std::max(m, e.size());
  return m;
}

SparseMatrix Hypergraph::incidence() const {
  std::vector<std::tuple<std::size_t, std::size_t, double>> triplets;
  for (std::size_t e = 0; e < hyperedges.size(); ++e)
    for (std::size_t v : hyperedges[e]) triplets.emplace_back(v, e, 1.0);
  return SparseMatrix::from_triplets(node_count, hyperedges.size(), std::move(triplets));
}

Hypergraph build_hypergraph(std::size_t node_count,
                            std::vector<std::vector<std::size_t>> edges) {
  if (node_count == 0) throw ValidationError("build_hypergraph: node_count must be >= 1");

  Hypergraph hg;
  hg.node_count = node_count;
  hg.hyperedges.reserve(edges.size());
  hg.node_degrees.assign(node_count, 0);
  hg.node_to_edges.assign(node_count, {});

  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto& edge = edges[e];
    if (edge.empty())
      throw ValidationError("build_hypergraph: hyperedge " + std::to_string(e) + " is empty");
    std::sort(edge.begin(), edge.end());
    edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
    if (edge.back() >= node_count)
      throw ValidationError("build_hypergraph: hyperedge " + std::to_string(e) +
                            " references node " + std::to_string(edge.back()) +
                            " but node_count is " + std::to_string(node_count));
    for (std::size_t v : edge) {
      ++hg.node_degrees[v];
      hg.node_to_edges[v].push_back(e);
    }
    hg.edge_degrees.push_back(edge.size());
    hg.hyperedges.push_back(std::move(edge));
  }
  return hg;
}

}  // namespace ihnn
