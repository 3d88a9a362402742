#pragma once

#include <cstddef>
#include <vector>

#include "ihnn/sparse.hpp"

namespace ihnn {

// A hypergraph over nodes 0..node_count-1. Hyperedges are stored as sorted,
// duplicate-free node-id lists; duplicate hyperedges are distinct edges.
struct Hypergraph {
  std::size_t node_count = 0;
  std::vector<std::vector<std::size_t>> hyperedges;
  std::vector<std::size_t> node_degrees;  // hyperedges incident to each node
  std::vector<std::size_t> edge_degrees;  // cardinality of each hyperedge
  std::vector<std::vector<std::size_t>> node_to_edges;

  std::size_t edge_count() const { return hyperedges.size(); }
  std::size_t max_edge_size() const;

  // n x E binary incidence matrix.
  SparseMatrix incidence() const;
};

// Validates ids, sorts and deduplicates each edge, and fills the derived
// fields. Empty edges and out-of-range ids are rejected.
Hypergraph build_hypergraph(std::size_t node_count,
                            std::vector<std::vector<std::size_t>> edges);

}  // namespace ihnn
