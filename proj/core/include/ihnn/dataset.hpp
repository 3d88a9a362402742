#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ihnn/dense.hpp"
#include "ihnn/hypergraph.hpp"

namespace ihnn {

struct Dataset {
  Hypergraph hypergraph;
  DenseMatrix features;              // node features, n x d_in
  std::vector<std::size_t> labels;   // class ids 0..C-1, one per node
  std::vector<std::uint8_t> train_mask;
  std::vector<std::uint8_t> test_mask;
  std::size_t class_count = 0;
  std::string name;
  std::string provenance;
};

struct SplitMasks {
  std::vector<std::uint8_t> train;
  std::vector<std::uint8_t> test;
};

// Seeded permutation split: the first floor(ratio * n) permuted nodes train,
// the rest test.
SplitMasks make_split(std::size_t n, double train_ratio, std::uint64_t seed);

struct LoadOptions {
  std::size_t feature_dim = 64;  // used when features.csv is absent
  double train_ratio = 0.3;
  std::uint64_t seed = 1;
};

// Reads hyperedges.txt + labels.txt (+ optional features.csv) from dir.
// Nodes without stored features get seeded standard-normal rows.
Dataset load_dataset(const std::string& dir, const LoadOptions& options = {});

// Writes hyperedges.txt, labels.txt, features.csv, and stats.json into dir.
void write_dataset(const Dataset& data, const std::string& dir);

struct SynthConfig {
  std::size_t nodes = 600;
  std::size_t communities = 3;
  std::size_t edges = 2400;
  double mean_edge_size = 5.0;
  double impurity = 0.05;             // chance a member is drawn from all nodes
  double informative_fraction = 0.1;  // share of nodes whose features encode the label
  std::size_t feature_dim = 8;
  double noise_scale = 0.2;
  double train_ratio = 0.3;
  std::uint64_t seed = 1;

  void validate() const;
};

// Planted-partition hypergraph: labels are uniform communities, each
// hyperedge draws members from one community (contaminated at rate
// `impurity`), and only an `informative_fraction` of each community carries
// its label in the features. Small fractions force label signal to travel
// through hyperedge chains.
Dataset generate_synthetic(const SynthConfig& cfg);

}  // namespace ihnn
