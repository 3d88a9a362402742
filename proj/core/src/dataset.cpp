#include "ihnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ihnn/errors.hpp"
#include "ihnn/rng.hpp"

namespace ihnn {

namespace {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

std::size_t parse_index(const std::string& token, const std::string& path, std::size_t lineno) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(token, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != token.size() || token[0] == '-')
    throw ValidationError(path + ":" + std::to_string(lineno) + ": expected a non-negative id, got '" +
                          token + "'");
  return static_cast<std::size_t>(value);
}

}  // namespace

SplitMasks make_split(std::size_t n, double train_ratio, std::uint64_t seed) {
  if (n == 0) throw ValidationError("make_split: n must be >= 1");
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw ValidationError("make_split: train_ratio must lie in (0, 1)");
  const std::size_t train_count =
      static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n)));
  if (train_count == 0 || train_count == n)
    throw ValidationError("make_split: ratio " + std::to_string(train_ratio) + " with n = " +
                          std::to_string(n) + " leaves an empty side");

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_int(i + 1)]);

  SplitMasks masks;
  masks.train.assign(n, 0);
  masks.test.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    (i < train_count ? masks.train : masks.test)[perm[i]] = 1;
  return masks;
}

Dataset load_dataset(const std::string& dir, const LoadOptions& options) {
  const fs::path base(dir);
  const std::string labels_path = (base / "labels.txt").string();
  const std::string edges_path = (base / "hyperedges.txt").string();
  const std::string features_path = (base / "features.csv").string();

  // labels.txt defines the node set; ids must cover 0..n-1.
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  {
    const auto lines = read_lines(labels_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (blank_or_comment(lines[i])) continue;
      std::istringstream ss(lines[i]);
      std::string node_tok, label_tok, extra;
      ss >> node_tok >> label_tok;
      if (node_tok.empty() || label_tok.empty() || (ss >> extra))
        throw ValidationError(labels_path + ":" + std::to_string(i + 1) +
                              ": expected 'node_id label_id'");
      entries.emplace_back(parse_index(node_tok, labels_path, i + 1),
                           parse_index(label_tok, labels_path, i + 1));
    }
  }
  if (entries.empty()) throw ValidationError(labels_path + ": no labels found");

  const std::size_t n = entries.size();
  Dataset data;
  data.labels.assign(n, 0);
  std::vector<std::uint8_t> seen(n, 0);
  data.class_count = 0;
  for (const auto& [node, label] : entries) {
    if (node >= n)
      throw ValidationError(labels_path + ": node id " + std::to_string(node) +
                            " leaves gaps; ids must cover 0.." + std::to_string(n - 1));
    if (seen[node])
      throw ValidationError(labels_path + ": duplicate label for node " + std::to_string(node));
    seen[node] = 1;
    data.labels[node] = label;
    data.class_count = std::max(data.class_count, label + 1);
  }

  std::vector<std::vector<std::size_t>> edges;
  {
    const auto lines = read_lines(edges_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (blank_or_comment(lines[i])) continue;
      std::istringstream ss(lines[i]);
      std::vector<std::size_t> edge;
      std::string tok;
      while (ss >> tok) {
        const std::size_t v = parse_index(tok, edges_path, i + 1);
        if (v >= n)
          throw ValidationError(edges_path + ":" + std::to_string(i + 1) + ": node " +
                                std::to_string(v) + " has no label");
        edge.push_back(v);
      }
      edges.push_back(std::move(edge));
    }
  }
  data.hypergraph = build_hypergraph(n, std::move(edges));

  if (fs::exists(features_path)) {
    const auto lines = read_lines(features_path);
    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      std::istringstream ss(lines[i]);
      std::string cell;
      std::size_t row_cols = 0;
      while (std::getline(ss, cell, ',')) {
        std::size_t pos = 0;
        double x = 0.0;
        try {
          x = std::stod(cell, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size() || !std::isfinite(x))
          throw ValidationError(features_path + ":" + std::to_string(i + 1) +
                                ": bad value '" + cell + "'");
        values.push_back(x);
        ++row_cols;
      }
      if (rows == 0) cols = row_cols;
      else if (row_cols != cols)
        throw ValidationError(features_path + ":" + std::to_string(i + 1) + ": expected " +
                              std::to_string(cols) + " columns, got " + std::to_string(row_cols));
      ++rows;
    }
    if (rows != n)
      throw ValidationError(features_path + ": " + std::to_string(rows) + " rows for " +
                            std::to_string(n) + " nodes");
    data.features = DenseMatrix(n, cols, std::move(values));
    data.provenance = "loaded from " + dir;
  } else {
    Rng rng = Rng(options.seed).substream(1);
    data.features = DenseMatrix(n, options.feature_dim);
    for (double& x : data.features.values) x = rng.normal();
    data.provenance = "loaded from " + dir + "; features drawn standard normal";
  }

  SplitMasks masks = make_split(n, options.train_ratio, Rng(options.seed).substream(2).state());
  data.train_mask = std::move(masks.train);
  data.test_mask = std::move(masks.test);
  const fs::path name = base.lexically_normal().filename();
  data.name = name.empty() ? dir : name.string();
  return data;
}

void write_dataset(const Dataset& data, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path base(dir);

  auto open = [](const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    return out;
  };

  {
    auto out = open((base / "hyperedges.txt").string());
    for (const auto& edge : data.hypergraph.hyperedges) {
      for (std::size_t i = 0; i < edge.size(); ++i)
        out << (i ? " " : "") << edge[i];
      out << '\n';
    }
  }
  {
    auto out = open((base / "labels.txt").string());
    for (std::size_t v = 0; v < data.labels.size(); ++v)
      out << v << ' ' << data.labels[v] << '\n';
  }
  {
    auto out = open((base / "features.csv").string());
    for (std::size_t v = 0; v < data.features.rows; ++v) {
      const double* row = data.features.row_data(v);
      for (std::size_t j = 0; j < data.features.cols; ++j)
        out << (j ? "," : "") << format_double(row[j]);
      out << '\n';
    }
  }
  {
    nlohmann::json stats;
    stats["nodes"] = data.hypergraph.node_count;
    stats["hyperedges"] = data.hypergraph.edge_count();
    stats["classes"] = data.class_count;
    stats["max_edge_size"] = data.hypergraph.max_edge_size();
    stats["feature_dim"] = data.features.cols;
    auto out = open((base / "stats.json").string());
    out << stats.dump(2) << '\n';
  }
}

void SynthConfig::validate() const {
  if (communities < 2) throw ValidationError("SynthConfig: need at least 2 communities");
  if (nodes < communities) throw ValidationError("SynthConfig: need at least one node per community");
  if (edges == 0) throw ValidationError("SynthConfig: need at least one hyperedge");
  if (!(mean_edge_size >= 2.0))
    throw ValidationError("SynthConfig: mean_edge_size must be >= 2");
  if (mean_edge_size > static_cast<double>(nodes))
    throw ValidationError("SynthConfig: mean_edge_size exceeds node count");
  if (!(impurity >= 0.0 && impurity < 1.0))
    throw ValidationError("SynthConfig: impurity must lie in [0, 1)");
  if (!(informative_fraction > 0.0 && informative_fraction <= 1.0))
    throw ValidationError("SynthConfig: informative_fraction must lie in (0, 1]");
  if (feature_dim < communities)
    throw ValidationError("SynthConfig: feature_dim must be >= community count");
  if (!(noise_scale >= 0.0)) throw ValidationError("SynthConfig: noise_scale must be >= 0");
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw ValidationError("SynthConfig: train_ratio must lie in (0, 1)");
}

Dataset generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng master(cfg.seed);

  // Uniform node communities; re-draw on the off chance a community is empty.
  Rng label_rng = master.substream(1);
  std::vector<std::size_t> labels(cfg.nodes);
  std::vector<std::vector<std::size_t>> members;
  for (int attempt = 0; ; ++attempt) {
    if (attempt == 100)
      throw ValidationError("generate_synthetic: could not populate every community");
    members.assign(cfg.communities, {});
    for (std::size_t v = 0; v < cfg.nodes; ++v) {
      labels[v] = label_rng.uniform_int(cfg.communities);
      members[labels[v]].push_back(v);
    }
    if (std::none_of(members.begin(), members.end(),
                     [](const auto& m) { return m.empty(); }))
      break;
  }

  Rng edge_rng = master.substream(2);
  std::vector<std::vector<std::size_t>> edges(cfg.edges);
  auto contains = [](const std::vector<std::size_t>& xs, std::size_t v) {
    return std::find(xs.begin(), xs.end(), v) != xs.end();
  };
  for (auto& edge : edges) {
    const auto& pool = members[edge_rng.uniform_int(cfg.communities)];
    std::size_t size = 2 + static_cast<std::size_t>(edge_rng.poisson(cfg.mean_edge_size - 2.0));
    size = std::min(size, cfg.nodes);
    while (edge.size() < size) {
      const bool stray = edge_rng.uniform() < cfg.impurity;
      const std::size_t v =
          stray ? edge_rng.uniform_int(cfg.nodes) : pool[edge_rng.uniform_int(pool.size())];
      if (!contains(edge, v)) {
        edge.push_back(v);
      } else if (!stray && edge.size() >= pool.size()) {
        // community exhausted: probe for any unused node so the size floor holds
        std::size_t u = edge_rng.uniform_int(cfg.nodes);
        while (contains(edge, u)) u = (u + 1) % cfg.nodes;
        edge.push_back(u);
      }
    }
  }

  Rng feature_rng = master.substream(3);
  std::vector<std::uint8_t> informative(cfg.nodes, 0);
  for (const auto& community : members) {
    std::vector<std::size_t> shuffled = community;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i)
      std::swap(shuffled[i], shuffled[feature_rng.uniform_int(i + 1)]);
    std::size_t count = static_cast<std::size_t>(
        std::lround(cfg.informative_fraction * static_cast<double>(shuffled.size())));
    count = std::clamp<std::size_t>(count, 1, shuffled.size());
    for (std::size_t i = 0; i < count; ++i) informative[shuffled[i]] = 1;
  }

  Dataset data;
  data.features = DenseMatrix(cfg.nodes, cfg.feature_dim);
  for (std::size_t v = 0; v < cfg.nodes; ++v) {
    double* row = data.features.row_data(v);
    for (std::size_t j = 0; j < cfg.feature_dim; ++j) row[j] = cfg.noise_scale * feature_rng.normal();
    if (informative[v]) row[labels[v]] += 1.0;
  }

  data.hypergraph = build_hypergraph(cfg.nodes, std::move(edges));
  data.labels = std::move(labels);
  data.class_count = cfg.communities;

  SplitMasks masks = make_split(cfg.nodes, cfg.train_ratio, master.substream(4).state());
  data.train_mask = std::move(masks.train);
  data.test_mask = std::move(masks.test);
  data.name = "synthetic";
  data.provenance = "planted partition, seed " + std::to_string(cfg.seed);
  return data;
}

}  // namespace ihnn
