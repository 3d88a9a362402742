#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ihnn/baselines.hpp"
#include "ihnn/dataset.hpp"
#include "ihnn/errors.hpp"
#include "ihnn/model_io.hpp"
#include "ihnn/operators.hpp"
#include "ihnn/training.hpp"

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ihnn::ValidationError("cannot write " + path);
  return out;
}

void write_metrics(const std::string& path, const ihnn::TrainReport& report) {
  auto out = open_out(path);
  out << "epoch,loss_total,loss_cls,loss_memb,train_acc,val_acc,forward_iters,backward_iters\n";
  for (std::size_t i = 0; i < report.epochs.size(); ++i) {
    const ihnn::EpochRecord& rec = report.epochs[i];
    out << (i + 1) << ',' << fmt(rec.loss_total) << ',' << fmt(rec.loss_cls) << ','
        << fmt(rec.loss_memb) << ',' << fmt(rec.train_acc) << ',' << fmt(rec.val_acc) << ','
        << rec.forward_iters << ',' << rec.backward_iters << '\n';
  }
}

// key=value lines mapped onto the subcommand's long options; '#' starts a
// comment, unknown keys abort, values given on the command line win.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw ihnn::ValidationError("cannot open config file " + path);
  auto trim = [](const std::string& s) {
    const char* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ihnn::ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config")
      throw ihnn::ValidationError(path + ":" + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(trim(line.substr(eq + 1)));
    opt->run_callback();
  }
}

struct SynthCli {
  std::string out;
  ihnn::SynthConfig cfg;
};

void add_synth_options(CLI::App* sub, ihnn::SynthConfig& cfg) {
  sub->add_option("--nodes", cfg.nodes, "node count");
  sub->add_option("--communities", cfg.communities, "planted community count");
  sub->add_option("--edges", cfg.edges, "hyperedge count");
  sub->add_option("--mean-edge-size", cfg.mean_edge_size, "mean hyperedge cardinality (>= 2)");
  sub->add_option("--impurity", cfg.impurity, "chance a member is drawn from all nodes");
  sub->add_option("--informative-fraction", cfg.informative_fraction,
                  "share of each community whose features encode the label");
  sub->add_option("--feature-dim", cfg.feature_dim, "feature width");
  sub->add_option("--noise-scale", cfg.noise_scale, "feature noise standard deviation");
  sub->add_option("--train-ratio", cfg.train_ratio, "train split fraction");
}

void run_synth(const SynthCli& cli) {
  const ihnn::Dataset data = ihnn::generate_synthetic(cli.cfg);
  ihnn::write_dataset(data, cli.out);
  std::ifstream stats(cli.out + "/stats.json");
  std::cout << stats.rdbuf();
}

struct TrainCli {
  std::string data_dir;
  std::string model_path = "model.json";
  std::string metrics_path = "metrics.csv";
  std::string activation = "relu";
  std::size_t feature_dim = 64;
  ihnn::TrainConfig cfg;
};

void add_train_options(CLI::App* sub, TrainCli& cli) {
  sub->add_option("--epochs", cli.cfg.epochs, "training epochs");
  sub->add_option("--lr", cli.cfg.learning_rate, "learning rate");
  sub->add_option("--momentum", cli.cfg.momentum, "momentum coefficient in [0, 1)");
  sub->add_option("--gamma", cli.cfg.gamma, "membership loss weight");
  sub->add_option("--kappa", cli.cfg.kappa, "contraction budget in (0, 1)");
  sub->add_option("--forward-tol", cli.cfg.forward.tol, "forward solver tolerance");
  sub->add_option("--forward-max-iter", cli.cfg.forward.max_iter, "forward solver iteration cap");
  sub->add_option("--backward-tol", cli.cfg.backward.tol, "adjoint solver tolerance");
  sub->add_option("--backward-max-iter", cli.cfg.backward.max_iter,
                  "adjoint solver iteration cap");
  sub->add_option("--batch-size", cli.cfg.batch_size, "membership batch size");
  sub->add_option("--seed", cli.cfg.seed, "master seed");
  sub->add_option("--activation", cli.activation, "relu, sigmoid, or identity");
  sub->add_option("--embed-dim", cli.cfg.embed_dim, "equilibrium embedding width");
  sub->add_option("--val-fraction", cli.cfg.val_fraction,
                  "share of training nodes held out for reporting");
  sub->add_option("--train-ratio", cli.cfg.train_ratio, "train split fraction for loaded data");
  sub->add_option("--feature-dim", cli.feature_dim,
                  "random feature width when features.csv is absent");
}

void run_train(TrainCli& cli) {
  cli.cfg.activation = ihnn::parse_activation(cli.activation);
  cli.cfg.validate();

  ihnn::LoadOptions load;
  load.feature_dim = cli.feature_dim;
  load.train_ratio = cli.cfg.train_ratio;
  load.seed = cli.cfg.seed;
  const ihnn::Dataset data = ihnn::load_dataset(cli.data_dir, load);
  std::cout << "dataset " << data.name << ": " << data.hypergraph.node_count << " nodes, "
            << data.hypergraph.edge_count() << " hyperedges, " << data.class_count
            << " classes\n";

  const ihnn::NormalizedOperators ops =
      ihnn::build_block_operator(data.hypergraph, cli.cfg.kappa);
  std::cout << "operator norm " << ops.opnorm_a << ", weight radius " << ops.kappa_radius
            << '\n';

  ihnn::Trainer trainer(data, ops, cli.cfg);
  const ihnn::TrainReport report = trainer.train();
  write_metrics(cli.metrics_path, report);

  ihnn::ModelFile model;
  model.params = trainer.params();
  model.config = cli.cfg;
  model.opnorm_a = ops.opnorm_a;
  model.dataset_name = data.name;
  ihnn::save_model(model, cli.model_path);

  if (!report.epochs.empty()) {
    const ihnn::EpochRecord& last = report.epochs.back();
    std::cout << "epoch " << report.epochs.size() << ": loss " << last.loss_total
              << ", train acc " << last.train_acc << ", val acc " << last.val_acc << '\n';
  }
  std::cout << "wrote " << cli.metrics_path << " and " << cli.model_path << '\n';
}

struct EvalCli {
  std::string data_dir;
  std::string model_path;
  std::string report_path = "report.json";
};

void run_eval(const EvalCli& cli) {
  const ihnn::ModelFile model = ihnn::load_model(cli.model_path);

  ihnn::LoadOptions load;
  load.feature_dim = model.params.input_dim();
  load.train_ratio = model.config.train_ratio;
  load.seed = model.config.seed;
  const ihnn::Dataset data = ihnn::load_dataset(cli.data_dir, load);

  const ihnn::NormalizedOperators ops =
      ihnn::build_block_operator(data.hypergraph, model.config.kappa);
  const ihnn::DenseMatrix logits = ihnn::inference_logits(
      data, ops, model.params, model.config.activation, model.config.forward);

  const double test_acc = ihnn::masked_accuracy(logits, data.labels, data.test_mask);
  const double train_acc = ihnn::masked_accuracy(logits, data.labels, data.train_mask);

  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < data.class_count; ++c) {
    std::size_t count = 0, hits = 0;
    for (std::size_t v = 0; v < logits.rows; ++v) {
      if (!data.test_mask[v] || data.labels[v] != c) continue;
      ++count;
      const double* row = logits.row_data(v);
      std::size_t best = 0;
      for (std::size_t j = 1; j < logits.cols; ++j)
        if (row[j] > row[best]) best = j;
      hits += best == c ? 1 : 0;
    }
    per_class.push_back({{"class", c},
                         {"count", count},
                         {"accuracy", count ? static_cast<double>(hits) / count : 0.0}});
  }

  nlohmann::json report;
  report["model"] = cli.model_path;
  report["dataset"] = data.name;
  report["nodes"] = data.hypergraph.node_count;
  report["hyperedges"] = data.hypergraph.edge_count();
  report["classes"] = data.class_count;
  report["test_accuracy"] = test_acc;
  report["train_accuracy"] = train_acc;
  report["per_class"] = per_class;
  auto out = open_out(cli.report_path);
  out << report.dump(2) << '\n';

  std::cout << "test accuracy " << test_acc << " over "
            << std::count(data.test_mask.begin(), data.test_mask.end(), 1) << " nodes\n";
}

struct GradcheckCli {
  std::string data_dir;
  double threshold = 1e-5;
  double epsilon = 1e-5;
  std::size_t retries = 20;
  std::string activation = "relu";
  std::uint64_t data_seed = 7;
  ihnn::TrainConfig cfg;
};

void run_gradcheck(GradcheckCli& cli) {
  cli.cfg.activation = ihnn::parse_activation(cli.activation);

  ihnn::Dataset data;
  if (cli.data_dir.empty()) {
    ihnn::SynthConfig synth;
    synth.nodes = 12;
    synth.communities = 2;
    synth.edges = 10;
    synth.mean_edge_size = 3.0;
    synth.impurity = 0.0;
    synth.informative_fraction = 1.0;
    synth.feature_dim = 4;
    synth.train_ratio = 0.5;
    synth.seed = cli.data_seed;
    data = ihnn::generate_synthetic(synth);
  } else {
    ihnn::LoadOptions load;
    load.train_ratio = cli.cfg.train_ratio;
    load.seed = cli.cfg.seed;
    data = ihnn::load_dataset(cli.data_dir, load);
  }

  const ihnn::NormalizedOperators ops =
      ihnn::build_block_operator(data.hypergraph, cli.cfg.kappa);

  double worst = 0.0;
  bool done = false;
  const std::uint64_t base_seed = cli.cfg.seed;
  for (std::size_t attempt = 0; attempt < cli.retries && !done; ++attempt) {
    cli.cfg.seed = base_seed + attempt;
    try {
      worst = ihnn::gradient_check(data, ops, cli.cfg, cli.epsilon);
      done = true;
    } catch (const ihnn::NumericalError& err) {
      std::cout << "seed " << cli.cfg.seed << " rejected: " << err.what() << '\n';
    }
  }
  if (!done)
    throw ihnn::NumericalError("gradient check found no kink-free instance in " +
                               std::to_string(cli.retries) + " attempts");

  std::cout << "max relative gradient error " << fmt(worst) << " (threshold "
            << fmt(cli.threshold) << ", seed " << cli.cfg.seed << ")\n";
  if (worst > cli.threshold)
    throw ihnn::NumericalError("gradient check failed: " + fmt(worst) + " > " +
                               fmt(cli.threshold));
}

// The two model families want very different optimizers here: the explicit
// layers train fast and hot, the equilibrium model needs a gentle rate over
// more epochs because every step re-solves the fixed point.
struct OversmoothCli {
  std::string data_dir;
  std::string out = "oversmooth.csv";
  std::size_t runs = 5;
  std::uint64_t train_seed = 1;
  std::size_t epochs = 150;
  double learning_rate = 0.2;
  double momentum = 0.9;
  std::size_t hidden_dim = 16;
  std::size_t ihnn_epochs = 700;
  double ihnn_lr = 0.03;
  std::size_t embed_dim = 16;
  double gamma = 0.1;
  double kappa = 0.95;
  std::size_t batch_size = 128;
  std::string activation = "identity";
  ihnn::SynthConfig synth;
};

void run_oversmooth(OversmoothCli& cli) {
  const ihnn::Activation act = ihnn::parse_activation(cli.activation);
  if (cli.runs == 0) throw ihnn::ValidationError("oversmooth: need at least one run");

  ihnn::Dataset data;
  if (cli.data_dir.empty()) {
    data = ihnn::generate_synthetic(cli.synth);
  } else {
    data = ihnn::load_dataset(cli.data_dir, {64, cli.synth.train_ratio, cli.synth.seed});
  }
  std::cout << "dataset " << data.name << ": " << data.hypergraph.node_count << " nodes, "
            << data.hypergraph.edge_count() << " hyperedges\n";

  const ihnn::NormalizedOperators ops = ihnn::build_block_operator(data.hypergraph, cli.kappa);

  auto out = open_out(cli.out);
  out << "model,depth,seed,accuracy\n";

  std::vector<std::vector<double>> hgnn_acc(7);
  std::vector<double> ihnn_acc;
  for (std::size_t run = 0; run < cli.runs; ++run) {
    const std::uint64_t seed = cli.train_seed + run;
    for (std::size_t depth = 2; depth <= 6; ++depth) {
      double acc = std::nan("");
      try {
        ihnn::BaselineConfig bcfg;
        bcfg.epochs = cli.epochs;
        bcfg.learning_rate = cli.learning_rate;
        bcfg.momentum = cli.momentum;
        bcfg.hidden_dim = cli.hidden_dim;
        bcfg.layers = depth;
        bcfg.seed = seed;
        const ihnn::HgnnModel model = ihnn::train_hgnn(data, bcfg);
        acc = ihnn::evaluate_hgnn(data, model);
        hgnn_acc[depth].push_back(acc);
      } catch (const std::exception& err) {
        std::cout << "hgnn depth " << depth << " seed " << seed << " failed: " << err.what()
                  << '\n';
      }
      out << "hgnn," << depth << ',' << seed << ',' << fmt(acc) << '\n';
    }

    double acc = std::nan("");
    try {
      ihnn::TrainConfig tcfg;
      tcfg.epochs = cli.ihnn_epochs;
      tcfg.learning_rate = cli.ihnn_lr;
      tcfg.momentum = cli.momentum;
      tcfg.gamma = cli.gamma;
      tcfg.kappa = cli.kappa;
      tcfg.batch_size = cli.batch_size;
      tcfg.seed = seed;
      tcfg.activation = act;
      tcfg.embed_dim = cli.embed_dim;
      tcfg.val_fraction = 0.0;
      tcfg.forward = {1e-6, 2000};
      tcfg.backward = {1e-8, 2000};
      ihnn::Trainer trainer(data, ops, tcfg);
      trainer.train();
      const ihnn::DenseMatrix logits =
          ihnn::inference_logits(data, ops, trainer.params(), act, tcfg.forward);
      acc = ihnn::masked_accuracy(logits, data.labels, data.test_mask);
      ihnn_acc.push_back(acc);
    } catch (const std::exception& err) {
      std::cout << "ihnn seed " << seed << " failed: " << err.what() << '\n';
    }
    out << "ihnn,0," << seed << ',' << fmt(acc) << '\n';
  }

  auto mean = [](const std::vector<double>& xs) {
    if (xs.empty()) return std::nan("");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };
  for (std::size_t depth = 2; depth <= 6; ++depth)
    std::cout << "hgnn depth " << depth << " mean accuracy " << mean(hgnn_acc[depth]) << '\n';
  std::cout << "ihnn mean accuracy " << mean(ihnn_acc) << '\n';
  std::cout << "wrote " << cli.out << '\n';
}

struct EmbedCli {
  std::string data_dir;
  std::string model_path;
  std::string nodes_out = "node_embeddings.csv";
  std::string edges_out = "edge_embeddings.csv";
};

void run_embed(const EmbedCli& cli) {
  const ihnn::ModelFile model = ihnn::load_model(cli.model_path);
  ihnn::LoadOptions load;
  load.feature_dim = model.params.input_dim();
  load.train_ratio = model.config.train_ratio;
  load.seed = model.config.seed;
  const ihnn::Dataset data = ihnn::load_dataset(cli.data_dir, load);
  const ihnn::NormalizedOperators ops =
      ihnn::build_block_operator(data.hypergraph, model.config.kappa);
  const ihnn::EmbeddingState state = ihnn::inference_embeddings(
      data, ops, model.params, model.config.activation, model.config.forward);

  const std::size_t n = data.hypergraph.node_count;
  const std::size_t d = state.z.cols;
  auto header = [d](std::ofstream& out, const char* id) {
    out << id;
    for (std::size_t j = 0; j < d; ++j) out << ",z" << j;
    out << '\n';
  };
  {
    auto out = open_out(cli.nodes_out);
    header(out, "node");
    for (std::size_t v = 0; v < n; ++v) {
      out << v;
      for (std::size_t j = 0; j < d; ++j) out << ',' << fmt(state.z(v, j));
      out << '\n';
    }
  }
  {
    auto out = open_out(cli.edges_out);
    header(out, "hyperedge");
    for (std::size_t e = 0; e < data.hypergraph.edge_count(); ++e) {
      out << e;
      for (std::size_t j = 0; j < d; ++j) out << ',' << fmt(state.z(n + e, j));
      out << '\n';
    }
  }
  std::cout << "wrote " << cli.nodes_out << " and " << cli.edges_out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit hypergraph network: equilibrium embeddings, training, baselines"};
  app.require_subcommand(1);

  SynthCli synth_cli;
  auto* synth = app.add_subcommand("synth", "generate a planted-partition hypergraph dataset");
  synth->add_option("--out", synth_cli.out, "output directory")->required();
  synth->add_option("--seed", synth_cli.cfg.seed, "generator seed");
  add_synth_options(synth, synth_cli.cfg);
  std::string synth_config;
  synth->add_option("--config", synth_config, "key=value file; command-line flags override it");
  synth->callback([&] {
    apply_config(synth, synth_config);
    run_synth(synth_cli);
  });

  TrainCli train_cli;
  auto* train = app.add_subcommand("train", "train the equilibrium model");
  train->add_option("--data", train_cli.data_dir, "dataset directory")->required();
  train->add_option("--out-model", train_cli.model_path, "model file to write");
  train->add_option("--metrics", train_cli.metrics_path, "per-epoch metrics CSV to write");
  add_train_options(train, train_cli);
  std::string train_config;
  train->add_option("--config", train_config, "key=value file; command-line flags override it");
  train->callback([&] {
    apply_config(train, train_config);
    run_train(train_cli);
  });

  EvalCli eval_cli;
  auto* eval = app.add_subcommand("eval", "evaluate a trained model on the test split");
  eval->add_option("--data", eval_cli.data_dir, "dataset directory")->required();
  eval->add_option("--model", eval_cli.model_path, "model file")->required();
  eval->add_option("--report", eval_cli.report_path, "JSON report to write");
  std::string eval_config;
  eval->add_option("--config", eval_config, "key=value file; command-line flags override it");
  eval->callback([&] {
    apply_config(eval, eval_config);
    run_eval(eval_cli);
  });

  GradcheckCli grad_cli;
  grad_cli.cfg.embed_dim = 3;
  grad_cli.cfg.batch_size = 16;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "compare implicit gradients with finite differences");
  gradcheck->add_option("--data", grad_cli.data_dir,
                        "dataset directory (default: a small built-in instance)");
  gradcheck->add_option("--threshold", grad_cli.threshold, "failure threshold");
  gradcheck->add_option("--epsilon", grad_cli.epsilon, "finite-difference step");
  gradcheck->add_option("--retries", grad_cli.retries, "re-seed attempts near the ReLU kink");
  gradcheck->add_option("--seed", grad_cli.cfg.seed, "parameter/batch seed");
  gradcheck->add_option("--data-seed", grad_cli.data_seed, "built-in instance seed");
  gradcheck->add_option("--embed-dim", grad_cli.cfg.embed_dim, "embedding width");
  gradcheck->add_option("--batch-size", grad_cli.cfg.batch_size, "membership batch size");
  gradcheck->add_option("--gamma", grad_cli.cfg.gamma, "membership loss weight");
  gradcheck->add_option("--kappa", grad_cli.cfg.kappa, "contraction budget");
  gradcheck->add_option("--activation", grad_cli.activation, "relu, sigmoid, or identity");
  std::string gradcheck_config;
  gradcheck->add_option("--config", gradcheck_config, "key=value file; command-line flags override it");
  gradcheck->callback([&] {
    apply_config(gradcheck, gradcheck_config);
    run_gradcheck(grad_cli);
  });

  OversmoothCli over_cli;
  over_cli.synth.seed = 7;
  auto* oversmooth = app.add_subcommand(
      "oversmooth", "depth sweep: explicit layers 2..6 against the equilibrium model");
  oversmooth->add_option("--data", over_cli.data_dir,
                         "dataset directory (default: long-range synthetic)");
  oversmooth->add_option("--out", over_cli.out, "CSV to write");
  oversmooth->add_option("--runs", over_cli.runs, "seeds per model");
  oversmooth->add_option("--seed", over_cli.train_seed, "base training seed");
  oversmooth->add_option("--epochs", over_cli.epochs, "epochs per explicit-model run");
  oversmooth->add_option("--lr", over_cli.learning_rate, "explicit-model learning rate");
  oversmooth->add_option("--momentum", over_cli.momentum, "momentum coefficient (both models)");
  oversmooth->add_option("--hidden-dim", over_cli.hidden_dim, "explicit baseline width");
  oversmooth->add_option("--ihnn-epochs", over_cli.ihnn_epochs, "epochs per equilibrium run");
  oversmooth->add_option("--ihnn-lr", over_cli.ihnn_lr, "equilibrium-model learning rate");
  oversmooth->add_option("--embed-dim", over_cli.embed_dim, "equilibrium embedding width");
  oversmooth->add_option("--gamma", over_cli.gamma, "membership loss weight");
  oversmooth->add_option("--kappa", over_cli.kappa, "contraction budget");
  oversmooth->add_option("--batch-size", over_cli.batch_size, "membership batch size");
  oversmooth->add_option("--activation", over_cli.activation,
                         "equilibrium activation: relu, sigmoid, or identity");
  oversmooth->add_option("--data-seed", over_cli.synth.seed, "synthetic dataset seed");
  add_synth_options(oversmooth, over_cli.synth);
  std::string oversmooth_config;
  oversmooth->add_option("--config", oversmooth_config, "key=value file; command-line flags override it");
  oversmooth->callback([&] {
    apply_config(oversmooth, oversmooth_config);
    run_oversmooth(over_cli);
  });

  EmbedCli embed_cli;
  auto* embed = app.add_subcommand("embed", "export equilibrium embeddings as CSV");
  embed->add_option("--data", embed_cli.data_dir, "dataset directory")->required();
  embed->add_option("--model", embed_cli.model_path, "model file")->required();
  embed->add_option("--out-nodes", embed_cli.nodes_out, "node embedding CSV");
  embed->add_option("--out-edges", embed_cli.edges_out, "hyperedge embedding CSV");
  std::string embed_config;
  embed->add_option("--config", embed_config, "key=value file; command-line flags override it");
  embed->callback([&] {
    apply_config(embed, embed_config);
    run_embed(embed_cli);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ihnn::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ihnn::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
