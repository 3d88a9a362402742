#include "ihnn/model_io.hpp"

#include <fstream>

#include "json.hpp"

#include "ihnn/errors.hpp"

namespace ihnn {

namespace {

using nlohmann::json;

json matrix_to_json(const DenseMatrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"values", m.values}};
}

DenseMatrix matrix_from_json(const json& j, const std::string& field) {
  try {
    return DenseMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                       j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ValidationError("model file: bad matrix '" + field + "': " + e.what());
  }
}

}  // namespace

void save_model(const ModelFile& model, const std::string& path) {
  json j;
  j["format"] = "ihnn-model";
  j["version"] = 1;
  j["opnorm_a"] = model.opnorm_a;
  j["dataset"] = model.dataset_name;

  json cfg;
  cfg["epochs"] = model.config.epochs;
  cfg["learning_rate"] = model.config.learning_rate;
  cfg["momentum"] = model.config.momentum;
  cfg["gamma"] = model.config.gamma;
  cfg["kappa"] = model.config.kappa;
  cfg["forward_tol"] = model.config.forward.tol;
  cfg["forward_max_iter"] = model.config.forward.max_iter;
  cfg["backward_tol"] = model.config.backward.tol;
  cfg["backward_max_iter"] = model.config.backward.max_iter;
  cfg["batch_size"] = model.config.batch_size;
  cfg["seed"] = model.config.seed;
  cfg["activation"] = activation_name(model.config.activation);
  cfg["embed_dim"] = model.config.embed_dim;
  cfg["val_fraction"] = model.config.val_fraction;
  cfg["train_ratio"] = model.config.train_ratio;
  j["config"] = cfg;

  json params;
  params["w"] = matrix_to_json(model.params.w);
  params["u"] = matrix_to_json(model.params.u);
  params["c"] = model.params.c;
  params["theta_w"] = matrix_to_json(model.params.theta_w);
  params["theta_b"] = model.params.theta_b;
  params["phi_w"] = model.params.phi_w;
  params["phi_b"] = model.params.phi_b;
  j["params"] = params;

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw ValidationError("failed writing " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": not valid JSON: " + e.what());
  }

  try {
    if (j.at("format").get<std::string>() != "ihnn-model")
      throw ValidationError(path + ": not a model file");
    if (j.at("version").get<int>() != 1)
      throw ValidationError(path + ": unsupported model version");

    ModelFile model;
    model.opnorm_a = j.at("opnorm_a").get<double>();
    model.dataset_name = j.value("dataset", std::string{});

    const json& cfg = j.at("config");
    model.config.epochs = cfg.at("epochs").get<std::size_t>();
    model.config.learning_rate = cfg.at("learning_rate").get<double>();
    model.config.momentum = cfg.at("momentum").get<double>();
    model.config.gamma = cfg.at("gamma").get<double>();
    model.config.kappa = cfg.at("kappa").get<double>();
    model.config.forward.tol = cfg.at("forward_tol").get<double>();
    model.config.forward.max_iter = cfg.at("forward_max_iter").get<std::size_t>();
    model.config.backward.tol = cfg.at("backward_tol").get<double>();
    model.config.backward.max_iter = cfg.at("backward_max_iter").get<std::size_t>();
    model.config.batch_size = cfg.at("batch_size").get<std::size_t>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    model.config.activation = parse_activation(cfg.at("activation").get<std::string>());
    model.config.embed_dim = cfg.at("embed_dim").get<std::size_t>();
    model.config.val_fraction = cfg.at("val_fraction").get<double>();
    model.config.train_ratio = cfg.at("train_ratio").get<double>();

    const json& params = j.at("params");
    model.params.w = matrix_from_json(params.at("w"), "w");
    model.params.u = matrix_from_json(params.at("u"), "u");
    model.params.c = params.at("c").get<std::vector<double>>();
    model.params.theta_w = matrix_from_json(params.at("theta_w"), "theta_w");
    model.params.theta_b = params.at("theta_b").get<std::vector<double>>();
    model.params.phi_w = params.at("phi_w").get<std::vector<double>>();
    model.params.phi_b = params.at("phi_b").get<double>();
    model.params.validate();
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": missing or mistyped field: " + e.what());
  }
}

}  // namespace ihnn
