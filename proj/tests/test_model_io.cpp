#include <fstream>
#include <string>

#include "doctest.h"
#include "ihnn/errors.hpp"
#include "ihnn/model_io.hpp"
#include "ihnn/training.hpp"
#include "oracles.hpp"

TEST_SUITE_BEGIN("model_io");

namespace {

ihnn::ModelFile sample_model() {
  ihnn::ModelFile model;
  model.params = ihnn::init_params(5, 4, 3, 0.37, 99);
  model.params.c = {0.125, -0.5, 1.0 / 3.0, 2e-17};
  model.params.phi_b = -0.0625;
  model.config.epochs = 12;
  model.config.learning_rate = 0.0125;
  model.config.momentum = 0.5;
  model.config.gamma = 0.25;
  model.config.kappa = 0.9;
  model.config.forward = {1e-7, 250};
  model.config.backward = {1e-9, 350};
  model.config.batch_size = 64;
  model.config.seed = 4242;
  model.config.activation = ihnn::Activation::sigmoid;
  model.config.embed_dim = 4;
  model.config.val_fraction = 0.2;
  model.config.train_ratio = 0.4;
  model.opnorm_a = 0.987654321;
  model.dataset_name = "toy";
  return model;
}

}  // namespace

TEST_CASE("save and load round-trip bitwise") {
  oracles::TempDir dir("model");
  const std::string path = (dir.path() / "model.json").string();
  const ihnn::ModelFile model = sample_model();
  ihnn::save_model(model, path);
  const ihnn::ModelFile back = ihnn::load_model(path);

  CHECK(back.params.w.values == model.params.w.values);
  CHECK(back.params.u.values == model.params.u.values);
  CHECK(back.params.c == model.params.c);
  CHECK(back.params.theta_w.values == model.params.theta_w.values);
  CHECK(back.params.theta_b == model.params.theta_b);
  CHECK(back.params.phi_w == model.params.phi_w);
  CHECK(back.params.phi_b == model.params.phi_b);
  CHECK(back.opnorm_a == model.opnorm_a);
  CHECK(back.dataset_name == model.dataset_name);

  CHECK(back.config.epochs == model.config.epochs);
  CHECK(back.config.learning_rate == model.config.learning_rate);
  CHECK(back.config.momentum == model.config.momentum);
  CHECK(back.config.gamma == model.config.gamma);
  CHECK(back.config.kappa == model.config.kappa);
  CHECK(back.config.forward.tol == model.config.forward.tol);
  CHECK(back.config.forward.max_iter == model.config.forward.max_iter);
  CHECK(back.config.backward.tol == model.config.backward.tol);
  CHECK(back.config.backward.max_iter == model.config.backward.max_iter);
  CHECK(back.config.batch_size == model.config.batch_size);
  CHECK(back.config.seed == model.config.seed);
  CHECK(back.config.activation == model.config.activation);
  CHECK(back.config.embed_dim == model.config.embed_dim);
  CHECK(back.config.val_fraction == model.config.val_fraction);
  CHECK(back.config.train_ratio == model.config.train_ratio);
}

TEST_CASE("load rejects missing files and foreign formats") {
  oracles::TempDir dir("badmodel");
  CHECK_THROWS_AS(ihnn::load_model((dir.path() / "absent.json").string()),
                  ihnn::ValidationError);

  const std::string wrong = (dir.path() / "wrong.json").string();
  {
    std::ofstream out(wrong);
    out << "{\"format\": \"something-else\", \"version\": 1}\n";
  }
  CHECK_THROWS_AS(ihnn::load_model(wrong), ihnn::ValidationError);

  const std::string garbage = (dir.path() / "garbage.json").string();
  {
    std::ofstream out(garbage);
    out << "not json at all\n";
  }
  CHECK_THROWS_AS(ihnn::load_model(garbage), ihnn::ValidationError);
}

TEST_CASE("load rejects a file with a missing field") {
  oracles::TempDir dir("partial");
  const std::string path = (dir.path() / "model.json").string();
  ihnn::save_model(sample_model(), path);

  std::ifstream in(path);
  std::string body((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const std::string key = "\"gamma\"";
  const std::size_t at = body.find(key);
  REQUIRE(at != std::string::npos);
  body.replace(at, key.size(), "\"gamoh\"");
  std::ofstream out(path);
  out << body;
  out.close();

  CHECK_THROWS_AS(ihnn::load_model(path), ihnn::ValidationError);
}

TEST_SUITE_END();
