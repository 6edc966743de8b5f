#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "secra/errors.hpp"
#include "secra/nn.hpp"
#include "secra/rng.hpp"

using namespace secra;

namespace {

Mlp tiny_fixture() {
  // 2-2-1 net with printed weights; outputs below are hand-traced.
  Mlp m;
  m.layer_dims = {2, 2, 1};
  Matrix w0(2, 2);
  w0.at(0, 0) = 0.5;
  w0.at(0, 1) = -0.25;
  w0.at(1, 0) = 1.0;
  w0.at(1, 1) = 0.75;
  Matrix w1(1, 2);
  w1.at(0, 0) = 2.0;
  w1.at(0, 1) = -1.0;
  m.weights = {w0, w1};
  m.biases = {{0.1, -0.2}, {0.05}};
  return m;
}

Mlp scalar_net(double w, double b) {
  Mlp m;
  m.layer_dims = {1, 1};
  Matrix w0(1, 1);
  w0.at(0, 0) = w;
  m.weights = {w0};
  m.biases = {{b}};
  return m;
}

Batch random_batch(RandomStream& rng, int dim, int count, double scale) {
  Batch b;
  for (int i = 0; i < count; ++i) {
    std::vector<double> x(dim);
    for (double& v : x) v = scale * (2.0 * rng.uniform() - 1.0);
    b.inputs.push_back(std::move(x));
    b.labels.push_back(scale * (2.0 * rng.uniform() - 1.0));
  }
  return b;
}

// Central finite differences of the full loss; the reference every analytic
// gradient must reproduce.
double fd_weight(Mlp m, const Batch& batch, Regularization reg, double lambda,
                 int layer, std::size_t k, double h) {
  m.weights[layer].data[k] += h;
  const double up = loss(m, batch, reg, lambda);
  m.weights[layer].data[k] -= 2.0 * h;
  const double down = loss(m, batch, reg, lambda);
  return (up - down) / (2.0 * h);
}

double fd_bias(Mlp m, const Batch& batch, Regularization reg, double lambda,
               int layer, std::size_t k, double h) {
  m.biases[layer][k] += h;
  const double up = loss(m, batch, reg, lambda);
  m.biases[layer][k] -= 2.0 * h;
  const double down = loss(m, batch, reg, lambda);
  return (up - down) / (2.0 * h);
}

}  // namespace

TEST_CASE("xavier initialization is deterministic and bounded") {
  const std::vector<int> dims = {8, 100, 100, 1};
  const Mlp a = xavier_init(dims, 7);
  const Mlp b = xavier_init(dims, 7);
  for (int l = 0; l < a.num_layers(); ++l) {
    CHECK(a.weights[l].data == b.weights[l].data);
    for (double bias : a.biases[l]) CHECK(bias == 0.0);
  }
  const double bound = std::sqrt(6.0 / 108.0);
  CHECK(doctest::Approx(bound).epsilon(1e-3) == 0.2357);
  for (double w : a.weights[0].data) CHECK(std::abs(w) <= bound);

  const Mlp c = xavier_init(dims, 8);
  CHECK(a.weights[0].data != c.weights[0].data);
}

TEST_CASE("forward trivial cases") {
  Mlp zeros;
  zeros.layer_dims = {3, 2, 1};
  zeros.weights = {Matrix(2, 3), Matrix(1, 2)};
  zeros.biases = {{0.0, 0.0}, {0.0}};
  const double x[3] = {1.0, -2.0, 0.5};
  CHECK(forward(zeros, x) == 0.0);

  const Mlp id = scalar_net(1.0, 0.0);
  const double three[1] = {3.0};
  CHECK(forward(id, three) == 3.0);
}

TEST_CASE("forward matches the hand-traced fixture") {
  const Mlp m = tiny_fixture();
  const double x1[2] = {0.4, 0.8};
  // z = [0.1, 0.8], both positive, output 2*0.1 - 1*0.8 + 0.05
  CHECK(forward(m, x1) == doctest::Approx(-0.55).epsilon(1e-15));

  const double x2[2] = {-0.4, 0.1};
  // both hidden units go negative and are clipped; only the output bias stays
  CHECK(forward(m, x2) == doctest::Approx(0.05).epsilon(1e-15));

  ForwardCache cache;
  forward(m, x1, &cache);
  CHECK(cache.act[0][0] == 0.4);
  CHECK(cache.pre[0][0] == doctest::Approx(0.1));
  CHECK(cache.act[1][1] == doctest::Approx(0.8));
}

TEST_CASE("forward rejects width mismatch and non-finite nets") {
  const Mlp m = tiny_fixture();
  const double x[3] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(forward(m, x), ValidationError);

  Mlp bad = tiny_fixture();
  bad.weights[0].at(0, 0) = std::numeric_limits<double>::infinity();
  const double x2[2] = {1.0, 1.0};
  CHECK_THROWS_AS(forward(bad, x2), DivergenceError);
}

TEST_CASE("loss values") {
  const Mlp m = scalar_net(2.0, 0.0);
  Batch fit;
  fit.inputs = {{1.0}};
  fit.labels = {2.0};
  CHECK(loss(m, fit, Regularization::none, 0.0) == 0.0);

  Batch off;
  off.inputs = {{1.0}};
  off.labels = {1.0};  // y = 2, squared error 1
  CHECK(loss(m, off, Regularization::none, 0.0) == doctest::Approx(1.0));

  // Ten perfectly fitted samples, lambda = 5e-4: penalty (lambda/2M)*w^2 = 1e-4.
  Batch ten;
  for (int i = 0; i < 10; ++i) {
    ten.inputs.push_back({1.0});
    ten.labels.push_back(2.0);
  }
  CHECK(loss(m, ten, Regularization::l2, 5e-4) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(loss(m, ten, Regularization::l1, 5e-4) ==
        doctest::Approx(5e-4 / 20.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("backprop vanishes at a perfect fit and behind dead units") {
  const Mlp m = scalar_net(2.0, 0.0);
  Batch fit;
  fit.inputs = {{1.0}, {2.0}};
  fit.labels = {2.0, 4.0};
  const GradientSet g = backprop(m, fit);
  CHECK(g.weights[0].data[0] == 0.0);
  CHECK(g.biases[0][0] == 0.0);

  // Hidden unit 1 of the fixture is negative on this input, so gradients of
  // its incoming weights stay zero.
  const Mlp f = tiny_fixture();
  Batch dead;
  dead.inputs = {{-0.4, 0.1}};
  dead.labels = {1.0};
  const GradientSet gd = backprop(f, dead);
  CHECK(gd.weights[0].at(0, 0) == 0.0);
  CHECK(gd.weights[0].at(0, 1) == 0.0);
  CHECK(gd.weights[0].at(1, 0) == 0.0);
  CHECK(gd.biases[0][0] == 0.0);
  // the output layer still learns its bias
  CHECK(gd.biases[1][0] != 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  RandomStream rng(404);
  for (int rep = 0; rep < 10; ++rep) {
    const Mlp m = xavier_init({3, 4, 1}, substream_seed(404, rep));
    Batch batch = random_batch(rng, 3, 5, 1.0);
    for (Regularization reg :
         {Regularization::none, Regularization::l1, Regularization::l2}) {
      const double lambda = reg == Regularization::none ? 0.0 : 0.05;
      const GradientSet g = loss_gradient(m, batch, reg, lambda);
      const double h = 1e-6;
      for (int l = 0; l < m.num_layers(); ++l) {
        for (std::size_t k = 0; k < m.weights[l].data.size(); ++k) {
          if (reg == Regularization::l1 && std::abs(m.weights[l].data[k]) < 1e-8)
            continue;  // subgradient point
          const double fd = fd_weight(m, batch, reg, lambda, l, k, h);
          const double an = g.weights[l].data[k];
          const double denom = std::max({std::abs(fd), std::abs(an), 1e-4});
          CHECK(std::abs(fd - an) / denom <= 1e-5);
        }
        for (std::size_t k = 0; k < m.biases[l].size(); ++k) {
          const double fd = fd_bias(m, batch, reg, lambda, l, k, h);
          const double an = g.biases[l][k];
          const double denom = std::max({std::abs(fd), std::abs(an), 1e-4});
          CHECK(std::abs(fd - an) / denom <= 1e-5);
        }
      }
    }
  }
}

TEST_CASE("one small plain step strictly decreases the loss") {
  RandomStream rng(505);
  for (int rep = 0; rep < 20; ++rep) {
    Mlp m = xavier_init({3, 5, 1}, substream_seed(505, rep));
    const Batch batch = random_batch(rng, 3, 6, 1.0);
    const double before = loss(m, batch, Regularization::none, 0.0);
    const GradientSet g = backprop(m, batch);
    double norm = 0.0;
    for (const Matrix& w : g.weights)
      for (double v : w.data) norm += v * v;
    if (norm == 0.0) continue;
    TrainConfig cfg;
    cfg.learning_rate = 1e-6;
    step_plain(m, g, cfg);
    CHECK(loss(m, batch, Regularization::none, 0.0) < before);
  }
}

TEST_CASE("update rule arithmetic") {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;

  Mlp m = scalar_net(1.0, 0.0);
  GradientSet g;
  g.weights = {Matrix(1, 1)};
  g.biases = {{0.0}};
  g.batch_size = 10;
  g.weights[0].at(0, 0) = 0.5;
  step_plain(m, g, cfg);
  CHECK(m.weights[0].at(0, 0) == doctest::Approx(0.95).epsilon(1e-15));

  // L1 shrinkage with zero gradient: w -= lr*lambda/(2M) * sign(w)
  m = scalar_net(1.0, 0.0);
  g.weights[0].at(0, 0) = 0.0;
  cfg.reg_lambda = 0.02;
  step_l1(m, g, cfg);
  CHECK(m.weights[0].at(0, 0) == doctest::Approx(0.9999).epsilon(1e-15));

  // sign(0) = 0 keeps zero weights untouched
  m = scalar_net(0.0, 0.0);
  step_l1(m, g, cfg);
  CHECK(m.weights[0].at(0, 0) == 0.0);

  // L2 decay factor is exactly 1 - lr*lambda/M
  cfg.learning_rate = 1e-4;
  cfg.reg_lambda = 5e-4;
  m = scalar_net(1.0, 0.0);
  step_l2(m, g, cfg);
  CHECK(m.weights[0].at(0, 0) == 1.0 - 1e-4 * 5e-4 / 10.0);
  CHECK(m.weights[0].at(0, 0) == doctest::Approx(1.0 - 5e-9).epsilon(1e-18));
}

TEST_CASE("lambda = 0 collapses the three step rules bit for bit") {
  RandomStream rng(606);
  const Mlp base = xavier_init({4, 6, 1}, 17);
  Batch batch = random_batch(rng, 4, 5, 1.0);
  const GradientSet g = backprop(base, batch);

  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.reg_lambda = 0.0;
  Mlp a = base;
  Mlp b = base;
  Mlp c = base;
  step_plain(a, g, cfg);
  step_l1(b, g, cfg);
  step_l2(c, g, cfg);
  for (int l = 0; l < base.num_layers(); ++l) {
    CHECK(a.weights[l].data == b.weights[l].data);
    CHECK(a.weights[l].data == c.weights[l].data);
    CHECK(a.biases[l] == b.biases[l]);
    CHECK(a.biases[l] == c.biases[l]);
  }
}

TEST_CASE("l2 step equals a plain step on the penalized gradient") {
  // (1 - lr*lambda/M) w - lr g  ==  w - lr (g + (lambda/M) w)
  const double w = 0.8, grad = 0.3, lr = 0.01, lambda = 0.4;
  const int m_size = 10;
  const double left = (1.0 - lr * lambda / m_size) * w - lr * grad;
  const double right = w - lr * (grad + lambda / m_size * w);
  CHECK(left == doctest::Approx(right).epsilon(1e-16));
}

TEST_CASE("adam first step and zero-gradient behavior") {
  TrainConfig cfg;
  cfg.learning_rate = 0.001;
  cfg.optimizer = OptimizerKind::adam;

  Mlp m = scalar_net(1.0, 0.0);
  AdamState st = AdamState::zeros_like(m);
  GradientSet g;
  g.weights = {Matrix(1, 1)};
  g.biases = {{0.0}};
  g.batch_size = 1;

  // zero gradient from step one: parameters unchanged
  step_adam(m, g, st, cfg);
  CHECK(m.weights[0].at(0, 0) == 1.0);
  CHECK(m.biases[0][0] == 0.0);

  // first nonzero step: update = -lr * g / (|g| + eps') direction
  m = scalar_net(1.0, 0.0);
  st = AdamState::zeros_like(m);
  const double grad = 0.25;
  g.weights[0].at(0, 0) = grad;
  step_adam(m, g, st, cfg);
  const double expected = 1.0 - cfg.learning_rate * grad / (std::sqrt(grad * grad) + cfg.adam_eps);
  CHECK(m.weights[0].at(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adam with a constant gradient approaches fixed-size steps") {
  TrainConfig cfg;
  cfg.learning_rate = 0.001;
  Mlp m = scalar_net(5.0, 0.0);
  AdamState st = AdamState::zeros_like(m);
  GradientSet g;
  g.weights = {Matrix(1, 1)};
  g.biases = {{0.0}};
  g.batch_size = 1;
  g.weights[0].at(0, 0) = 3.7;

  double prev = m.weights[0].at(0, 0);
  for (int i = 0; i < 200; ++i) {
    step_adam(m, g, st, cfg);
    const double cur = m.weights[0].at(0, 0);
    if (i > 50) CHECK(prev - cur == doctest::Approx(cfg.learning_rate).epsilon(0.02));
    prev = cur;
  }
}

TEST_CASE("training learns a linear map") {
  RandomStream rng(707);
  TrainData data;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.uniform();
    data.labels.push_back(2.0 * x[0]);
    data.inputs.push_back(std::move(x));
  }
  TrainData val;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.uniform();
    val.labels.push_back(2.0 * x[0]);
    val.inputs.push_back(std::move(x));
  }

  TrainConfig cfg;
  cfg.layer_dims = {4, 1};  // purely linear
  cfg.learning_rate = 5e-3;
  cfg.reg_lambda = 0.0;
  cfg.batch_size = 10;
  cfg.epochs = 100;  // 10^4 steps
  cfg.seed = 3;
  const TrainResult res = train(data, val, cfg);
  CHECK(res.model.meta->final_train_mse < 1e-6);
  CHECK_FALSE(res.history.empty());
}

TEST_CASE("training is deterministic") {
  RandomStream rng(808);
  TrainData data;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(3);
    for (double& v : x) v = rng.uniform();
    data.labels.push_back(x[0] + 0.5 * x[1]);
    data.inputs.push_back(std::move(x));
  }
  TrainConfig cfg;
  cfg.layer_dims = {3, 8, 1};
  cfg.learning_rate = 1e-3;
  cfg.epochs = 3;
  cfg.seed = 11;
  const TrainResult a = train(data, data, cfg);
  const TrainResult b = train(data, data, cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_mse == b.history[i].train_mse);
    CHECK(a.history[i].val_mse == b.history[i].val_mse);
  }
  for (int l = 0; l < a.model.num_layers(); ++l)
    CHECK(a.model.weights[l].data == b.model.weights[l].data);
}

TEST_CASE("divergence aborts training with a diagnostic") {
  TrainData data;
  RandomStream rng(909);
  for (int i = 0; i < 200; ++i) {
    data.inputs.push_back({rng.uniform() * 10.0});
    data.labels.push_back(1e100);
  }
  TrainConfig cfg;
  cfg.layer_dims = {1, 1};
  cfg.optimizer = OptimizerKind::plain_gd;
  cfg.learning_rate = 1e10;
  cfg.epochs = 2;
  cfg.history_stride = 10;
  CHECK_THROWS_AS(train(data, data, cfg), DivergenceError);
}

TEST_CASE("predicted power is clipped to the feasible range") {
  const double pt = 100.0;
  const double x[1] = {1.0};
  CHECK(predict_power(scalar_net(0.0, -0.3), x, pt) == 0.0);
  CHECK(predict_power(scalar_net(0.0, 1.4 * pt), x, pt) == pt);
  CHECK(predict_power(scalar_net(0.0, 0.5 * pt), x, pt) == 0.5 * pt);
}

TEST_CASE("batched prediction matches the scalar path") {
  const Mlp m = xavier_init({8, 20, 20, 1}, 99);
  RandomStream rng(99);
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < 64; ++i) {
    std::vector<double> x(8);
    for (double& v : x) v = 50.0 * rng.uniform();
    xs.push_back(std::move(x));
  }
  const std::vector<double> batch = predict_power_batch(m, xs, 100.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double one = predict_power(m, xs[i], 100.0);
    CHECK(batch[i] == doctest::Approx(one).epsilon(1e-12));
  }
}

TEST_CASE("standardization statistics ride along with the model") {
  RandomStream rng(111);
  TrainData data;
  for (int i = 0; i < 300; ++i) {
    std::vector<double> x = {1000.0 + rng.uniform(), rng.uniform() * 1e-3};
    data.labels.push_back(x[1] * 50.0);
    data.inputs.push_back(std::move(x));
  }
  TrainConfig cfg;
  cfg.layer_dims = {2, 4, 1};
  cfg.epochs = 2;
  cfg.standardize = true;
  const TrainResult res = train(data, data, cfg);
  REQUIRE(res.model.norm.has_value());
  CHECK(res.model.norm->mean[0] == doctest::Approx(1000.5).epsilon(1e-3));
  // predict_power goes through the stored transform without throwing
  const double p = predict_power(res.model, data.inputs[0], 100.0);
  CHECK(p >= 0.0);
  CHECK(p <= 100.0);
}

TEST_CASE("model files round-trip to full precision") {
  Mlp m = xavier_init({8, 10, 1}, 1234);
  TrainMeta meta;
  meta.config.regularization = Regularization::l2;
  meta.final_train_mse = 0.123456789012345678;
  meta.final_val_mse = 3.14159e-7;
  meta.scenario = ScenarioParams{100.0, 6.0};
  m.meta = meta;
  m.norm = FeatureStats{std::vector<double>(8, 0.25), std::vector<double>(8, 2.0)};

  const auto path = std::filesystem::temp_directory_path() / "secra_model_test.json";
  save_model(m, path);
  const Mlp r = load_model(path);
  std::filesystem::remove(path);

  CHECK(r.layer_dims == m.layer_dims);
  for (int l = 0; l < m.num_layers(); ++l) {
    CHECK(r.weights[l].data == m.weights[l].data);
    CHECK(r.biases[l] == m.biases[l]);
  }
  REQUIRE(r.norm.has_value());
  CHECK(r.norm->mean == m.norm->mean);
  CHECK(r.norm->stddev == m.norm->stddev);
  REQUIRE(r.meta.has_value());
  CHECK(r.meta->final_train_mse == meta.final_train_mse);
  CHECK(r.meta->final_val_mse == meta.final_val_mse);
  CHECK(r.meta->config.regularization == Regularization::l2);
  REQUIRE(r.meta->scenario.has_value());
  CHECK(r.meta->scenario->leakage_cap == 6.0);
}
