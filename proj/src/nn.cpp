#include "secra/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#ifdef SECRA_HAVE_OPENBLAS
#include <cblas.h>
#endif

#include "secra/errors.hpp"
#include "secra/rng.hpp"
#include "secra/serde.hpp"

namespace secra {

using nlohmann::json;

FeatureVector make_features(const ChannelInstance& ch) {
  return {ch.h_s, ch.h_p, ch.h_e, ch.g_s, ch.g_e, ch.eps_s, ch.eps_e, ch.eps_p};
}

std::string to_string(Regularization r) {
  switch (r) {
    case Regularization::none: return "none";
    case Regularization::l1: return "l1";
    case Regularization::l2: return "l2";
  }
  return "none";
}

Regularization regularization_from_string(const std::string& s) {
  if (s == "none") return Regularization::none;
  if (s == "l1" || s == "L1") return Regularization::l1;
  if (s == "l2" || s == "L2") return Regularization::l2;
  throw ValidationError("unknown regularization: " + s);
}

void TrainConfig::validate() const {
  if (layer_dims.size() < 2) throw ValidationError("layer_dims needs at least input and output");
  for (int d : layer_dims)
    if (d < 1) throw ValidationError("layer dimensions must be >= 1");
  if (layer_dims.back() != 1) throw ValidationError("output layer must have one unit");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (reg_lambda < 0.0) throw ValidationError("reg_lambda must be >= 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (history_stride < 1) throw ValidationError("history_stride must be >= 1");
}

void Mlp::validate() const {
  if (layer_dims.size() < 2) throw ValidationError("mlp: missing layers");
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size())
    throw ValidationError("mlp: layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows != layer_dims[l + 1] || weights[l].cols != layer_dims[l])
      throw ValidationError("mlp: weight shape mismatch");
    if (static_cast<int>(biases[l].size()) != layer_dims[l + 1])
      throw ValidationError("mlp: bias shape mismatch");
    for (double w : weights[l].data)
      if (!std::isfinite(w)) throw ValidationError("mlp: non-finite weight");
    for (double b : biases[l])
      if (!std::isfinite(b)) throw ValidationError("mlp: non-finite bias");
  }
}

Mlp xavier_init(const std::vector<int>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) throw ValidationError("layer_dims needs at least input and output");
  for (int d : layer_dims)
    if (d < 1) throw ValidationError("layer dimensions must be >= 1");

  RandomStream rng(seed);
  Mlp m;
  m.layer_dims = layer_dims;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (double& v : w.data) v = rng.uniform_in(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(fan_out, 0.0);
  }
  return m;
}

double forward(const Mlp& m, std::span<const double> x, ForwardCache* cache) {
  const int layers = m.num_layers();
  if (static_cast<int>(x.size()) != m.layer_dims.front())
    throw ValidationError("forward: input width mismatch");

  std::vector<double> act(x.begin(), x.end());
  if (cache) {
    cache->pre.assign(layers, {});
    cache->act.assign(layers + 1, {});
    cache->act[0] = act;
  }

  for (int l = 0; l < layers; ++l) {
    const Matrix& w = m.weights[l];
    std::vector<double> z(w.rows);
    for (int i = 0; i < w.rows; ++i) {
      const double* row = w.data.data() + static_cast<std::size_t>(i) * w.cols;
      double acc = m.biases[l][i];
      for (int j = 0; j < w.cols; ++j) acc += row[j] * act[j];
      if (!std::isfinite(acc)) throw DivergenceError("forward: non-finite activation");
      z[i] = acc;
    }
    if (cache) cache->pre[l] = z;
    if (l + 1 < layers) {
      for (double& v : z) v = std::max(0.0, v);  // ReLU on hidden layers
    }
    act = std::move(z);
    if (cache) cache->act[l + 1] = act;
  }
  return act[0];
}

double loss(const Mlp& m, const Batch& batch, Regularization reg, double reg_lambda) {
  if (batch.size() == 0) throw ValidationError("loss: empty batch");
  const double inv_m = 1.0 / static_cast<double>(batch.size());

  double mse = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = forward(m, batch.inputs[i]) - batch.labels[i];
    mse += err * err;
  }
  mse *= inv_m;

  double penalty = 0.0;
  if (reg == Regularization::l1) {
    double sum = 0.0;
    for (const Matrix& w : m.weights)
      for (double v : w.data) sum += std::abs(v);
    penalty = reg_lambda * 0.5 * inv_m * sum;
  } else if (reg == Regularization::l2) {
    double sum = 0.0;
    for (const Matrix& w : m.weights)
      for (double v : w.data) sum += v * v;
    penalty = reg_lambda * 0.5 * inv_m * sum;
  }
  return mse + penalty;
}

namespace {

GradientSet zero_gradients(const Mlp& m) {
  GradientSet g;
  for (const Matrix& w : m.weights) {
    g.weights.emplace_back(w.rows, w.cols);
    g.biases.emplace_back(w.rows, 0.0);
  }
  return g;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

GradientSet backprop(const Mlp& m, const Batch& batch) {
  if (batch.size() == 0) throw ValidationError("backprop: empty batch");
  const int layers = m.num_layers();
  GradientSet grads = zero_gradients(m);
  grads.batch_size = static_cast<int>(batch.size());

  ForwardCache cache;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const double y = forward(m, batch.inputs[s], &cache);

    // Output delta of the squared error; the 1/M of the batch loss is applied
    // once at assembly below.
    std::vector<double> delta = {2.0 * (y - batch.labels[s])};
    for (int l = layers - 1; l >= 0; --l) {
      const Matrix& w = m.weights[l];
      Matrix& dw = grads.weights[l];
      for (int i = 0; i < w.rows; ++i) {
        const double d = delta[i];
        grads.biases[l][i] += d;
        double* dst = dw.data.data() + static_cast<std::size_t>(i) * dw.cols;
        const double* a = cache.act[l].data();
        for (int j = 0; j < w.cols; ++j) dst[j] += d * a[j];
      }
      if (l == 0) break;
      std::vector<double> prev(w.cols, 0.0);
      for (int i = 0; i < w.rows; ++i) {
        const double d = delta[i];
        const double* row = w.data.data() + static_cast<std::size_t>(i) * w.cols;
        for (int j = 0; j < w.cols; ++j) prev[j] += row[j] * d;
      }
      // ReLU derivative: pass-through where the pre-activation was positive.
      const std::vector<double>& z = cache.pre[l - 1];
      for (int j = 0; j < w.cols; ++j)
        if (z[j] <= 0.0) prev[j] = 0.0;
      delta = std::move(prev);
    }
  }

  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (int l = 0; l < layers; ++l) {
    for (double& v : grads.weights[l].data) v *= inv_m;
    for (double& v : grads.biases[l]) v *= inv_m;
  }
  return grads;
}

GradientSet loss_gradient(const Mlp& m, const Batch& batch, Regularization reg,
                          double reg_lambda) {
  GradientSet grads = backprop(m, batch);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  if (reg == Regularization::l1) {
    const double c = reg_lambda * 0.5 * inv_m;
    for (int l = 0; l < m.num_layers(); ++l)
      for (std::size_t k = 0; k < grads.weights[l].data.size(); ++k)
        grads.weights[l].data[k] += c * sign_of(m.weights[l].data[k]);
  } else if (reg == Regularization::l2) {
    const double c = reg_lambda * inv_m;
    for (int l = 0; l < m.num_layers(); ++l)
      for (std::size_t k = 0; k < grads.weights[l].data.size(); ++k)
        grads.weights[l].data[k] += c * m.weights[l].data[k];
  }
  return grads;
}

void step_plain(Mlp& m, const GradientSet& grads, const TrainConfig& cfg) {
  const double lr = cfg.learning_rate;
  for (int l = 0; l < m.num_layers(); ++l) {
    for (std::size_t k = 0; k < m.weights[l].data.size(); ++k)
      m.weights[l].data[k] -= lr * grads.weights[l].data[k];
    for (std::size_t k = 0; k < m.biases[l].size(); ++k)
      m.biases[l][k] -= lr * grads.biases[l][k];
  }
}

void step_l1(Mlp& m, const GradientSet& grads, const TrainConfig& cfg) {
  const double lr = cfg.learning_rate;
  const double shrink = lr * cfg.reg_lambda / (2.0 * grads.batch_size);
  for (int l = 0; l < m.num_layers(); ++l) {
    for (std::size_t k = 0; k < m.weights[l].data.size(); ++k) {
      double& w = m.weights[l].data[k];
      w = w - lr * grads.weights[l].data[k] - shrink * sign_of(w);
    }
    for (std::size_t k = 0; k < m.biases[l].size(); ++k)
      m.biases[l][k] -= lr * grads.biases[l][k];
  }
}

void step_l2(Mlp& m, const GradientSet& grads, const TrainConfig& cfg) {
  const double lr = cfg.learning_rate;
  const double decay = 1.0 - lr * cfg.reg_lambda / grads.batch_size;
  for (int l = 0; l < m.num_layers(); ++l) {
    for (std::size_t k = 0; k < m.weights[l].data.size(); ++k) {
      double& w = m.weights[l].data[k];
      w = decay * w - lr * grads.weights[l].data[k];
    }
    for (std::size_t k = 0; k < m.biases[l].size(); ++k)
      m.biases[l][k] -= lr * grads.biases[l][k];
  }
}

AdamState AdamState::zeros_like(const Mlp& m) {
  AdamState s;
  for (const Matrix& w : m.weights) {
    s.m_w.emplace_back(w.rows, w.cols);
    s.v_w.emplace_back(w.rows, w.cols);
    s.m_b.emplace_back(w.rows, 0.0);
    s.v_b.emplace_back(w.rows, 0.0);
  }
  return s;
}

void step_adam(Mlp& m, const GradientSet& grads, AdamState& state,
               const TrainConfig& cfg) {
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  state.step += 1;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double inv_m = 1.0 / static_cast<double>(grads.batch_size);

  auto update = [&](double& param, double grad, double& mom, double& vel) {
    mom = b1 * mom + (1.0 - b1) * grad;
    vel = b2 * vel + (1.0 - b2) * grad * grad;
    const double m_hat = mom / corr1;
    const double v_hat = vel / corr2;
    param -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  };

  for (int l = 0; l < m.num_layers(); ++l) {
    for (std::size_t k = 0; k < m.weights[l].data.size(); ++k) {
      double g = grads.weights[l].data[k];
      if (cfg.regularization == Regularization::l2) {
        g += cfg.reg_lambda * inv_m * m.weights[l].data[k];
      } else if (cfg.regularization == Regularization::l1) {
        g += cfg.reg_lambda * 0.5 * inv_m * sign_of(m.weights[l].data[k]);
      }
      update(m.weights[l].data[k], g, state.m_w[l].data[k], state.v_w[l].data[k]);
    }
    for (std::size_t k = 0; k < m.biases[l].size(); ++k)
      update(m.biases[l][k], grads.biases[l][k], state.m_b[l][k], state.v_b[l][k]);
  }
}

namespace {

std::vector<double> standardized(const FeatureStats& stats,
                                 std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = (x[i] - stats.mean[i]) / stats.stddev[i];
  return out;
}

FeatureStats compute_stats(const std::vector<std::vector<double>>& inputs) {
  const std::size_t dim = inputs.front().size();
  FeatureStats s;
  s.mean.assign(dim, 0.0);
  s.stddev.assign(dim, 0.0);
  for (const auto& x : inputs)
    for (std::size_t i = 0; i < dim; ++i) s.mean[i] += x[i];
  for (double& v : s.mean) v /= static_cast<double>(inputs.size());
  for (const auto& x : inputs)
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = x[i] - s.mean[i];
      s.stddev[i] += d * d;
    }
  for (double& v : s.stddev) {
    v = std::sqrt(v / static_cast<double>(inputs.size()));
    if (v < 1e-12) v = 1.0;  // constant feature: leave it centered only
  }
  return s;
}

}  // namespace

TrainResult train(const TrainData& train_set, const TrainData& val_set,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0) throw ValidationError("train: empty training set");
  if (train_set.inputs.size() != train_set.labels.size() ||
      val_set.inputs.size() != val_set.labels.size())
    throw ValidationError("train: inputs/labels size mismatch");
  if (static_cast<int>(train_set.inputs.front().size()) != cfg.layer_dims.front())
    throw ValidationError("train: feature width does not match layer_dims");

  TrainResult result;
  result.model = xavier_init(cfg.layer_dims, cfg.seed);
  Mlp& model = result.model;

  // Standardization statistics come from the training split only and are
  // stored with the model so inference applies the same transform.
  std::vector<std::vector<double>> train_x = train_set.inputs;
  std::vector<std::vector<double>> val_x = val_set.inputs;
  if (cfg.standardize) {
    model.norm = compute_stats(train_x);
    for (auto& x : train_x) x = standardized(*model.norm, x);
    for (auto& x : val_x) x = standardized(*model.norm, x);
  }

  // Deterministic subsample of the validation set for history points; the
  // full set is scored once at the end.
  std::vector<std::size_t> val_idx;
  if (!val_x.empty()) {
    std::size_t n_val = val_x.size();
    std::size_t n_eval = cfg.val_eval_cap > 0
                             ? std::min<std::size_t>(n_val, cfg.val_eval_cap)
                             : n_val;
    val_idx.reserve(n_eval);
    for (std::size_t i = 0; i < n_eval; ++i) val_idx.push_back(i * n_val / n_eval);
  }

  auto mse_on = [&](const std::vector<std::vector<double>>& xs,
                    const std::vector<double>& ys,
                    const std::vector<std::size_t>* subset) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    std::size_t n = subset ? subset->size() : xs.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = subset ? (*subset)[k] : k;
      const double err = forward(model, xs[i]) - ys[i];
      acc += err * err;
    }
    return acc / static_cast<double>(n);
  };

  AdamState adam = AdamState::zeros_like(model);
  RandomStream shuffle_rng(substream_seed(cfg.seed, 0x7261696e));  // shuffle stream

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  Batch batch;
  long long step = 0;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;
  bool stop = false;

  for (int epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    // Fisher-Yates with our own stream; std::shuffle is implementation-defined.
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const std::size_t j = shuffle_rng.below(i + 1);
      std::swap(order[i], order[j]);
    }

    for (std::size_t start = 0; start < order.size() && !stop;
         start += cfg.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.inputs.clear();
      batch.labels.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch.inputs.push_back(train_x[order[k]]);
        batch.labels.push_back(train_set.labels[order[k]]);
      }

      const GradientSet grads = backprop(model, batch);
      switch (cfg.optimizer) {
        case OptimizerKind::adam:
          step_adam(model, grads, adam, cfg);
          break;
        case OptimizerKind::plain_gd:
          switch (cfg.regularization) {
            case Regularization::none: step_plain(model, grads, cfg); break;
            case Regularization::l1: step_l1(model, grads, cfg); break;
            case Regularization::l2: step_l2(model, grads, cfg); break;
          }
          break;
      }
      ++step;

      if (step % cfg.history_stride == 0) {
        HistoryPoint pt;
        pt.step = step;
        pt.train_mse = loss(model, batch, Regularization::none, 0.0);
        pt.val_mse = mse_on(val_x, val_set.labels, &val_idx);
        if (!std::isfinite(pt.train_mse) || !std::isfinite(pt.val_mse))
          throw DivergenceError("train: non-finite loss at step " +
                                std::to_string(step));
        result.history.push_back(pt);

        if (cfg.early_stopping && !val_x.empty()) {
          if (pt.val_mse < best_val) {
            best_val = pt.val_mse;
            stale = 0;
          } else if (++stale >= cfg.patience) {
            stop = true;
          }
        }
      }
    }
  }

  TrainMeta meta;
  meta.config = cfg;
  meta.final_train_mse = mse_on(train_x, train_set.labels, nullptr);
  meta.final_val_mse = mse_on(val_x, val_set.labels, nullptr);
  model.meta = meta;
  return result;
}

double predict_power(const Mlp& m, std::span<const double> x, double max_power) {
  double y;
  if (m.norm) {
    const std::vector<double> z = standardized(*m.norm, x);
    y = forward(m, z);
  } else {
    y = forward(m, x);
  }
  return std::clamp(y, 0.0, max_power);
}

std::vector<double> predict_power_batch(const Mlp& m,
                                        const std::vector<std::vector<double>>& xs,
                                        double max_power) {
  const std::size_t n = xs.size();
  if (n == 0) return {};
  const int in_dim = m.layer_dims.front();

  // Pack the batch once; layers then run as one matrix product each.
  std::vector<double> cur(n * static_cast<std::size_t>(in_dim));
  for (std::size_t r = 0; r < n; ++r) {
    if (static_cast<int>(xs[r].size()) != in_dim)
      throw ValidationError("predict_power_batch: input width mismatch");
    if (m.norm) {
      for (int c = 0; c < in_dim; ++c)
        cur[r * in_dim + c] = (xs[r][c] - m.norm->mean[c]) / m.norm->stddev[c];
    } else {
      std::copy(xs[r].begin(), xs[r].end(), cur.begin() + r * in_dim);
    }
  }

  const int layers = m.num_layers();
  for (int l = 0; l < layers; ++l) {
    const Matrix& w = m.weights[l];
    std::vector<double> next(n * static_cast<std::size_t>(w.rows));
#ifdef SECRA_HAVE_OPENBLAS
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(n),
                w.rows, w.cols, 1.0, cur.data(), w.cols, w.data.data(), w.cols,
                0.0, next.data(), w.rows);
#else
    for (std::size_t r = 0; r < n; ++r) {
      const double* x = cur.data() + r * w.cols;
      double* out = next.data() + r * w.rows;
      for (int i = 0; i < w.rows; ++i) {
        const double* row = w.data.data() + static_cast<std::size_t>(i) * w.cols;
        double acc = 0.0;
        for (int j = 0; j < w.cols; ++j) acc += row[j] * x[j];
        out[i] = acc;
      }
    }
#endif
    const bool hidden = l + 1 < layers;
    for (std::size_t r = 0; r < n; ++r) {
      double* out = next.data() + r * w.rows;
      for (int i = 0; i < w.rows; ++i) {
        out[i] += m.biases[l][i];
        if (hidden && out[i] < 0.0) out[i] = 0.0;
      }
    }
    cur = std::move(next);
  }

  std::vector<double> powers(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!std::isfinite(cur[r])) throw DivergenceError("predict_power_batch: non-finite output");
    powers[r] = std::clamp(cur[r], 0.0, max_power);
  }
  return powers;
}

double mean_squared_error(const Mlp& m, const TrainData& data, std::size_t row_cap) {
  if (data.size() == 0) return 0.0;
  std::size_t n = row_cap > 0 ? std::min(row_cap, data.size()) : data.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> x(data.inputs[i]);
    double y;
    if (m.norm) {
      const std::vector<double> z = standardized(*m.norm, x);
      y = forward(m, z);
    } else {
      y = forward(m, x);
    }
    const double err = y - data.labels[i];
    acc += err * err;
  }
  return acc / static_cast<double>(n);
}

void save_model(const Mlp& m, const std::filesystem::path& path) {
  m.validate();
  json j;
  j["layer_dims"] = m.layer_dims;
  j["activation"] = "relu";
  json weights = json::array();
  json biases = json::array();
  for (int l = 0; l < m.num_layers(); ++l) {
    weights.push_back(m.weights[l].data);  // row-major
    biases.push_back(m.biases[l]);
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  if (m.norm) {
    j["normalization"] = {{"mean", m.norm->mean}, {"stddev", m.norm->stddev}};
  } else {
    j["normalization"] = nullptr;
  }
  if (m.meta) {
    j["train_config"] = m.meta->config;
    j["final_train_mse"] = m.meta->final_train_mse;
    j["final_val_mse"] = m.meta->final_val_mse;
    if (m.meta->scenario) {
      j["scenario"] = *m.meta->scenario;
    } else {
      j["scenario"] = nullptr;
    }
  }

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write model file: " + path.string());
  out << j.dump(1) << "\n";
}

Mlp load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("model file is not valid JSON: " + std::string(e.what()));
  }

  Mlp m;
  j.at("layer_dims").get_to(m.layer_dims);
  const auto& jw = j.at("weights");
  const auto& jb = j.at("biases");
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    Matrix w(m.layer_dims[l + 1], m.layer_dims[l]);
    jw.at(l).get_to(w.data);
    if (static_cast<int>(w.data.size()) != w.rows * w.cols)
      throw ValidationError("model file: weight size mismatch");
    m.weights.push_back(std::move(w));
    std::vector<double> b;
    jb.at(l).get_to(b);
    m.biases.push_back(std::move(b));
  }
  if (j.contains("normalization") && !j.at("normalization").is_null()) {
    FeatureStats s;
    j.at("normalization").at("mean").get_to(s.mean);
    j.at("normalization").at("stddev").get_to(s.stddev);
    m.norm = std::move(s);
  }
  if (j.contains("train_config")) {
    TrainMeta meta;
    j.at("train_config").get_to(meta.config);
    meta.final_train_mse = j.value("final_train_mse", 0.0);
    meta.final_val_mse = j.value("final_val_mse", 0.0);
    if (j.contains("scenario") && !j.at("scenario").is_null()) {
      ScenarioParams sc;
      j.at("scenario").get_to(sc);
      meta.scenario = sc;
    }
    m.meta = std::move(meta);
  }
  m.validate();
  return m;
}

}  // namespace secra
