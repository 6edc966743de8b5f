#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "secra/model.hpp"

namespace secra {

// Input tuple of the learned power mapping, in fixed order.
using FeatureVector = std::array<double, 8>;

FeatureVector make_features(const ChannelInstance& ch);

enum class Regularization { none, l1, l2 };
enum class OptimizerKind { plain_gd, adam };

std::string to_string(Regularization r);
Regularization regularization_from_string(const std::string& s);

struct TrainConfig {
  std::vector<int> layer_dims = {8, 100, 100, 1};
  double learning_rate = 1e-4;
  double reg_lambda = 5e-4;
  int batch_size = 10;
  Regularization regularization = Regularization::none;
  OptimizerKind optimizer = OptimizerKind::adam;
  int epochs = 10;
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool standardize = false;  // z-score inputs with training-set statistics
  int history_stride = 100;  // record train/val MSE every this many steps
  int val_eval_cap = 4096;   // validation rows per history point (0 = all)
  bool early_stopping = false;
  int patience = 5;  // history evaluations without improvement before stopping

  void validate() const;
};

// Row-major matrix; the only shape the network needs.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct TrainMeta {
  TrainConfig config;
  double final_train_mse = 0.0;
  double final_val_mse = 0.0;
  std::optional<ScenarioParams> scenario;  // scenario the labels were solved under
};

// Fully connected network: ReLU on hidden layers, linear output unit. The
// output stays unclamped so training sees the raw regression error; clamping
// to [0, P_t] happens only in predict_power.
struct Mlp {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;              // weights[l]: dims[l+1] x dims[l]
  std::vector<std::vector<double>> biases;  // biases[l]: dims[l+1]
  std::optional<FeatureStats> norm;
  std::optional<TrainMeta> meta;

  int num_layers() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

// Weights ~ U(+-sqrt(6/(fan_in+fan_out))), biases zero. Deterministic per seed.
Mlp xavier_init(const std::vector<int>& layer_dims, std::uint64_t seed);

struct ForwardCache {
  std::vector<std::vector<double>> pre;  // z per layer
  std::vector<std::vector<double>> act;  // a per layer; act[0] is the input
};

// Raw forward value: no clipping, no standardization. Throws DivergenceError
// if an intermediate value is non-finite.
double forward(const Mlp& m, std::span<const double> x, ForwardCache* cache = nullptr);

struct Batch {
  std::vector<std::vector<double>> inputs;
  std::vector<double> labels;
  std::size_t size() const { return labels.size(); }
};

// Mean squared error plus the selected penalty; penalties never touch biases.
double loss(const Mlp& m, const Batch& batch, Regularization reg, double reg_lambda);

struct GradientSet {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  int batch_size = 1;  // the M the 1/M factors and penalty terms refer to
};

// Batch-mean gradients of the plain MSE loss.
GradientSet backprop(const Mlp& m, const Batch& batch);

// backprop plus the penalty subgradient; the quantity finite differences of
// loss() must reproduce.
GradientSet loss_gradient(const Mlp& m, const Batch& batch, Regularization reg,
                          double reg_lambda);

void step_plain(Mlp& m, const GradientSet& grads, const TrainConfig& cfg);
void step_l1(Mlp& m, const GradientSet& grads, const TrainConfig& cfg);
void step_l2(Mlp& m, const GradientSet& grads, const TrainConfig& cfg);

struct AdamState {
  std::vector<Matrix> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;
  long long step = 0;

  static AdamState zeros_like(const Mlp& m);
};

// Adam with bias-corrected moments; the regularization subgradient is folded
// into the gradient before the moment update.
void step_adam(Mlp& m, const GradientSet& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainData {
  std::vector<std::vector<double>> inputs;
  std::vector<double> labels;
  std::size_t size() const { return labels.size(); }
};

struct HistoryPoint {
  long long step = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  Mlp model;
  std::vector<HistoryPoint> history;
};

// Mini-batch training per the configured update rule. Deterministic for a
// given (data, config); throws DivergenceError if the loss goes non-finite.
TrainResult train(const TrainData& train_set, const TrainData& val_set,
                  const TrainConfig& cfg);

// Network output clipped to the feasible power range [0, P_t]; applies the
// model's stored standardization first, if any.
double predict_power(const Mlp& m, std::span<const double> x, double max_power);

// Same mapping over many rows at once through a blocked matrix product
// (OpenBLAS when available); the fast path timed in evaluations.
std::vector<double> predict_power_batch(const Mlp& m,
                                        const std::vector<std::vector<double>>& xs,
                                        double max_power);

double mean_squared_error(const Mlp& m, const TrainData& data,
                          std::size_t row_cap = 0);

void save_model(const Mlp& m, const std::filesystem::path& path);
Mlp load_model(const std::filesystem::path& path);

}  // namespace secra
