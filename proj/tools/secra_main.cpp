#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "secra/dataset.hpp"
#include "secra/errors.hpp"
#include "secra/eval.hpp"
#include "secra/model.hpp"
#include "secra/nn.hpp"
#include "secra/serde.hpp"
#include "secra/solver_perfect.hpp"
#include "secra/solver_robust.hpp"

namespace {

using nlohmann::json;
using namespace secra;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

struct GlobalConfig {
  SystemParams params;
  std::vector<int> layer_dims = {8, 100, 100, 1};
};

// Optional JSON config; --config wins over the SECRA_CONFIG environment
// variable, and every field falls back to the built-in defaults.
GlobalConfig load_config(const std::string& cli_path) {
  GlobalConfig cfg;
  std::string path = cli_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SECRA_CONFIG")) path = env;
  }
  if (path.empty()) return cfg;

  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (j.contains("params")) j.at("params").get_to(cfg.params);
  if (j.contains("layer_dims")) j.at("layer_dims").get_to(cfg.layer_dims);
  cfg.params.validate();
  return cfg;
}

int cmd_gen_data(const GlobalConfig& cfg, std::uint64_t n, std::uint64_t seed,
                 double pt, double q, double eps_s, double eps_e, double eps_p,
                 bool robust, const std::string& out) {
  const ScenarioParams sc{pt, q};
  const UncertaintyProfile profile{eps_s, eps_e, eps_p};
  const LabeledDataset ds = gen_dataset(n, cfg.params, sc, profile, seed, robust);
  save_dataset(ds, out);
  json summary{{"rows", ds.rows.size()}, {"solver", ds.header.solver}, {"out", out}};
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_solve(const GlobalConfig& cfg, const std::string& instance_path, bool robust) {
  std::ifstream in(instance_path);
  if (!in) throw ValidationError("cannot read instance file: " + instance_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("instance file is not valid JSON: " + std::string(e.what()));
  }

  ChannelInstance ch;
  j.at("channel").get_to(ch);
  ch.validate();
  SystemParams params = cfg.params;
  if (j.contains("params")) j.at("params").get_to(params);
  params.validate();
  ScenarioParams sc;
  if (j.contains("scenario")) j.at("scenario").get_to(sc);
  sc.validate();

  const SolveResult res = robust ? solve_robust(ch, params, sc)
                                 : golden_search(effective_gains(ch, params, false), sc);
  json out = res;
  out["solver"] = robust ? "robust" : "perfect";
  std::cout << out.dump(1) << "\n";
  return kExitOk;
}

int cmd_train(const GlobalConfig& cfg, const std::string& data_path,
              double val_fraction, const std::string& reg, double lr, double lambda,
              int batch, int epochs, std::uint64_t seed,
              const std::string& out_model, bool standardize) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw ValidationError("--val-fraction must be in (0, 1)");

  const LabeledDataset ds = load_dataset(data_path);
  const auto [train_ds, val_ds] = split(ds, 1.0 - val_fraction, seed);

  TrainConfig tc;
  tc.layer_dims = cfg.layer_dims;
  tc.learning_rate = lr;
  tc.reg_lambda = lambda;
  tc.batch_size = batch;
  tc.regularization = regularization_from_string(reg);
  tc.epochs = epochs;
  tc.seed = seed;
  tc.standardize = standardize;

  const TrainResult res = train_model(train_ds, val_ds, tc);
  save_model(res.model, out_model);

  json summary{{"out_model", out_model},
               {"train_rows", train_ds.rows.size()},
               {"val_rows", val_ds.rows.size()},
               {"steps", res.history.empty() ? 0 : res.history.back().step},
               {"final_train_mse", res.model.meta->final_train_mse},
               {"final_val_mse", res.model.meta->final_val_mse}};
  std::cout << summary.dump(1) << "\n";
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& model_paths, const std::string& test_path,
             const std::string& out_report, const std::string& format) {
  if (model_paths.size() != 3)
    throw ValidationError("--models expects three paths: none l1 l2");
  const Mlp none_model = load_model(model_paths[0]);
  const Mlp l1_model = load_model(model_paths[1]);
  const Mlp l2_model = load_model(model_paths[2]);
  const LabeledDataset test = load_dataset(test_path);

  const EvalReport report = evaluate(none_model, l1_model, l2_model, test,
                                     test.header.params, test.header.scenario);
  if (format != "csv" && format != "json")
    throw ValidationError("--format must be csv or json");
  const ReportFormat fmt = format == "csv" ? ReportFormat::csv : ReportFormat::json;
  save_report(report, out_report, fmt);
  std::cout << render_report(report, fmt);
  return kExitOk;
}

int cmd_report(const std::string& in_path, const std::string& format,
               const std::string& out_path) {
  const EvalReport report = load_report(in_path);
  if (format != "csv" && format != "json")
    throw ValidationError("--format must be csv or json");
  const ReportFormat fmt = format == "csv" ? ReportFormat::csv : ReportFormat::json;
  if (!out_path.empty()) save_report(report, out_path, fmt);
  std::cout << render_report(report, fmt);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-rate power allocation for an underlay cognitive radio "
               "link: conventional solvers and a neural-network surrogate"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config with system parameters (default: $SECRA_CONFIG)");

  auto* gen = app.add_subcommand("gen-data", "Generate a solver-labeled dataset");
  std::uint64_t n = 1000, seed = 1;
  double pt = 100.0, q = 6.0, eps_s = 0.0, eps_e = 0.0, eps_p = 0.0;
  bool robust = false;
  std::string out;
  gen->add_option("--n", n, "number of rows")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "generation seed");
  gen->add_option("--pt", pt, "max transmit power P_t, mW");
  gen->add_option("--q", q, "interference leakage cap q, mW");
  gen->add_option("--eps-s", eps_s, "legitimate-channel uncertainty radius");
  gen->add_option("--eps-e", eps_e, "eavesdropper-channel uncertainty radius");
  gen->add_option("--eps-p", eps_p, "leakage-channel uncertainty radius");
  gen->add_flag("--robust", robust, "label with the robust solver");
  gen->add_option("--out", out, "output dataset path")->required();

  auto* solve = app.add_subcommand("solve", "Solve a single instance from JSON");
  std::string instance_path;
  bool solve_robust_flag = false;
  solve->add_option("--instance", instance_path, "instance JSON file")->required();
  solve->add_flag("--robust", solve_robust_flag, "use the robust solver");

  auto* tr = app.add_subcommand("train", "Train one regularization scheme");
  std::string data_path, reg = "none", out_model;
  double val_fraction = 1.0 / 6.0, lr = 1e-4, lambda = 5e-4;
  int batch = 10, epochs = 10;
  std::uint64_t train_seed = 1;
  bool standardize = false;
  tr->add_option("--data", data_path, "labeled dataset path")->required();
  tr->add_option("--val-fraction", val_fraction, "validation fraction");
  tr->add_option("--reg", reg, "regularization: none|l1|l2");
  tr->add_option("--lr", lr, "learning rate");
  tr->add_option("--lambda", lambda, "regularization parameter");
  tr->add_option("--batch", batch, "mini-batch size");
  tr->add_option("--epochs", epochs, "epochs over the training split");
  tr->add_option("--seed", train_seed, "training seed");
  tr->add_option("--out-model", out_model, "output model path")->required();
  tr->add_flag("--standardize", standardize, "z-score the inputs");

  auto* ev = app.add_subcommand("eval", "Evaluate trained schemes against the solvers");
  std::vector<std::string> model_paths;
  std::string test_path, out_report, format = "json";
  ev->add_option("--models", model_paths, "three model paths: none l1 l2")
      ->expected(3)
      ->required();
  ev->add_option("--test", test_path, "test dataset path")->required();
  ev->add_option("--out-report", out_report, "output report path")->required();
  ev->add_option("--format", format, "csv|json");

  auto* rep = app.add_subcommand("report", "Re-render a stored JSON report");
  std::string report_in, report_format = "csv", report_out;
  rep->add_option("--in", report_in, "stored JSON report")->required();
  rep->add_option("--format", report_format, "csv|json");
  rep->add_option("--out", report_out, "optional output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const GlobalConfig cfg = load_config(config_path);
    if (gen->parsed())
      return cmd_gen_data(cfg, n, seed, pt, q, eps_s, eps_e, eps_p, robust, out);
    if (solve->parsed()) return cmd_solve(cfg, instance_path, solve_robust_flag);
    if (tr->parsed())
      return cmd_train(cfg, data_path, val_fraction, reg, lr, lambda, batch, epochs,
                       train_seed, out_model, standardize);
    if (ev->parsed()) return cmd_eval(model_paths, test_path, out_report, format);
    if (rep->parsed()) return cmd_report(report_in, report_format, report_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
