#include "secra/serde.hpp"

#include "secra/errors.hpp"
#include "secra/nn.hpp"

namespace secra {

using nlohmann::json;

void to_json(json& j, const SystemParams& p) {
  j = json{{"primary_power", p.primary_power},
           {"noise_su", p.noise_su},
           {"noise_eve", p.noise_eve},
           {"path_loss_exp", p.path_loss_exp},
           {"dist_su", p.dist_su},
           {"dist_eve", p.dist_eve},
           {"dist_pu", p.dist_pu},
           {"cross_su", p.cross_su},
           {"cross_eve", p.cross_eve}};
}

void from_json(const json& j, SystemParams& p) {
  j.at("primary_power").get_to(p.primary_power);
  j.at("noise_su").get_to(p.noise_su);
  j.at("noise_eve").get_to(p.noise_eve);
  j.at("path_loss_exp").get_to(p.path_loss_exp);
  j.at("dist_su").get_to(p.dist_su);
  j.at("dist_eve").get_to(p.dist_eve);
  j.at("dist_pu").get_to(p.dist_pu);
  j.at("cross_su").get_to(p.cross_su);
  j.at("cross_eve").get_to(p.cross_eve);
}

void to_json(json& j, const ScenarioParams& p) {
  j = json{{"max_power", p.max_power}, {"leakage_cap", p.leakage_cap}};
}

void from_json(const json& j, ScenarioParams& p) {
  j.at("max_power").get_to(p.max_power);
  j.at("leakage_cap").get_to(p.leakage_cap);
}

void to_json(json& j, const UncertaintyProfile& p) {
  j = json{{"eps_s", p.eps_s}, {"eps_e", p.eps_e}, {"eps_p", p.eps_p}};
}

void from_json(const json& j, UncertaintyProfile& p) {
  j.at("eps_s").get_to(p.eps_s);
  j.at("eps_e").get_to(p.eps_e);
  j.at("eps_p").get_to(p.eps_p);
}

void to_json(json& j, const ChannelInstance& c) {
  j = json{{"h_s", c.h_s},     {"h_p", c.h_p},     {"h_e", c.h_e},
           {"g_s", c.g_s},     {"g_e", c.g_e},     {"eps_s", c.eps_s},
           {"eps_e", c.eps_e}, {"eps_p", c.eps_p}};
}

void from_json(const json& j, ChannelInstance& c) {
  j.at("h_s").get_to(c.h_s);
  j.at("h_p").get_to(c.h_p);
  j.at("h_e").get_to(c.h_e);
  j.at("g_s").get_to(c.g_s);
  j.at("g_e").get_to(c.g_e);
  c.eps_s = j.value("eps_s", 0.0);
  c.eps_e = j.value("eps_e", 0.0);
  c.eps_p = j.value("eps_p", 0.0);
}

void to_json(json& j, const SolveResult& r) {
  j = json{{"p_star", r.p_star},
           {"rate_star", r.rate_star},
           {"t_star", r.t_star},
           {"iterations", r.iterations},
           {"wall_time", r.wall_time}};
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"layer_dims", c.layer_dims},
           {"learning_rate", c.learning_rate},
           {"reg_lambda", c.reg_lambda},
           {"batch_size", c.batch_size},
           {"regularization", to_string(c.regularization)},
           {"optimizer", c.optimizer == OptimizerKind::adam ? "adam" : "plain_gd"},
           {"epochs", c.epochs},
           {"seed", c.seed},
           {"adam_beta1", c.adam_beta1},
           {"adam_beta2", c.adam_beta2},
           {"adam_eps", c.adam_eps},
           {"standardize", c.standardize},
           {"history_stride", c.history_stride},
           {"val_eval_cap", c.val_eval_cap},
           {"early_stopping", c.early_stopping},
           {"patience", c.patience}};
}

void from_json(const json& j, TrainConfig& c) {
  j.at("layer_dims").get_to(c.layer_dims);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("reg_lambda").get_to(c.reg_lambda);
  j.at("batch_size").get_to(c.batch_size);
  c.regularization = regularization_from_string(j.at("regularization").get<std::string>());
  const auto opt = j.at("optimizer").get<std::string>();
  if (opt == "adam") {
    c.optimizer = OptimizerKind::adam;
  } else if (opt == "plain_gd") {
    c.optimizer = OptimizerKind::plain_gd;
  } else {
    throw ValidationError("unknown optimizer: " + opt);
  }
  j.at("epochs").get_to(c.epochs);
  j.at("seed").get_to(c.seed);
  c.adam_beta1 = j.value("adam_beta1", 0.9);
  c.adam_beta2 = j.value("adam_beta2", 0.999);
  c.adam_eps = j.value("adam_eps", 1e-8);
  c.standardize = j.value("standardize", false);
  c.history_stride = j.value("history_stride", 100);
  c.val_eval_cap = j.value("val_eval_cap", 4096);
  c.early_stopping = j.value("early_stopping", false);
  c.patience = j.value("patience", 5);
}

}  // namespace secra
