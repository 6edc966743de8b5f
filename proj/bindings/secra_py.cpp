#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "secra/dataset.hpp"
#include "secra/errors.hpp"
#include "secra/eval.hpp"
#include "secra/model.hpp"
#include "secra/nn.hpp"
#include "secra/solver_perfect.hpp"
#include "secra/solver_robust.hpp"

namespace py = pybind11;
using namespace secra;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Secrecy-rate power allocation for an underlay cognitive radio link: "
            "conventional solvers and a neural-network surrogate";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("primary_power", &SystemParams::primary_power)
      .def_readwrite("noise_su", &SystemParams::noise_su)
      .def_readwrite("noise_eve", &SystemParams::noise_eve)
      .def_readwrite("path_loss_exp", &SystemParams::path_loss_exp)
      .def_readwrite("dist_su", &SystemParams::dist_su)
      .def_readwrite("dist_eve", &SystemParams::dist_eve)
      .def_readwrite("dist_pu", &SystemParams::dist_pu)
      .def_readwrite("cross_su", &SystemParams::cross_su)
      .def_readwrite("cross_eve", &SystemParams::cross_eve)
      .def("validate", &SystemParams::validate);

  py::class_<ScenarioParams>(m, "ScenarioParams")
      .def(py::init<>())
      .def(py::init([](double pt, double q) {
             ScenarioParams sc{pt, q};
             sc.validate();
             return sc;
           }),
           py::arg("max_power"), py::arg("leakage_cap"))
      .def_readwrite("max_power", &ScenarioParams::max_power)
      .def_readwrite("leakage_cap", &ScenarioParams::leakage_cap);

  py::class_<UncertaintyProfile>(m, "UncertaintyProfile")
      .def(py::init<>())
      .def(py::init([](double s, double e, double p) {
             UncertaintyProfile pr{s, e, p};
             pr.validate();
             return pr;
           }),
           py::arg("eps_s") = 0.0, py::arg("eps_e") = 0.0, py::arg("eps_p") = 0.0)
      .def_readwrite("eps_s", &UncertaintyProfile::eps_s)
      .def_readwrite("eps_e", &UncertaintyProfile::eps_e)
      .def_readwrite("eps_p", &UncertaintyProfile::eps_p);

  py::class_<ChannelInstance>(m, "ChannelInstance")
      .def(py::init<>())
      .def_readwrite("h_s", &ChannelInstance::h_s)
      .def_readwrite("h_p", &ChannelInstance::h_p)
      .def_readwrite("h_e", &ChannelInstance::h_e)
      .def_readwrite("g_s", &ChannelInstance::g_s)
      .def_readwrite("g_e", &ChannelInstance::g_e)
      .def_readwrite("eps_s", &ChannelInstance::eps_s)
      .def_readwrite("eps_e", &ChannelInstance::eps_e)
      .def_readwrite("eps_p", &ChannelInstance::eps_p)
      .def("perfect_csi", &ChannelInstance::perfect_csi)
      .def("features", &make_features);

  py::class_<EffectiveGains>(m, "EffectiveGains")
      .def(py::init<>())
      .def_readwrite("a", &EffectiveGains::a)
      .def_readwrite("b", &EffectiveGains::b)
      .def_readwrite("leak_gain", &EffectiveGains::leak_gain);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("p_star", &SolveResult::p_star)
      .def_readonly("rate_star", &SolveResult::rate_star)
      .def_readonly("t_star", &SolveResult::t_star)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("wall_time", &SolveResult::wall_time)
      .def("__repr__", [](const SolveResult& r) {
        return "SolveResult(p_star=" + std::to_string(r.p_star) +
               ", rate_star=" + std::to_string(r.rate_star) + ")";
      });

  m.def("gen_channel", &gen_channel, py::arg("seed"), py::arg("params"),
        py::arg("profile") = UncertaintyProfile{});
  m.def("effective_gains", &effective_gains, py::arg("channel"), py::arg("params"),
        py::arg("worst_case") = false);
  m.def("secrecy_rate", &secrecy_rate, py::arg("power"), py::arg("gains"));
  m.def("leakage", &leakage, py::arg("power"), py::arg("gains"));
  m.def("power_cap", &power_cap, py::arg("gains"), py::arg("scenario"));

  m.def("golden_search", &golden_search, py::arg("gains"), py::arg("scenario"),
        py::arg("tol") = 1e-8);
  m.def("closed_form", &closed_form, py::arg("gains"), py::arg("scenario"));
  m.def("solve_robust", &solve_robust, py::arg("channel"), py::arg("params"),
        py::arg("scenario"), py::arg("tol") = 1e-9);

  py::enum_<Regularization>(m, "Regularization")
      .value("none", Regularization::none)
      .value("l1", Regularization::l1)
      .value("l2", Regularization::l2);

  py::enum_<OptimizerKind>(m, "OptimizerKind")
      .value("plain_gd", OptimizerKind::plain_gd)
      .value("adam", OptimizerKind::adam);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("layer_dims", &TrainConfig::layer_dims)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("reg_lambda", &TrainConfig::reg_lambda)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("regularization", &TrainConfig::regularization)
      .def_readwrite("optimizer", &TrainConfig::optimizer)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("standardize", &TrainConfig::standardize)
      .def_readwrite("history_stride", &TrainConfig::history_stride)
      .def_readwrite("early_stopping", &TrainConfig::early_stopping)
      .def_readwrite("patience", &TrainConfig::patience);

  py::class_<Mlp>(m, "Mlp")
      .def_readonly("layer_dims", &Mlp::layer_dims)
      .def("predict_power",
           [](const Mlp& mlp, const std::vector<double>& x, double max_power) {
             return predict_power(mlp, x, max_power);
           },
           py::arg("features"), py::arg("max_power"))
      .def("predict_power_batch", &predict_power_batch, py::arg("features"),
           py::arg("max_power"))
      .def("final_train_mse",
           [](const Mlp& mlp) { return mlp.meta ? mlp.meta->final_train_mse : 0.0; })
      .def("final_val_mse",
           [](const Mlp& mlp) { return mlp.meta ? mlp.meta->final_val_mse : 0.0; });

  m.def("xavier_init", &xavier_init, py::arg("layer_dims"), py::arg("seed"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  py::class_<HistoryPoint>(m, "HistoryPoint")
      .def_readonly("step", &HistoryPoint::step)
      .def_readonly("train_mse", &HistoryPoint::train_mse)
      .def_readonly("val_mse", &HistoryPoint::val_mse);

  py::class_<LabeledRow>(m, "LabeledRow")
      .def_readonly("channel", &LabeledRow::ch)
      .def_readonly("p_star", &LabeledRow::p_star)
      .def_readonly("rate_star", &LabeledRow::rate_star);

  py::class_<DatasetHeader>(m, "DatasetHeader")
      .def_readonly("params", &DatasetHeader::params)
      .def_readonly("scenario", &DatasetHeader::scenario)
      .def_readonly("profile", &DatasetHeader::profile)
      .def_readonly("solver", &DatasetHeader::solver)
      .def_readonly("seed", &DatasetHeader::seed)
      .def_readonly("count", &DatasetHeader::count);

  py::class_<LabeledDataset>(m, "LabeledDataset")
      .def_readonly("header", &LabeledDataset::header)
      .def_readonly("rows", &LabeledDataset::rows)
      .def("__len__", [](const LabeledDataset& ds) { return ds.rows.size(); });

  m.def("gen_dataset", &gen_dataset, py::arg("n"), py::arg("params"),
        py::arg("scenario"), py::arg("profile"), py::arg("seed"),
        py::arg("robust") = false);
  m.def("split", &split, py::arg("dataset"), py::arg("train_fraction"),
        py::arg("seed"));
  m.def("concat", &concat, py::arg("a"), py::arg("b"));
  m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));
  m.def("load_dataset", &load_dataset, py::arg("path"));

  m.def(
      "train_model",
      [](const LabeledDataset& train_ds, const LabeledDataset& val_ds,
         const TrainConfig& cfg) {
        TrainResult res = train_model(train_ds, val_ds, cfg);
        return py::make_tuple(std::move(res.model), std::move(res.history));
      },
      py::arg("train_set"), py::arg("val_set"), py::arg("config"),
      "Returns (model, history).");

  py::class_<SchemeMetrics>(m, "SchemeMetrics")
      .def_readonly("scheme", &SchemeMetrics::scheme)
      .def_readonly("mean_rate", &SchemeMetrics::mean_rate)
      .def_readonly("time_s", &SchemeMetrics::time_s)
      .def_readonly("satisfaction_pct", &SchemeMetrics::satisfaction_pct);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("schemes", &EvalReport::schemes)
      .def_readonly("mean_rate_conv", &EvalReport::mean_rate_conv)
      .def_readonly("time_conv", &EvalReport::time_conv)
      .def_readonly("rate_ratio_pct", &EvalReport::rate_ratio_pct)
      .def_readonly("time_ratio_pct", &EvalReport::time_ratio_pct)
      .def_readonly("satisfaction_pct", &EvalReport::satisfaction_pct)
      .def_readonly("test_rows", &EvalReport::test_rows);

  m.def("evaluate", &evaluate, py::arg("model_none"), py::arg("model_l1"),
        py::arg("model_l2"), py::arg("test"), py::arg("params"), py::arg("scenario"));

#ifdef VERSION_INFO
#define SECRA_STR_INNER(x) #x
#define SECRA_STR(x) SECRA_STR_INNER(x)
  m.attr("__version__") = SECRA_STR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
