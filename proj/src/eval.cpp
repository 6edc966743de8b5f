#include "secra/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "secra/errors.hpp"
#include "secra/serde.hpp"
#include "secra/solver_perfect.hpp"
#include "secra/solver_robust.hpp"

namespace secra {

using nlohmann::json;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

constexpr double kLeakSlack = 1e-9;  // mW, matches the solver feasibility slack

void check_scenario(const Mlp& m, const std::string& name, const ScenarioParams& sc) {
  if (!m.meta || !m.meta->scenario) return;  // untagged models pass through
  const ScenarioParams& ms = *m.meta->scenario;
  if (ms.max_power != sc.max_power || ms.leakage_cap != sc.leakage_cap)
    throw ValidationError("evaluate: model '" + name +
                          "' was trained under a different scenario");
}

}  // namespace

SchemeMetrics score_powers(const std::string& name, std::span<const double> powers,
                           const LabeledDataset& test, const SystemParams& params,
                           const ScenarioParams& sc) {
  if (powers.size() != test.rows.size())
    throw ValidationError("score_powers: one power per test row required");

  SchemeMetrics m;
  m.scheme = name;
  if (test.rows.empty()) return m;

  double rate_sum = 0.0;
  std::size_t satisfied = 0;
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    const LabeledRow& row = test.rows[i];
    const bool imperfect = !row.ch.perfect_csi();
    const EffectiveGains g = effective_gains(row.ch, params, imperfect);
    rate_sum += secrecy_rate(powers[i], g);
    if (leakage(powers[i], g) <= sc.leakage_cap + kLeakSlack) ++satisfied;
  }
  m.mean_rate = rate_sum / static_cast<double>(test.rows.size());
  m.satisfaction_pct =
      100.0 * static_cast<double>(satisfied) / static_cast<double>(test.rows.size());
  return m;
}

std::vector<double> conventional_resolve(const LabeledDataset& test,
                                         const SystemParams& params,
                                         const ScenarioParams& sc,
                                         double* wall_time_s) {
  std::vector<double> powers(test.rows.size());
  const auto t0 = clock_type::now();
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    const ChannelInstance& ch = test.rows[i].ch;
    const SolveResult res =
        ch.perfect_csi() ? golden_search(effective_gains(ch, params, false), sc)
                         : solve_robust(ch, params, sc);
    powers[i] = res.p_star;
  }
  if (wall_time_s) *wall_time_s = seconds_since(t0);
  return powers;
}

EvalReport evaluate(const Mlp& model_none, const Mlp& model_l1, const Mlp& model_l2,
                    const LabeledDataset& test, const SystemParams& params,
                    const ScenarioParams& sc) {
  if (test.rows.empty()) throw ValidationError("evaluate: empty test set");
  check_scenario(model_none, "none", sc);
  check_scenario(model_l1, "l1", sc);
  check_scenario(model_l2, "l2", sc);

  const TrainData features = test.to_train_data();

  EvalReport report;
  report.test_rows = test.rows.size();

  double conv_time = 0.0;
  const std::vector<double> conv_powers =
      conventional_resolve(test, params, sc, &conv_time);
  SchemeMetrics conv = score_powers("conventional", conv_powers, test, params, sc);
  report.mean_rate_conv = conv.mean_rate;
  report.time_conv = conv_time;

  const Mlp* models[3] = {&model_none, &model_l1, &model_l2};
  const char* names[3] = {"none", "l1", "l2"};
  double min_rate_ratio = std::numeric_limits<double>::infinity();
  double max_time_ratio = 0.0;
  double min_satisfaction = 100.0;
  for (int k = 0; k < 3; ++k) {
    const auto t0 = clock_type::now();
    const std::vector<double> powers =
        predict_power_batch(*models[k], features.inputs, sc.max_power);
    const double nn_time = seconds_since(t0);

    SchemeMetrics m = score_powers(names[k], powers, test, params, sc);
    m.time_s = nn_time;
    if (report.mean_rate_conv > 0.0)
      min_rate_ratio = std::min(min_rate_ratio, m.mean_rate / report.mean_rate_conv);
    if (conv_time > 0.0)
      max_time_ratio = std::max(max_time_ratio, nn_time / conv_time);
    min_satisfaction = std::min(min_satisfaction, m.satisfaction_pct);
    report.schemes.push_back(std::move(m));
  }

  report.rate_ratio_pct =
      report.mean_rate_conv > 0.0 ? 100.0 * min_rate_ratio : 0.0;
  report.time_ratio_pct = 100.0 * max_time_ratio;
  report.satisfaction_pct = min_satisfaction;
  return report;
}

namespace {

json report_to_json(const EvalReport& r) {
  json schemes = json::array();
  for (const SchemeMetrics& m : r.schemes) {
    schemes.push_back({{"scheme", m.scheme},
                       {"mean_rate", m.mean_rate},
                       {"time_s", m.time_s},
                       {"satisfaction_pct", m.satisfaction_pct}});
  }
  return json{{"schemes", std::move(schemes)},
              {"mean_rate_conv", r.mean_rate_conv},
              {"time_conv", r.time_conv},
              {"rate_ratio_pct", r.rate_ratio_pct},
              {"time_ratio_pct", r.time_ratio_pct},
              {"satisfaction_pct", r.satisfaction_pct},
              {"test_rows", r.test_rows}};
}

}  // namespace

std::string render_report(const EvalReport& r, ReportFormat format) {
  if (format == ReportFormat::json) return report_to_json(r).dump(1) + "\n";

  // One wide row; ratio columns use two decimals, matching how the rate and
  // time comparisons are usually tabulated.
  std::string head = "test_rows";
  char buf[160];
  std::string vals = std::to_string(r.test_rows);
  for (const SchemeMetrics& m : r.schemes) {
    head += ",mean_rate_" + m.scheme + ",time_s_" + m.scheme + ",satisfaction_pct_" +
            m.scheme;
    std::snprintf(buf, sizeof(buf), ",%.4f,%.4f,%.2f", m.mean_rate, m.time_s,
                  m.satisfaction_pct);
    vals += buf;
  }
  head += ",mean_rate_conv,time_s_conv,min_rate_ratio_pct,max_time_ratio_pct,"
          "min_satisfaction_pct";
  std::snprintf(buf, sizeof(buf), ",%.4f,%.4f,%.2f,%.2f,%.2f", r.mean_rate_conv,
                r.time_conv, r.rate_ratio_pct, r.time_ratio_pct, r.satisfaction_pct);
  vals += buf;
  return head + "\n" + vals + "\n";
}

void save_report(const EvalReport& r, const std::filesystem::path& path,
                 ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write report file: " + path.string());
  out << render_report(r, format);
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read report file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("report file is not valid JSON: " + std::string(e.what()));
  }

  EvalReport r;
  for (const json& s : j.at("schemes")) {
    SchemeMetrics m;
    s.at("scheme").get_to(m.scheme);
    s.at("mean_rate").get_to(m.mean_rate);
    s.at("time_s").get_to(m.time_s);
    s.at("satisfaction_pct").get_to(m.satisfaction_pct);
    r.schemes.push_back(std::move(m));
  }
  j.at("mean_rate_conv").get_to(r.mean_rate_conv);
  j.at("time_conv").get_to(r.time_conv);
  j.at("rate_ratio_pct").get_to(r.rate_ratio_pct);
  j.at("time_ratio_pct").get_to(r.time_ratio_pct);
  j.at("satisfaction_pct").get_to(r.satisfaction_pct);
  j.at("test_rows").get_to(r.test_rows);
  return r;
}

}  // namespace secra
