#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "secra/dataset.hpp"
#include "secra/nn.hpp"

namespace secra {

struct SchemeMetrics {
  std::string scheme;            // "none", "l1", "l2", or "conventional"
  double mean_rate = 0.0;        // bits/s/Hz averaged over the test set
  double time_s = 0.0;           // wall time of the full pass over the set
  double satisfaction_pct = 0.0; // rows whose power keeps leakage within q
};

struct EvalReport {
  std::vector<SchemeMetrics> schemes;  // none, l1, l2
  double mean_rate_conv = 0.0;
  double time_conv = 0.0;
  double rate_ratio_pct = 0.0;    // min over schemes of mean_rate / mean_rate_conv
  double time_ratio_pct = 0.0;    // max over schemes of time_s / time_conv
  double satisfaction_pct = 0.0;  // min over schemes
  std::uint64_t test_rows = 0;
};

// Scores one power assignment per row: secrecy rate at the channel the
// solver guarantees (worst case for imperfect-CSI rows, nominal for perfect
// ones) and the percentage of rows whose leakage stays within the cap.
SchemeMetrics score_powers(const std::string& name, std::span<const double> powers,
                           const LabeledDataset& test, const SystemParams& params,
                           const ScenarioParams& sc);

// Re-solves every test row with the conventional solvers (perfect-CSI search
// for zero-radius rows, robust solver otherwise). wall_time_s, when given,
// receives the single-threaded time of the full pass.
std::vector<double> conventional_resolve(const LabeledDataset& test,
                                         const SystemParams& params,
                                         const ScenarioParams& sc,
                                         double* wall_time_s = nullptr);

// Full comparison of the three trained schemes against the conventional
// solvers on one test set. Throws if a model's recorded scenario does not
// match the test set.
EvalReport evaluate(const Mlp& model_none, const Mlp& model_l1, const Mlp& model_l2,
                    const LabeledDataset& test, const SystemParams& params,
                    const ScenarioParams& sc);

enum class ReportFormat { csv, json };

std::string render_report(const EvalReport& r, ReportFormat format);
void save_report(const EvalReport& r, const std::filesystem::path& path,
                 ReportFormat format);
EvalReport load_report(const std::filesystem::path& path);  // JSON only

}  // namespace secra
