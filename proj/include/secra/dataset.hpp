#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "secra/model.hpp"
#include "secra/nn.hpp"

namespace secra {

struct DatasetHeader {
  SystemParams params;
  ScenarioParams scenario;
  UncertaintyProfile profile;
  std::string solver = "perfect";  // "perfect", "robust", or "mixed"
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
};

struct LabeledRow {
  ChannelInstance ch;
  double p_star = 0.0;     // mW, from the conventional solver
  double rate_star = 0.0;  // bits/s/Hz achieved by p_star
};

// Channel realizations labeled with the conventional solver's optimum. The
// scenario (P_t, q) is a per-dataset constant; only the eight channel
// features vary across rows.
struct LabeledDataset {
  DatasetHeader header;
  std::vector<LabeledRow> rows;

  TrainData to_train_data() const;
};

// n rows with per-row substreams of `seed`. robust = false forces zero
// uncertainty radii and labels through the perfect-CSI search; robust = true
// stamps the profile radii on every row and labels through the robust solver.
LabeledDataset gen_dataset(std::uint64_t n, const SystemParams& params,
                           const ScenarioParams& sc, const UncertaintyProfile& profile,
                           std::uint64_t seed, bool robust);

// Seeded shuffle, then split at floor(n * train_fraction).
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                double train_fraction,
                                                std::uint64_t seed);

// Row concatenation for mixed perfect/imperfect experiments; scenarios and
// system parameters must match.
LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b);

// CSV with a '#'-prefixed JSON header line, a column-name line, then one row
// per sample. Doubles carry 17 significant digits so a round trip is exact.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

// Train on labeled data and stamp the model with the dataset's scenario so
// evaluation can reject mismatched model/test pairs.
TrainResult train_model(const LabeledDataset& train_set, const LabeledDataset& val_set,
                        const TrainConfig& cfg);

}  // namespace secra
