#include "secra/dataset.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "secra/errors.hpp"
#include "secra/rng.hpp"
#include "secra/serde.hpp"
#include "secra/solver_perfect.hpp"
#include "secra/solver_robust.hpp"

namespace secra {

using nlohmann::json;

TrainData LabeledDataset::to_train_data() const {
  TrainData d;
  d.inputs.reserve(rows.size());
  d.labels.reserve(rows.size());
  for (const LabeledRow& r : rows) {
    const FeatureVector f = make_features(r.ch);
    d.inputs.emplace_back(f.begin(), f.end());
    d.labels.push_back(r.p_star);
  }
  return d;
}

LabeledDataset gen_dataset(std::uint64_t n, const SystemParams& params,
                           const ScenarioParams& sc, const UncertaintyProfile& profile,
                           std::uint64_t seed, bool robust) {
  if (n < 1) throw ValidationError("gen_dataset: n must be >= 1");
  params.validate();
  sc.validate();
  profile.validate();

  const UncertaintyProfile row_profile = robust ? profile : UncertaintyProfile{};

  LabeledDataset ds;
  ds.header.params = params;
  ds.header.scenario = sc;
  ds.header.profile = row_profile;
  ds.header.solver = robust ? "robust" : "perfect";
  ds.header.seed = seed;
  ds.header.count = n;
  ds.rows.reserve(n);

  for (std::uint64_t i = 0; i < n; ++i) {
    LabeledRow row;
    row.ch = gen_channel(substream_seed(seed, i), params, row_profile);
    const SolveResult res =
        robust ? solve_robust(row.ch, params, sc)
               : golden_search(effective_gains(row.ch, params, false), sc);
    row.p_star = res.p_star;
    row.rate_star = res.rate_star;
    ds.rows.push_back(row);
  }
  return ds;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                double train_fraction,
                                                std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("split: train_fraction must be in (0, 1)");

  std::vector<std::size_t> order(ds.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomStream rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(order[i - 1], order[j]);
  }

  const std::size_t n_train =
      static_cast<std::size_t>(train_fraction * static_cast<double>(ds.rows.size()));

  LabeledDataset train_ds;
  LabeledDataset val_ds;
  train_ds.header = ds.header;
  val_ds.header = ds.header;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_train ? train_ds : val_ds).rows.push_back(ds.rows[order[k]]);
  }
  train_ds.header.count = train_ds.rows.size();
  val_ds.header.count = val_ds.rows.size();
  return {std::move(train_ds), std::move(val_ds)};
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.header.scenario.max_power != b.header.scenario.max_power ||
      a.header.scenario.leakage_cap != b.header.scenario.leakage_cap)
    throw ValidationError("concat: datasets were generated under different scenarios");

  LabeledDataset out = a;
  if (a.header.solver != b.header.solver) out.header.solver = "mixed";
  if (a.header.profile.is_zero()) out.header.profile = b.header.profile;
  out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
  out.header.count = out.rows.size();
  return out;
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw ValidationError("cannot write dataset file: " + path.string());

  json header;
  header["params"] = ds.header.params;
  header["scenario"] = ds.header.scenario;
  header["profile"] = ds.header.profile;
  header["solver"] = ds.header.solver;
  header["seed"] = ds.header.seed;
  header["count"] = ds.header.count;

  std::fprintf(f, "#%s\n", header.dump().c_str());
  std::fprintf(f, "h_s,h_p,h_e,g_s,g_e,eps_s,eps_e,eps_p,p_star,rate_star\n");
  for (const LabeledRow& r : ds.rows) {
    std::fprintf(f,
                 "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 r.ch.h_s, r.ch.h_p, r.ch.h_e, r.ch.g_s, r.ch.g_e, r.ch.eps_s,
                 r.ch.eps_e, r.ch.eps_p, r.p_star, r.rate_star);
  }
  std::fclose(f);
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read dataset file: " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw ValidationError("dataset file: missing '#' JSON header line");

  LabeledDataset ds;
  try {
    const json header = json::parse(line.substr(1));
    header.at("params").get_to(ds.header.params);
    header.at("scenario").get_to(ds.header.scenario);
    header.at("profile").get_to(ds.header.profile);
    header.at("solver").get_to(ds.header.solver);
    header.at("seed").get_to(ds.header.seed);
    header.at("count").get_to(ds.header.count);
  } catch (const json::exception& e) {
    throw ValidationError("dataset file: bad header: " + std::string(e.what()));
  }

  if (!std::getline(in, line))
    throw ValidationError("dataset file: missing column header");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LabeledRow r;
    double* fields[10] = {&r.ch.h_s,   &r.ch.h_p,   &r.ch.h_e,   &r.ch.g_s,
                          &r.ch.g_e,   &r.ch.eps_s, &r.ch.eps_e, &r.ch.eps_p,
                          &r.p_star,   &r.rate_star};
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < 10; ++i) {
      if (!std::getline(ss, cell, ','))
        throw ValidationError("dataset file: short row");
      *fields[i] = std::stod(cell);
    }
    ds.rows.push_back(r);
  }
  if (ds.rows.size() != ds.header.count)
    throw ValidationError("dataset file: row count does not match header");
  return ds;
}

TrainResult train_model(const LabeledDataset& train_set, const LabeledDataset& val_set,
                        const TrainConfig& cfg) {
  TrainResult res = train(train_set.to_train_data(), val_set.to_train_data(), cfg);
  if (res.model.meta) res.model.meta->scenario = train_set.header.scenario;
  return res;
}

}  // namespace secra
