#pragma once

#include <json.hpp>

#include "secra/model.hpp"
#include "secra/solver_perfect.hpp"

namespace secra {

struct TrainConfig;

// nlohmann ADL hooks for the record types that cross file boundaries
// (dataset headers, model files, solve output).
void to_json(nlohmann::json& j, const SystemParams& p);
void from_json(const nlohmann::json& j, SystemParams& p);

void to_json(nlohmann::json& j, const ScenarioParams& p);
void from_json(const nlohmann::json& j, ScenarioParams& p);

void to_json(nlohmann::json& j, const UncertaintyProfile& p);
void from_json(const nlohmann::json& j, UncertaintyProfile& p);

void to_json(nlohmann::json& j, const ChannelInstance& c);
void from_json(const nlohmann::json& j, ChannelInstance& c);

void to_json(nlohmann::json& j, const SolveResult& r);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace secra
