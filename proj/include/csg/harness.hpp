#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "csg/continuous.hpp"
#include "csg/environment.hpp"
#include "csg/metrics.hpp"
#include "csg/principal_finite.hpp"

namespace csg {

// A parsed experiment: the (game, agent, principal, T, seed) cell.
struct ExperimentConfig {
  nlohmann::json raw;
  static ExperimentConfig parse(const std::string& json_text);
};

struct RunOutput {
  Transcript transcript;
  nlohmann::json summary;
};

// Executes the round protocol for the configured triple; deterministic given
// the seed.  Throws ConfigError / BudgetError per the CLI exit-code contract.
RunOutput run_experiment(const ExperimentConfig& config, std::uint64_t seed);

// Recompute the summary's transcript-derived metrics (round-trip check).
nlohmann::json summarize_transcript(const Transcript& tr, const ExperimentConfig& config,
                                    std::uint64_t seed);

nlohmann::json audit_transcript(const Transcript& tr, const FiniteGame* game,
                                const std::string& binning_kind, const std::string& scheme,
                                double tent_eps = 0.05);

nlohmann::json solve_game_file(const std::string& game_json_or_toy);

// Minimal structural validation against the shipped schema documents
// (required keys + primitive types).
bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     std::string* why = nullptr);

}  // namespace csg
