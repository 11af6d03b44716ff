#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "csg/harness.hpp"

using namespace csg;
using nlohmann::json;

namespace {
const char* kCalibratedCfg = R"({
  "game": {"toy": "G1"},
  "T": 200,
  "agent": {"kind": "calibrated", "grid_step": 0.05, "eps_nrbr": 0.06,
            "start_scheme": "dyadic"},
  "principal": {"kind": "constant", "h": [0.8, 0.2]}
})";

json load_schema(const std::string& name) {
  const auto path = std::filesystem::path(__FILE__).parent_path().parent_path() / "schemas" / name;
  return json::parse(read_file(path.string()));
}
}  // namespace

TEST_CASE("config parsing and validation errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("{not json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse(R"({"T": 10})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse(R"({"game": {"toy": "G1"}, "T": 0})"), ConfigError);
  CHECK_NOTHROW(ExperimentConfig::parse(kCalibratedCfg));

  // Structural errors surface when the experiment runs.
  const auto bad_agent = ExperimentConfig::parse(
      R"({"game": {"toy": "G1"}, "T": 5, "agent": {"kind": "psychic"},
          "principal": {"kind": "constant", "h": [1, 0]}})");
  CHECK_THROWS_AS(run_experiment(bad_agent, 1), ConfigError);

  const auto bad_budget = ExperimentConfig::parse(
      R"({"game": {"toy": "G2"}, "T": 10, "agent": {"kind": "exact_br"},
          "principal": {"kind": "gdwog", "epochs": 100, "epoch_length": 1}})");
  CHECK_THROWS_AS(run_experiment(bad_budget, 1), BudgetError);
}

TEST_CASE("runs are deterministic in the seed") {
  const auto cfg = ExperimentConfig::parse(kCalibratedCfg);
  const RunOutput a = run_experiment(cfg, 42);
  const RunOutput b = run_experiment(cfg, 42);
  const RunOutput c = run_experiment(cfg, 43);
  CHECK(transcript_to_csv(a.transcript) == transcript_to_csv(b.transcript));
  CHECK(transcript_to_csv(a.transcript) != transcript_to_csv(c.transcript));
  CHECK(a.summary["avg_principal_utility"] == b.summary["avg_principal_utility"]);
}

TEST_CASE("summary metrics round trip through the serialized transcript") {
  const auto cfg = ExperimentConfig::parse(kCalibratedCfg);
  const RunOutput out = run_experiment(cfg, 7);
  const Transcript back = transcript_from_csv(transcript_to_csv(out.transcript));
  const json again = summarize_transcript(back, cfg, 7);
  for (const char* key : {"avg_principal_utility", "V_star", "gap", "swap_regret",
                          "max_adaptive_cal_err"}) {
    CHECK(std::abs(out.summary[key].get<double>() - again[key].get<double>()) <= 1e-9);
  }
}

TEST_CASE("summary and audit documents validate against the shipped schemas") {
  const auto cfg = ExperimentConfig::parse(kCalibratedCfg);
  const RunOutput out = run_experiment(cfg, 7);
  std::string why;
  CHECK_MESSAGE(validate_schema(out.summary, load_schema("summary.schema.json"), &why), why);

  const json audit = audit_transcript(out.transcript, nullptr, "tent", "dyadic", 0.05);
  CHECK_MESSAGE(validate_schema(audit, load_schema("audit.schema.json"), &why), why);

  const json sol = solve_game_file("G1");
  CHECK_MESSAGE(validate_schema(sol, load_schema("solution.schema.json"), &why), why);

  const json game = json::parse(game_to_json(make_g1()));
  CHECK_MESSAGE(validate_schema(game, load_schema("game.schema.json"), &why), why);

  // The validator actually rejects broken documents.
  json broken = out.summary;
  broken.erase("gap");
  CHECK_FALSE(validate_schema(broken, load_schema("summary.schema.json"), &why));
  json wrong_type = out.summary;
  wrong_type["avg_principal_utility"] = "high";
  CHECK_FALSE(validate_schema(wrong_type, load_schema("summary.schema.json"), &why));
}

TEST_CASE("audit is a pure function of the transcript") {
  const auto cfg = ExperimentConfig::parse(kCalibratedCfg);
  const RunOutput out = run_experiment(cfg, 9);
  const FiniteGame g = make_g1();
  const json a = audit_transcript(out.transcript, &g, "deterministic", "dyadic");
  const json b = audit_transcript(out.transcript, &g, "deterministic", "dyadic");
  CHECK(a == b);
  CHECK(a["max_adaptive_cal_err"].get<double>() >= 0.0);
  CHECK(a["swap_regret"].get<double>() >= -1e-9);
  CHECK_THROWS_AS(audit_transcript(out.transcript, nullptr, "deterministic", "dyadic"),
                  ConfigError);
  CHECK_THROWS_AS(audit_transcript(out.transcript, &g, "deterministic", "hourly"), ConfigError);
}

TEST_CASE("solver front end") {
  const json g1 = solve_game_file("G1");
  CHECK(g1["V_star"].get<double>() == doctest::Approx(1.0));
  CHECK(g1["y_star"].get<int>() == 0);
  CHECK(g1["chebyshev_radii"][0].get<double>() == doctest::Approx(std::sqrt(2.0) * 0.25));

  const json g2 = solve_game_file("G2");
  CHECK(g2["V_star"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g2["x_star"].get<double>() == doctest::Approx(0.5).epsilon(1e-3));

  CHECK_THROWS_AS(solve_game_file("{"), ConfigError);
}

TEST_CASE("continuous experiments run through the harness") {
  const auto cfg = ExperimentConfig::parse(
      R"({"game": {"toy": "G2"}, "T": 100, "agent": {"kind": "exact_br"},
          "principal": {"kind": "gdwog", "gamma0": 0.2, "delta0": 2.0,
                        "epochs": 100, "epoch_length": 1}})");
  const RunOutput out = run_experiment(cfg, 3);
  CHECK(out.transcript.size() == 100);
  CHECK(out.summary["swap_regret"].is_null());
  CHECK(out.summary["V_star"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  std::string why;
  CHECK_MESSAGE(validate_schema(out.summary, load_schema("summary.schema.json"), &why), why);
}
