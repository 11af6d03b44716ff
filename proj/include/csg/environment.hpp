#pragma once

#include <memory>
#include <vector>

#include "csg/forecaster.hpp"
#include "csg/game.hpp"
#include "csg/transcript.hpp"

namespace csg {

// Agent-side behavior in the round protocol: form a forecast, best respond,
// then observe the principal's commitment (or a sampled action vertex).
// respond() receives h only so the exact-BR ablation can peek (p_t = h_t);
// honest agents must ignore it when forecasting.
class FiniteAgent {
 public:
  virtual ~FiniteAgent() = default;
  virtual std::pair<Vector, int> respond(const Vector& h, RngStream& rng) = 0;
  virtual void learn(const Vector& h_observed) = 0;
};

class ExactBRAgent : public FiniteAgent {
 public:
  ExactBRAgent(const FiniteGame& game, TieRule tie) : game_(game), tie_(tie) {}
  std::pair<Vector, int> respond(const Vector& h, RngStream& rng) override {
    return {h, best_response(game_, h, tie_, &rng).chosen};
  }
  void learn(const Vector&) override {}

 private:
  const FiniteGame& game_;
  TieRule tie_;
};

// Plays the scripted forecast sequence (cyclically), best responding to it.
class ScriptedForecastAgent : public FiniteAgent {
 public:
  ScriptedForecastAgent(const FiniteGame& game, std::vector<Vector> forecasts, TieRule tie)
      : game_(game), forecasts_(std::move(forecasts)), tie_(tie) {
    if (forecasts_.empty()) throw ConfigError("scripted agent needs forecasts");
  }
  std::pair<Vector, int> respond(const Vector&, RngStream& rng) override {
    const Vector& p = forecasts_[idx_++ % forecasts_.size()];
    return {p, best_response(game_, p, tie_, &rng).chosen};
  }
  void learn(const Vector&) override {}

 private:
  const FiniteGame& game_;
  std::vector<Vector> forecasts_;
  TieRule tie_;
  size_t idx_ = 0;
};

// The calibrated agent: scalar-path sleeping-experts forecaster for m = 2
// with a BR binning, best responding to the sampled forecast.
class CalibratedAgent : public FiniteAgent {
 public:
  CalibratedAgent(const FiniteGame& game, ScalarForecaster::Config cfg, TieRule tie,
                  bool deterministic_binning = true);
  std::pair<Vector, int> respond(const Vector& h, RngStream& rng) override;
  void learn(const Vector& h_observed) override;
  const ScalarForecaster& forecaster() const { return *fc_; }

 private:
  const FiniteGame& game_;
  TieRule tie_;
  std::unique_ptr<ScalarForecaster> fc_;
};

// Owns the protocol loop for one simulation: the principal calls play(h) and
// observes only the returned action (information firewall); the environment
// records the full round (including the privileged forecast column).
class FiniteEnv {
 public:
  // disclosure_sampled: protocol step (5) reveals a vertex sampled from h_t
  // instead of h_t itself.
  FiniteEnv(const FiniteGame& game, std::unique_ptr<FiniteAgent> agent,
            std::uint64_t root_seed, bool disclosure_sampled = false);

  int play(const Vector& h, int epoch = 0);

  long long round() const { return transcript_.size(); }
  const Transcript& transcript() const { return transcript_; }
  const FiniteGame& game() const { return game_; }

 private:
  const FiniteGame& game_;
  std::unique_ptr<FiniteAgent> agent_;
  RngStream agent_rng_, env_rng_;
  bool disclosure_sampled_;
  Transcript transcript_;
};

}  // namespace csg
