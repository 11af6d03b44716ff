#pragma once

#include <functional>
#include <memory>

#include "csg/binning.hpp"
#include "csg/forecaster.hpp"
#include "csg/rng.hpp"
#include "csg/transcript.hpp"

namespace csg {

// Convex body the continuous principal plays in: axis box or centered ball.
struct Domain {
  enum class Kind { Box, Ball };
  Kind kind = Kind::Box;
  int dim = 1;
  Vector lo, hi;        // Box
  double radius = 1.0;  // Ball (centered at 0)

  Vector center() const;
  double inradius() const;
  bool contains(const Vector& x, double tol = 1e-9) const;
};

struct ContinuousGame {
  Domain domain;
  int k = 1;  // agent response dimension
  std::function<double(const Vector&, const Vector&)> u_principal;
  std::function<double(const Vector&, const Vector&)> u_agent;
  std::function<Vector(const Vector&)> best_response;
  struct Lipschitz {
    double L1 = 1, L2 = 1, L_BR = 1, L_U = 1, W_P = 1, D_P = 2, r = 1, R = 1;
  } lipschitz;
};

// Toy: domain [-1,1], U_A = -(y - x/2)^2 (BR(x) = x/2),
// U_P = 1 - (x-0.5)^2 - (y-0.25)^2; V* = 1 at x* = 0.5.
ContinuousGame make_g2();

struct TentBinning {
  std::vector<Vector> centers;  // eps-grid of the domain
  double radius = 0.0;          // 2*eps
  double eps = 0.0;
  BinningSpec spec;             // TentGrid view of the same data
};

TentBinning build_tent_binning(const Domain& domain, double eps,
                               long long center_cap = 100000);

// Euclidean projection onto the delta-shrunken body.
Vector project_shrunken(const Domain& domain, const Vector& x, double delta);

struct GDwoGConfig {
  double gamma0 = 0.5;
  double delta0 = 0.3;
  int epochs = 100;       // Phi
  int epoch_length = 1;   // M
};

// (gamma_phi, delta): gamma0 * m^{-1/2} * phi^{-3/4} and the constant
// delta0 * m^{1/2} * Phi^{-1/4}.
std::pair<double, double> gdwog_schedule(int phi, const GDwoGConfig& cfg, int m);

// Agent side of a continuous simulation.
class ContinuousAgent {
 public:
  virtual ~ContinuousAgent() = default;
  virtual std::pair<Vector, Vector> respond(const Vector& h, RngStream& rng) = 0;  // (p, y)
  virtual void learn(const Vector& h_observed) = 0;
};

class ExactBRContinuousAgent : public ContinuousAgent {
 public:
  explicit ExactBRContinuousAgent(const ContinuousGame& game) : game_(game) {}
  std::pair<Vector, Vector> respond(const Vector& h, RngStream&) override {
    return {h, game_.best_response(h)};
  }
  void learn(const Vector&) override {}

 private:
  const ContinuousGame& game_;
};

// 1-d calibrated agent: the scalar forecaster with the tent binning over the
// domain interval, best responding to the sampled forecast.
class CalibratedContinuousAgent : public ContinuousAgent {
 public:
  CalibratedContinuousAgent(const ContinuousGame& game, double tent_eps,
                            ScalarForecaster::Config cfg);
  std::pair<Vector, Vector> respond(const Vector& h, RngStream& rng) override;
  void learn(const Vector& h_observed) override;
  const ScalarForecaster& forecaster() const { return *fc_; }

 private:
  const ContinuousGame& game_;
  TentBinning tents_;
  std::unique_ptr<ScalarForecaster> fc_;
};

class ContinuousEnv {
 public:
  ContinuousEnv(const ContinuousGame& game, std::unique_ptr<ContinuousAgent> agent,
                std::uint64_t root_seed);
  Vector play(const Vector& h, int epoch = 0);  // returns the agent response
  long long round() const { return transcript_.size(); }
  const Transcript& transcript() const { return transcript_; }
  const ContinuousGame& game() const { return game_; }

 private:
  const ContinuousGame& game_;
  std::unique_ptr<ContinuousAgent> agent_;
  RngStream agent_rng_;
  Transcript transcript_;
};

// Epoch-based one-point gradient-free ascent (the lazy variant: one strategy
// replayed M times per epoch so calibrated forecasts re-converge).  Returns
// the sequence of epoch anchors x_phi.
std::vector<Vector> lazy_gdwog(ContinuousEnv& env, const GDwoGConfig& cfg, RngStream& rng);

// Reference oracle: dense grid search of V* = max_x U_P(x, BR(x)) (1-d).
std::pair<double, double> solve_continuous(const ContinuousGame& game, double step = 1e-4);

}  // namespace csg
