#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "csg/binning.hpp"
#include "csg/common.hpp"
#include "csg/game.hpp"
#include "csg/rng.hpp"

namespace csg {

// AdaNormalHedge weight w(R,C) = (Phi(R+1,C+1) - Phi(R-1,C+1)) / 2 with
// Phi(R,C) = exp(max{0,R}^2 / (3C)).
double anh_weight(double R, double C);

struct ExpertId {
  int s = 1;       // start round (awake from round s on)
  int i = 0;       // bin index
  int j = 0;       // principal coordinate
  int sigma = +1;  // +-1
};

struct ExpertStat {
  double R = 0.0;  // cumulative instantaneous regret sum r_tau
  double C = 0.0;  // cumulative |r_tau|
};

enum class StartScheme { EveryRound, Dyadic };

// Forecast distribution over scalar candidate forecasts (grid points).
struct ForecastDistribution {
  std::vector<double> support;
  std::vector<double> probs;
  double certified_value = 0.0;

  double sample(RngStream& rng) const;
};

// Pure selection rule of the m=2 / 1-d path, given Z evaluated on the grid:
// endpoint rules when Z has a uniform sign, adjacent-pair mixing at a strict
// sign change, grid-midpoint convention when Z vanishes identically.
// lo/hi are the scalar forecast-space endpoints; certified_value is the exact
// max over h in {lo, hi} of the mixture's expected loss.
ForecastDistribution select_from_grid_z(const std::vector<double>& grid,
                                        const std::vector<double>& z,
                                        double lo, double hi);

// Sleeping-experts calibrated forecaster over a scalar forecast space
// [lo, hi] (coordinate 0 of the 2-simplex, or a 1-d continuous domain).
// Experts are g = (s, i, sigma) on the single tracked coordinate; cohorts
// are materialized per the start scheme with prior mass proportional to
// 1/s^2, split uniformly inside each cohort.
class ScalarForecaster {
 public:
  struct Config {
    double lo = 0.0, hi = 1.0;
    double grid_step = 0.01;
    double eps_nrbr = 0.01;
    StartScheme start_scheme = StartScheme::EveryRound;
  };
  using WeightFn = std::function<Vector(double)>;  // scalar forecast -> bin weights

  ScalarForecaster(Config cfg, int n_bins, WeightFn weights);

  // Build Q_t for the current round and sample the forecast; throws
  // ConfigError if the certified value exceeds eps_nrbr.
  double step(RngStream& rng);

  // Reveal the round's outcome (scalar coordinate of h_t) and update all
  // awake experts with r = l_g - l_hat.
  void observe(double h_scalar);

  const ForecastDistribution& last_distribution() const { return last_dist_; }
  long long round() const { return t_; }  // rounds completed

  // Z_p for the current expert state (exposed for audit/tests).
  double compute_z(double p) const;

  // pi_t over awake experts; entries ordered (cohort, bin, sigma) with
  // sigma=+1 first.  Exposed for tests of the distribution rule.
  std::vector<double> pi() const;

  struct ExpertView {
    ExpertId id;
    ExpertStat stat;
  };
  std::vector<ExpertView> experts() const;

  // max over awake experts of R_g / sqrt((t - s + 1) * log(k*m*t)); the
  // sleeping-experts regret constant audited by the acceptance suite.
  double regret_constant(int k_actions, int m_actions) const;

 private:
  void materialize_cohorts();
  void refresh_coeffs() const;

  Config cfg_;
  int n_;
  WeightFn weights_;
  std::vector<double> grid_;
  Matrix grid_w_;  // n x |grid| cached bin weights at grid points

  std::vector<int> starts_;
  std::vector<std::vector<ExpertStat>> stats_;  // per cohort: 2n entries, idx = i*2 + (sigma<0)

  long long t_ = 0;  // completed rounds
  ForecastDistribution last_dist_;
  double last_p_ = 0.0;
  double last_z_ = 0.0;
  int last_grid_idx_ = -1;
  bool awaiting_observe_ = false;

  mutable std::vector<double> coeff_;  // D_i = sum_s (pi+ - pi-), refreshed per round
  mutable bool coeff_dirty_ = true;
};

// Expert loss l = w_i(p) * sigma * (h_j - p_j) for vector-valued forecast
// spaces (the scalar path inlines the same formula).
double expert_loss(const ExpertId& g, const Vector& h, const Vector& p,
                   const BinningSpec& binning, const FiniteGame* game);

// General-m forecaster (LP path) over a simplex grid; supported for m <= 3.
class SimplexLPForecaster {
 public:
  struct Config {
    double grid_step = 0.1;
    double eps_nrbr = 0.15;
    StartScheme start_scheme = StartScheme::EveryRound;
  };

  SimplexLPForecaster(Config cfg, const FiniteGame& game, bool deterministic_binning);

  Vector step(RngStream& rng);        // sampled forecast point
  void observe(const Vector& h);
  double last_certified() const { return last_certified_; }
  long long round() const { return t_; }

 private:
  Config cfg_;
  const FiniteGame& game_;
  BinningSpec binning_;
  std::vector<Vector> grid_;
  Matrix grid_w_;  // k x |grid|

  std::vector<int> starts_;
  // Per cohort: k * m * 2 entries, idx = (i*m + j)*2 + (sigma<0).
  std::vector<std::vector<ExpertStat>> stats_;

  long long t_ = 0;
  Vector last_p_;
  int last_grid_idx_ = -1;
  double last_certified_ = 0.0;
};

}  // namespace csg
