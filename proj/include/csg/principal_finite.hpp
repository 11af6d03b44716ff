#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "csg/environment.hpp"

namespace csg {

// The agent's calibration-rate envelope r_delta(t), known to the principal
// by assumption; either c*sqrt(log(k*m*t)/t) or the power form c*t^(-1/beta).
struct RateModel {
  enum class Form { LogSqrt, Power };
  Form form = Form::LogSqrt;
  double c = 1.0;
  double beta = 2.0;  // Power only
  int k = 2, m = 2;   // LogSqrt log argument

  double operator()(double t) const;
};

// Smallest integer l >= 1 with rate(l) <= target (doubling + binary search);
// throws BudgetError beyond l_max.
long long rate_inverse(const RateModel& rate, double target, long long l_max = 1000000);

struct ApproxMemParams {
  double eps1 = 0.0, eps2 = 0.0, eps3 = 0.0;
  int phi = 0;        // epochs
  double radius = 0.0;
  double eps_cal = 0.0;
  long long l = 1;    // rounds per probe
};

enum class ParamCase { I, II, III };

// Parameter-settings cases; eps is eps1 for Case I / III-style inputs where
// eps2 is derived, eps2 for Case II.  Validates Conditions 1-2.
ApproxMemParams set_params_case(ParamCase which, double eps1, double eps2, double delta,
                                long long T, int m, int k, const RateModel& rate,
                                long long l_max = 1000000);

struct ProbeRecord {
  Vector h_phi;
  int modal = -1;
  bool left_simplex = false;
};

struct ApproxMemResult {
  bool accepted = false;
  std::optional<int> label;  // unanimous modal response when no target given
  std::vector<ProbeRecord> probes;
};

// Probe h with phi perturbed strategies of radius R on the simplex equator;
// each played l rounds, labeled by the modal agent response.  With a target
// action: returns False on the first disagreement or simplex exit.  Without:
// accepts only a unanimous label.
ApproxMemResult approx_mem(FiniteEnv& env, std::optional<int> target_y, const Vector& h,
                           const ApproxMemParams& params, RngStream& rng);

struct InitPair {
  Vector h;
  int y = -1;
};

std::vector<InitPair> build_initialization_set(FiniteEnv& env, const ApproxMemParams& params,
                                               int count, RngStream& rng);

using MembershipFn = std::function<bool(const Vector&)>;

struct OptimizeResult {
  Vector point;
  double value = 0.0;
  bool stagnated = false;
  long long membership_calls = 0;
};

// LSV-contract replacement: random-direction ascent inside the simplex
// affine hull with bisection to the membership boundary; keeps the best
// oracle-certified point.
OptimizeResult optimize_over_membership(const Vector& objective, const MembershipFn& membership,
                                        const Vector& initial, double eps_prime, RngStream& rng,
                                        int max_directions = 64, int bisect_iters = 20);

struct PostProcessParams {
  double lambda = 0.0;
  int L = 1;          // denominator bound 2^(2mL)
  double c = 1.0;     // enumeration window factor
  double eps = 0.0;   // optimizer tolerance the window is scaled by
  double eta = 0.0;   // regularity radius (h0 is eta/2-centered)
  Vector h0;          // eta/2-centered anchor for y_tilde (caller-asserted)
  long long enumeration_cap = 100000;
};

struct PostProcessResult {
  Vector h;
  bool ok = false;
};

PostProcessResult post_process(FiniteEnv& env, const Vector& h_tilde, int y_tilde,
                               const PostProcessParams& pp, const RateModel& rate,
                               ParamCase which, double delta, long long T, RngStream& rng);

struct ETCConfig {
  long long T = 0;
  ParamCase which = ParamCase::II;
  double eps2 = 0.05;
  double eps1 = 0.05;
  double delta = 0.01;
  double eps_prime = 0.05;
  double eta = 0.0;           // regularity radius (config; chebyshev_radius offline helper)
  int init_count = 10;
  int max_directions = 24;
  RateModel rate;
  std::optional<PostProcessParams> post;  // default off
};

struct ETCResult {
  Vector h_commit;
  int y_commit = -1;
  long long explore_rounds = 0;
};

// Explore-then-commit: initialization sampling, membership-constrained
// optimization per discovered label, optional post-processing, then commit
// for the remaining rounds.  The transcript lives in the environment.
ETCResult explore_then_commit(FiniteEnv& env, const ETCConfig& config, RngStream& rng);

}  // namespace csg
