#pragma once

#include <string>
#include <vector>

#include "csg/common.hpp"
#include "csg/rng.hpp"

namespace csg {

enum class TieRule { Deterministic, Randomized };

// Finite Stackelberg game: m principal actions (rows) x k agent actions
// (columns), plus a total preference order over agent actions used for
// deterministic tie-breaking.
struct FiniteGame {
  int m = 0;
  int k = 0;
  Matrix u_principal;  // m x k, entries in [0,1] after load-time normalization
  Matrix u_agent;      // m x k
  // preference[0] is the most-preferred agent action; the deterministic
  // tie rule picks the earliest best response in this list.
  std::vector<int> preference;

  void validate() const;
};

FiniteGame make_g1();  // 2x2 toy used throughout the test suite

FiniteGame load_game_json(const std::string& json_text);
std::string game_to_json(const FiniteGame& game);

struct BestResponse {
  std::vector<int> br_set;  // all maximizers within kTieTol, ascending
  int chosen = -1;
};

BestResponse best_response(const FiniteGame& game, const Vector& p,
                           TieRule tie_rule, RngStream* rng = nullptr);

// (u_P, u_A) = (<h, U_P(.,y)>, <h, U_A(.,y)>).
std::pair<double, double> utilities(const FiniteGame& game, const Vector& h, int y);

struct StackelbergSolution {
  double value = 0.0;  // V*
  Vector strategy;     // h*
  int agent_action = -1;
  // Optimal restricted value per agent action; -inf marks an empty polytope.
  Vector per_action_values;
};

// Per-action LPs: max <h, U_P(.,y)> over h in the best-response polytope P_y.
StackelbergSolution solve_stackelberg(const FiniteGame& game);

// True iff h lies in B2(P_y, -margin), with ball geometry measured inside the
// affine hull of the simplex.  Test oracle; not available to learning
// principals.
bool conservative_membership_exact(const FiniteGame& game, int y, const Vector& h,
                                   double margin);

// Largest eta with B2(center, eta) (intersected with the affine hull)
// contained in P_y; radius 0 with an arbitrary center when P_y has empty
// relative interior.
std::pair<double, Vector> chebyshev_radius(const FiniteGame& game, int y);

}  // namespace csg
