#include "csg/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "csg/geometry.hpp"
#include "csg/lp.hpp"

namespace csg {

using nlohmann::json;

void FiniteGame::validate() const {
  if (m < 2 || k < 1) throw ConfigError("game requires m >= 2, k >= 1");
  if (u_principal.rows() != m || u_principal.cols() != k ||
      u_agent.rows() != m || u_agent.cols() != k) {
    throw ConfigError("utility matrix dimensions do not match (m, k)");
  }
  if (!u_principal.allFinite() || !u_agent.allFinite()) {
    throw ConfigError("utility entries must be finite");
  }
  if (static_cast<int>(preference.size()) != k) {
    throw ConfigError("preference order must list every agent action");
  }
  std::vector<bool> seen(k, false);
  for (int y : preference) {
    if (y < 0 || y >= k || seen[y]) throw ConfigError("preference order is not a permutation");
    seen[y] = true;
  }
}

namespace {

// Affine rescale into [0,1], applied per player only when entries stray
// outside the unit range (already-normalized matrices pass through exactly).
void normalize_matrix(Matrix& u) {
  const double lo = u.minCoeff(), hi = u.maxCoeff();
  if (lo >= 0.0 && hi <= 1.0) return;
  if (hi - lo < 1e-15) {
    u.setConstant(0.5);
    return;
  }
  u = (u.array() - lo) / (hi - lo);
}

}  // namespace

FiniteGame make_g1() {
  FiniteGame g;
  g.m = 2;
  g.k = 2;
  g.u_principal.resize(2, 2);
  g.u_principal << 1.0, 0.0, 0.5, 0.2;
  // Column y0 pays the weight on principal action 0, column y1 the rest.
  g.u_agent.resize(2, 2);
  g.u_agent << 1.0, 0.0, 0.0, 1.0;
  g.preference = {0, 1};
  return g;
}

FiniteGame load_game_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("game JSON parse error: ") + e.what());
  }
  FiniteGame g;
  try {
    g.m = j.at("m").get<int>();
    g.k = j.at("k").get<int>();
    auto read_matrix = [&](const char* key) {
      const auto& rows = j.at(key);
      Matrix u(g.m, g.k);
      if (static_cast<int>(rows.size()) != g.m) throw ConfigError("bad matrix row count");
      for (int i = 0; i < g.m; ++i) {
        if (static_cast<int>(rows[i].size()) != g.k) throw ConfigError("bad matrix column count");
        for (int c = 0; c < g.k; ++c) u(i, c) = rows[i][c].get<double>();
      }
      return u;
    };
    g.u_principal = read_matrix("u_principal");
    g.u_agent = read_matrix("u_agent");
    if (j.contains("preference")) {
      g.preference = j.at("preference").get<std::vector<int>>();
    } else {
      g.preference.resize(g.k);
      for (int y = 0; y < g.k; ++y) g.preference[y] = y;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("game JSON field error: ") + e.what());
  }
  normalize_matrix(g.u_principal);
  normalize_matrix(g.u_agent);
  g.validate();
  return g;
}

std::string game_to_json(const FiniteGame& game) {
  json j;
  j["m"] = game.m;
  j["k"] = game.k;
  auto dump_matrix = [&](const Matrix& u) {
    json rows = json::array();
    for (int i = 0; i < u.rows(); ++i) {
      json row = json::array();
      for (int c = 0; c < u.cols(); ++c) row.push_back(u(i, c));
      rows.push_back(row);
    }
    return rows;
  };
  j["u_principal"] = dump_matrix(game.u_principal);
  j["u_agent"] = dump_matrix(game.u_agent);
  j["preference"] = game.preference;
  return j.dump(2);
}

BestResponse best_response(const FiniteGame& game, const Vector& p,
                           TieRule tie_rule, RngStream* rng) {
  Vector vals = game.u_agent.transpose() * p;
  const double best = vals.maxCoeff();
  BestResponse br;
  for (int y = 0; y < game.k; ++y) {
    if (vals[y] >= best - kTieTol) br.br_set.push_back(y);
  }
  if (tie_rule == TieRule::Deterministic) {
    for (int y : game.preference) {
      if (std::find(br.br_set.begin(), br.br_set.end(), y) != br.br_set.end()) {
        br.chosen = y;
        break;
      }
    }
  } else {
    if (rng == nullptr) throw ConfigError("randomized tie rule needs an RNG");
    br.chosen = br.br_set[rng->below(br.br_set.size())];
  }
  return br;
}

std::pair<double, double> utilities(const FiniteGame& game, const Vector& h, int y) {
  return {game.u_principal.col(y).dot(h), game.u_agent.col(y).dot(h)};
}

namespace {

// Half-space rows <h, U_A(.,y) - U_A(.,y')> >= 0 defining P_y.
Matrix polytope_rows(const FiniteGame& game, int y) {
  Matrix rows(game.k - 1, game.m);
  int r = 0;
  for (int yp = 0; yp < game.k; ++yp) {
    if (yp == y) continue;
    rows.row(r++) = (game.u_agent.col(y) - game.u_agent.col(yp)).transpose();
  }
  return rows;
}

}  // namespace

StackelbergSolution solve_stackelberg(const FiniteGame& game) {
  StackelbergSolution sol;
  sol.per_action_values = Vector::Constant(game.k, -std::numeric_limits<double>::infinity());
  Matrix eq(1, game.m);
  eq.setOnes();
  Vector beq(1);
  beq << 1.0;
  for (int y = 0; y < game.k; ++y) {
    const Matrix rows = polytope_rows(game, y);
    // rows h >= 0  ->  -rows h <= 0
    Matrix aub = -rows;
    Vector bub = Vector::Zero(aub.rows());
    LpResult lp = solve_lp(game.u_principal.col(y), eq, beq, aub, bub);
    if (lp.status != LpResult::Status::Optimal) continue;
    sol.per_action_values[y] = lp.value;
    if (sol.agent_action < 0 || lp.value > sol.value + kTieTol) {
      sol.value = lp.value;
      sol.agent_action = y;
      sol.strategy = project_to_simplex(lp.x);
    }
  }
  if (sol.agent_action < 0) throw ConfigError("all best-response polytopes empty");
  return sol;
}

bool conservative_membership_exact(const FiniteGame& game, int y, const Vector& h,
                                   double margin) {
  if (margin < 0) throw ConfigError("margin must be >= 0");
  const double face_scale = std::sqrt(1.0 - 1.0 / game.m);
  for (int j = 0; j < game.m; ++j) {
    if (h[j] < margin * face_scale - kTieTol) return false;
  }
  const Matrix rows = polytope_rows(game, y);
  for (int r = 0; r < rows.rows(); ++r) {
    const Vector a = rows.row(r).transpose();
    const double an = hull_norm(a);
    // Constant-on-the-hull rows either hold everywhere or nowhere.
    const double need = (an <= kTieTol) ? 0.0 : margin * an;
    if (a.dot(h) < need - kTieTol) return false;
  }
  return true;
}

std::pair<double, Vector> chebyshev_radius(const FiniteGame& game, int y) {
  // Variables (h, eta); maximize eta subject to the ball fitting inside P_y
  // within the affine hull.
  const int m = game.m;
  Vector c = Vector::Zero(m + 1);
  c[m] = 1.0;
  Matrix eq(1, m + 1);
  eq.setZero();
  eq.leftCols(m).setOnes();
  Vector beq(1);
  beq << 1.0;

  const Matrix rows = polytope_rows(game, y);
  const double face_scale = std::sqrt(1.0 - 1.0 / m);
  std::vector<Eigen::RowVectorXd> ub_rows;
  for (int j = 0; j < m; ++j) {
    // -h_j + face_scale * eta <= 0
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(m + 1);
    r[j] = -1.0;
    r[m] = face_scale;
    ub_rows.push_back(r);
  }
  for (int i = 0; i < rows.rows(); ++i) {
    const Vector a = rows.row(i).transpose();
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(m + 1);
    r.head(m) = -a.transpose();
    r[m] = hull_norm(a);
    ub_rows.push_back(r);
  }
  Matrix aub(static_cast<int>(ub_rows.size()), m + 1);
  for (size_t i = 0; i < ub_rows.size(); ++i) aub.row(static_cast<int>(i)) = ub_rows[i];
  Vector bub = Vector::Zero(aub.rows());

  LpResult lp = solve_lp(c, eq, beq, aub, bub);
  if (lp.status != LpResult::Status::Optimal || lp.value <= kTieTol) {
    return {0.0, Vector::Constant(m, 1.0 / m)};
  }
  return {lp.value, project_to_simplex(lp.x.head(m))};
}

}  // namespace csg
