#include "csg/environment.hpp"

#include "csg/geometry.hpp"

namespace csg {

CalibratedAgent::CalibratedAgent(const FiniteGame& game, ScalarForecaster::Config cfg,
                                 TieRule tie, bool deterministic_binning)
    : game_(game), tie_(tie) {
  if (game.m != 2) {
    throw ConfigError("scalar-path calibrated agent requires m = 2 (use the LP path otherwise)");
  }
  cfg.lo = 0.0;
  cfg.hi = 1.0;
  BinningSpec binning = make_br_binning(game, deterministic_binning);
  const FiniteGame* gp = &game_;
  auto weights = [gp, binning](double x) {
    Vector p(2);
    p << x, 1.0 - x;
    return bin_weights(binning, gp, p);
  };
  fc_ = std::make_unique<ScalarForecaster>(cfg, game.k, weights);
}

std::pair<Vector, int> CalibratedAgent::respond(const Vector&, RngStream& rng) {
  const double x = fc_->step(rng);
  Vector p(2);
  p << x, 1.0 - x;
  return {p, best_response(game_, p, tie_, &rng).chosen};
}

void CalibratedAgent::learn(const Vector& h_observed) {
  fc_->observe(h_observed[0]);
}

FiniteEnv::FiniteEnv(const FiniteGame& game, std::unique_ptr<FiniteAgent> agent,
                     std::uint64_t root_seed, bool disclosure_sampled)
    : game_(game),
      agent_(std::move(agent)),
      agent_rng_(derive_stream(root_seed, "agent")),
      env_rng_(derive_stream(root_seed, "env")),
      disclosure_sampled_(disclosure_sampled) {
  transcript_.m = game.m;
  transcript_.continuous = false;
}

int FiniteEnv::play(const Vector& h, int epoch) {
  if (!is_simplex_point(h, 1e-7)) throw ConfigError("principal strategy leaves the simplex");
  auto [p, y] = agent_->respond(h, agent_rng_);
  TranscriptRow row;
  row.round = transcript_.size() + 1;
  row.epoch = epoch;
  row.h = h;
  row.p = p;
  row.y = y;
  auto [up, ua] = utilities(game_, h, y);
  row.u_p = up;
  row.u_a = ua;
  transcript_.rows.push_back(std::move(row));
  if (disclosure_sampled_) {
    // Reveal a vertex drawn from h instead of the mixed commitment.
    const double u = env_rng_.uniform();
    double acc = 0.0;
    int v = game_.m - 1;
    for (int j = 0; j < game_.m; ++j) {
      acc += h[j];
      if (u < acc) {
        v = j;
        break;
      }
    }
    Vector vert = Vector::Zero(game_.m);
    vert[v] = 1.0;
    agent_->learn(vert);
  } else {
    agent_->learn(h);
  }
  return y;
}

}  // namespace csg
