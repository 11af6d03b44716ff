#include "csg/continuous.hpp"

#include <cmath>

#include "csg/geometry.hpp"

namespace csg {

Vector Domain::center() const {
  if (kind == Kind::Box) return 0.5 * (lo + hi);
  return Vector::Zero(dim);
}

double Domain::inradius() const {
  if (kind == Kind::Box) return 0.5 * (hi - lo).minCoeff();
  return radius;
}

bool Domain::contains(const Vector& x, double tol) const {
  if (kind == Kind::Box) {
    return (x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all();
  }
  return x.norm() <= radius + tol;
}

ContinuousGame make_g2() {
  ContinuousGame g;
  g.domain.kind = Domain::Kind::Box;
  g.domain.dim = 1;
  g.domain.lo = Vector::Constant(1, -1.0);
  g.domain.hi = Vector::Constant(1, 1.0);
  g.k = 1;
  g.u_principal = [](const Vector& x, const Vector& y) {
    return 1.0 - (x[0] - 0.5) * (x[0] - 0.5) - (y[0] - 0.25) * (y[0] - 0.25);
  };
  g.u_agent = [](const Vector& x, const Vector& y) {
    const double d = y[0] - x[0] / 2.0;
    return -d * d;
  };
  g.best_response = [](const Vector& x) { return Vector::Constant(1, x[0] / 2.0); };
  g.lipschitz = {3.0, 2.5, 0.5, 3.0, 2.0, 2.0, 1.0, 1.0};
  return g;
}

TentBinning build_tent_binning(const Domain& domain, double eps, long long center_cap) {
  if (eps <= 0.0) throw ConfigError("tent binning needs eps > 0");
  if (domain.kind != Domain::Kind::Box) {
    throw ConfigError("tent binning implemented for box domains");
  }
  TentBinning tb;
  tb.eps = eps;
  tb.radius = 2.0 * eps;
  // Axis-aligned eps-grid intersected with the box.
  std::vector<std::vector<double>> axes(static_cast<size_t>(domain.dim));
  long long total = 1;
  for (int d = 0; d < domain.dim; ++d) {
    const long long steps = std::llround((domain.hi[d] - domain.lo[d]) / eps);
    if (steps < 1) throw ConfigError("tent binning grid empty");
    if (steps + 1 > center_cap || total > center_cap / (steps + 1)) {
      throw BudgetError("tent binning grid exceeds center cap");
    }
    for (long long q = 0; q <= steps; ++q) {
      axes[static_cast<size_t>(d)].push_back(domain.lo[d] +
                                             (domain.hi[d] - domain.lo[d]) * q / steps);
    }
    total *= steps + 1;
    if (total > center_cap) throw BudgetError("tent binning grid exceeds center cap");
  }
  std::vector<int> idx(static_cast<size_t>(domain.dim), 0);
  for (long long c = 0; c < total; ++c) {
    Vector center(domain.dim);
    long long rem = c;
    for (int d = 0; d < domain.dim; ++d) {
      const auto& ax = axes[static_cast<size_t>(d)];
      center[d] = ax[static_cast<size_t>(rem % ax.size())];
      rem /= static_cast<long long>(ax.size());
    }
    tb.centers.push_back(center);
  }
  tb.spec.kind = BinningSpec::Kind::TentGrid;
  tb.spec.centers = tb.centers;
  tb.spec.radius = tb.radius;
  tb.spec.n = static_cast<int>(tb.centers.size());
  return tb;
}

Vector project_shrunken(const Domain& domain, const Vector& x, double delta) {
  if (delta >= domain.inradius()) throw ConfigError("shrinkage exceeds the domain inradius");
  if (domain.kind == Domain::Kind::Box) {
    Vector out = x;
    for (int d = 0; d < domain.dim; ++d) {
      out[d] = std::min(std::max(out[d], domain.lo[d] + delta), domain.hi[d] - delta);
    }
    return out;
  }
  const double r = domain.radius - delta;
  const double n = x.norm();
  return n <= r ? x : Vector(x * (r / n));
}

std::pair<double, double> gdwog_schedule(int phi, const GDwoGConfig& cfg, int m) {
  if (phi < 1) throw ConfigError("epoch index starts at 1");
  const double gamma = cfg.gamma0 / std::sqrt(static_cast<double>(m)) *
                       std::pow(static_cast<double>(phi), -0.75);
  const double delta = cfg.delta0 * std::sqrt(static_cast<double>(m)) *
                       std::pow(static_cast<double>(cfg.epochs), -0.25);
  return {gamma, delta};
}

CalibratedContinuousAgent::CalibratedContinuousAgent(const ContinuousGame& game, double tent_eps,
                                                     ScalarForecaster::Config cfg)
    : game_(game), tents_(build_tent_binning(game.domain, tent_eps)) {
  if (game.domain.dim != 1) {
    throw ConfigError("calibrated continuous agent implemented for 1-d domains");
  }
  cfg.lo = game.domain.lo[0];
  cfg.hi = game.domain.hi[0];
  // Candidate forecasts: refinement of the tent grid at half step.
  if (cfg.grid_step <= 0.0) cfg.grid_step = tent_eps / 2.0;
  const BinningSpec spec = tents_.spec;
  auto weights = [spec](double x) {
    return bin_weights(spec, nullptr, Vector::Constant(1, x));
  };
  fc_ = std::make_unique<ScalarForecaster>(cfg, spec.n, weights);
}

std::pair<Vector, Vector> CalibratedContinuousAgent::respond(const Vector&, RngStream& rng) {
  const double x = fc_->step(rng);
  const Vector p = Vector::Constant(1, x);
  return {p, game_.best_response(p)};
}

void CalibratedContinuousAgent::learn(const Vector& h_observed) {
  fc_->observe(h_observed[0]);
}

ContinuousEnv::ContinuousEnv(const ContinuousGame& game, std::unique_ptr<ContinuousAgent> agent,
                             std::uint64_t root_seed)
    : game_(game), agent_(std::move(agent)), agent_rng_(derive_stream(root_seed, "agent")) {
  transcript_.m = game.domain.dim;
  transcript_.continuous = true;
}

Vector ContinuousEnv::play(const Vector& h, int epoch) {
  if (!game_.domain.contains(h)) throw ConfigError("principal strategy leaves the domain");
  auto [p, y] = agent_->respond(h, agent_rng_);
  TranscriptRow row;
  row.round = transcript_.size() + 1;
  row.epoch = epoch;
  row.h = h;
  row.p = p;
  row.y = y[0];
  row.u_p = game_.u_principal(h, y);
  row.u_a = game_.u_agent(h, y);
  transcript_.rows.push_back(std::move(row));
  agent_->learn(h);
  return y;
}

std::vector<Vector> lazy_gdwog(ContinuousEnv& env, const GDwoGConfig& cfg, RngStream& rng) {
  const ContinuousGame& game = env.game();
  const int m = game.domain.dim;
  const double delta = gdwog_schedule(1, cfg, m).second;
  if (delta >= game.domain.inradius()) {
    throw ConfigError("gdwog delta exceeds the domain inradius");
  }
  Vector x = project_shrunken(game.domain, game.domain.center(), delta);
  std::vector<Vector> anchors;
  for (int phi = 1; phi <= cfg.epochs; ++phi) {
    anchors.push_back(x);
    const double gamma = gdwog_schedule(phi, cfg, m).first;
    const Vector s = sample_unit_sphere(rng, m);
    const Vector h = x + delta * s;
    Vector y_sum = Vector::Zero(game.k);
    for (int r = 0; r < cfg.epoch_length; ++r) y_sum += env.play(h, phi);
    const Vector y_bar = y_sum / static_cast<double>(cfg.epoch_length);
    const double u = game.u_principal(h, y_bar);
    x = project_shrunken(game.domain,
                         Vector(x + gamma * (static_cast<double>(m) / delta) * u * s), delta);
  }
  return anchors;
}

std::pair<double, double> solve_continuous(const ContinuousGame& game, double step) {
  if (game.domain.dim != 1) throw ConfigError("continuous solver implemented for 1-d domains");
  double best_x = game.domain.lo[0], best_v = -1e300;
  for (double x = game.domain.lo[0]; x <= game.domain.hi[0] + 1e-12; x += step) {
    const Vector xv = Vector::Constant(1, x);
    const double v = game.u_principal(xv, game.best_response(xv));
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return {best_v, best_x};
}

}  // namespace csg
