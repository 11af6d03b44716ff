#include "csg/forecaster.hpp"

#include <algorithm>
#include <cmath>

#include "csg/lp.hpp"

namespace csg {

double anh_weight(double R, double C) {
  const auto phi = [](double r, double c) {
    const double rp = std::max(0.0, r);
    return std::exp(rp * rp / (3.0 * c));
  };
  return 0.5 * (phi(R + 1.0, C + 1.0) - phi(R - 1.0, C + 1.0));
}

double ForecastDistribution::sample(RngStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (size_t j = 0; j < support.size(); ++j) {
    acc += probs[j];
    if (u < acc) return support[j];
  }
  return support.back();
}

ForecastDistribution select_from_grid_z(const std::vector<double>& grid,
                                        const std::vector<double>& z,
                                        double lo, double hi) {
  ForecastDistribution d;
  const size_t G = grid.size();
  double zmin = z[0], zmax = z[0];
  for (double v : z) {
    zmin = std::min(zmin, v);
    zmax = std::max(zmax, v);
  }
  if (std::max(std::abs(zmin), std::abs(zmax)) <= 1e-15) {
    d.support = {grid[G / 2]};
    d.probs = {1.0};
  } else if (zmin >= 0.0) {
    d.support = {grid[G - 1]};
    d.probs = {1.0};
  } else if (zmax <= 0.0) {
    d.support = {grid[0]};
    d.probs = {1.0};
  } else {
    size_t jx = G;  // first adjacent strict sign change
    for (size_t j = 0; j + 1 < G; ++j) {
      if ((z[j] > 0.0 && z[j + 1] < 0.0) || (z[j] < 0.0 && z[j + 1] > 0.0)) {
        jx = j;
        break;
      }
    }
    if (jx == G) {
      // Mixed signs separated by zeros: a zero grid point certifies 0 alone.
      for (size_t j = 0; j < G; ++j) {
        if (z[j] == 0.0) { jx = j; break; }
      }
      d.support = {grid[jx]};
      d.probs = {1.0};
    } else {
      const double q = z[jx + 1] / (z[jx + 1] - z[jx]);
      d.support = {grid[jx], grid[jx + 1]};
      d.probs = {q, 1.0 - q};
    }
  }
  // Exact certification: expected loss is affine in the scalar outcome, so
  // the max over the forecast space is attained at an endpoint.
  double v_lo = 0.0, v_hi = 0.0;
  for (size_t j = 0; j < d.support.size(); ++j) {
    const double p = d.support[j];
    size_t gi = static_cast<size_t>(
        std::lower_bound(grid.begin(), grid.end(), p - 1e-12) - grid.begin());
    v_lo += d.probs[j] * (lo - p) * z[gi];
    v_hi += d.probs[j] * (hi - p) * z[gi];
  }
  d.certified_value = std::max(v_lo, v_hi);
  return d;
}

ScalarForecaster::ScalarForecaster(Config cfg, int n_bins, WeightFn weights)
    : cfg_(cfg), n_(n_bins), weights_(std::move(weights)) {
  if (cfg_.grid_step <= 0.0 || cfg_.grid_step > cfg_.hi - cfg_.lo) {
    throw ConfigError("invalid forecaster grid step");
  }
  const int steps = static_cast<int>(std::round((cfg_.hi - cfg_.lo) / cfg_.grid_step));
  for (int q = 0; q <= steps; ++q) {
    grid_.push_back(cfg_.lo + (cfg_.hi - cfg_.lo) * q / steps);
  }
  grid_w_.resize(n_, static_cast<int>(grid_.size()));
  for (size_t q = 0; q < grid_.size(); ++q) {
    Vector w = weights_(grid_[q]);
    if (w.size() != n_) throw ConfigError("binning weight size mismatch");
    grid_w_.col(static_cast<int>(q)) = w;
  }
  materialize_cohorts();
}

void ScalarForecaster::materialize_cohorts() {
  const long long next_round = t_ + 1;
  auto want = [&](long long s) {
    if (cfg_.start_scheme == StartScheme::EveryRound) return true;
    return (s & (s - 1)) == 0;  // powers of two
  };
  long long s = starts_.empty() ? 1 : starts_.back() + 1;
  for (; s <= next_round; ++s) {
    if (want(s)) {
      starts_.push_back(static_cast<int>(s));
      stats_.emplace_back(2 * n_);
    }
  }
}

void ScalarForecaster::refresh_coeffs() const {
  coeff_.assign(n_, 0.0);
  const long long now = t_ + 1;
  double norm = 0.0;
  std::vector<double> signed_sum(n_, 0.0);
  for (size_t c = 0; c < starts_.size(); ++c) {
    if (starts_[c] > now) break;
    const double prior = 1.0 / (static_cast<double>(starts_[c]) * starts_[c]);
    for (int i = 0; i < n_; ++i) {
      const double wp = prior * anh_weight(stats_[c][2 * i].R, stats_[c][2 * i].C);
      const double wm = prior * anh_weight(stats_[c][2 * i + 1].R, stats_[c][2 * i + 1].C);
      norm += wp + wm;
      signed_sum[i] += wp - wm;
    }
  }
  if (norm > 0.0) {
    for (int i = 0; i < n_; ++i) coeff_[i] = signed_sum[i] / norm;
  }
  // norm == 0: prior fallback is sigma-symmetric, so all D_i = 0.
  coeff_dirty_ = false;
}

double ScalarForecaster::compute_z(double p) const {
  if (coeff_dirty_) refresh_coeffs();
  Vector w = weights_(p);
  double z = 0.0;
  for (int i = 0; i < n_; ++i) z += w[i] * coeff_[i];
  return z;
}

std::vector<double> ScalarForecaster::pi() const {
  const long long now = t_ + 1;
  std::vector<double> out;
  double norm = 0.0;
  for (size_t c = 0; c < starts_.size(); ++c) {
    if (starts_[c] > now) break;
    const double prior = 1.0 / (static_cast<double>(starts_[c]) * starts_[c]);
    for (int e = 0; e < 2 * n_; ++e) {
      const double w = prior * anh_weight(stats_[c][e].R, stats_[c][e].C);
      out.push_back(w);
      norm += w;
    }
  }
  if (norm <= 0.0) {
    // All ANH weights vanished: fall back to the prior over awake experts.
    size_t idx = 0;
    for (size_t c = 0; c < starts_.size() && starts_[c] <= now; ++c) {
      const double prior = 1.0 / (static_cast<double>(starts_[c]) * starts_[c]);
      for (int e = 0; e < 2 * n_; ++e) {
        out[idx++] = prior;
        norm += prior;
      }
    }
  }
  for (double& v : out) v /= norm;
  return out;
}

double ScalarForecaster::step(RngStream& rng) {
  if (awaiting_observe_) throw ConfigError("step called twice without observe");
  if (coeff_dirty_) refresh_coeffs();
  std::vector<double> z(grid_.size());
  for (size_t q = 0; q < grid_.size(); ++q) {
    double v = 0.0;
    for (int i = 0; i < n_; ++i) v += grid_w_(i, static_cast<int>(q)) * coeff_[i];
    z[q] = v;
  }
  last_dist_ = select_from_grid_z(grid_, z, cfg_.lo, cfg_.hi);
  if (last_dist_.certified_value > cfg_.eps_nrbr + 1e-12) {
    throw ConfigError("NRBR certification failed: achieved " +
                      std::to_string(last_dist_.certified_value));
  }
  last_p_ = last_dist_.sample(rng);
  last_grid_idx_ = static_cast<int>(
      std::lower_bound(grid_.begin(), grid_.end(), last_p_ - 1e-12) - grid_.begin());
  last_z_ = z[static_cast<size_t>(last_grid_idx_)];
  awaiting_observe_ = true;
  return last_p_;
}

void ScalarForecaster::observe(double h_scalar) {
  if (!awaiting_observe_) throw ConfigError("observe called before step");
  const double diff = h_scalar - last_p_;
  const double l_hat = diff * last_z_;
  // Per-(bin, sigma) instantaneous regrets r = l_g - l_hat; identical across
  // cohorts, so compute once and add to every awake cohort.
  std::vector<double> r(2 * n_);
  for (int i = 0; i < n_; ++i) {
    const double l = grid_w_(i, last_grid_idx_) * diff;  // sigma = +1
    r[2 * i] = l - l_hat;
    r[2 * i + 1] = -l - l_hat;
  }
  const long long now = t_ + 1;
  for (size_t c = 0; c < starts_.size(); ++c) {
    if (starts_[c] > now) break;
    auto& st = stats_[c];
    for (int e = 0; e < 2 * n_; ++e) {
      st[e].R += r[e];
      st[e].C += std::abs(r[e]);
    }
  }
  ++t_;
  awaiting_observe_ = false;
  coeff_dirty_ = true;
  materialize_cohorts();
}

std::vector<ScalarForecaster::ExpertView> ScalarForecaster::experts() const {
  std::vector<ExpertView> out;
  for (size_t c = 0; c < starts_.size(); ++c) {
    for (int i = 0; i < n_; ++i) {
      for (int sg = 0; sg < 2; ++sg) {
        ExpertView v;
        v.id = {starts_[c], i, 0, sg == 0 ? +1 : -1};
        v.stat = stats_[c][2 * i + sg];
        out.push_back(v);
      }
    }
  }
  return out;
}

double ScalarForecaster::regret_constant(int k_actions, int m_actions) const {
  double worst = 0.0;
  const double logterm = std::log(std::max(2.0, static_cast<double>(k_actions) * m_actions *
                                                     static_cast<double>(t_)));
  for (size_t c = 0; c < starts_.size(); ++c) {
    if (starts_[c] > t_) break;
    const double span = static_cast<double>(t_ - starts_[c] + 1);
    const double denom = std::sqrt(span * logterm);
    for (const auto& st : stats_[c]) worst = std::max(worst, st.R / denom);
  }
  return worst;
}

double expert_loss(const ExpertId& g, const Vector& h, const Vector& p,
                   const BinningSpec& binning, const FiniteGame* game) {
  const Vector w = bin_weights(binning, game, p);
  return w[g.i] * static_cast<double>(g.sigma) * (h[g.j] - p[g.j]);
}

namespace {

std::vector<Vector> simplex_grid(int m, double step) {
  if (m > 3) throw ConfigError("simplex grid supported for m <= 3 only");
  const int steps = static_cast<int>(std::round(1.0 / step));
  std::vector<Vector> out;
  if (m == 2) {
    for (int a = 0; a <= steps; ++a) {
      Vector p(2);
      p << static_cast<double>(a) / steps, static_cast<double>(steps - a) / steps;
      out.push_back(p);
    }
  } else {
    for (int a = 0; a <= steps; ++a) {
      for (int b = 0; a + b <= steps; ++b) {
        Vector p(3);
        p << static_cast<double>(a) / steps, static_cast<double>(b) / steps,
            static_cast<double>(steps - a - b) / steps;
        out.push_back(p);
      }
    }
  }
  return out;
}

}  // namespace

SimplexLPForecaster::SimplexLPForecaster(Config cfg, const FiniteGame& game,
                                         bool deterministic_binning)
    : cfg_(cfg), game_(game), binning_(make_br_binning(game, deterministic_binning)) {
  grid_ = simplex_grid(game.m, cfg_.grid_step);
  grid_w_.resize(game.k, static_cast<int>(grid_.size()));
  for (size_t q = 0; q < grid_.size(); ++q) {
    grid_w_.col(static_cast<int>(q)) = bin_weights(binning_, &game_, grid_[q]);
  }
  starts_.push_back(1);
  stats_.emplace_back(static_cast<size_t>(game.k) * game.m * 2);
}

Vector SimplexLPForecaster::step(RngStream& rng) {
  const int k = game_.k, m = game_.m;
  const long long now = t_ + 1;
  // D_{i,j} from the ANH distribution over awake experts.
  Matrix D = Matrix::Zero(k, m);
  double norm = 0.0;
  for (size_t c = 0; c < starts_.size(); ++c) {
    if (starts_[c] > now) break;
    const double prior = 1.0 / (static_cast<double>(starts_[c]) * starts_[c]);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m; ++j) {
        const size_t base = (static_cast<size_t>(i) * m + j) * 2;
        const double wp = prior * anh_weight(stats_[c][base].R, stats_[c][base].C);
        const double wm = prior * anh_weight(stats_[c][base + 1].R, stats_[c][base + 1].C);
        norm += wp + wm;
        D(i, j) += wp - wm;
      }
    }
  }
  if (norm > 0.0) D /= norm;
  else D.setZero();

  // Zero-sum LP: min over Q in Delta(grid) of max over simplex vertices of
  // the expected expert loss.  Variables (Q, vbar) with v = vbar - 1.
  const int N = static_cast<int>(grid_.size());
  Matrix A(m, N);  // A(u, q) = E_g[l(e_u, p_q)]
  for (int q = 0; q < N; ++q) {
    const Vector& p = grid_[static_cast<size_t>(q)];
    for (int u = 0; u < m; ++u) {
      double v = 0.0;
      for (int i = 0; i < k; ++i) {
        double inner = 0.0;
        for (int j = 0; j < m; ++j) inner += D(i, j) * ((u == j ? 1.0 : 0.0) - p[j]);
        v += grid_w_(i, q) * inner;
      }
      A(u, q) = v;
    }
  }
  Vector c = Vector::Zero(N + 1);
  c[N] = -1.0;  // maximize -vbar
  Matrix eq(1, N + 1);
  eq.setZero();
  eq.leftCols(N).setOnes();
  Vector beq(1);
  beq << 1.0;
  Matrix aub(m, N + 1);
  aub.leftCols(N) = A;
  aub.col(N).setConstant(-1.0);
  Vector bub = Vector::Constant(m, -1.0);  // sum A Q - vbar <= -1
  LpResult lp = solve_lp(c, eq, beq, aub, bub);
  if (lp.status != LpResult::Status::Optimal) throw ConfigError("NRBR LP failed");
  last_certified_ = lp.x[N] - 1.0;
  if (last_certified_ > cfg_.eps_nrbr + 1e-9) {
    throw ConfigError("NRBR certification failed (grid too coarse): achieved " +
                      std::to_string(last_certified_));
  }
  const double u = rng.uniform();
  double acc = 0.0;
  last_grid_idx_ = N - 1;
  for (int q = 0; q < N; ++q) {
    acc += lp.x[q];
    if (u < acc) {
      last_grid_idx_ = q;
      break;
    }
  }
  last_p_ = grid_[static_cast<size_t>(last_grid_idx_)];
  return last_p_;
}

void SimplexLPForecaster::observe(const Vector& h) {
  const int k = game_.k, m = game_.m;
  const Vector w = grid_w_.col(last_grid_idx_);
  const long long now = t_ + 1;
  // l_hat via the same pi used in step (recomputed; round sizes are small).
  double norm = 0.0, l_hat_num = 0.0;
  for (size_t c = 0; c < starts_.size(); ++c) {
    if (starts_[c] > now) break;
    const double prior = 1.0 / (static_cast<double>(starts_[c]) * starts_[c]);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m; ++j) {
        const size_t base = (static_cast<size_t>(i) * m + j) * 2;
        const double wp = prior * anh_weight(stats_[c][base].R, stats_[c][base].C);
        const double wm = prior * anh_weight(stats_[c][base + 1].R, stats_[c][base + 1].C);
        norm += wp + wm;
        l_hat_num += (wp - wm) * w[i] * (h[j] - last_p_[j]);
      }
    }
  }
  const double l_hat = norm > 0.0 ? l_hat_num / norm : 0.0;
  std::vector<double> r(static_cast<size_t>(k) * m * 2);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < m; ++j) {
      const double l = w[i] * (h[j] - last_p_[j]);
      r[(static_cast<size_t>(i) * m + j) * 2] = l - l_hat;
      r[(static_cast<size_t>(i) * m + j) * 2 + 1] = -l - l_hat;
    }
  }
  for (size_t c = 0; c < starts_.size(); ++c) {
    if (starts_[c] > now) break;
    for (size_t e = 0; e < r.size(); ++e) {
      stats_[c][e].R += r[e];
      stats_[c][e].C += std::abs(r[e]);
    }
  }
  ++t_;
  const long long next = t_ + 1;
  const bool dyadic = cfg_.start_scheme == StartScheme::Dyadic;
  if (!dyadic || (next & (next - 1)) == 0) {
    starts_.push_back(static_cast<int>(next));
    stats_.emplace_back(static_cast<size_t>(k) * m * 2);
  }
}

}  // namespace csg
