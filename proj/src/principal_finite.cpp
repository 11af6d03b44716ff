#include "csg/principal_finite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "csg/geometry.hpp"

namespace csg {

double RateModel::operator()(double t) const {
  if (t < 1.0) t = 1.0;
  if (form == Form::LogSqrt) {
    return c * std::sqrt(std::log(std::max(2.0, static_cast<double>(k) * m * t)) / t);
  }
  return c * std::pow(t, -1.0 / beta);
}

long long rate_inverse(const RateModel& rate, double target, long long l_max) {
  if (target <= 0.0) throw ConfigError("rate_inverse target must be > 0");
  if (rate(1.0) <= target) return 1;
  long long hi = 1;
  while (rate(static_cast<double>(hi)) > target) {
    if (hi > l_max) {
      throw BudgetError("rate_inverse exceeds l_max = " + std::to_string(l_max));
    }
    hi *= 2;
  }
  long long lo = hi / 2;  // rate(lo) > target >= rate(hi)
  while (lo + 1 < hi) {
    const long long mid = lo + (hi - lo) / 2;
    if (rate(static_cast<double>(mid)) > target) lo = mid;
    else hi = mid;
  }
  if (hi > l_max) throw BudgetError("rate_inverse exceeds l_max = " + std::to_string(l_max));
  return hi;
}

ApproxMemParams set_params_case(ParamCase which, double eps1, double eps2, double delta,
                                long long T, int m, int k, const RateModel& rate,
                                long long l_max) {
  if (T < 2 || eps2 <= 0.0) throw ConfigError("set_params_case: bad inputs");
  ApproxMemParams p;
  p.eps3 = delta + 1.0 / (static_cast<double>(T) * T);
  const double logT = std::log(static_cast<double>(T));
  switch (which) {
    case ParamCase::I: {
      if (eps1 <= 4.0 * eps2) {
        throw ConfigError("Case I requires eps1 > 4*eps2 (positivity of the epoch factor)");
      }
      p.eps1 = eps1;
      p.eps2 = eps2;
      p.eps_cal = eps2;
      p.radius = eps1 / 2.0;
      p.phi = static_cast<int>(std::ceil(
          10.0 * std::sqrt(m) * std::pow(1.0 - 4.0 * eps2 / eps1, (m - 1) / 2.0) * logT));
      break;
    }
    case ParamCase::II: {
      p.eps1 = eps2;
      p.eps2 = eps2;
      p.eps_cal = 0.1 * eps2;
      p.radius = 1.9 * eps2;
      p.phi = static_cast<int>(std::ceil(std::pow(1.25, m) * logT));
      break;
    }
    case ParamCase::III: {
      if (eps1 <= 0.0) throw ConfigError("Case III requires eps1 > 0");
      p.eps1 = eps1;
      p.eps2 = eps2;
      p.eps_cal = eps1 / 6.0;
      p.radius = (eps2 + eps1 / 6.0) * (1.0 + eps1 / (2.0 * eps2));
      const double phi_f =
          10.0 * std::sqrt(m) * std::pow(eps2 / eps1, m / 2.0) * logT;
      if (phi_f > 1e6) {
        throw BudgetError("Case III epoch count explodes (phi = " + std::to_string(phi_f) + ")");
      }
      p.phi = static_cast<int>(std::ceil(phi_f));
      break;
    }
  }
  p.phi = std::max(p.phi, 1);
  // Condition 1 and the positivity Condition 2 needs (R > eps_cal + eps2);
  // the cases' own Phi formulas stand in for Condition 2's constant.
  if (p.eps1 + p.eps2 - p.radius < p.eps_cal - 1e-12) {
    throw ConfigError("parameter case violates Condition 1");
  }
  if (p.radius <= p.eps_cal + p.eps2) {
    throw ConfigError("parameter case violates Condition 2 positivity (R <= eps_cal + eps2)");
  }
  p.l = rate_inverse(rate, p.eps_cal / (k * std::sqrt(static_cast<double>(m))), l_max);
  return p;
}

ApproxMemResult approx_mem(FiniteEnv& env, std::optional<int> target_y, const Vector& h,
                           const ApproxMemParams& params, RngStream& rng) {
  const int m = env.game().m;
  ApproxMemResult res;
  std::optional<int> label;
  for (int phi = 0; phi < params.phi; ++phi) {
    ProbeRecord rec;
    rec.h_phi = h + sample_sphere_in_hyperplane(rng, m, params.radius);
    if (rec.h_phi.minCoeff() < -kTieTol) {
      rec.left_simplex = true;
      res.probes.push_back(std::move(rec));
      return res;  // "no longer inside the feasible set"
    }
    Vector played = rec.h_phi.cwiseMax(0.0);
    played /= played.sum();
    std::vector<long long> counts(static_cast<size_t>(env.game().k), 0);
    for (long long r = 0; r < params.l; ++r) counts[static_cast<size_t>(env.play(played))]++;
    rec.modal = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    res.probes.push_back(rec);
    if (target_y && rec.modal != *target_y) return res;
    if (!target_y) {
      if (label && *label != rec.modal) return res;  // no unanimous label
      label = rec.modal;
    }
  }
  res.accepted = true;
  res.label = target_y ? target_y : label;
  return res;
}

std::vector<InitPair> build_initialization_set(FiniteEnv& env, const ApproxMemParams& params,
                                               int count, RngStream& rng) {
  std::vector<InitPair> out;
  for (int i = 0; i < count; ++i) {
    const Vector h = sample_simplex_uniform(rng, env.game().m);
    ApproxMemResult res = approx_mem(env, std::nullopt, h, params, rng);
    if (res.accepted && res.label) out.push_back({h, *res.label});
  }
  return out;
}

OptimizeResult optimize_over_membership(const Vector& objective, const MembershipFn& membership,
                                        const Vector& initial, double eps_prime, RngStream& rng,
                                        int max_directions, int bisect_iters) {
  const int m = static_cast<int>(initial.size());
  OptimizeResult res;
  res.point = initial;
  res.value = objective.dot(initial);
  auto query = [&](const Vector& x) {
    ++res.membership_calls;
    return membership(x);
  };
  // The membership oracle is probabilistic; a transient miscalibration can
  // reject even a certified initial point, so retry before flagging and keep
  // searching either way (candidates are only adopted when certified).
  bool initial_ok = false;
  for (int a = 0; a < 3 && !initial_ok; ++a) initial_ok = query(initial);
  res.stagnated = !initial_ok;
  // Gradient direction inside the affine hull; alternate with random equator
  // directions so boundary faces can be walked along.
  Vector grad_dir = objective;
  grad_dir.array() -= grad_dir.mean();
  const double gn = grad_dir.norm();
  if (gn > 1e-12) grad_dir /= gn;
  int consecutive_failures = 0;
  for (int it = 0; it < max_directions; ++it) {
    Vector d = (it % 2 == 0 && gn > 1e-12) ? grad_dir : sample_sphere_in_hyperplane(rng, m, 1.0);
    if (objective.dot(d) < 0.0) d = -d;
    if (objective.dot(d) <= 1e-14) continue;
    // Bisect the membership boundary along d to eps_prime resolution;
    // lo stays feasible.
    double lo = 0.0, hi = 2.0;
    if (query(res.point + hi * d)) {
      lo = hi;  // cannot happen for bounded sets; guard anyway
    } else {
      for (int b = 0; b < bisect_iters && hi - lo > eps_prime; ++b) {
        const double mid = 0.5 * (lo + hi);
        if (query(res.point + mid * d)) lo = mid;
        else hi = mid;
      }
    }
    const Vector cand = res.point + lo * d;
    if (lo > 1e-12 && objective.dot(cand) > res.value + 1e-12) {
      res.point = cand;
      res.value = objective.dot(cand);
      consecutive_failures = 0;
    } else if (++consecutive_failures > m + 2) {
      break;
    }
  }
  return res;
}

namespace {

struct Frac {
  long long num = 0, den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Distinct rationals with denominator <= dmax inside [lo, hi]; enumerating
// only reduced forms keeps the set duplicate-free.
std::vector<Frac> fractions_in(double lo, double hi, long long dmax) {
  std::vector<Frac> out;
  for (long long q = 1; q <= dmax; ++q) {
    const long long a_lo = static_cast<long long>(std::ceil(lo * static_cast<double>(q) - 1e-12));
    const long long a_hi = static_cast<long long>(std::floor(hi * static_cast<double>(q) + 1e-12));
    for (long long a = std::max<long long>(a_lo, 0); a <= a_hi; ++a) {
      if (std::gcd(a, q) == 1 || (a == 0 && q == 1)) out.push_back(Frac{a, q});
    }
  }
  return out;
}

}  // namespace

PostProcessResult post_process(FiniteEnv& env, const Vector& h_tilde, int y_tilde,
                               const PostProcessParams& pp, const RateModel& rate,
                               ParamCase which, double delta, long long T, RngStream& rng) {
  const int m = env.game().m;
  PostProcessResult out;
  out.h = h_tilde;
  if (pp.eta <= 0.0 || pp.h0.size() != m) throw ConfigError("post_process needs eta and h0");
  if (pp.lambda >= pp.eta / 2.0) throw ConfigError("post_process requires lambda < eta/2");
  const long long dmax = 1LL << std::min(2 * m * pp.L, 40);
  const double window = pp.c * std::ldexp(1.0, pp.L) * pp.eps;

  // Enumerate candidate strategies with rational coordinates (denominator
  // <= 2^(2mL)) within the l_inf window of h_tilde, summing to 1 exactly.
  std::vector<std::vector<Frac>> per_coord(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    per_coord[static_cast<size_t>(j)] =
        fractions_in(std::max(0.0, h_tilde[j] - window), std::min(1.0, h_tilde[j] + window), dmax);
  }
  std::vector<Vector> candidates;
  std::vector<int> idx(static_cast<size_t>(m - 1), 0);
  long long visited = 0;
  // Iterate the first m-1 coordinates; the last is forced to 1 - sum.
  std::function<void(int, double)> recurse = [&](int j, double sum) {
    if (visited > pp.enumeration_cap) throw BudgetError("post_process enumeration cap exceeded");
    if (j == m - 1) {
      const double last = 1.0 - sum;
      if (last < std::max(0.0, h_tilde[j] - window) - 1e-12 ||
          last > std::min(1.0, h_tilde[j] + window) + 1e-12) {
        return;
      }
      // Last coordinate must itself be a rational with denominator <= dmax;
      // every candidate here is (since sums of the chosen fractions are).
      Vector h(m);
      double s2 = 0.0;
      for (int jj = 0; jj < m - 1; ++jj) {
        h[jj] = per_coord[static_cast<size_t>(jj)][static_cast<size_t>(idx[static_cast<size_t>(jj)])]
                    .value();
        s2 += h[jj];
      }
      h[m - 1] = 1.0 - s2;
      candidates.push_back(h);
      return;
    }
    for (size_t q = 0; q < per_coord[static_cast<size_t>(j)].size(); ++q) {
      ++visited;
      idx[static_cast<size_t>(j)] = static_cast<int>(q);
      const double v = per_coord[static_cast<size_t>(j)][q].value();
      if (sum + v <= 1.0 + 1e-12) recurse(j + 1, sum + v);
    }
  };
  recurse(0, 0.0);
  std::sort(candidates.begin(), candidates.end(), [&](const Vector& a, const Vector& b) {
    return (a - h_tilde).lpNorm<Eigen::Infinity>() < (b - h_tilde).lpNorm<Eigen::Infinity>();
  });

  const double shrink = 2.0 * pp.lambda / pp.eta;
  // The eps1 = eps2 = lambda/2 queries fit the Case II preset regardless of
  // the case used elsewhere (Case I needs eps1 > 4*eps2).
  (void)which;
  ApproxMemParams mem;
  if (pp.lambda > 0.0) {
    mem = set_params_case(ParamCase::II, pp.lambda / 2.0, pp.lambda / 2.0, delta, T, m,
                          env.game().k, rate);
  } else {
    // lambda = 0 degenerates to a single unperturbed modal-response check,
    // and the shrink map is the identity.
    mem.phi = 1;
    mem.radius = 0.0;
    mem.l = 1;
  }
  for (const Vector& hc : candidates) {
    const Vector q1 = (1.0 - shrink) * hc + shrink * pp.h0;
    ApproxMemResult r = approx_mem(env, y_tilde, q1, mem, rng);
    if (r.accepted) {
      out.h = (1.0 - shrink) * q1 + shrink * pp.h0;
      out.ok = true;
      return out;
    }
  }
  return out;
}

ETCResult explore_then_commit(FiniteEnv& env, const ETCConfig& config, RngStream& rng) {
  const FiniteGame& game = env.game();
  ApproxMemParams params =
      set_params_case(config.which, config.eps1, config.eps2, config.delta, config.T, game.m,
                      game.k, config.rate);
  const double eta = config.eta > 0.0 ? config.eta : 4.0 * config.eps2;
  ApproxMemParams init_params =
      set_params_case(ParamCase::II, eta / 4.0, eta / 4.0, config.delta, config.T, game.m,
                      game.k, config.rate);

  auto remaining_ok = [&](const ApproxMemParams& p) {
    return env.round() + static_cast<long long>(p.phi) * p.l <= config.T;
  };
  if (!remaining_ok(init_params)) throw BudgetError("horizon too short for initialization probes");

  std::vector<InitPair> init;
  for (int i = 0; i < config.init_count && remaining_ok(init_params); ++i) {
    const Vector h = sample_simplex_uniform(rng, game.m);
    ApproxMemResult res = approx_mem(env, std::nullopt, h, init_params, rng);
    if (res.accepted && res.label) init.push_back({h, *res.label});
  }
  if (init.empty()) throw BudgetError("initialization produced no labeled pairs");

  // One optimization per discovered label, from the best initial point.
  std::map<int, Vector> best_initial;
  for (const auto& pr : init) {
    auto it = best_initial.find(pr.y);
    if (it == best_initial.end() ||
        game.u_principal.col(pr.y).dot(pr.h) > game.u_principal.col(pr.y).dot(it->second)) {
      best_initial[pr.y] = pr.h;
    }
  }
  ETCResult out;
  double best_val = -1.0;
  for (const auto& [y, h_init] : best_initial) {
    MembershipFn oracle = [&, y = y](const Vector& h) {
      if (h.minCoeff() < -kTieTol || std::abs(h.sum() - 1.0) > 1e-7) return false;
      if (!remaining_ok(params)) throw BudgetError("explore budget exhausted");
      return approx_mem(env, y, h, params, rng).accepted;
    };
    OptimizeResult opt;
    try {
      opt = optimize_over_membership(game.u_principal.col(y), oracle, h_init, config.eps_prime,
                                     rng, config.max_directions);
    } catch (const BudgetError&) {
      break;  // keep the best committed candidate found so far
    }
    if (opt.stagnated && best_val >= 0.0) continue;
    const double val = game.u_principal.col(y).dot(opt.point);
    if (val > best_val) {
      best_val = val;
      out.h_commit = opt.point;
      out.y_commit = y;
    }
  }
  if (out.y_commit < 0) throw BudgetError("exploration failed to certify any strategy");

  if (config.post) {
    PostProcessParams pp = *config.post;
    if (pp.h0.size() != game.m) pp.h0 = best_initial[out.y_commit];
    if (pp.eta <= 0.0) pp.eta = eta;
    if (pp.eps <= 0.0) pp.eps = config.eps_prime;
    PostProcessResult pr = post_process(env, out.h_commit, out.y_commit, pp, config.rate,
                                        config.which, config.delta, config.T, rng);
    if (pr.ok) out.h_commit = pr.h;
  }

  out.explore_rounds = env.round();
  Vector h_play = project_to_simplex(out.h_commit);
  while (env.round() < config.T) env.play(h_play, 1);
  return out;
}

}  // namespace csg
