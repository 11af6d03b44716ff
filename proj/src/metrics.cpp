#include "csg/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace csg {

namespace {

constexpr double kZeroActivation = 1e-12;

// Per-bin prefix sums of w, w*p and w*h, indexed 0..T (inclusive).
struct Prefix {
  int n = 0, m = 0;
  long long T = 0;
  std::vector<double> w;    // n * (T+1)
  std::vector<double> wp;   // n * m * (T+1)
  std::vector<double> wh;

  double W(int i, long long t) const { return w[i * (T + 1) + t]; }
  double P(int i, int j, long long t) const { return wp[(i * m + j) * (T + 1) + t]; }
  double H(int i, int j, long long t) const { return wh[(i * m + j) * (T + 1) + t]; }
};

Prefix build_prefix(const Transcript& tr, const BinningSpec& binning, const FiniteGame* game) {
  Prefix pf;
  pf.m = tr.m;
  pf.T = tr.size();
  Vector w0 = bin_weights(binning, game, tr.rows.empty() ? Vector::Zero(tr.m) : tr.rows[0].p);
  pf.n = static_cast<int>(w0.size());
  pf.w.assign(static_cast<size_t>(pf.n) * (pf.T + 1), 0.0);
  pf.wp.assign(static_cast<size_t>(pf.n) * pf.m * (pf.T + 1), 0.0);
  pf.wh.assign(static_cast<size_t>(pf.n) * pf.m * (pf.T + 1), 0.0);
  for (long long t = 1; t <= pf.T; ++t) {
    const auto& row = tr.rows[static_cast<size_t>(t - 1)];
    Vector w = (t == 1) ? w0 : bin_weights(binning, game, row.p);
    for (int i = 0; i < pf.n; ++i) {
      pf.w[i * (pf.T + 1) + t] = pf.w[i * (pf.T + 1) + t - 1] + w[i];
      for (int j = 0; j < pf.m; ++j) {
        const size_t base = (static_cast<size_t>(i) * pf.m + j) * (pf.T + 1);
        pf.wp[base + t] = pf.wp[base + t - 1] + w[i] * row.p[j];
        pf.wh[base + t] = pf.wh[base + t - 1] + w[i] * row.h[j];
      }
    }
  }
  return pf;
}

WindowStats window_from_prefix(const Prefix& pf, long long s, long long t, int bin) {
  WindowStats ws;
  ws.bin = bin;
  ws.s = s;
  ws.t = t;
  ws.n_eff = pf.W(bin, t) - pf.W(bin, s - 1);
  ws.p_bar = Vector::Zero(pf.m);
  ws.h_bar = Vector::Zero(pf.m);
  if (ws.n_eff <= kZeroActivation) {
    ws.n_eff = std::max(ws.n_eff, 0.0);
    return ws;
  }
  double linf = 0.0;
  for (int j = 0; j < pf.m; ++j) {
    ws.p_bar[j] = (pf.P(bin, j, t) - pf.P(bin, j, s - 1)) / ws.n_eff;
    ws.h_bar[j] = (pf.H(bin, j, t) - pf.H(bin, j, s - 1)) / ws.n_eff;
    linf = std::max(linf, std::abs(ws.p_bar[j] - ws.h_bar[j]));
  }
  ws.cal_err = ws.n_eff / static_cast<double>(t - s) * linf;
  return ws;
}

template <typename Fn>
void for_each_window(WindowScheme::Kind kind, long long T, Fn&& fn) {
  switch (kind) {
    case WindowScheme::Kind::FullOnly:
      if (T >= 2) fn(1, T);
      break;
    case WindowScheme::Kind::AllPairs:
      for (long long s = 1; s < T; ++s) {
        for (long long t = s + 1; t <= T; ++t) fn(s, t);
      }
      break;
    case WindowScheme::Kind::Dyadic:
      // Geometric covering: lengths 2, 4, 8, ... with half-length offsets;
      // every window [s, t] is contained in a scheme window of at most
      // twice its length.
      for (long long len = 2;; len *= 2) {
        bool any = false;
        for (long long s = 1; s <= T - 1; s += std::max<long long>(len / 2, 1)) {
          const long long t = std::min(s + len - 1, T);
          if (t > s) {
            fn(s, t);
            any = true;
          }
        }
        if (!any || len >= 2 * T) break;
      }
      break;
  }
}

}  // namespace

WindowStats cal_err_window(const Transcript& tr, const BinningSpec& binning,
                           const FiniteGame* game, long long s, long long t, int bin) {
  if (!(1 <= s && s < t && t <= tr.size())) throw ConfigError("window must satisfy 1 <= s < t <= T");
  WindowStats ws;
  ws.bin = bin;
  ws.s = s;
  ws.t = t;
  const int m = tr.m;
  ws.p_bar = Vector::Zero(m);
  ws.h_bar = Vector::Zero(m);
  double n_eff = 0.0;
  Vector sp = Vector::Zero(m), sh = Vector::Zero(m);
  for (long long tau = s; tau <= t; ++tau) {
    const auto& row = tr.rows[static_cast<size_t>(tau - 1)];
    const Vector w = bin_weights(binning, game, row.p);
    n_eff += w[bin];
    sp += w[bin] * row.p;
    sh += w[bin] * row.h;
  }
  ws.n_eff = n_eff;
  if (n_eff <= kZeroActivation) {
    ws.n_eff = std::max(n_eff, 0.0);
    return ws;
  }
  ws.p_bar = sp / n_eff;
  ws.h_bar = sh / n_eff;
  ws.cal_err = n_eff / static_cast<double>(t - s) * (ws.p_bar - ws.h_bar).lpNorm<Eigen::Infinity>();
  return ws;
}

AdaptiveCalErr adaptive_cal_err(const Transcript& tr, const BinningSpec& binning,
                                const FiniteGame* game, const WindowScheme& scheme) {
  if (tr.size() < 2) throw ConfigError("adaptive_cal_err needs T >= 2");
  const Prefix pf = build_prefix(tr, binning, game);
  AdaptiveCalErr out;
  for_each_window(scheme.kind, pf.T, [&](long long s, long long t) {
    for (int i = 0; i < pf.n; ++i) {
      WindowStats ws = window_from_prefix(pf, s, t, i);
      if (ws.cal_err > out.max_err) {
        out.max_err = ws.cal_err;
        out.worst = ws;
      }
    }
  });
  for (int i = 0; i < pf.n; ++i) out.per_bin_full.push_back(window_from_prefix(pf, 1, pf.T, i));
  return out;
}

double swap_regret(const FiniteGame& game, const Transcript& tr) {
  // h-mass accumulated per played action.
  std::vector<Vector> h_sum(game.k, Vector::Zero(game.m));
  for (const auto& row : tr.rows) {
    const int y = static_cast<int>(row.y);
    if (y < 0 || y >= game.k) throw ConfigError("transcript action out of range");
    h_sum[y] += row.h;
  }
  double regret = 0.0;
  for (int y = 0; y < game.k; ++y) {
    const double played = game.u_agent.col(y).dot(h_sum[y]);
    double best = played;
    for (int yp = 0; yp < game.k; ++yp) {
      best = std::max(best, game.u_agent.col(yp).dot(h_sum[y]));
    }
    regret += best - played;
  }
  return regret;
}

double standard_cal_score(const Transcript& tr, const BinningSpec& binning,
                          const FiniteGame* game) {
  if (tr.size() < 2) return 0.0;
  const Prefix pf = build_prefix(tr, binning, game);
  double score = 0.0;
  for (int i = 0; i < pf.n; ++i) score += window_from_prefix(pf, 1, pf.T, i).cal_err;
  return score;
}

}  // namespace csg
