#pragma once

#include <vector>

#include "csg/binning.hpp"
#include "csg/transcript.hpp"

namespace csg {

struct WindowStats {
  int bin = -1;
  long long s = 0, t = 0;  // 1 <= s < t <= T
  double n_eff = 0.0;
  Vector p_bar, h_bar;
  double cal_err = 0.0;
};

struct WindowScheme {
  enum class Kind { AllPairs, Dyadic, FullOnly };
  Kind kind = Kind::AllPairs;

  // Spec default: exhaustive below 4000 rounds, geometric covering above.
  static WindowScheme default_for(long long T) {
    WindowScheme s;
    s.kind = T <= 4000 ? Kind::AllPairs : Kind::Dyadic;
    return s;
  }
};

// CalErr of bin i over [s, t] per the definition: (n_eff / (t - s)) *
// ||p_bar - h_bar||_inf, with the zero-activation convention cal_err = 0.
WindowStats cal_err_window(const Transcript& tr, const BinningSpec& binning,
                           const FiniteGame* game, long long s, long long t, int bin);

struct AdaptiveCalErr {
  double max_err = 0.0;
  WindowStats worst;
  std::vector<WindowStats> per_bin_full;  // full-window [1, T] stats per bin
};

AdaptiveCalErr adaptive_cal_err(const Transcript& tr, const BinningSpec& binning,
                                const FiniteGame* game, const WindowScheme& scheme);

// max_{pi: A_A -> A_A} sum_t U_A(h_t, pi(y_t)) - sum_t U_A(h_t, y_t),
// computed by per-played-action decomposition.
double swap_regret(const FiniteGame& game, const Transcript& tr);

// Standard l1 calibration score: sum over bins of the full-window CalErr.
double standard_cal_score(const Transcript& tr, const BinningSpec& binning,
                          const FiniteGame* game);

}  // namespace csg
