#pragma once

#include <functional>
#include <vector>

#include "csg/common.hpp"
#include "csg/game.hpp"

namespace csg {

// A binning is a finite partition of unity over forecasts (weights >= 0
// summing to 1 at every point).  BR-based kinds bin by the induced best
// response of the attached finite game; tent_grid is the continuous-domain
// binning over an eps-grid of centers.
struct BinningSpec {
  enum class Kind { DeterministicBR, RandomizedBR, TentGrid, Explicit };
  Kind kind = Kind::DeterministicBR;
  int n = 0;  // bin count

  // TentGrid only.
  std::vector<Vector> centers;
  double radius = 0.0;

  // Explicit only.
  std::function<Vector(const Vector&)> evaluator;
};

BinningSpec make_br_binning(const FiniteGame& game, bool deterministic);

// Tent value (radius - ||p - x||_2)_+.
double tent(const Vector& p, const Vector& center, double radius);

Vector bin_weights(const BinningSpec& binning, const FiniteGame* game, const Vector& p);

}  // namespace csg
