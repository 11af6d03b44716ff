#include "csg/binning.hpp"

#include <cmath>

namespace csg {

BinningSpec make_br_binning(const FiniteGame& game, bool deterministic) {
  BinningSpec b;
  b.kind = deterministic ? BinningSpec::Kind::DeterministicBR : BinningSpec::Kind::RandomizedBR;
  b.n = game.k;
  return b;
}

double tent(const Vector& p, const Vector& center, double radius) {
  return std::max(radius - (p - center).norm(), 0.0);
}

Vector bin_weights(const BinningSpec& binning, const FiniteGame* game, const Vector& p) {
  switch (binning.kind) {
    case BinningSpec::Kind::DeterministicBR:
    case BinningSpec::Kind::RandomizedBR: {
      if (game == nullptr) throw ConfigError("BR-based binning needs a game");
      BestResponse br = best_response(*game, p, TieRule::Deterministic);
      Vector w = Vector::Zero(game->k);
      if (binning.kind == BinningSpec::Kind::DeterministicBR) {
        w[br.chosen] = 1.0;
      } else {
        for (int y : br.br_set) w[y] = 1.0 / static_cast<double>(br.br_set.size());
      }
      return w;
    }
    case BinningSpec::Kind::TentGrid: {
      Vector w(static_cast<int>(binning.centers.size()));
      for (int i = 0; i < w.size(); ++i) w[i] = tent(p, binning.centers[i], binning.radius);
      const double total = w.sum();
      if (total <= 0.0) throw ConfigError("tent binning does not cover the queried point");
      return w / total;
    }
    case BinningSpec::Kind::Explicit:
      return binning.evaluator(p);
  }
  throw ConfigError("unknown binning kind");
}

}  // namespace csg
