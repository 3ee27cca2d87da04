#pragma once

// The confidence-rated prediction game: the predictor picks g in [-1,1]^n to
// maximize the worst-case correlation (1/n) z.g against any labeling z in
// [-1,1]^n with (1/n) z.a >= lambda.

#include <cstddef>

#include "confrate/model.hpp"

namespace confrate {

struct GameSolution {
  std::size_t v = 0;          // 1-based threshold in sorted order
  double value = 0.0;         // game value V
  PredictionVector g_star;    // original example order
  LabelVector z_star;         // original example order
  double lower_bound = 0.0;   // lambda + (1/n) sum_{i<v} (1 - |a_i|)
};

/// Smallest sorted index v (1-based) with (1/n) sum_{j<=v} |a_j| >= lambda.
std::size_t find_threshold(const VoteProfile& profile);

double game_value(const VoteProfile& profile);

/// sgn(a_i) on the v most confident examples, a_i/|a_v| elsewhere.
PredictionVector optimal_predictor(const VoteProfile& profile);

/// Nature's canonical minimax labeling: sgn(a_i) before v, the fractional
/// binding value at v, zero after.
LabelVector optimal_nature(const VoteProfile& profile);

/// Nature's labeling built by the sequential greedy procedure: repeatedly pick
/// the unused example of largest |a|, saturate it, and stop with a fractional
/// step once the correlation constraint is met. Works from the raw votes and
/// does not reuse the profile's ordering.
LabelVector nature_sequential_greedy(const VoteProfile& profile);

/// lambda + (1/n) sum_{i<v} (1 - |a_i|), a lower bound on the game value.
double value_lower_bound(const VoteProfile& profile);

GameSolution solve_game(const VoteProfile& profile);

}  // namespace confrate
