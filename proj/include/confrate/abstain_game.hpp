#pragma once

// The abstain game. The predictor plays (g, p): on example i it abstains with
// probability p_i at fixed cost alpha, otherwise predicts g_i and pays
// (1/2)(1 - g_i z_i). Nature maximizes the average cost subject to the same
// correlation constraint as the plain game.

#include <cstddef>
#include <optional>

#include "confrate/minimax_game.hpp"
#include "confrate/model.hpp"

namespace confrate {

enum class AbstainRegime {
  kTrivial,      // cheap abstention: always abstain, value alpha
  kNontrivial,   // alpha < 1/2 and abstention does not dominate
  kNoAbstain,    // alpha >= 1/2: reduces to the plain game, p = 0
};

struct AbstainValue {
  double exact = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct AbstainSolution {
  double alpha = 0.0;
  AbstainRegime regime = AbstainRegime::kNontrivial;
  bool trivial = false;
  std::optional<std::size_t> w;           // nontrivial regime only, 1-based
  double budget = 0.0;                    // lambda - ((1-2 alpha)/n) sum |a_i|
  double value_exact = 0.0;
  double value_lower = 0.0;
  double value_upper = 0.0;
  std::optional<double> budget_closed_form;  // see budget_closed_form_value
  AbstainStrategy p_alg{{0.0}, 1.0};
  std::size_t v = 0;                      // threshold of the plain game
  std::optional<std::size_t> v2;          // threshold under the abstain ordering
  double loss_formula = 0.0;              // abstain_loss_bound
  double loss_no_abstain = 0.0;           // L_n
  double loss_abstain = 0.0;              // L_a
};

/// alpha <= (1/2)(1 - n lambda / sum |a_i|). Throws kInvalidCost for alpha <= 0.
bool is_trivial(const VoteProfile& profile, double alpha);

/// Deficit nature must still cover after setting z = (1 - 2 alpha) sgn(a).
double abstain_budget(const VoteProfile& profile, double alpha);

/// Smallest sorted index w (1-based) with
/// (1/n)(sum_{j<=w} |a_j| + (1-2 alpha) sum_{j>w} |a_j|) >= lambda.
/// Requires 0 < alpha < 1/2 and a nontrivial game.
std::size_t find_w(const VoteProfile& profile, double alpha);

/// Exact value from nature's budget greedy, plus the bracketing bounds
/// alpha(1 - w/n) and alpha(1 - (w-1)/n). alpha >= 1/2 is handled by reduction
/// to the plain game: (1 - V)/2 with p = 0.
AbstainValue abstain_value(const VoteProfile& profile, double alpha);

/// Closed-form expression alpha(1 - w/n) + (c n - 2 alpha sum_{j<w}|a_j|)/(2 n |a_w|)
/// as printed in the published derivation. It does not match the greedy value
/// in general and is kept only so reports can show both.
double budget_closed_form_value(const VoteProfile& profile, double alpha);

/// Near-optimal abstain rule: 1 - |g*| for alpha < 1/2, zero otherwise.
/// Does not depend on alpha inside either regime.
AbstainStrategy near_optimal_abstain(const VoteProfile& profile, double alpha);

/// (1/n) sum [p_i alpha + (1/2)(1 - p_i)(1 - g_i z_i)]
double abstain_loss(const PredictionVector& g, const AbstainStrategy& p, const LabelVector& z);

/// Stated worst-case loss of (g*, near_optimal_abstain):
/// (1/2)(1 - v/n) for alpha >= 1/2, otherwise
/// alpha(1 - v/n) + (1/2 - alpha)(1/n) sum_{i>v} |a_i|/|a_v|.
double abstain_loss_bound(const VoteProfile& profile, double alpha);

struct AbstentionBenefit {
  double loss_no_abstain;     // L_n = (1/2)(1 - (v-1)/n)
  double loss_abstain;        // L_a
  double difference;          // L_n - L_a
  double closed_form_difference; // (1/n) sum_{i>v}(1/2-alpha)(1-|a_i|/|a_v|) - 1/(2n)
};

AbstentionBenefit benefit_of_abstention(const VoteProfile& profile, double alpha);

struct InnerGameValue {
  std::size_t v2;  // 1-based, abstain ordering
  double value;
};

/// Value of max_g min_z (1/n) sum z_i (1 - p_i) g_i for a fixed abstain
/// strategy, computed under the abstain-aware ordering.
InnerGameValue inner_game_value(const VoteProfile& profile, const AbstainStrategy& strategy);

AbstainSolution solve_abstain(const VoteProfile& profile, double alpha);

}  // namespace confrate
