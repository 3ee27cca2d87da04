#include "confrate/abstain_game.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace confrate {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidCost, "abstain cost alpha must be positive");
  }
}

double count(const VoteProfile& profile) { return static_cast<double>(profile.size()); }

}  // namespace

bool is_trivial(const VoteProfile& profile, double alpha) {
  return abstain_budget(profile, alpha) <= 0.0;
}

double abstain_budget(const VoteProfile& profile, double alpha) {
  check_alpha(alpha);
  return profile.lambda() - (1.0 - 2.0 * alpha) * profile.total_magnitude() / count(profile);
}

std::size_t find_w(const VoteProfile& profile, double alpha) {
  check_alpha(alpha);
  if (alpha >= 0.5 || is_trivial(profile, alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "w is defined only for nontrivial games with alpha < 1/2");
  }
  const std::size_t n = profile.size();
  const double total = profile.total_magnitude();
  for (std::size_t i = 1; i <= n; ++i) {
    const double head = profile.prefix_magnitude(i);
    const double tail = total - head;
    if ((head + (1.0 - 2.0 * alpha) * tail) / count(profile) >= profile.lambda()) {
      return i;
    }
  }
  return n;
}

AbstainValue abstain_value(const VoteProfile& profile, double alpha) {
  check_alpha(alpha);
  if (is_trivial(profile, alpha)) {
    return {alpha, alpha, alpha};
  }
  if (alpha >= 0.5) {
    const double v = 0.5 * (1.0 - game_value(profile));
    return {v, v, v};
  }

  const std::size_t n = profile.size();
  const double dn = count(profile);
  // Nature starts every |z_i| at 1 - 2 alpha (free), then buys the remaining
  // deficit by raising |z_i| to 1 in descending |a_i| order.
  std::vector<double> magnitude(n, 1.0 - 2.0 * alpha);
  double remaining = abstain_budget(profile, alpha) * dn;
  for (std::size_t k = 0; k < n && remaining > 0.0; ++k) {
    const double a = profile.sorted_magnitude(k);
    if (a == 0.0) {
      break;
    }
    const double room = 2.0 * alpha * a;
    if (room < remaining) {
      magnitude[k] = 1.0;
      remaining -= room;
    } else {
      magnitude[k] = std::min(1.0, 1.0 - 2.0 * alpha + remaining / a);
      remaining = 0.0;
    }
  }
  CompensatedSum gain;
  for (double m : magnitude) {
    gain.add(std::min(alpha, 0.5 * (1.0 - m)));
  }

  const std::size_t w = find_w(profile, alpha);
  AbstainValue out;
  out.exact = gain.value() / dn;
  out.lower = alpha * (1.0 - static_cast<double>(w) / dn);
  out.upper = alpha * (1.0 - static_cast<double>(w - 1) / dn);
  if (out.exact < out.lower - kSolverTolerance || out.exact > out.upper + kSolverTolerance) {
    throw std::logic_error("abstain value " + std::to_string(out.exact) +
                           " escaped its bracket [" + std::to_string(out.lower) + ", " +
                           std::to_string(out.upper) + "]");
  }
  return out;
}

double budget_closed_form_value(const VoteProfile& profile, double alpha) {
  const std::size_t w = find_w(profile, alpha);
  const double dn = count(profile);
  const double c = abstain_budget(profile, alpha);
  return alpha * (1.0 - static_cast<double>(w) / dn) +
         (c * dn - 2.0 * alpha * profile.prefix_magnitude(w - 1)) /
             (2.0 * dn * profile.sorted_magnitude(w - 1));
}

AbstainStrategy near_optimal_abstain(const VoteProfile& profile, double alpha) {
  check_alpha(alpha);
  std::vector<double> p(profile.size(), 0.0);
  if (alpha < 0.5) {
    const std::size_t v = find_threshold(profile);
    const double pivot = profile.sorted_magnitude(v - 1);
    for (std::size_t k = v; k < profile.size(); ++k) {
      p[profile.order()[k]] = 1.0 - profile.sorted_magnitude(k) / pivot;
    }
  }
  return AbstainStrategy(std::move(p), alpha);
}

double abstain_loss(const PredictionVector& g, const AbstainStrategy& p, const LabelVector& z) {
  if (g.size() != p.size() || g.size() != z.size() || g.size() == 0) {
    throw Error(ErrorCode::kDimension, "strategy and label vectors differ in length");
  }
  CompensatedSum loss;
  for (std::size_t i = 0; i < g.size(); ++i) {
    loss.add(p[i] * p.alpha() + 0.5 * (1.0 - p[i]) * (1.0 - g[i] * z[i]));
  }
  return loss.value() / static_cast<double>(g.size());
}

double abstain_loss_bound(const VoteProfile& profile, double alpha) {
  check_alpha(alpha);
  const std::size_t v = find_threshold(profile);
  const double dn = count(profile);
  const double committed = 1.0 - static_cast<double>(v) / dn;
  if (alpha >= 0.5) {
    return 0.5 * committed;
  }
  const double pivot = profile.sorted_magnitude(v - 1);
  CompensatedSum ratios;
  for (std::size_t k = v; k < profile.size(); ++k) {
    ratios.add(profile.sorted_magnitude(k) / pivot);
  }
  return alpha * committed + (0.5 - alpha) * ratios.value() / dn;
}

AbstentionBenefit benefit_of_abstention(const VoteProfile& profile, double alpha) {
  check_alpha(alpha);
  const std::size_t v = find_threshold(profile);
  const double dn = count(profile);
  const double pivot = profile.sorted_magnitude(v - 1);

  AbstentionBenefit out{};
  out.loss_no_abstain = 0.5 * (1.0 - static_cast<double>(v - 1) / dn);
  double disagreement = 0.0;
  if (alpha < 0.5) {
    CompensatedSum sum;
    for (std::size_t k = v; k < profile.size(); ++k) {
      sum.add((0.5 - alpha) * (1.0 - profile.sorted_magnitude(k) / pivot));
    }
    disagreement = sum.value() / dn;
  }
  out.loss_abstain = 0.5 * (1.0 - static_cast<double>(v) / dn) - disagreement;
  out.difference = out.loss_no_abstain - out.loss_abstain;
  out.closed_form_difference = disagreement - 0.5 / dn;
  return out;
}

InnerGameValue inner_game_value(const VoteProfile& profile, const AbstainStrategy& strategy) {
  const AbstainOrdering ordering = abstain_order_keys(profile.votes(), strategy);
  const auto votes = profile.votes();
  const double dn = count(profile);
  const double lambda = profile.lambda();

  CompensatedSum prefix;
  CompensatedSum kept;
  for (std::size_t k = 0; k < ordering.order.size(); ++k) {
    const std::size_t i = ordering.order[k];
    const double before = prefix.value();
    prefix.add(std::abs(votes[i]));
    if (prefix.value() / dn >= lambda) {
      const double value =
          kept.value() / dn + (1.0 - strategy[i]) / std::abs(votes[i]) * (lambda - before / dn);
      return {k + 1, value};
    }
    kept.add(1.0 - strategy[i]);
  }
  throw Error(ErrorCode::kInfeasibleConstraint, "lambda exceeds mean |a|");
}

AbstainSolution solve_abstain(const VoteProfile& profile, double alpha) {
  check_alpha(alpha);
  AbstainSolution s;
  s.alpha = alpha;
  s.trivial = is_trivial(profile, alpha);
  s.regime = s.trivial ? AbstainRegime::kTrivial
                       : (alpha >= 0.5 ? AbstainRegime::kNoAbstain : AbstainRegime::kNontrivial);
  s.budget = abstain_budget(profile, alpha);
  const AbstainValue value = abstain_value(profile, alpha);
  s.value_exact = value.exact;
  s.value_lower = value.lower;
  s.value_upper = value.upper;
  if (s.regime == AbstainRegime::kNontrivial) {
    s.w = find_w(profile, alpha);
    s.budget_closed_form = budget_closed_form_value(profile, alpha);
  }
  s.p_alg = s.trivial ? AbstainStrategy(std::vector<double>(profile.size(), 1.0), alpha)
                      : near_optimal_abstain(profile, alpha);
  s.v = find_threshold(profile);
  const bool keys_defined = std::all_of(s.p_alg.values().begin(), s.p_alg.values().end(),
                                        [](double p) { return p < kAbstainCeiling; });
  if (keys_defined) {
    s.v2 = inner_game_value(profile, s.p_alg).v2;
  }
  s.loss_formula = abstain_loss_bound(profile, alpha);
  const AbstentionBenefit benefit = benefit_of_abstention(profile, alpha);
  s.loss_no_abstain = benefit.loss_no_abstain;
  s.loss_abstain = benefit.loss_abstain;
  return s;
}

}  // namespace confrate
