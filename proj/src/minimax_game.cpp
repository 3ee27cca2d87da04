#include "confrate/minimax_game.hpp"

#include <algorithm>

namespace confrate {

std::size_t find_threshold(const VoteProfile& profile) {
  const std::size_t n = profile.size();
  const double dn = static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    if (profile.prefix_magnitude(k) / dn >= profile.lambda()) {
      return k;
    }
  }
  // sort_profile rejects infeasible lambda, so the full sum always qualifies.
  return n;
}

double game_value(const VoteProfile& profile) {
  const std::size_t v = find_threshold(profile);
  const double dn = static_cast<double>(profile.size());
  const double remainder = profile.lambda() - profile.prefix_magnitude(v - 1) / dn;
  return static_cast<double>(v - 1) / dn + remainder / profile.sorted_magnitude(v - 1);
}

PredictionVector optimal_predictor(const VoteProfile& profile) {
  const std::size_t v = find_threshold(profile);
  const double pivot = profile.sorted_magnitude(v - 1);
  std::vector<double> g(profile.size());
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const double a = profile.sorted_vote(k);
    g[profile.order()[k]] = k < v ? sign_of(a) : a / pivot;
  }
  return PredictionVector(std::move(g));
}

LabelVector optimal_nature(const VoteProfile& profile) {
  const std::size_t v = find_threshold(profile);
  const double dn = static_cast<double>(profile.size());
  std::vector<double> z(profile.size(), 0.0);
  for (std::size_t k = 0; k + 1 < v; ++k) {
    z[profile.order()[k]] = sign_of(profile.sorted_vote(k));
  }
  const double a_v = profile.sorted_vote(v - 1);
  const double z_v = (dn * profile.lambda() - profile.prefix_magnitude(v - 1)) / a_v;
  z[profile.order()[v - 1]] = std::clamp(z_v, -1.0, 1.0);
  return LabelVector(std::move(z));
}

LabelVector nature_sequential_greedy(const VoteProfile& profile) {
  const auto votes = profile.votes();
  const std::size_t n = votes.size();
  const double dn = static_cast<double>(n);
  const double lambda = profile.lambda();

  std::vector<double> z(n, 0.0);
  std::vector<bool> used(n, false);
  CompensatedSum working;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && (pick == n || std::abs(votes[j]) > std::abs(votes[pick]))) {
        pick = j;
      }
    }
    used[pick] = true;
    working.add(std::abs(votes[pick]));
    const double a = votes[pick];
    if (working.value() / dn < lambda) {
      z[pick] = sign_of(a);
      continue;
    }
    z[pick] = std::clamp(sign_of(a) - (working.value() - dn * lambda) / a, -1.0, 1.0);
    break;
  }
  return LabelVector(std::move(z));
}

double value_lower_bound(const VoteProfile& profile) {
  const std::size_t v = find_threshold(profile);
  CompensatedSum slack;
  for (std::size_t k = 0; k + 1 < v; ++k) {
    slack.add(1.0 - profile.sorted_magnitude(k));
  }
  return profile.lambda() + slack.value() / static_cast<double>(profile.size());
}

GameSolution solve_game(const VoteProfile& profile) {
  GameSolution s;
  s.v = find_threshold(profile);
  s.value = game_value(profile);
  s.g_star = optimal_predictor(profile);
  s.z_star = optimal_nature(profile);
  s.lower_bound = value_lower_bound(profile);
  return s;
}

}  // namespace confrate
