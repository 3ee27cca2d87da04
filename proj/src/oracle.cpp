#include "confrate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "confrate/random.hpp"

namespace confrate {

namespace {

constexpr double kFeasibilitySlack = 1e-12;

double dot(std::span<const double> x, std::span<const double> y) {
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.add(x[i] * y[i]);
  }
  return s.value();
}

double feasibility_slack(std::span<const double> a, double b) {
  double scale = std::abs(b);
  for (double x : a) {
    scale += std::abs(x);
  }
  return kFeasibilitySlack * std::max(1.0, scale);
}

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    r *= base;
  }
  return r;
}

}  // namespace

void BoxLpProblem::validate() const {
  if (costs.empty() || costs.size() != constraint_coeffs.size()) {
    throw Error(ErrorCode::kDimension, "box LP needs matching, nonempty cost and constraint vectors");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(costs.begin(), costs.end(), finite) ||
      !std::all_of(constraint_coeffs.begin(), constraint_coeffs.end(), finite) ||
      !std::isfinite(constraint_rhs)) {
    throw Error(ErrorCode::kInvalidArgument, "box LP entries must be finite");
  }
}

BoxLpSolution lp_best_response(const BoxLpProblem& problem) {
  problem.validate();
  const auto& c = problem.costs;
  const auto& a = problem.constraint_coeffs;
  const double b = problem.constraint_rhs;
  const std::size_t n = c.size();

  CompensatedSum reach;
  for (double x : a) {
    reach.add(std::abs(x));
  }
  if (reach.value() < b - feasibility_slack(a, b)) {
    throw Error(ErrorCode::kInfeasibleConstraint, "box LP constraint cannot be met");
  }

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = c[i] != 0.0 ? -sign_of(c[i]) : sign_of(a[i]);
  }

  double progress = dot(a, z);
  if (progress < b) {
    std::vector<std::size_t> movable;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] != 0.0 && z[i] != sign_of(a[i])) {
        movable.push_back(i);
      }
    }
    auto ratio = [&](std::size_t i) { return c[i] * sign_of(a[i]) / std::abs(a[i]); };
    std::stable_sort(movable.begin(), movable.end(),
                     [&](std::size_t l, std::size_t r) { return ratio(l) < ratio(r); });
    for (std::size_t i : movable) {
      const double deficit = b - progress;
      if (deficit <= 0.0) {
        break;
      }
      const double room = std::abs(sign_of(a[i]) - z[i]) * std::abs(a[i]);
      if (room <= deficit) {
        z[i] = sign_of(a[i]);
        progress += room;
      } else {
        z[i] = std::clamp(z[i] + sign_of(a[i]) * deficit / std::abs(a[i]), -1.0, 1.0);
        progress = b;
      }
    }
  }
  return {z, dot(c, z)};
}

BoxLpSolution enumerate_box_lp(const BoxLpProblem& problem) {
  problem.validate();
  const std::size_t n = problem.costs.size();
  if (n > 16) {
    throw Error(ErrorCode::kInvalidArgument, "vertex enumeration is limited to n <= 16");
  }
  const auto& a = problem.constraint_coeffs;
  const double b = problem.constraint_rhs;
  const double slack = feasibility_slack(a, b);

  BoxLpSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& z) {
    if (dot(a, z) < b - slack) {
      return;
    }
    const double obj = dot(problem.costs, z);
    if (obj < best.objective) {
      best.objective = obj;
      best.z = z;
    }
  };

  std::vector<double> z(n);
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = (mask >> i) & 1U ? 1.0 : -1.0;
    }
    consider(z);
  }
  // Edges of the box cut by the hyperplane a.z = b.
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] == 0.0) {
      continue;
    }
    for (std::size_t mask = 0; mask < corners; ++mask) {
      if ((mask >> k) & 1U) {
        continue;
      }
      CompensatedSum rest;
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = (mask >> i) & 1U ? 1.0 : -1.0;
        if (i != k) {
          rest.add(a[i] * z[i]);
        }
      }
      const double zk = (b - rest.value()) / a[k];
      if (std::abs(zk) > 1.0 + kFeasibilitySlack) {
        continue;
      }
      z[k] = std::clamp(zk, -1.0, 1.0);
      consider(z);
    }
  }
  if (!std::isfinite(best.objective)) {
    throw Error(ErrorCode::kInfeasibleConstraint, "box LP constraint cannot be met");
  }
  return best;
}

double enumerate_game_value(std::span<const double> votes, double lambda) {
  const std::size_t n = votes.size();
  if (n == 0 || n > 8) {
    throw Error(ErrorCode::kInvalidArgument, "candidate enumeration needs 1 <= n <= 8");
  }
  const double dn = static_cast<double>(n);
  const double target = dn * lambda;
  const double slack = feasibility_slack(votes, target);
  double best = std::numeric_limits<double>::infinity();

  std::vector<double> z(n);
  auto decode = [&](std::size_t code, std::size_t skip) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == skip) {
        continue;
      }
      z[i] = static_cast<double>(code % 3) - 1.0;
      code /= 3;
    }
  };
  auto objective = [&]() {
    double s = 0.0;
    for (double x : z) {
      s += std::abs(x);
    }
    return s / dn;
  };

  // Fully integral points.
  for (std::size_t code = 0; code < power(3, n); ++code) {
    decode(code, n);
    if (dot(votes, z) >= target - slack) {
      best = std::min(best, objective());
    }
  }
  // One fractional coordinate k pinned by the binding constraint.
  for (std::size_t k = 0; k < n; ++k) {
    if (votes[k] == 0.0) {
      continue;
    }
    for (std::size_t code = 0; code < power(3, n - 1); ++code) {
      decode(code, k);
      CompensatedSum rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != k) {
          rest.add(votes[i] * z[i]);
        }
      }
      const double zk = (target - rest.value()) / votes[k];
      if (std::abs(zk) > 1.0 + kFeasibilitySlack) {
        continue;
      }
      z[k] = std::clamp(zk, -1.0, 1.0);
      best = std::min(best, objective());
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::kInfeasibleConstraint, "no labeling meets the correlation constraint");
  }
  return best;
}

double default_grid_step(std::size_t n) { return n <= 3 ? 0.005 : 0.02; }

double grid_abstain_value(std::span<const double> votes, double lambda, double alpha, double step) {
  const std::size_t n = votes.size();
  if (n == 0 || n > 4) {
    throw Error(ErrorCode::kInvalidArgument, "grid search needs 1 <= n <= 4");
  }
  if (!(step > 0.0 && step <= 0.1)) {
    throw Error(ErrorCode::kInvalidArgument, "grid step must lie in (0, 0.1]");
  }
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::kInvalidCost, "abstain cost alpha must be positive");
  }
  const double dn = static_cast<double>(n);
  const double target = dn * lambda;
  const double slack = feasibility_slack(votes, target);
  const auto last = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  auto level = [&](std::size_t j) { return std::min(1.0, static_cast<double>(j) * step); };
  auto gain = [&](double t) { return std::min(alpha, 0.5 * (1.0 - t)); };

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(n - 1, 0);
  while (true) {
    double reached = 0.0;
    double value = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      reached += level(idx[i]) * std::abs(votes[i]);
      value += gain(level(idx[i]));
    }
    // The objective falls as t_n rises, so the smallest feasible grid level
    // for the final coordinate is its best choice.
    const double need = target - reached;
    const double a_last = std::abs(votes[n - 1]);
    std::size_t j = 0;
    if (need > slack) {
      if (a_last > 0.0) {
        j = static_cast<std::size_t>(std::max(0.0, std::ceil(need / a_last / step - 1e-9)));
        while (j <= last && reached + level(j) * a_last < target - slack) {
          ++j;
        }
      } else {
        j = last + 1;
      }
    }
    if (j <= last) {
      best = std::max(best, (value + gain(level(j))) / dn);
    }

    std::size_t pos = 0;
    while (pos < idx.size() && idx[pos] == last) {
      idx[pos++] = 0;
    }
    if (pos == idx.size()) {
      break;
    }
    ++idx[pos];
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::kInfeasibleConstraint, "no grid labeling meets the correlation constraint");
  }
  return best;
}

void CertificationReport::record(double closed_form, double oracle, double deviation,
                                 double tolerance, const std::string& instance) {
  const double excess = deviation - tolerance;
  if (instances_checked == 0 || excess > max_excess) {
    max_excess = excess;
  }
  if (instances_checked == 0 || deviation >= max_deviation) {
    max_deviation = deviation;
    closed_form_value = closed_form;
    oracle_value = oracle;
    worst_instance = instance;
  }
  ++instances_checked;
}

std::string instance_json(std::span<const double> votes, double lambda, double alpha) {
  nlohmann::ordered_json j;
  j["votes"] = std::vector<double>(votes.begin(), votes.end());
  j["lambda"] = lambda;
  if (alpha > 0.0) {
    j["alpha"] = alpha;
  }
  return j.dump();
}

CertificationReport certify_saddle(const VoteProfile& profile, const GameSolution& solution) {
  const double dn = static_cast<double>(profile.size());
  BoxLpProblem nature;
  nature.costs.assign(solution.g_star.values().begin(), solution.g_star.values().end());
  nature.constraint_coeffs.assign(profile.votes().begin(), profile.votes().end());
  nature.constraint_rhs = dn * profile.lambda();
  const double nature_value = lp_best_response(nature).objective / dn;

  std::vector<double> g(profile.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = sign_of(solution.z_star[i]);
  }
  const double predictor_value = payoff(PredictionVector(std::move(g)), solution.z_star);

  CertificationReport report;
  report.check = "saddle_point";
  report.tolerance_rule = "1e-9";
  const double dev_nature = std::abs(nature_value - solution.value);
  const double dev_predictor = std::abs(predictor_value - solution.value);
  const double oracle = dev_nature >= dev_predictor ? nature_value : predictor_value;
  report.record(solution.value, oracle, std::max(dev_nature, dev_predictor), kSolverTolerance,
                instance_json(profile.votes(), profile.lambda(), 0.0));
  return report;
}

WorstCaseLoss worst_case_abstain_loss(const VoteProfile& profile, const PredictionVector& g,
                                      const AbstainStrategy& p) {
  const std::size_t n = profile.size();
  if (g.size() != n || p.size() != n) {
    throw Error(ErrorCode::kDimension, "strategy length does not match the profile");
  }
  // Loss = 1/2 + (1/n) sum p_i (alpha - 1/2) - (1/2n) sum (1 - p_i) g_i z_i,
  // so nature minimizes sum (1 - p_i) g_i z_i.
  BoxLpProblem problem;
  problem.costs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    problem.costs[i] = (1.0 - p[i]) * g[i];
  }
  problem.constraint_coeffs.assign(profile.votes().begin(), profile.votes().end());
  problem.constraint_rhs = static_cast<double>(n) * profile.lambda();
  BoxLpSolution best = lp_best_response(problem);
  LabelVector z(std::move(best.z));
  const double loss = abstain_loss(g, p, z);
  return {std::move(z), loss};
}

InstanceGenerator::InstanceGenerator(std::uint64_t seed, std::size_t nmax)
    : engine_(seed), nmax_(nmax) {
  if (nmax_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "nmax must be at least 1");
  }
}

double InstanceGenerator::uniform01() { return uniform_open01(engine_); }

RandomInstance InstanceGenerator::next() {
  RandomInstance inst;
  const auto n = 1 + std::min(nmax_ - 1, static_cast<std::size_t>(uniform01() * nmax_));
  inst.votes.resize(n);
  double mean = 0.0;
  for (double& a : inst.votes) {
    a = 2.0 * uniform01() - 1.0;
    mean += std::abs(a);
  }
  mean /= static_cast<double>(n);
  inst.lambda = mean * (0.1 + 0.9 * uniform01());
  inst.alpha = 0.05 + 0.4 * uniform01();
  return inst;
}

std::vector<CertificationReport> certify_instances(std::span<const RandomInstance> instances,
                                                   std::uint64_t seed, const BatchOptions& options) {
  std::vector<CertificationReport> reports(9);
  const char* names[] = {
      "game_value_vs_enumeration",       "saddle_point",
      "sequential_greedy_vs_nature",     "lp_greedy_vs_vertex_enumeration",
      "value_lower_bound_gap",           "abstain_value_bracket",
      "abstain_value_vs_grid",           "abstain_worst_case_dominates_value",
      "abstain_strategy_properties",
  };
  const char* rules[] = {
      "1e-9", "1e-9", "1e-9", "1e-9", "1e-9", "1e-9", "n*step/2 + 1e-9", "one-sided, 1e-9", "1e-9",
  };
  for (std::size_t r = 0; r < reports.size(); ++r) {
    reports[r].check = names[r];
    reports[r].tolerance_rule = rules[r];
    reports[r].seed = seed;
  }

  for (const RandomInstance& inst : instances) {
    const VoteProfile profile = sort_profile(inst.votes, inst.lambda);
    const GameSolution game = solve_game(profile);
    const std::string tag = instance_json(inst.votes, inst.lambda, inst.alpha);
    const double dn = static_cast<double>(profile.size());

    const double enumerated = enumerate_game_value(inst.votes, inst.lambda);
    reports[0].record(game.value, enumerated, std::abs(game.value - enumerated), kSolverTolerance, tag);

    const CertificationReport saddle = certify_saddle(profile, game);
    reports[1].record(saddle.closed_form_value, saddle.oracle_value, saddle.max_deviation,
                      kSolverTolerance, tag);

    const LabelVector greedy = nature_sequential_greedy(profile);
    double greedy_gap = 0.0;
    for (std::size_t i = 0; i < greedy.size(); ++i) {
      greedy_gap = std::max(greedy_gap, std::abs(greedy[i] - game.z_star[i]));
    }
    reports[2].record(0.0, greedy_gap, greedy_gap, kSolverTolerance, tag);

    BoxLpProblem lp;
    lp.costs.assign(game.g_star.values().begin(), game.g_star.values().end());
    lp.constraint_coeffs = inst.votes;
    lp.constraint_rhs = dn * inst.lambda;
    const double greedy_obj = lp_best_response(lp).objective;
    const double vertex_obj = enumerate_box_lp(lp).objective;
    reports[3].record(greedy_obj, vertex_obj, std::abs(greedy_obj - vertex_obj), kSolverTolerance, tag);

    const double remainder = inst.lambda - profile.prefix_magnitude(game.v - 1) / dn;
    const double expected_gap = (1.0 / profile.sorted_magnitude(game.v - 1) - 1.0) * remainder;
    const double gap = game.value - game.lower_bound;
    const double gap_dev = std::max(std::abs(gap - expected_gap), std::max(0.0, -gap));
    reports[4].record(gap, expected_gap, gap_dev, kSolverTolerance, tag);

    if (!(inst.alpha > 0.0)) {
      continue;
    }
    const AbstainValue av = abstain_value(profile, inst.alpha);
    const double clamped = std::clamp(av.exact, av.lower, av.upper);
    reports[5].record(av.exact, clamped, std::abs(av.exact - clamped), kSolverTolerance, tag);

    if (profile.size() <= options.grid_nmax) {
      const double grid = grid_abstain_value(inst.votes, inst.lambda, inst.alpha, options.grid_step);
      reports[6].record(av.exact, grid, std::abs(av.exact - grid),
                        dn * options.grid_step / 2.0 + kSolverTolerance, tag);
    }

    const AbstainStrategy p_alg = near_optimal_abstain(profile, inst.alpha);
    const WorstCaseLoss worst = worst_case_abstain_loss(profile, game.g_star, p_alg);
    reports[7].record(av.exact, worst.loss, std::max(0.0, av.exact - worst.loss), kSolverTolerance, tag);

    // Strategy properties: zero abstention on the committed block, equal
    // abstain-ordering keys past it, and the abstain-fraction bound.
    double violation = 0.0;
    const double pivot = profile.sorted_magnitude(game.v - 1);
    CompensatedSum fraction;
    CompensatedSum ratios;
    for (std::size_t k = 0; k < profile.size(); ++k) {
      const std::size_t i = profile.order()[k];
      fraction.add(p_alg[i]);
      if (k < game.v) {
        violation = std::max(violation, std::abs(p_alg[i]));
      } else {
        ratios.add(profile.sorted_magnitude(k) / pivot);
      }
      if (k + 1 >= game.v && p_alg[i] < kAbstainCeiling) {
        const double key = profile.sorted_magnitude(k) / (1.0 - p_alg[i]);
        violation = std::max(violation, std::abs(key - pivot));
      }
    }
    const double fraction_bound = 1.0 - inst.lambda - ratios.value() / dn;
    violation = std::max(violation, fraction.value() / dn - fraction_bound);
    reports[8].record(0.0, violation, std::max(0.0, violation), kSolverTolerance, tag);
  }
  return reports;
}

}  // namespace confrate
