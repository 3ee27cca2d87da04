#pragma once

// Independent solvers used to certify the closed-form game solutions at desk
// scale: an exact greedy solver for single-constraint box LPs, vertex and
// candidate enumeration, and an exhaustive grid for the abstain game.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "confrate/abstain_game.hpp"
#include "confrate/minimax_game.hpp"
#include "confrate/model.hpp"

namespace confrate {

/// minimize c.z  subject to  z in [-1, 1]^n,  a.z >= b
struct BoxLpProblem {
  std::vector<double> costs;
  std::vector<double> constraint_coeffs;
  double constraint_rhs = 0.0;

  void validate() const;
};

struct BoxLpSolution {
  std::vector<double> z;
  double objective = 0.0;
};

/// Exact optimum by the exchange argument: start every coordinate at its
/// cheapest bound, then move coordinates toward sgn(a_i) in ascending order of
/// cost per unit of constraint progress until the constraint holds.
BoxLpSolution lp_best_response(const BoxLpProblem& problem);

/// Same problem solved by enumerating every vertex of the feasible polytope
/// (box corners, and box edges cut by the constraint). n <= 16.
BoxLpSolution enumerate_box_lp(const BoxLpProblem& problem);

/// min over feasible z of (1/n) sum |z_i|, by enumerating candidates with at
/// most one coordinate outside {-1, 0, 1}. n <= 8.
double enumerate_game_value(std::span<const double> votes, double lambda);

/// max over t in a grid of step `step` of (1/n) sum min(alpha, (1 - t_i)/2)
/// subject to (1/n) sum t_i |a_i| >= lambda. n <= 4, step in (0, 0.1].
double grid_abstain_value(std::span<const double> votes, double lambda, double alpha, double step);

/// Default grid step: 0.005 for n <= 3, 0.02 for n = 4.
double default_grid_step(std::size_t n);

struct CertificationReport {
  std::string check;
  double closed_form_value = 0.0;  // at the worst instance
  double oracle_value = 0.0;       // at the worst instance
  double max_deviation = 0.0;      // absolute, never thresholded
  double max_excess = 0.0;         // max over instances of deviation - allowed tolerance
  std::string tolerance_rule;
  std::size_t instances_checked = 0;
  std::string worst_instance;      // JSON
  std::uint64_t seed = 0;

  bool passed() const noexcept { return max_excess <= 0.0; }
  /// Folds one instance into the running report. `deviation` is usually
  /// |closed_form - oracle|; one-sided checks pass the violation amount.
  void record(double closed_form, double oracle, double deviation, double tolerance,
              const std::string& instance);
};

/// Checks both one-sided best responses against the claimed value:
/// nature's exact LP response to g*, and the predictor's response sgn(z*).
CertificationReport certify_saddle(const VoteProfile& profile, const GameSolution& solution);

struct WorstCaseLoss {
  LabelVector z;
  double loss = 0.0;
};

/// Nature's exact best response to a fixed predictor strategy (g, p) in the
/// abstain game.
WorstCaseLoss worst_case_abstain_loss(const VoteProfile& profile, const PredictionVector& g,
                                      const AbstainStrategy& p);

struct RandomInstance {
  std::vector<double> votes;
  double lambda = 0.0;
  double alpha = 0.0;
};

/// Seeded generator: n uniform in [1, nmax], votes uniform in [-1, 1], lambda
/// uniform in (0.1 mean|a|, mean|a|], alpha uniform in (0.05, 0.45).
class InstanceGenerator {
 public:
  InstanceGenerator(std::uint64_t seed, std::size_t nmax);
  RandomInstance next();

 private:
  double uniform01();

  std::mt19937_64 engine_;
  std::size_t nmax_;
};

struct BatchOptions {
  double grid_step = 0.02;
  std::size_t grid_nmax = 4;
};

/// Runs every certification check over the instances. Report order is fixed.
std::vector<CertificationReport> certify_instances(std::span<const RandomInstance> instances,
                                                   std::uint64_t seed,
                                                   const BatchOptions& options = {});

std::string instance_json(std::span<const double> votes, double lambda, double alpha);

}  // namespace confrate
