#pragma once

// PAC-Bayes quantities that turn a labeled training sample into a certified
// correlation bound for the games, plus the derived error, abstain and
// mistake probability bounds. Natural logarithms throughout.

#include <cstddef>
#include <optional>
#include <utility>

#include "confrate/model.hpp"

namespace confrate {

struct PacBayesParams {
  std::size_t m = 0;     // training size
  double delta = 0.05;   // confidence parameter
  double eta = 0.0;      // exponential-weights temperature

  void validate() const;
};

struct BoundReport {
  double gibbs_train_error = 0.0;
  double kl_posterior_prior = 0.0;
  double epsilon = 0.0;
  double lambda_hat = 0.0;
  double kl_train_budget = 0.0;   // right-hand side of the KL-form bound, display only
  bool degenerate = false;        // lambda_hat <= 0
  // Filled once a vote profile is available; raw values may leave [0, 1].
  std::optional<double> error_bound_raw;
  std::optional<double> abstain_bound_raw;
  std::optional<double> mistake_bound_raw;
};

/// Bernoulli KL divergence KL(p || q). Throws kInfiniteDivergence when q is 0
/// or 1 and p differs from it.
double kl_bernoulli(double p, double q);

/// sum q_i log(q_i / q0_i). Throws kInfiniteDivergence if q puts mass where q0
/// does not.
double kl_discrete(const WeightVector& q, const WeightVector& q0);

/// sqrt((2/m)(KL + log(2(m+1)/delta)))
double epsilon(std::size_t m, double kl, double delta);
double epsilon(const PacBayesParams& params, const WeightVector& q, const WeightVector& q0);

/// Empirical error on the sample of the Gibbs classifier drawn from q.
double gibbs_train_error(const LabeledSample& sample, const WeightVector& q);

struct LambdaHat {
  double value;
  bool degenerate;
};

/// 1 - 2 (Gibbs train error) - 2 epsilon; degenerate when <= 0.
LambdaHat lambda_hat(double gibbs_error, double epsilon_value);

/// Probability-of-error bound E + eps + delta - (1/2n) sum_{i<v} (1 - |a_i|).
/// The profile must have been built with lambda = lambda_hat.
double error_probability_bound(const VoteProfile& profile, const BoundReport& report, double delta);

/// (abstain bound, mistake bound) for the near-optimal abstaining rule with
/// alpha < 1/2; neither depends on alpha.
std::pair<double, double> abstain_mistake_bounds(const VoteProfile& profile,
                                                 const BoundReport& report, double delta);

/// q(h) proportional to exp(-eta * err_S(h)).
WeightVector exp_weights_posterior(const LabeledSample& sample, double eta);

/// Right-hand side (1/m)(KL(q || q0) + log((m+1)/delta)) of the KL-form bound.
double kl_bound_train(const LabeledSample& sample, const WeightVector& q, const WeightVector& q0,
                      double delta);

/// Computes every sample-level quantity of the report (no profile yet).
BoundReport make_bound_report(const LabeledSample& sample, const WeightVector& q,
                              const WeightVector& q0, double delta);

inline double clip_probability(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace confrate
