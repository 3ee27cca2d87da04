#include "confrate/pac_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confrate/minimax_game.hpp"

namespace confrate {

namespace {

// x log(x / y) with 0 log 0 = 0.
double xlogx_over(double x, double y) {
  if (x == 0.0) {
    return 0.0;
  }
  return x * std::log(x / y);
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  }
}

void require_positive_lambda(const BoundReport& report) {
  if (report.degenerate || report.lambda_hat <= 0.0) {
    throw Error(ErrorCode::kDegenerateBound, "lambda_hat <= 0: the game is undefined");
  }
}

std::vector<double> hypothesis_errors(const LabeledSample& sample) {
  const auto& f = sample.predictions();
  std::vector<double> errors(f.cols(), 0.0);
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const auto row = f.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != sample.labels()[i]) {
        errors[j] += 1.0;
      }
    }
  }
  for (double& e : errors) {
    e /= static_cast<double>(sample.size());
  }
  return errors;
}

}  // namespace

void PacBayesParams::validate() const {
  if (m == 0) {
    throw Error(ErrorCode::kInvalidArgument, "training size m must be at least 1");
  }
  check_delta(delta);
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::kInvalidArgument, "eta must be finite and nonnegative");
  }
}

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Bernoulli parameters must lie in [0, 1]");
  }
  if ((q == 0.0 || q == 1.0) && p != q) {
    throw Error(ErrorCode::kInfiniteDivergence, "KL(p || q) is infinite");
  }
  const double kl = xlogx_over(p, q) + xlogx_over(1.0 - p, 1.0 - q);
  return std::max(0.0, kl);
}

double kl_discrete(const WeightVector& q, const WeightVector& q0) {
  if (q.size() != q0.size()) {
    throw Error(ErrorCode::kDimension, "posterior and prior differ in length");
  }
  CompensatedSum kl;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] > 0.0 && q0[j] == 0.0) {
      throw Error(ErrorCode::kInfiniteDivergence,
                  "posterior has mass on hypothesis " + std::to_string(j) + " outside the prior support");
    }
    kl.add(xlogx_over(q[j], q0[j]));
  }
  return std::max(0.0, kl.value());
}

double epsilon(std::size_t m, double kl, double delta) {
  if (m == 0) {
    throw Error(ErrorCode::kInvalidArgument, "training size m must be at least 1");
  }
  check_delta(delta);
  if (!(kl >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "KL divergence must be nonnegative");
  }
  const double dm = static_cast<double>(m);
  return std::sqrt(2.0 / dm * (kl + std::log(2.0 * (dm + 1.0) / delta)));
}

double epsilon(const PacBayesParams& params, const WeightVector& q, const WeightVector& q0) {
  params.validate();
  return epsilon(params.m, kl_discrete(q, q0), params.delta);
}

double gibbs_train_error(const LabeledSample& sample, const WeightVector& q) {
  const auto& f = sample.predictions();
  if (q.size() != f.cols()) {
    throw Error(ErrorCode::kDimension, "posterior length does not match hypothesis count");
  }
  CompensatedSum err;
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const auto row = f.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != sample.labels()[i]) {
        err.add(q[j]);
      }
    }
  }
  return std::clamp(err.value() / static_cast<double>(sample.size()), 0.0, 1.0);
}

LambdaHat lambda_hat(double gibbs_error, double epsilon_value) {
  const double value = 1.0 - 2.0 * gibbs_error - 2.0 * epsilon_value;
  return {value, value <= 0.0};
}

double error_probability_bound(const VoteProfile& profile, const BoundReport& report, double delta) {
  require_positive_lambda(report);
  check_delta(delta);
  const std::size_t v = find_threshold(profile);
  CompensatedSum disagreement;
  for (std::size_t k = 0; k + 1 < v; ++k) {
    disagreement.add(1.0 - profile.sorted_magnitude(k));
  }
  const double n = static_cast<double>(profile.size());
  return report.gibbs_train_error - disagreement.value() / (2.0 * n) + report.epsilon + delta;
}

std::pair<double, double> abstain_mistake_bounds(const VoteProfile& profile,
                                                 const BoundReport& report, double delta) {
  require_positive_lambda(report);
  check_delta(delta);
  const std::size_t v = find_threshold(profile);
  const double n = static_cast<double>(profile.size());
  const double pivot = profile.sorted_magnitude(v - 1);
  CompensatedSum ratios;
  for (std::size_t k = v; k < profile.size(); ++k) {
    ratios.add(profile.sorted_magnitude(k) / pivot);
  }
  CompensatedSum disagreement;
  for (std::size_t k = 0; k < v; ++k) {
    disagreement.add(1.0 - profile.sorted_magnitude(k));
  }
  const double e = report.gibbs_train_error;
  const double eps = report.epsilon;
  const double abstain = 2.0 * e + 2.0 * eps + delta - ratios.value() / n;
  const double mistake = e + eps + delta - disagreement.value() / (2.0 * n);
  return {abstain, mistake};
}

WeightVector exp_weights_posterior(const LabeledSample& sample, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::kInvalidArgument, "eta must be finite and nonnegative");
  }
  const std::vector<double> errors = hypothesis_errors(sample);
  const double best = *std::min_element(errors.begin(), errors.end());
  std::vector<double> w(errors.size());
  CompensatedSum total;
  for (std::size_t j = 0; j < errors.size(); ++j) {
    w[j] = std::exp(-eta * (errors[j] - best));
    total.add(w[j]);
  }
  for (double& x : w) {
    x /= total.value();
  }
  return WeightVector(std::move(w));
}

double kl_bound_train(const LabeledSample& sample, const WeightVector& q, const WeightVector& q0,
                      double delta) {
  check_delta(delta);
  const double m = static_cast<double>(sample.size());
  return (kl_discrete(q, q0) + std::log((m + 1.0) / delta)) / m;
}

BoundReport make_bound_report(const LabeledSample& sample, const WeightVector& q,
                              const WeightVector& q0, double delta) {
  check_delta(delta);
  BoundReport r;
  r.gibbs_train_error = gibbs_train_error(sample, q);
  r.kl_posterior_prior = kl_discrete(q, q0);
  r.epsilon = epsilon(sample.size(), r.kl_posterior_prior, delta);
  const LambdaHat lh = lambda_hat(r.gibbs_train_error, r.epsilon);
  r.lambda_hat = lh.value;
  r.degenerate = lh.degenerate;
  r.kl_train_budget = kl_bound_train(sample, q, q0, delta);
  return r;
}

}  // namespace confrate
