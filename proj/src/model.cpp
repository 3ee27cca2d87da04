#include "confrate/model.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace confrate {

namespace {

std::vector<std::size_t> descending_order(std::span<const double> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return keys[l] > keys[r]; });
  return order;
}

}  // namespace

EnsembleMatrix::EnsembleMatrix(std::size_t rows, std::size_t cols, std::vector<std::int8_t> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble matrix needs at least one row and column");
  }
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimension, "ensemble matrix entry count does not match its shape");
  }
  for (std::int8_t e : entries_) {
    if (e != -1 && e != 1) {
      throw Error(ErrorCode::kInvalidArgument, "ensemble predictions must be -1 or +1");
    }
  }
}

EnsembleMatrix EnsembleMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble matrix needs at least one row and column");
  }
  const std::size_t cols = rows.front().size();
  std::vector<std::int8_t> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) {
      throw Error(ErrorCode::kDimension, "ragged ensemble matrix");
    }
    for (int x : row) {
      if (x != -1 && x != 1) {
        throw Error(ErrorCode::kInvalidArgument, "ensemble predictions must be -1 or +1");
      }
      entries.push_back(static_cast<std::int8_t>(x));
    }
  }
  return EnsembleMatrix(rows.size(), cols, std::move(entries));
}

WeightVector::WeightVector(std::vector<double> weights, WeightRole role)
    : weights_(std::move(weights)), role_(role) {
  if (weights_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "weight vector is empty");
  }
  CompensatedSum total;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be finite and nonnegative");
    }
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > kInputTolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "weights must sum to 1 (got " + std::to_string(total.value()) + ")");
  }
}

WeightVector WeightVector::uniform(std::size_t count, WeightRole role) {
  if (count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "weight vector is empty");
  }
  return WeightVector(std::vector<double>(count, 1.0 / static_cast<double>(count)), role);
}

AbstainStrategy::AbstainStrategy(std::vector<double> probabilities, double alpha)
    : probs_(std::move(probabilities)), alpha_(alpha) {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw Error(ErrorCode::kInvalidCost, "abstain cost alpha must be positive");
  }
  for (double& p : probs_) {
    if (!std::isfinite(p) || p < -kInputTolerance || p > 1.0 + kInputTolerance) {
      throw Error(ErrorCode::kInvalidArgument, "abstain probability outside [0, 1]");
    }
    p = std::clamp(p, 0.0, 1.0);
  }
}

LabeledSample::LabeledSample(EnsembleMatrix predictions, std::vector<std::int8_t> labels)
    : predictions_(std::move(predictions)), labels_(std::move(labels)) {
  if (labels_.size() != predictions_.rows()) {
    throw Error(ErrorCode::kDimension, "label count does not match training prediction rows");
  }
  for (std::int8_t y : labels_) {
    if (y != -1 && y != 1) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be -1 or +1");
    }
  }
}

std::vector<double> compute_votes(const EnsembleMatrix& matrix, const WeightVector& weights) {
  if (weights.size() != matrix.cols()) {
    throw Error(ErrorCode::kDimension, "weight vector length does not match hypothesis count");
  }
  std::vector<double> votes(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    CompensatedSum sum;
    const auto row = matrix.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      sum.add(weights[j] * row[j]);
    }
    votes[i] = std::clamp(sum.value(), -1.0, 1.0);
  }
  return votes;
}

VoteProfile sort_profile(std::span<const double> votes, double lambda) {
  if (votes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "vote profile needs at least one example");
  }
  if (std::isnan(lambda) || lambda <= 0.0) {
    throw Error(ErrorCode::kDegenerateBound, "correlation bound lambda must be positive");
  }
  VoteProfile profile;
  profile.lambda_ = lambda;
  profile.votes_.assign(votes.begin(), votes.end());
  std::vector<double> magnitudes(votes.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    double& a = profile.votes_[i];
    if (!std::isfinite(a) || std::abs(a) > 1.0 + kInputTolerance) {
      throw Error(ErrorCode::kInvalidArgument, "votes must lie in [-1, 1]");
    }
    a = std::clamp(a, -1.0, 1.0);
    magnitudes[i] = std::abs(a);
  }
  profile.order_ = descending_order(magnitudes);

  profile.prefix_.resize(votes.size() + 1, 0.0);
  CompensatedSum running;
  for (std::size_t k = 0; k < votes.size(); ++k) {
    running.add(magnitudes[profile.order_[k]]);
    profile.prefix_[k + 1] = running.value();
  }
  const double n = static_cast<double>(votes.size());
  if (profile.prefix_.back() / n < lambda) {
    throw Error(ErrorCode::kInfeasibleConstraint,
                "lambda " + std::to_string(lambda) + " exceeds mean |a| = " +
                    std::to_string(profile.prefix_.back() / n));
  }
  return profile;
}

double payoff(const PredictionVector& predictions, const LabelVector& labels) {
  if (predictions.size() != labels.size() || predictions.size() == 0) {
    throw Error(ErrorCode::kDimension, "prediction and label vectors differ in length");
  }
  CompensatedSum sum;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    sum.add(predictions[i] * labels[i]);
  }
  return sum.value() / static_cast<double>(predictions.size());
}

AbstainOrdering abstain_order_keys(std::span<const double> votes, const AbstainStrategy& strategy) {
  if (votes.size() != strategy.size()) {
    throw Error(ErrorCode::kDimension, "abstain strategy length does not match votes");
  }
  AbstainOrdering out;
  out.keys.resize(votes.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (strategy[i] >= kAbstainCeiling) {
      throw Error(ErrorCode::kDegenerateAbstain,
                  "abstain probability at example " + std::to_string(i) + " is 1");
    }
    out.keys[i] = std::abs(votes[i]) / (1.0 - strategy[i]);
  }
  out.order = descending_order(out.keys);
  return out;
}

}  // namespace confrate
