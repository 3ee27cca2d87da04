#pragma once

// Core domain types shared by every solver: the ensemble prediction matrix,
// weight vectors over hypotheses, the sorted vote profile, and the bounded
// strategy vectors of both players.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "confrate/error.hpp"

namespace confrate {

/// Tolerance for validating inputs (simplex sums, box membership).
inline constexpr double kInputTolerance = 1e-12;
/// Tolerance for post-hoc solver assertions.
inline constexpr double kSolverTolerance = 1e-9;
/// Abstain probabilities at or above this are treated as "always abstain".
inline constexpr double kAbstainCeiling = 1.0 - 1e-9;

inline double sign_of(double x) noexcept {
  return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      correction_ += (sum_ - t) + x;
    } else {
      correction_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

/// n x H grid of base-classifier predictions, entries in {-1, +1}, row-major.
class EnsembleMatrix {
 public:
  EnsembleMatrix(std::size_t rows, std::size_t cols, std::vector<std::int8_t> entries);
  static EnsembleMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }
  std::span<const std::int8_t> row(std::size_t i) const noexcept {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<const std::int8_t> entries() const noexcept { return entries_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::int8_t> entries_;
};

enum class WeightRole { kPosterior, kPrior };

/// Probability distribution over the H hypotheses.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights, WeightRole role = WeightRole::kPosterior);
  static WeightVector uniform(std::size_t count, WeightRole role = WeightRole::kPosterior);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t j) const noexcept { return weights_[j]; }
  std::span<const double> values() const noexcept { return weights_; }
  WeightRole role() const noexcept { return role_; }

 private:
  std::vector<double> weights_;
  WeightRole role_;
};

/// Vector with every component in [-1, 1]. The tag keeps predictions and
/// labels from being mixed up.
template <class Tag>
class SignedUnitVector {
 public:
  SignedUnitVector() = default;
  explicit SignedUnitVector(std::vector<double> values) : values_(std::move(values)) {
    for (double& x : values_) {
      if (!std::isfinite(x) || std::abs(x) > 1.0 + kInputTolerance) {
        throw Error(ErrorCode::kInvalidArgument, "component outside [-1, 1]");
      }
      x = std::fmax(-1.0, std::fmin(1.0, x));
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

struct PredictionTag {};
struct LabelTag {};
/// Confidence-rated predictions g.
using PredictionVector = SignedUnitVector<PredictionTag>;
/// Nature's (stochastic) labels z.
using LabelVector = SignedUnitVector<LabelTag>;

/// Per-example abstain probabilities together with the abstain cost.
class AbstainStrategy {
 public:
  AbstainStrategy(std::vector<double> probabilities, double alpha);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  std::span<const double> values() const noexcept { return probs_; }
  double alpha() const noexcept { return alpha_; }

 private:
  std::vector<double> probs_;
  double alpha_;
};

/// Labeled training sample: m x H predictions and m labels in {-1, +1}.
class LabeledSample {
 public:
  LabeledSample(EnsembleMatrix predictions, std::vector<std::int8_t> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const EnsembleMatrix& predictions() const noexcept { return predictions_; }
  std::span<const std::int8_t> labels() const noexcept { return labels_; }

 private:
  EnsembleMatrix predictions_;
  std::vector<std::int8_t> labels_;
};

/// Ensemble votes together with the correlation bound lambda and the
/// descending-|a| ordering used by both games. Construct with sort_profile.
class VoteProfile {
 public:
  std::size_t size() const noexcept { return votes_.size(); }
  double lambda() const noexcept { return lambda_; }
  std::span<const double> votes() const noexcept { return votes_; }
  /// order()[k] is the original index of the k-th largest |a| (0-based k).
  std::span<const std::size_t> order() const noexcept { return order_; }

  /// Vote at sorted position k.
  double sorted_vote(std::size_t k) const noexcept { return votes_[order_[k]]; }
  double sorted_magnitude(std::size_t k) const noexcept { return std::abs(votes_[order_[k]]); }
  /// Sum of the k largest |a|, compensated.
  double prefix_magnitude(std::size_t k) const noexcept { return prefix_[k]; }
  double total_magnitude() const noexcept { return prefix_.back(); }

 private:
  friend VoteProfile sort_profile(std::span<const double> votes, double lambda);
  VoteProfile() = default;

  std::vector<double> votes_;
  std::vector<std::size_t> order_;
  std::vector<double> prefix_;
  double lambda_ = 0.0;
};

/// a = F q.
std::vector<double> compute_votes(const EnsembleMatrix& matrix, const WeightVector& weights);

/// Validates the votes and lambda and sorts by |a| descending, ties broken by
/// ascending original index. Throws kDegenerateBound for lambda <= 0 and
/// kInfeasibleConstraint when mean |a| < lambda.
VoteProfile sort_profile(std::span<const double> votes, double lambda);

/// (1/n) g.z
double payoff(const PredictionVector& predictions, const LabelVector& labels);

struct AbstainOrdering {
  std::vector<double> keys;       // |a_i| / (1 - p_i), original order
  std::vector<std::size_t> order; // descending keys, ascending-index ties
};

/// Keys |a_i|/(1-p_i) of the abstain-aware ordering and their sort order.
AbstainOrdering abstain_order_keys(std::span<const double> votes, const AbstainStrategy& strategy);

}  // namespace confrate
