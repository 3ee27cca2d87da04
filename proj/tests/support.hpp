#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "confrate/model.hpp"

namespace testing {

inline std::vector<double> fix1() { return {1.0, 0.8, 0.5, 0.2}; }
inline std::vector<double> fix2() { return {1.0, 0.8, 0.6, 0.2}; }
inline std::vector<double> fix3() { return {-0.9, 0.6}; }

inline std::vector<double> values(std::span<const double> xs) { return {xs.begin(), xs.end()}; }

inline void check_close(std::span<const double> got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(std::abs(got[i] - want[i]) <= tol);
  }
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Votes on the dyadic grid k/64 so that prefix sums are exact.
inline std::vector<double> dyadic_votes(Rng& rng, std::size_t n) {
  std::vector<double> a(n);
  for (double& x : a) {
    x = static_cast<double>(static_cast<int>(rng.index(0, 128)) - 64) / 64.0;
  }
  if (std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; })) {
    a[0] = 0.5;
  }
  return a;
}

inline double mean_abs(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) {
    s += std::abs(x);
  }
  return s / static_cast<double>(a.size());
}

// Descending |a| with ties by index, computed independently of the library.
inline std::vector<std::size_t> naive_order(const std::vector<double>& a) {
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      const double li = std::abs(a[idx[i]]);
      const double lj = std::abs(a[idx[j]]);
      if (lj > li || (lj == li && idx[j] < idx[i])) {
        std::swap(idx[i], idx[j]);
      }
    }
  }
  return idx;
}

}  // namespace testing
