#include <doctest.h>

#include <json.hpp>

#include "confrate/oracle.hpp"
#include "support.hpp"

using namespace confrate;
using testing::check_close;

namespace {

BoxLpProblem random_lp(testing::Rng& rng, std::size_t n) {
  BoxLpProblem lp;
  lp.costs.resize(n);
  lp.constraint_coeffs.resize(n);
  double reach = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lp.costs[i] = rng.uniform(-1.0, 1.0);
    lp.constraint_coeffs[i] = rng.uniform(-1.0, 1.0);
    reach += std::abs(lp.constraint_coeffs[i]);
  }
  lp.constraint_rhs = reach * rng.uniform(-1.0, 1.0);
  return lp;
}

// Test-side worst case over a coarse labeling grid, n <= 3.
double grid_worst_loss(const std::vector<double>& a, double lambda, const PredictionVector& g,
                       const AbstainStrategy& p) {
  const int steps = 40;
  const std::size_t n = a.size();
  double best = -1.0;
  std::vector<int> idx(n, 0);
  while (true) {
    std::vector<double> z(n);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = -1.0 + 2.0 * idx[i] / steps;
      dot += a[i] * z[i];
    }
    if (dot >= static_cast<double>(n) * lambda - 1e-12) {
      best = std::max(best, abstain_loss(g, p, LabelVector(z)));
    }
    std::size_t pos = 0;
    while (pos < n && idx[pos] == steps) {
      idx[pos++] = 0;
    }
    if (pos == n) {
      break;
    }
    ++idx[pos];
  }
  return best;
}

}  // namespace

TEST_CASE("greedy box LP matches vertex enumeration") {
  testing::Rng rng(61);
  for (int trial = 0; trial < 500; ++trial) {
    const BoxLpProblem lp = random_lp(rng, rng.index(1, 8));
    const BoxLpSolution greedy = lp_best_response(lp);
    const BoxLpSolution vertex = enumerate_box_lp(lp);
    CHECK(greedy.objective == doctest::Approx(vertex.objective).epsilon(1e-9).scale(1.0));
    double dot = 0.0;
    for (std::size_t i = 0; i < greedy.z.size(); ++i) {
      CHECK(std::abs(greedy.z[i]) <= 1.0);
      dot += lp.constraint_coeffs[i] * greedy.z[i];
    }
    CHECK(dot >= lp.constraint_rhs - 1e-9);
  }
}

TEST_CASE("box LP on fixture 1") {
  BoxLpProblem lp{{1.0, 1.0, 1.0, 0.4}, testing::fix1(), 2.0};
  const BoxLpSolution s = lp_best_response(lp);
  CHECK(s.objective == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(s.objective / 4.0 == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(enumerate_box_lp(lp).objective == doctest::Approx(2.4).epsilon(1e-12));
}

TEST_CASE("box LP validation") {
  CHECK_THROWS_AS(lp_best_response({{1.0}, {0.5}, 0.6}), Error);
  CHECK_THROWS_AS(enumerate_box_lp({{1.0}, {0.5}, 0.6}), Error);
  CHECK_THROWS_AS(lp_best_response({{1.0, 2.0}, {0.5}, 0.1}), Error);
  CHECK_THROWS_AS(enumerate_box_lp({std::vector<double>(17, 1.0), std::vector<double>(17, 1.0), 0.0}),
                  Error);
  try {
    lp_best_response({{1.0}, {0.5}, 0.6});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleConstraint);
  }
}

TEST_CASE("candidate enumeration on fixtures") {
  CHECK(enumerate_game_value(testing::fix1(), 0.5) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(enumerate_game_value(testing::fix2(), 0.6) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(enumerate_game_value(testing::fix3(), 0.6) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_AS(enumerate_game_value(std::vector<double>(9, 0.5), 0.1), Error);
}

TEST_CASE("grid abstain value") {
  const double step = default_grid_step(4);
  CHECK(step == 0.02);
  CHECK(default_grid_step(3) == 0.005);
  const double grid = grid_abstain_value(testing::fix1(), 0.5, 0.25, step);
  CHECK(grid <= 0.1484375 + 1e-12);
  CHECK(0.1484375 - grid <= 4 * step / 2);
  CHECK(grid_abstain_value(testing::fix1(), 0.5, 0.05, step) == doctest::Approx(0.05));
  CHECK_THROWS_AS(grid_abstain_value(std::vector<double>(5, 0.5), 0.1, 0.2, 0.02), Error);
  CHECK_THROWS_AS(grid_abstain_value(testing::fix1(), 0.5, 0.2, 0.2), Error);
  CHECK_THROWS_AS(grid_abstain_value(testing::fix1(), 0.5, 0.0, 0.02), Error);
}

TEST_CASE("worst-case abstain loss dominates a labeling grid") {
  testing::Rng rng(67);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> a(rng.index(1, 3));
    for (double& x : a) {
      x = rng.uniform(-1.0, 1.0);
    }
    const double lambda = testing::mean_abs(a) * rng.uniform(0.05, 0.9);
    const auto profile = sort_profile(a, lambda);
    std::vector<double> g(a.size());
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      g[i] = rng.uniform(-1.0, 1.0);
      p[i] = rng.uniform(0.0, 1.0);
    }
    const PredictionVector gv(g);
    const AbstainStrategy pv(p, rng.uniform(0.05, 0.45));
    const WorstCaseLoss worst = worst_case_abstain_loss(profile, gv, pv);
    const double grid = grid_worst_loss(a, lambda, gv, pv);
    CHECK(worst.loss >= grid - 1e-12);
    CHECK(worst.loss - grid <= 0.06);
    CHECK(abstain_loss(gv, pv, worst.z) == doctest::Approx(worst.loss));
  }
}

TEST_CASE("saddle certification of fixture 1") {
  const auto profile = sort_profile(testing::fix1(), 0.5);
  const CertificationReport r = certify_saddle(profile, solve_game(profile));
  CHECK(r.passed());
  CHECK(r.instances_checked == 1);
  CHECK(r.closed_form_value == doctest::Approx(0.6));
  CHECK(r.oracle_value == doctest::Approx(0.6));
  CHECK(r.max_deviation < 1e-12);
}

TEST_CASE("certification report bookkeeping") {
  CertificationReport r;
  r.record(1.0, 1.0, 0.0, 1e-9, "{}");
  r.record(1.0, 1.5, 0.5, 1e-9, "{\"x\":1}");
  r.record(1.0, 1.1, 0.1, 1e-9, "{}");
  CHECK(r.instances_checked == 3);
  CHECK(r.max_deviation == 0.5);
  CHECK(r.oracle_value == 1.5);
  CHECK(r.worst_instance == "{\"x\":1}");
  CHECK_FALSE(r.passed());
  CHECK(r.max_excess == doctest::Approx(0.5 - 1e-9));
}

TEST_CASE("instance generator") {
  InstanceGenerator a(99, 6);
  InstanceGenerator b(99, 6);
  for (int k = 0; k < 100; ++k) {
    const RandomInstance x = a.next();
    const RandomInstance y = b.next();
    CHECK(x.votes == y.votes);
    CHECK(x.lambda == y.lambda);
    CHECK(x.alpha == y.alpha);
    CHECK(x.votes.size() >= 1);
    CHECK(x.votes.size() <= 6);
    CHECK(x.alpha > 0.05);
    CHECK(x.alpha < 0.45);
    CHECK_NOTHROW(sort_profile(x.votes, x.lambda));
  }
  CHECK_THROWS_AS(InstanceGenerator(1, 0), Error);
}

TEST_CASE("batch certification passes") {
  InstanceGenerator gen(5, 6);
  std::vector<RandomInstance> instances;
  for (int k = 0; k < 100; ++k) {
    instances.push_back(gen.next());
  }
  const auto reports = certify_instances(instances, 5);
  REQUIRE(reports.size() == 9);
  CHECK(reports[0].check == "game_value_vs_enumeration");
  CHECK(reports[6].check == "abstain_value_vs_grid");
  for (const auto& r : reports) {
    INFO(r.check);
    CHECK(r.passed());
    CHECK(r.seed == 5);
    CHECK(r.instances_checked > 0);
  }
  CHECK(reports[0].instances_checked == 100);
}

TEST_CASE("instance json") {
  const auto j = nlohmann::json::parse(instance_json(testing::fix1(), 0.5, 0.25));
  CHECK(j["votes"].size() == 4);
  CHECK(j["lambda"] == 0.5);
  CHECK(j["alpha"] == 0.25);
  CHECK_FALSE(nlohmann::json::parse(instance_json(testing::fix1(), 0.5, 0.0)).contains("alpha"));
}
