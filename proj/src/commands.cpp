#include "confrate/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <random>

#include "confrate/io.hpp"
#include "confrate/oracle.hpp"
#include "confrate/random.hpp"

#ifndef CONFRATE_VERSION
#define CONFRATE_VERSION "0.0.0"
#endif

namespace confrate::cli {

namespace {

constexpr std::size_t kOracleLimit = 8;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void stamp(Json& doc, const OutputOptions& options) {
  doc["tool"] = {{"name", "confrate"}, {"version", version()}};
  if (!options.canonical) {
    doc["environment"] = {{"generated_at", utc_now()}};
  }
}

Json optional_real(const std::optional<double>& x) { return x ? real(*x) : Json(nullptr); }

Json optional_index(const std::optional<std::size_t>& x) { return x ? Json(*x) : Json(nullptr); }

const char* regime_name(AbstainRegime r) {
  switch (r) {
    case AbstainRegime::kTrivial:
      return "trivial";
    case AbstainRegime::kNontrivial:
      return "nontrivial";
    case AbstainRegime::kNoAbstain:
      return "no_abstain";
  }
  return "unknown";
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kDegenerateBound, "lambda must lie in (0, 1]");
  }
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidCost, "abstain cost alpha must be positive");
  }
}

Json certification_json(const CertificationReport& r) {
  Json worst = r.worst_instance.empty() ? Json(nullptr) : Json::parse(r.worst_instance);
  return {{"check", r.check},
          {"passed", r.passed()},
          {"instances_checked", r.instances_checked},
          {"closed_form_value", real(r.closed_form_value)},
          {"oracle_value", real(r.oracle_value)},
          {"max_deviation", real(r.max_deviation)},
          {"max_excess", real(r.max_excess)},
          {"tolerance", r.tolerance_rule},
          {"worst_instance", worst},
          {"seed", r.seed}};
}

}  // namespace

const char* version() noexcept { return CONFRATE_VERSION; }

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDimension:
    case ErrorCode::kParse:
      return 3;
    case ErrorCode::kIo:
      return 4;
    default:
      return 2;
  }
}

double round12(double x) {
  if (!std::isfinite(x)) {
    return x;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json real(double x) {
  if (!std::isfinite(x)) {
    return nullptr;
  }
  return round12(x);
}

Json reals(std::span<const double> xs) {
  Json out = Json::array();
  for (double x : xs) {
    out.push_back(real(x));
  }
  return out;
}

Json error_document(ErrorCode code, const std::string& message) {
  return {{"error", error_name(code)}, {"message", message}, {"exit_code", exit_code(code)}};
}

Json game_document(const VoteProfile& profile, const GameSolution& solution) {
  Json doc;
  doc["n"] = profile.size();
  doc["lambda"] = real(profile.lambda());
  doc["v"] = solution.v;
  doc["value"] = real(solution.value);
  doc["lower_bound"] = real(solution.lower_bound);
  doc["order"] = Json(std::vector<std::size_t>(profile.order().begin(), profile.order().end()));
  doc["votes"] = reals(profile.votes());
  doc["g_star"] = reals(solution.g_star.values());
  doc["z_star"] = reals(solution.z_star.values());
  return doc;
}

Json abstain_document(const VoteProfile& profile, const AbstainSolution& s) {
  const GameSolution game = solve_game(profile);
  const AbstentionBenefit benefit = benefit_of_abstention(profile, s.alpha);
  Json doc;
  doc["n"] = profile.size();
  doc["lambda"] = real(profile.lambda());
  doc["alpha"] = real(s.alpha);
  doc["regime"] = regime_name(s.regime);
  doc["trivial"] = s.trivial;
  doc["w"] = optional_index(s.w);
  doc["budget"] = real(s.budget);
  doc["value_exact"] = real(s.value_exact);
  doc["value_lower"] = real(s.value_lower);
  doc["value_upper"] = real(s.value_upper);
  doc["budget_closed_form"] = optional_real(s.budget_closed_form);
  doc["v"] = s.v;
  doc["v2"] = optional_index(s.v2);
  doc["p_alg"] = reals(s.p_alg.values());
  doc["g_star"] = reals(game.g_star.values());
  doc["z_star"] = reals(game.z_star.values());
  doc["loss_formula"] = real(s.loss_formula);
  doc["loss_against_z_star"] = real(abstain_loss(game.g_star, s.p_alg, game.z_star));
  if (profile.size() <= kOracleLimit) {
    const WorstCaseLoss worst = worst_case_abstain_loss(profile, game.g_star, s.p_alg);
    doc["oracle_worst_case_loss"] = real(worst.loss);
    doc["oracle_worst_case_z"] = reals(worst.z.values());
  } else {
    doc["oracle_worst_case_loss"] = nullptr;
    doc["oracle_worst_case_z"] = nullptr;
    doc["oracle_note"] = "omitted: oracle certification is limited to n <= 8";
  }
  doc["loss_no_abstain"] = real(benefit.loss_no_abstain);
  doc["loss_abstain"] = real(benefit.loss_abstain);
  doc["abstention_benefit"] = real(benefit.difference);
  doc["abstention_benefit_closed_form"] = real(benefit.closed_form_difference);
  if (s.regime == AbstainRegime::kNoAbstain) {
    doc["note"] = "alpha >= 1/2: abstaining never helps, value reported as (1 - V)/2";
  }
  return doc;
}

Json run_solve(const std::string& votes_path, double lambda, const OutputOptions& options) {
  require_lambda(lambda);
  const std::vector<double> votes = io::read_votes(votes_path);
  const VoteProfile profile = sort_profile(votes, lambda);
  Json doc{{"command", "solve"}};
  doc.update(game_document(profile, solve_game(profile)));
  stamp(doc, options);
  return doc;
}

Json run_abstain(const std::string& votes_path, double lambda, double alpha,
                 const OutputOptions& options) {
  require_lambda(lambda);
  require_alpha(alpha);
  const std::vector<double> votes = io::read_votes(votes_path);
  const VoteProfile profile = sort_profile(votes, lambda);
  Json doc{{"command", "abstain"}};
  doc.update(abstain_document(profile, solve_abstain(profile, alpha)));
  stamp(doc, options);
  return doc;
}

PosteriorSpec PosteriorSpec::parse(const std::string& text) {
  PosteriorSpec spec;
  if (text == "uniform") {
    return spec;
  }
  if (text.rfind("exp:", 0) == 0) {
    const std::string tail = text.substr(4);
    char* end = nullptr;
    const double eta = std::strtod(tail.c_str(), &end);
    if (tail.empty() || *end != '\0' || !std::isfinite(eta) || eta < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "posterior exp:<eta> needs a finite eta >= 0");
    }
    spec.kind = Kind::kExp;
    spec.eta = eta;
    return spec;
  }
  if (text.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty posterior spec");
  }
  spec.kind = Kind::kFile;
  spec.path = text;
  return spec;
}

std::string PosteriorSpec::describe() const {
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kExp: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "exp:%.12g", eta);
      return buf;
    }
    case Kind::kFile:
      return "file:" + std::filesystem::path(path).filename().string();
  }
  return "unknown";
}

PipelineReport run_pipeline(const PipelineRequest& request) {
  if (!(request.delta > 0.0 && request.delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  }
  if (request.alpha) {
    require_alpha(*request.alpha);
  }
  EnsembleMatrix train = io::read_predictions_csv(request.train_pred);
  std::vector<std::int8_t> labels = io::read_labels_csv(request.train_labels);
  const EnsembleMatrix test = io::read_predictions_csv(request.test_pred);
  if (test.cols() != train.cols()) {
    throw Error(ErrorCode::kDimension, "train and test predictions differ in hypothesis count");
  }
  const LabeledSample sample(std::move(train), std::move(labels));
  const std::size_t h = sample.predictions().cols();

  WeightVector prior = WeightVector::uniform(h, WeightRole::kPrior);
  std::optional<WeightVector> posterior;
  switch (request.posterior.kind) {
    case PosteriorSpec::Kind::kUniform:
      posterior = WeightVector::uniform(h);
      break;
    case PosteriorSpec::Kind::kExp:
      posterior = exp_weights_posterior(sample, request.posterior.eta);
      break;
    case PosteriorSpec::Kind::kFile: {
      io::WeightsFile file = io::read_weights_json(request.posterior.path);
      if (file.prior) {
        prior = *file.prior;
      }
      posterior = std::move(file.posterior);
      break;
    }
  }
  if (posterior->size() != h || prior.size() != h) {
    throw Error(ErrorCode::kDimension, "weight vector length does not match hypothesis count");
  }

  PipelineReport report;
  report.m = sample.size();
  report.n = test.rows();
  report.hypotheses = h;
  report.delta = request.delta;
  report.posterior = request.posterior.describe();
  report.weights.assign(posterior->values().begin(), posterior->values().end());
  report.bounds = make_bound_report(sample, *posterior, prior, request.delta);
  report.fallback = report.bounds.degenerate;
  report.seed = request.seed;

  const std::vector<double> votes = compute_votes(test, *posterior);
  std::vector<double> g(votes);
  std::vector<double> p(votes.size(), 0.0);
  if (!report.fallback) {
    const VoteProfile profile = sort_profile(votes, report.bounds.lambda_hat);
    report.game = solve_game(profile);
    report.bounds.error_bound_raw = error_probability_bound(profile, report.bounds, request.delta);
    g.assign(report.game->g_star.values().begin(), report.game->g_star.values().end());
    if (request.alpha) {
      report.abstain = solve_abstain(profile, *request.alpha);
      p.assign(report.abstain->p_alg.values().begin(), report.abstain->p_alg.values().end());
      if (*request.alpha < 0.5) {
        const auto [abstain, mistake] =
            abstain_mistake_bounds(profile, report.bounds, request.delta);
        report.bounds.abstain_bound_raw = abstain;
        report.bounds.mistake_bound_raw = mistake;
      }
    }
  }
  report.examples.reserve(votes.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    report.examples.push_back({i, votes[i], g[i], p[i], static_cast<int>(sign_of(g[i]))});
  }
  return report;
}

Json pipeline_document(const PipelineReport& report, const OutputOptions& options) {
  const BoundReport& b = report.bounds;
  auto clipped = [](const std::optional<double>& x) {
    return x ? real(clip_probability(*x)) : Json(nullptr);
  };
  Json doc{{"command", "pipeline"}};
  doc["m"] = report.m;
  doc["n"] = report.n;
  doc["hypotheses"] = report.hypotheses;
  doc["delta"] = real(report.delta);
  doc["posterior"] = report.posterior;
  doc["weights"] = reals(report.weights);
  doc["bounds"] = {{"gibbs_train_error", real(b.gibbs_train_error)},
                   {"kl_posterior_prior", real(b.kl_posterior_prior)},
                   {"epsilon", real(b.epsilon)},
                   {"lambda_hat", real(b.lambda_hat)},
                   {"kl_train_budget", real(b.kl_train_budget)},
                   {"degenerate", b.degenerate},
                   {"error_bound", clipped(b.error_bound_raw)},
                   {"error_bound_raw", optional_real(b.error_bound_raw)},
                   {"abstain_bound", clipped(b.abstain_bound_raw)},
                   {"abstain_bound_raw", optional_real(b.abstain_bound_raw)},
                   {"mistake_bound", clipped(b.mistake_bound_raw)},
                   {"mistake_bound_raw", optional_real(b.mistake_bound_raw)}};
  doc["fallback"] = report.fallback;
  if (report.game) {
    doc["game"] = {{"v", report.game->v},
                   {"value", real(report.game->value)},
                   {"lower_bound", real(report.game->lower_bound)}};
  } else {
    doc["game"] = nullptr;
  }
  if (report.abstain) {
    const AbstainSolution& a = *report.abstain;
    doc["abstain"] = {{"alpha", real(a.alpha)},
                      {"regime", regime_name(a.regime)},
                      {"trivial", a.trivial},
                      {"w", optional_index(a.w)},
                      {"budget", real(a.budget)},
                      {"value_exact", real(a.value_exact)},
                      {"value_lower", real(a.value_lower)},
                      {"value_upper", real(a.value_upper)},
                      {"v2", optional_index(a.v2)},
                      {"loss_formula", real(a.loss_formula)},
                      {"loss_no_abstain", real(a.loss_no_abstain)},
                      {"loss_abstain", real(a.loss_abstain)}};
  } else {
    doc["abstain"] = nullptr;
  }
  Json examples = Json::array();
  for (const ExampleRecord& e : report.examples) {
    examples.push_back({{"index", e.index},
                        {"vote", real(e.vote)},
                        {"prediction", real(e.prediction)},
                        {"abstain_probability", real(e.abstain_probability)},
                        {"label", e.label}});
  }
  doc["examples"] = std::move(examples);
  doc["seed"] = report.seed ? Json(*report.seed) : Json(nullptr);
  stamp(doc, options);
  return doc;
}

VerifyOutcome run_verify(const VerifyRequest& request, const OutputOptions& options) {
  if (request.nmax < 1 || request.nmax > kOracleLimit) {
    throw Error(ErrorCode::kInvalidArgument, "nmax must lie in [1, 8]");
  }
  if (request.count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "count must be at least 1");
  }
  std::vector<RandomInstance> instances;
  Json doc{{"command", "verify"}};
  if (request.votes_path) {
    if (!request.lambda) {
      throw Error(ErrorCode::kInvalidArgument, "--lambda is required with --votes");
    }
    require_lambda(*request.lambda);
    if (request.alpha) {
      require_alpha(*request.alpha);
    }
    RandomInstance inst{io::read_votes(*request.votes_path), *request.lambda,
                        request.alpha.value_or(0.0)};
    if (inst.votes.size() > kOracleLimit) {
      throw Error(ErrorCode::kInvalidArgument, "oracle certification is limited to n <= 8");
    }
    // Surface an infeasible lambda as a domain error rather than a failed check.
    (void)sort_profile(inst.votes, inst.lambda);
    for (std::size_t k = 0; k < request.count; ++k) {
      instances.push_back(inst);
    }
    doc["source"] = "votes";
  } else {
    InstanceGenerator gen(request.seed, request.nmax);
    for (std::size_t k = 0; k < request.count; ++k) {
      instances.push_back(gen.next());
    }
    doc["source"] = "random";
  }
  doc["count"] = request.count;
  doc["seed"] = request.seed;
  doc["nmax"] = request.nmax;

  const std::vector<CertificationReport> reports = certify_instances(instances, request.seed);
  bool passed = true;
  double max_deviation = 0.0;
  Json checks = Json::array();
  for (const CertificationReport& r : reports) {
    passed = passed && r.passed();
    if (r.tolerance_rule.find("step") == std::string::npos) {
      max_deviation = std::max(max_deviation, r.max_deviation);
    }
    checks.push_back(certification_json(r));
  }
  doc["passed"] = passed;
  doc["max_deviation"] = real(max_deviation);
  doc["checks"] = std::move(checks);
  stamp(doc, options);
  return {std::move(doc), passed};
}

SyntheticData generate_data(const GenerateRequest& request) {
  if (request.m == 0 || request.n == 0 || request.hypotheses == 0) {
    throw Error(ErrorCode::kInvalidArgument, "m, n and H must be positive");
  }
  if (!(request.base_error > 0.0 && request.base_error < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "base error must lie in (0, 0.5)");
  }
  std::mt19937_64 engine(request.seed);
  const std::size_t h = request.hypotheses;
  std::vector<double> flips(h);
  for (double& f : flips) {
    f = request.base_error * (0.8 + 0.4 * uniform_open01(engine));
  }
  auto draw = [&](std::size_t rows, std::vector<std::int8_t>& labels) {
    std::vector<std::int8_t> entries(rows * h);
    labels.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::int8_t y = uniform_open01(engine) < 0.5 ? -1 : 1;
      labels[i] = y;
      for (std::size_t j = 0; j < h; ++j) {
        entries[i * h + j] = uniform_open01(engine) < flips[j] ? static_cast<std::int8_t>(-y) : y;
      }
    }
    return EnsembleMatrix(rows, h, std::move(entries));
  };
  std::vector<std::int8_t> train_labels;
  std::vector<std::int8_t> test_labels;
  EnsembleMatrix train = draw(request.m, train_labels);
  EnsembleMatrix test = draw(request.n, test_labels);
  return {std::move(train), std::move(train_labels), std::move(test), std::move(flips)};
}

Json run_generate(const GenerateRequest& request, const OutputOptions& options) {
  const SyntheticData data = generate_data(request);
  const std::filesystem::path dir(request.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  }
  const std::string train_pred = (dir / "train_pred.csv").string();
  const std::string train_labels = (dir / "train_labels.csv").string();
  const std::string test_pred = (dir / "test_pred.csv").string();
  io::write_predictions_csv(train_pred, data.train);
  io::write_labels_csv(train_labels, data.train_labels);
  io::write_predictions_csv(test_pred, data.test);

  Json doc{{"command", "gen"}};
  doc["seed"] = request.seed;
  doc["m"] = request.m;
  doc["n"] = request.n;
  doc["hypotheses"] = request.hypotheses;
  doc["base_error"] = real(request.base_error);
  doc["flip_rates"] = reals(data.flip_rates);
  doc["files"] = {{"train_pred", train_pred}, {"train_labels", train_labels}, {"test_pred", test_pred}};
  stamp(doc, options);
  return doc;
}

}  // namespace confrate::cli
