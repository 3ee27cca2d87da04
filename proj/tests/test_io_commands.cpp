#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "confrate/commands.hpp"
#include "confrate/io.hpp"
#include "support.hpp"

using namespace confrate;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("confrate_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string file(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

cli::PipelineRequest request_for(const TempDir& dir, const std::string& sub) {
  cli::PipelineRequest r;
  r.train_pred = dir.path(sub + "/train_pred.csv");
  r.train_labels = dir.path(sub + "/train_labels.csv");
  r.test_pred = dir.path(sub + "/test_pred.csv");
  return r;
}

void generate(const TempDir& dir, const std::string& sub, std::size_t m, std::uint64_t seed = 7) {
  cli::GenerateRequest g;
  g.seed = seed;
  g.m = m;
  g.n = 64;
  g.hypotheses = 16;
  g.base_error = 0.1;
  g.out_dir = dir.path(sub);
  cli::run_generate(g, {true});
}

}  // namespace

TEST_CASE("prediction and label files round trip") {
  TempDir dir;
  const auto f = EnsembleMatrix::from_rows({{1, -1, 1}, {-1, -1, 1}});
  io::write_predictions_csv(dir.path("p.csv"), f);
  CHECK(slurp(dir.path("p.csv")) == "h1,h2,h3\n1,-1,1\n-1,-1,1\n");
  const auto back = io::read_predictions_csv(dir.path("p.csv"));
  CHECK(back.rows() == 2);
  CHECK(back.cols() == 3);
  CHECK(std::equal(back.entries().begin(), back.entries().end(), f.entries().begin()));

  io::write_labels_csv(dir.path("y.csv"), {1, -1});
  CHECK(slurp(dir.path("y.csv")) == "label\n1\n-1\n");
  CHECK(io::read_labels_csv(dir.path("y.csv")) == std::vector<std::int8_t>{1, -1});
}

TEST_CASE("prediction files are strict") {
  TempDir dir;
  CHECK(code_of([&] { io::read_predictions_csv(dir.file("a.csv", "h1,h2\n+1,-1\n")); }) ==
        ErrorCode::kParse);
  CHECK(code_of([&] { io::read_predictions_csv(dir.file("b.csv", "h1,h2\n0,-1\n")); }) ==
        ErrorCode::kParse);
  CHECK(code_of([&] { io::read_predictions_csv(dir.file("c.csv", "h1,h3\n1,-1\n")); }) ==
        ErrorCode::kParse);
  CHECK(code_of([&] { io::read_predictions_csv(dir.file("d.csv", "h1,h2\n1\n")); }) ==
        ErrorCode::kParse);
  CHECK(code_of([&] { io::read_predictions_csv(dir.file("e.csv", "h1,h2\n")); }) ==
        ErrorCode::kParse);
  CHECK(code_of([&] { io::read_labels_csv(dir.file("f.csv", "y\n1\n")); }) == ErrorCode::kParse);
  CHECK(code_of([&] { io::read_predictions_csv(dir.path("missing.csv")); }) == ErrorCode::kIo);
  CHECK_NOTHROW(io::read_predictions_csv(dir.file("g.csv", "h1,h2\r\n1,-1\r\n")));
}

TEST_CASE("votes files") {
  TempDir dir;
  CHECK(io::read_votes(dir.file("v.csv", "vote\n1\n-0.5\n0.25\n")) ==
        std::vector<double>{1.0, -0.5, 0.25});
  CHECK(io::read_votes(dir.file("v.json", " {\"votes\": [0.5, -1]}")) ==
        std::vector<double>{0.5, -1.0});
  CHECK(code_of([&] { io::read_votes(dir.file("w.csv", "vote\nabc\n")); }) == ErrorCode::kParse);
  CHECK(code_of([&] { io::read_votes(dir.file("w.json", "{\"votes\": [\"x\"]}")); }) ==
        ErrorCode::kParse);
  CHECK(code_of([&] { io::read_votes(dir.file("x.json", "{\"votes\": [")); }) == ErrorCode::kParse);
}

TEST_CASE("weights files") {
  TempDir dir;
  const auto w = io::read_weights_json(dir.file("w.json", "{\"weights\": [0.25, 0.75]}"));
  CHECK(w.posterior[1] == 0.75);
  CHECK_FALSE(w.prior.has_value());
  const auto wp = io::read_weights_json(
      dir.file("p.json", "{\"weights\": [0.5, 0.5], \"prior\": [0.9, 0.1]}"));
  REQUIRE(wp.prior.has_value());
  CHECK((*wp.prior)[0] == 0.9);
  CHECK(code_of([&] { io::read_weights_json(dir.file("q.json", "{\"w\": [1]}")); }) ==
        ErrorCode::kParse);
  CHECK(code_of([&] { io::read_weights_json(dir.file("r.json", "{\"weights\": [0.5]}")); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("twelve significant digits") {
  CHECK(cli::round12(0.1484375) == 0.1484375);
  CHECK(cli::round12(1.0 / 3.0) == 0.333333333333);
  CHECK(cli::round12(-0.0) == 0.0);
  CHECK(cli::real(std::nan("")).is_null());
  CHECK(cli::Json(cli::round12(0.6000000000000001)).dump() == "0.6");
}

TEST_CASE("exit codes") {
  CHECK(cli::exit_code(ErrorCode::kInfeasibleConstraint) == 2);
  CHECK(cli::exit_code(ErrorCode::kInvalidCost) == 2);
  CHECK(cli::exit_code(ErrorCode::kInfiniteDivergence) == 2);
  CHECK(cli::exit_code(ErrorCode::kParse) == 3);
  CHECK(cli::exit_code(ErrorCode::kDimension) == 3);
  CHECK(cli::exit_code(ErrorCode::kIo) == 4);
  const auto doc = cli::error_document(ErrorCode::kInfeasibleConstraint, "x");
  CHECK(doc["error"] == "infeasible_constraint");
  CHECK(doc["exit_code"] == 2);
}

TEST_CASE("posterior specs") {
  CHECK(cli::PosteriorSpec::parse("uniform").kind == cli::PosteriorSpec::Kind::kUniform);
  const auto e = cli::PosteriorSpec::parse("exp:2.5");
  CHECK(e.kind == cli::PosteriorSpec::Kind::kExp);
  CHECK(e.eta == 2.5);
  CHECK(e.describe() == "exp:2.5");
  CHECK(cli::PosteriorSpec::parse("w.json").kind == cli::PosteriorSpec::Kind::kFile);
  CHECK(code_of([] { cli::PosteriorSpec::parse("exp:"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { cli::PosteriorSpec::parse("exp:-1"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { cli::PosteriorSpec::parse("exp:1x"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("solve document reproduces its value from g* and z*") {
  TempDir dir;
  testing::Rng rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(rng.index(1, 12));
    std::string text = "vote\n";
    for (double& x : a) {
      x = cli::round12(rng.uniform(-1.0, 1.0));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g\n", x);
      text += buf;
    }
    const double lambda = cli::round12(testing::mean_abs(a) * rng.uniform(0.1, 0.95));
    const auto doc = cli::run_solve(dir.file("v.csv", text), lambda, {true});
    const auto g = doc["g_star"].get<std::vector<double>>();
    const auto z = doc["z_star"].get<std::vector<double>>();
    double p = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      p += g[i] * z[i];
    }
    p /= static_cast<double>(g.size());
    CHECK(cli::round12(p) == doctest::Approx(doc["value"].get<double>()).epsilon(1e-11));
    CHECK_FALSE(doc.contains("environment"));
  }
}

TEST_CASE("solve and abstain documents on fixture 1") {
  TempDir dir;
  const auto path = dir.file("f1.csv", "vote\n1\n0.8\n0.5\n0.2\n");
  const auto solve = cli::run_solve(path, 0.5, {true});
  CHECK(solve["v"] == 3);
  CHECK(solve["value"] == 0.6);
  const auto abst = cli::run_abstain(path, 0.5, 0.25, {true});
  CHECK(abst["w"] == 2);
  CHECK(abst["value_exact"] == 0.1484375);
  CHECK(abst["p_alg"] == cli::Json::parse("[0,0,0,0.6]"));
  CHECK(abst["loss_formula"] == 0.0875);
  CHECK(abst["loss_against_z_star"] == 0.1625);
  CHECK(abst["oracle_worst_case_loss"] == 0.1925);
  const auto cheap = cli::run_abstain(path, 0.5, 0.05, {true});
  CHECK(cheap["trivial"] == true);
  CHECK(cheap["value_exact"] == 0.05);
  CHECK(code_of([&] { cli::run_abstain(path, 0.5, 0.0, {true}); }) == ErrorCode::kInvalidCost);
  CHECK(code_of([&] { cli::run_solve(path, 0.7, {true}); }) == ErrorCode::kInfeasibleConstraint);
  CHECK(cli::run_solve(path, 0.5, {false}).contains("environment"));
}

TEST_CASE("abstain document omits the oracle above eight examples") {
  TempDir dir;
  const auto path = dir.file("v.csv", "vote\n1\n0.9\n0.8\n0.7\n0.6\n0.5\n0.4\n0.3\n0.2\n");
  const auto doc = cli::run_abstain(path, 0.4, 0.25, {true});
  CHECK(doc["oracle_worst_case_loss"].is_null());
  CHECK(doc.contains("oracle_note"));
}

TEST_CASE("generator is deterministic and calibrated") {
  TempDir dir;
  generate(dir, "a", 2000);
  generate(dir, "b", 2000);
  for (const char* name : {"train_pred.csv", "train_labels.csv", "test_pred.csv"}) {
    CHECK(slurp(dir.path(std::string("a/") + name)) == slurp(dir.path(std::string("b/") + name)));
  }
  const LabeledSample sample(io::read_predictions_csv(dir.path("a/train_pred.csv")),
                             io::read_labels_csv(dir.path("a/train_labels.csv")));
  const double e = gibbs_train_error(sample, WeightVector::uniform(16));
  CHECK(e >= 0.05);
  CHECK(e <= 0.15);

  cli::GenerateRequest bad;
  bad.base_error = 0.5;
  CHECK(code_of([&] { cli::generate_data(bad); }) == ErrorCode::kInvalidArgument);
  bad.base_error = 0.1;
  bad.m = 0;
  CHECK(code_of([&] { cli::generate_data(bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("pipeline on the seed 7 data set") {
  TempDir dir;
  generate(dir, "d", 2000);
  auto request = request_for(dir, "d");
  request.alpha = 0.25;
  const auto report = cli::run_pipeline(request);
  CHECK_FALSE(report.fallback);
  CHECK(report.bounds.lambda_hat >= 0.45);
  CHECK(report.bounds.lambda_hat <= 0.65);
  REQUIRE(report.game.has_value());
  REQUIRE(report.abstain.has_value());
  CHECK(report.examples.size() == 64);
  for (std::size_t i = 0; i < report.examples.size(); ++i) {
    CHECK(report.examples[i].index == i);
    CHECK(report.examples[i].prediction == report.game->g_star[i]);
    CHECK(report.examples[i].abstain_probability == report.abstain->p_alg[i]);
  }
  CHECK(report.bounds.error_bound_raw.has_value());
  CHECK(report.bounds.abstain_bound_raw.has_value());
  const auto doc = cli::pipeline_document(report, {true});
  CHECK(doc["fallback"] == false);
  CHECK(doc["examples"].size() == 64);
}

TEST_CASE("pipeline falls back on a degenerate bound") {
  TempDir dir;
  generate(dir, "d", 100);
  auto request = request_for(dir, "d");
  request.alpha = 0.25;
  const auto report = cli::run_pipeline(request);
  CHECK(report.bounds.degenerate);
  CHECK(report.fallback);
  CHECK_FALSE(report.game.has_value());
  CHECK_FALSE(report.abstain.has_value());
  for (const auto& e : report.examples) {
    CHECK(e.prediction == e.vote);
    CHECK(e.abstain_probability == 0.0);
  }
}

TEST_CASE("zero temperature matches the uniform posterior") {
  TempDir dir;
  generate(dir, "d", 2000);
  auto uniform = request_for(dir, "d");
  auto exp0 = uniform;
  exp0.posterior = cli::PosteriorSpec::parse("exp:0");
  auto a = cli::pipeline_document(cli::run_pipeline(uniform), {true});
  auto b = cli::pipeline_document(cli::run_pipeline(exp0), {true});
  CHECK(a["posterior"] == "uniform");
  CHECK(b["posterior"] == "exp:0");
  a.erase("posterior");
  b.erase("posterior");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("pipeline validation") {
  TempDir dir;
  generate(dir, "d", 200);
  auto request = request_for(dir, "d");

  auto wide = request;
  wide.test_pred = dir.file("wide.csv", "h1,h2\n1,1\n");
  CHECK(code_of([&] { cli::run_pipeline(wide); }) == ErrorCode::kDimension);

  auto short_labels = request;
  short_labels.train_labels = dir.file("y.csv", "label\n1\n");
  CHECK(code_of([&] { cli::run_pipeline(short_labels); }) == ErrorCode::kDimension);

  std::string w = "{\"weights\": [1";
  std::string prior = "\"prior\": [0";
  for (int j = 1; j < 16; ++j) {
    w += ",0";
    prior += j == 1 ? ",1" : ",0";
  }
  auto support = request;
  support.posterior = cli::PosteriorSpec::parse(dir.file("w.json", w + "], " + prior + "]}"));
  CHECK(code_of([&] { cli::run_pipeline(support); }) == ErrorCode::kInfiniteDivergence);
  CHECK(cli::exit_code(ErrorCode::kInfiniteDivergence) == 2);

  auto short_weights = request;
  short_weights.posterior = cli::PosteriorSpec::parse(dir.file("s.json", "{\"weights\": [0.5, 0.5]}"));
  CHECK(code_of([&] { cli::run_pipeline(short_weights); }) == ErrorCode::kDimension);

  auto bad_delta = request;
  bad_delta.delta = 1.0;
  CHECK(code_of([&] { cli::run_pipeline(bad_delta); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("verify on fixture 1 echoes the game value") {
  TempDir dir;
  cli::VerifyRequest r;
  r.count = 1;
  r.votes_path = dir.file("f1.csv", "vote\n1\n0.8\n0.5\n0.2\n");
  r.lambda = 0.5;
  r.alpha = 0.25;
  const auto out = cli::run_verify(r, {true});
  CHECK(out.passed);
  const auto& first = out.document["checks"][0];
  CHECK(first["check"] == "game_value_vs_enumeration");
  CHECK(first["closed_form_value"] == 0.6);
  CHECK(first["oracle_value"] == 0.6);
}

TEST_CASE("verify batch and guards") {
  cli::VerifyRequest r;
  const auto out = cli::run_verify(r, {true});
  CHECK(out.passed);
  CHECK(out.document["max_deviation"].get<double>() < 1e-9);
  CHECK(out.document["checks"].size() == 9);
  r.nmax = 9;
  CHECK(code_of([&] { cli::run_verify(r, {true}); }) == ErrorCode::kInvalidArgument);
  r.nmax = 6;
  r.count = 0;
  CHECK(code_of([&] { cli::run_verify(r, {true}); }) == ErrorCode::kInvalidArgument);
}
