#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "confrate/confrate.h"

namespace {

struct Common {
  bool canonical = false;
  std::string out;
};

int emit(cr_document* doc, const std::string& out_path) {
  const char* text = cr_document_text(doc);
  int code = 0;
  if (out_path.empty()) {
    std::fputs(text, stdout);
  } else {
    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (f == nullptr || std::fputs(text, f) < 0 || std::fclose(f) != 0) {
      cr_document* err = nullptr;
      cr_error_document(CR_IO_ERROR, ("cannot write " + out_path).c_str(), &err);
      std::fputs(cr_document_text(err), stdout);
      cr_document_free(err);
      code = cr_status_exit_code(CR_IO_ERROR);
    }
  }
  cr_document_free(doc);
  return code;
}

int report_error(cr_status status, const std::string& message) {
  cr_document* err = nullptr;
  if (cr_error_document(status, message.c_str(), &err) == CR_OK) {
    std::fputs(cr_document_text(err), stdout);
    cr_document_free(err);
  }
  return cr_status_exit_code(status);
}

// Prints the document (when any) and maps the status to an exit code.
int finish(cr_status status, cr_document* doc, const std::string& out_path) {
  if (status == CR_OK) {
    return emit(doc, out_path);
  }
  if (doc != nullptr) {
    const int written = emit(doc, out_path);
    return written != 0 ? written : cr_status_exit_code(status);
  }
  return report_error(status, cr_last_error());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-rated transductive prediction with PAC-Bayes bounds", "confrate"};
  app.set_version_flag("--version", std::string(cr_version()));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&common](CLI::App* sub, const char* out_help) {
    sub->add_flag("--canonical", common.canonical, "Omit environment metadata from the output");
    sub->add_option("--out", common.out, out_help);
  };

  std::string votes;
  double lambda = 0.0;
  double alpha = 0.0;

  auto* solve = app.add_subcommand("solve", "Solve the prediction game for a vote vector");
  solve->add_option("--votes", votes, "Votes file (CSV 'vote' column or JSON {\"votes\": [...]})")
      ->required();
  solve->add_option("--lambda", lambda, "Correlation bound in (0, 1]")->required();
  add_common(solve, "Write the JSON report to this file instead of stdout");

  auto* abstain = app.add_subcommand("abstain", "Solve the abstain game for a vote vector");
  abstain->add_option("--votes", votes, "Votes file")->required();
  abstain->add_option("--lambda", lambda, "Correlation bound in (0, 1]")->required();
  abstain->add_option("--alpha", alpha, "Abstention cost, positive")->required();
  add_common(abstain, "Write the JSON report to this file instead of stdout");

  std::string train_pred;
  std::string train_labels;
  std::string test_pred;
  std::string posterior = "uniform";
  double delta = 0.05;
  std::optional<double> pipeline_alpha;
  std::optional<std::uint64_t> pipeline_seed;
  auto* pipeline = app.add_subcommand("pipeline", "Bound, solve and predict from ensemble outputs");
  pipeline->add_option("--train-pred", train_pred, "Training predictions CSV")->required();
  pipeline->add_option("--train-labels", train_labels, "Training labels CSV")->required();
  pipeline->add_option("--test-pred", test_pred, "Test predictions CSV")->required();
  pipeline->add_option("--posterior", posterior, "uniform, exp:<eta> or a weights JSON file")
      ->capture_default_str();
  pipeline->add_option("--delta", delta, "Confidence parameter in (0, 1)")->capture_default_str();
  pipeline->add_option("--alpha", pipeline_alpha, "Abstention cost; enables the abstain outputs");
  pipeline->add_option("--seed", pipeline_seed, "Seed echoed into the report");
  add_common(pipeline, "Write the JSON report to this file instead of stdout");

  std::size_t count = 200;
  std::uint64_t seed = 1;
  std::size_t nmax = 6;
  std::optional<double> verify_lambda;
  std::optional<double> verify_alpha;
  std::string verify_votes;
  auto* verify = app.add_subcommand("verify", "Certify closed forms against exact oracles");
  verify->add_option("--count", count, "Number of instances")->capture_default_str();
  verify->add_option("--seed", seed, "Random seed")->capture_default_str();
  verify->add_option("--nmax", nmax, "Largest instance size, at most 8")->capture_default_str();
  verify->add_option("--votes", verify_votes, "Certify this vote vector instead of random ones");
  verify->add_option("--lambda", verify_lambda, "Correlation bound for --votes");
  verify->add_option("--alpha", verify_alpha, "Abstention cost for --votes");
  add_common(verify, "Write the JSON report to this file instead of stdout");

  cr_generate_args gen_args{7, 2000, 64, 16, 0.1, nullptr};
  std::string gen_out = ".";
  auto* gen = app.add_subcommand("gen", "Write a synthetic ensemble data set");
  gen->add_option("--seed", gen_args.seed, "Random seed")->capture_default_str();
  gen->add_option("--m", gen_args.m, "Training examples")->capture_default_str();
  gen->add_option("--n", gen_args.n, "Test examples")->capture_default_str();
  gen->add_option("--H", gen_args.hypotheses, "Hypotheses")->capture_default_str();
  gen->add_option("--base-error", gen_args.base_error, "Typical hypothesis error in (0, 0.5)")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_flag("--canonical", common.canonical, "Omit environment metadata from the output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(CR_INVALID_ARGUMENT, e.what());
  }

  const int canonical = common.canonical ? 1 : 0;
  cr_document* doc = nullptr;
  if (solve->parsed()) {
    const cr_status status = cr_run_solve(votes.c_str(), lambda, canonical, &doc);
    return finish(status, doc, common.out);
  }
  if (abstain->parsed()) {
    const cr_status status = cr_run_abstain(votes.c_str(), lambda, alpha, canonical, &doc);
    return finish(status, doc, common.out);
  }
  if (pipeline->parsed()) {
    cr_pipeline_args args{};
    args.train_pred = train_pred.c_str();
    args.train_labels = train_labels.c_str();
    args.test_pred = test_pred.c_str();
    args.posterior = posterior.c_str();
    args.delta = delta;
    args.has_alpha = pipeline_alpha.has_value();
    args.alpha = pipeline_alpha.value_or(0.0);
    args.has_seed = pipeline_seed.has_value();
    args.seed = pipeline_seed.value_or(0);
    const cr_status status = cr_run_pipeline(&args, canonical, &doc);
    return finish(status, doc, common.out);
  }
  if (verify->parsed()) {
    cr_verify_args args{};
    args.count = count;
    args.seed = seed;
    args.nmax = nmax;
    args.votes_path = verify_votes.empty() ? nullptr : verify_votes.c_str();
    args.has_lambda = verify_lambda.has_value();
    args.lambda = verify_lambda.value_or(0.0);
    args.has_alpha = verify_alpha.has_value();
    args.alpha = verify_alpha.value_or(0.0);
    const cr_status status = cr_run_verify(&args, canonical, &doc);
    return finish(status, doc, common.out);
  }
  gen_args.out_dir = gen_out.c_str();
  const cr_status status = cr_run_generate(&gen_args, canonical, &doc);
    return finish(status, doc, std::string());
}
