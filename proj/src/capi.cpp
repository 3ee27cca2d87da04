#include "confrate/confrate.h"

#include <algorithm>
#include <exception>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>

#include "confrate/abstain_game.hpp"
#include "confrate/commands.hpp"
#include "confrate/minimax_game.hpp"
#include "confrate/pac_bayes.hpp"

struct cr_profile {
  confrate::VoteProfile profile;
};

struct cr_game {
  confrate::GameSolution solution;
};

struct cr_abstain {
  confrate::AbstainSolution solution;
};

struct cr_document {
  std::string text;
};

namespace {

thread_local std::string last_error;

cr_status status_of(confrate::ErrorCode code) {
  using confrate::ErrorCode;
  switch (code) {
    case ErrorCode::kDimension:
      return CR_DIMENSION_MISMATCH;
    case ErrorCode::kInfeasibleConstraint:
      return CR_INFEASIBLE_CONSTRAINT;
    case ErrorCode::kDegenerateBound:
      return CR_DEGENERATE_BOUND;
    case ErrorCode::kDegenerateAbstain:
      return CR_DEGENERATE_ABSTAIN;
    case ErrorCode::kInvalidCost:
      return CR_INVALID_COST;
    case ErrorCode::kInfiniteDivergence:
      return CR_INFINITE_DIVERGENCE;
    case ErrorCode::kInvalidArgument:
      return CR_INVALID_ARGUMENT;
    case ErrorCode::kParse:
      return CR_PARSE_ERROR;
    case ErrorCode::kIo:
      return CR_IO_ERROR;
  }
  return CR_INTERNAL_ERROR;
}

cr_status fail(cr_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
cr_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const confrate::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CR_PARSE_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CR_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CR_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(CR_INTERNAL_ERROR, "unknown error");
  }
}

cr_status null_argument(const char* what) {
  return fail(CR_INVALID_ARGUMENT, std::string("null argument: ") + what);
}

cr_document* make_document(const confrate::cli::Json& doc) {
  return new cr_document{doc.dump(2) + "\n"};
}

cr_status copy_out(std::span<const double> values, double* out, size_t n) {
  if (out == nullptr) {
    return null_argument("out");
  }
  if (n != values.size()) {
    return fail(CR_DIMENSION_MISMATCH, "output buffer length does not match example count");
  }
  std::copy(values.begin(), values.end(), out);
  return CR_OK;
}

confrate::cli::OutputOptions options_of(int canonical) {
  return confrate::cli::OutputOptions{canonical != 0};
}

}  // namespace

extern "C" {

const char* cr_status_name(cr_status status) {
  switch (status) {
    case CR_OK:
      return "ok";
    case CR_DIMENSION_MISMATCH:
      return "dimension_mismatch";
    case CR_INFEASIBLE_CONSTRAINT:
      return "infeasible_constraint";
    case CR_DEGENERATE_BOUND:
      return "degenerate_bound";
    case CR_DEGENERATE_ABSTAIN:
      return "degenerate_abstain";
    case CR_INVALID_COST:
      return "invalid_cost";
    case CR_INFINITE_DIVERGENCE:
      return "infinite_divergence";
    case CR_INVALID_ARGUMENT:
      return "invalid_argument";
    case CR_PARSE_ERROR:
      return "parse_error";
    case CR_IO_ERROR:
      return "io_error";
    case CR_VERIFICATION_FAILED:
      return "verification_failed";
    case CR_INTERNAL_ERROR:
      return "internal_error";
  }
  return "unknown";
}

int cr_status_exit_code(cr_status status) {
  switch (status) {
    case CR_OK:
      return 0;
    case CR_VERIFICATION_FAILED:
      return 1;
    case CR_DIMENSION_MISMATCH:
    case CR_PARSE_ERROR:
      return 3;
    case CR_IO_ERROR:
      return 4;
    case CR_INTERNAL_ERROR:
      return 5;
    default:
      return 2;
  }
}

const char* cr_last_error(void) { return last_error.c_str(); }

const char* cr_version(void) { return confrate::cli::version(); }

cr_status cr_profile_create(const double* votes, size_t n, double lambda, cr_profile** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (votes == nullptr && n > 0) {
    return null_argument("votes");
  }
  return guarded([&] {
    *out = new cr_profile{confrate::sort_profile(std::span<const double>(votes, n), lambda)};
    return CR_OK;
  });
}

void cr_profile_free(cr_profile* profile) { delete profile; }

size_t cr_profile_size(const cr_profile* profile) {
  return profile ? profile->profile.size() : 0;
}

cr_status cr_game_solve(const cr_profile* profile, cr_game** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (profile == nullptr) {
    return null_argument("profile");
  }
  return guarded([&] {
    *out = new cr_game{confrate::solve_game(profile->profile)};
    return CR_OK;
  });
}

void cr_game_free(cr_game* game) { delete game; }

size_t cr_game_threshold(const cr_game* game) { return game ? game->solution.v : 0; }

double cr_game_value(const cr_game* game) { return game ? game->solution.value : 0.0; }

double cr_game_lower_bound(const cr_game* game) {
  return game ? game->solution.lower_bound : 0.0;
}

cr_status cr_game_predictor(const cr_game* game, double* out, size_t n) {
  if (game == nullptr) {
    return null_argument("game");
  }
  return copy_out(game->solution.g_star.values(), out, n);
}

cr_status cr_game_nature(const cr_game* game, double* out, size_t n) {
  if (game == nullptr) {
    return null_argument("game");
  }
  return copy_out(game->solution.z_star.values(), out, n);
}

cr_status cr_abstain_solve(const cr_profile* profile, double alpha, cr_abstain** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (profile == nullptr) {
    return null_argument("profile");
  }
  return guarded([&] {
    *out = new cr_abstain{confrate::solve_abstain(profile->profile, alpha)};
    return CR_OK;
  });
}

void cr_abstain_free(cr_abstain* abstain) { delete abstain; }

int cr_abstain_trivial(const cr_abstain* abstain) {
  return abstain && abstain->solution.trivial ? 1 : 0;
}

size_t cr_abstain_w(const cr_abstain* abstain) {
  return abstain ? abstain->solution.w.value_or(0) : 0;
}

double cr_abstain_value(const cr_abstain* abstain) {
  return abstain ? abstain->solution.value_exact : 0.0;
}

double cr_abstain_value_lower(const cr_abstain* abstain) {
  return abstain ? abstain->solution.value_lower : 0.0;
}

double cr_abstain_value_upper(const cr_abstain* abstain) {
  return abstain ? abstain->solution.value_upper : 0.0;
}

double cr_abstain_loss_formula(const cr_abstain* abstain) {
  return abstain ? abstain->solution.loss_formula : 0.0;
}

cr_status cr_abstain_strategy(const cr_abstain* abstain, double* out, size_t n) {
  if (abstain == nullptr) {
    return null_argument("abstain");
  }
  return copy_out(abstain->solution.p_alg.values(), out, n);
}

cr_status cr_kl_bernoulli(double p, double q, double* out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  return guarded([&] {
    *out = confrate::kl_bernoulli(p, q);
    return CR_OK;
  });
}

cr_status cr_epsilon(size_t m, double kl, double delta, double* out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  return guarded([&] {
    *out = confrate::epsilon(m, kl, delta);
    return CR_OK;
  });
}

cr_status cr_lambda_hat(double gibbs_error, double epsilon, double* out, int* degenerate) {
  if (out == nullptr) {
    return null_argument("out");
  }
  return guarded([&] {
    const confrate::LambdaHat lh = confrate::lambda_hat(gibbs_error, epsilon);
    *out = lh.value;
    if (degenerate != nullptr) {
      *degenerate = lh.degenerate ? 1 : 0;
    }
    return CR_OK;
  });
}

const char* cr_document_text(const cr_document* document) {
  return document ? document->text.c_str() : "";
}

void cr_document_free(cr_document* document) { delete document; }

cr_status cr_error_document(cr_status status, const char* message, cr_document** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  return guarded([&] {
    const confrate::cli::Json doc{{"error", cr_status_name(status)},
                                  {"message", message ? message : ""},
                                  {"exit_code", cr_status_exit_code(status)}};
    *out = make_document(doc);
    return CR_OK;
  });
}

cr_status cr_run_solve(const char* votes_path, double lambda, int canonical, cr_document** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (votes_path == nullptr) {
    return null_argument("votes_path");
  }
  return guarded([&] {
    *out = make_document(confrate::cli::run_solve(votes_path, lambda, options_of(canonical)));
    return CR_OK;
  });
}

cr_status cr_run_abstain(const char* votes_path, double lambda, double alpha, int canonical,
                         cr_document** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (votes_path == nullptr) {
    return null_argument("votes_path");
  }
  return guarded([&] {
    *out = make_document(
        confrate::cli::run_abstain(votes_path, lambda, alpha, options_of(canonical)));
    return CR_OK;
  });
}

cr_status cr_run_pipeline(const cr_pipeline_args* args, int canonical, cr_document** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (args == nullptr || !args->train_pred || !args->train_labels || !args->test_pred) {
    return null_argument("pipeline paths");
  }
  return guarded([&] {
    confrate::cli::PipelineRequest request;
    request.train_pred = args->train_pred;
    request.train_labels = args->train_labels;
    request.test_pred = args->test_pred;
    request.posterior =
        confrate::cli::PosteriorSpec::parse(args->posterior ? args->posterior : "uniform");
    request.delta = args->delta;
    if (args->has_alpha) {
      request.alpha = args->alpha;
    }
    if (args->has_seed) {
      request.seed = args->seed;
    }
    const auto report = confrate::cli::run_pipeline(request);
    *out = make_document(confrate::cli::pipeline_document(report, options_of(canonical)));
    return CR_OK;
  });
}

cr_status cr_run_verify(const cr_verify_args* args, int canonical, cr_document** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (args == nullptr) {
    return null_argument("args");
  }
  return guarded([&] {
    confrate::cli::VerifyRequest request;
    request.count = args->count;
    request.seed = args->seed;
    request.nmax = args->nmax;
    if (args->votes_path) {
      request.votes_path = std::string(args->votes_path);
    }
    if (args->has_lambda) {
      request.lambda = args->lambda;
    }
    if (args->has_alpha) {
      request.alpha = args->alpha;
    }
    const auto outcome = confrate::cli::run_verify(request, options_of(canonical));
    *out = make_document(outcome.document);
    if (!outcome.passed) {
      last_error = "one or more certification checks failed";
      return CR_VERIFICATION_FAILED;
    }
    return CR_OK;
  });
}

cr_status cr_run_generate(const cr_generate_args* args, int canonical, cr_document** out) {
  if (out == nullptr) {
    return null_argument("out");
  }
  *out = nullptr;
  if (args == nullptr || args->out_dir == nullptr) {
    return null_argument("generate args");
  }
  return guarded([&] {
    confrate::cli::GenerateRequest request;
    request.seed = args->seed;
    request.m = args->m;
    request.n = args->n;
    request.hypotheses = args->hypotheses;
    request.base_error = args->base_error;
    request.out_dir = args->out_dir;
    *out = make_document(confrate::cli::run_generate(request, options_of(canonical)));
    return CR_OK;
  });
}

}  // extern "C"
