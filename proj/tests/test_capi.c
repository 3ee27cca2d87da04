#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "confrate/confrate.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);   \
      ++failures;                                                  \
    }                                                              \
  } while (0)

#define NEAR(x, y) EXPECT(fabs((x) - (y)) <= 1e-12)

static void test_game(void) {
  const double votes[] = {1.0, 0.8, 0.5, 0.2};
  cr_profile* profile = NULL;
  EXPECT(cr_profile_create(votes, 4, 0.5, &profile) == CR_OK);
  EXPECT(cr_profile_size(profile) == 4);

  cr_game* game = NULL;
  EXPECT(cr_game_solve(profile, &game) == CR_OK);
  EXPECT(cr_game_threshold(game) == 3);
  NEAR(cr_game_value(game), 0.6);
  NEAR(cr_game_lower_bound(game), 0.55);
  double g[4];
  double z[4];
  EXPECT(cr_game_predictor(game, g, 4) == CR_OK);
  EXPECT(cr_game_nature(game, z, 4) == CR_OK);
  NEAR(g[3], 0.4);
  NEAR(z[2], 0.4);
  EXPECT(cr_game_predictor(game, g, 3) == CR_DIMENSION_MISMATCH);

  cr_abstain* abstain = NULL;
  EXPECT(cr_abstain_solve(profile, 0.25, &abstain) == CR_OK);
  EXPECT(!cr_abstain_trivial(abstain));
  EXPECT(cr_abstain_w(abstain) == 2);
  NEAR(cr_abstain_value(abstain), 0.1484375);
  NEAR(cr_abstain_value_lower(abstain), 0.125);
  NEAR(cr_abstain_value_upper(abstain), 0.1875);
  NEAR(cr_abstain_loss_formula(abstain), 0.0875);
  double p[4];
  EXPECT(cr_abstain_strategy(abstain, p, 4) == CR_OK);
  NEAR(p[3], 0.6);
  cr_abstain_free(abstain);

  EXPECT(cr_abstain_solve(profile, 0.0, &abstain) == CR_INVALID_COST);
  EXPECT(abstain == NULL);
  EXPECT(strlen(cr_last_error()) > 0);

  cr_game_free(game);
  cr_profile_free(profile);
}

static void test_errors(void) {
  const double votes[] = {1.0, 0.8, 0.5, 0.2};
  cr_profile* profile = NULL;
  EXPECT(cr_profile_create(votes, 4, 0.7, &profile) == CR_INFEASIBLE_CONSTRAINT);
  EXPECT(profile == NULL);
  EXPECT(strstr(cr_last_error(), "lambda") != NULL);
  EXPECT(cr_profile_create(votes, 4, 0.0, &profile) == CR_DEGENERATE_BOUND);
  EXPECT(cr_profile_create(NULL, 4, 0.5, &profile) == CR_INVALID_ARGUMENT);
  EXPECT(cr_profile_create(votes, 4, 0.5, NULL) == CR_INVALID_ARGUMENT);
  EXPECT(cr_game_solve(NULL, NULL) == CR_INVALID_ARGUMENT);

  EXPECT(cr_status_exit_code(CR_OK) == 0);
  EXPECT(cr_status_exit_code(CR_VERIFICATION_FAILED) == 1);
  EXPECT(cr_status_exit_code(CR_INFEASIBLE_CONSTRAINT) == 2);
  EXPECT(cr_status_exit_code(CR_INFINITE_DIVERGENCE) == 2);
  EXPECT(cr_status_exit_code(CR_PARSE_ERROR) == 3);
  EXPECT(cr_status_exit_code(CR_DIMENSION_MISMATCH) == 3);
  EXPECT(cr_status_exit_code(CR_IO_ERROR) == 4);
  EXPECT(strcmp(cr_status_name(CR_INFEASIBLE_CONSTRAINT), "infeasible_constraint") == 0);

  cr_document* doc = NULL;
  EXPECT(cr_error_document(CR_IO_ERROR, "cannot open x", &doc) == CR_OK);
  EXPECT(strstr(cr_document_text(doc), "\"io_error\"") != NULL);
  EXPECT(strstr(cr_document_text(doc), "\"exit_code\": 4") != NULL);
  cr_document_free(doc);

  EXPECT(cr_run_solve("/nonexistent/votes.csv", 0.5, 1, &doc) == CR_IO_ERROR);
  EXPECT(doc == NULL);
}

static void test_pac_bayes(void) {
  double x = 0.0;
  int degenerate = -1;
  EXPECT(cr_kl_bernoulli(0.1, 0.3, &x) == CR_OK);
  EXPECT(fabs(x - 0.1163217566) <= 1e-9);
  EXPECT(cr_kl_bernoulli(0.1, 0.0, &x) == CR_INFINITE_DIVERGENCE);
  EXPECT(cr_epsilon(2000, 0.0, 0.05, &x) == CR_OK);
  EXPECT(fabs(x - 0.106254) <= 1e-5);
  EXPECT(cr_lambda_hat(0.1, x, &x, &degenerate) == CR_OK);
  EXPECT(fabs(x - 0.587492) <= 1e-5);
  EXPECT(degenerate == 0);
  EXPECT(cr_epsilon(0, 0.0, 0.05, &x) == CR_INVALID_ARGUMENT);
}

static void test_verify(void) {
  cr_verify_args args;
  memset(&args, 0, sizeof args);
  args.count = 20;
  args.seed = 3;
  args.nmax = 5;
  cr_document* doc = NULL;
  EXPECT(cr_run_verify(&args, 1, &doc) == CR_OK);
  EXPECT(strstr(cr_document_text(doc), "\"passed\": true") != NULL);
  EXPECT(strstr(cr_document_text(doc), "generated_at") == NULL);
  cr_document_free(doc);
  args.nmax = 9;
  EXPECT(cr_run_verify(&args, 1, &doc) == CR_INVALID_ARGUMENT);
}

int main(void) {
  EXPECT(strlen(cr_version()) > 0);
  test_game();
  test_errors();
  test_pac_bayes();
  test_verify();
  if (failures != 0) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return EXIT_FAILURE;
  }
  printf("capi: all checks passed\n");
  return EXIT_SUCCESS;
}
