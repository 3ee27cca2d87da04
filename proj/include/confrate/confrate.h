#ifndef CONFRATE_CONFRATE_H
#define CONFRATE_CONFRATE_H

/* C interface to the confrate library. Objects are opaque handles released
 * with the matching *_free function. Functions return a cr_status; on failure
 * the message is available from cr_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(CONFRATE_BUILDING_LIBRARY)
#define CONFRATE_API __attribute__((visibility("default")))
#else
#define CONFRATE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cr_status {
  CR_OK = 0,
  CR_DIMENSION_MISMATCH = 1,
  CR_INFEASIBLE_CONSTRAINT = 2,
  CR_DEGENERATE_BOUND = 3,
  CR_DEGENERATE_ABSTAIN = 4,
  CR_INVALID_COST = 5,
  CR_INFINITE_DIVERGENCE = 6,
  CR_INVALID_ARGUMENT = 7,
  CR_PARSE_ERROR = 8,
  CR_IO_ERROR = 9,
  CR_VERIFICATION_FAILED = 10,
  CR_INTERNAL_ERROR = 11
} cr_status;

CONFRATE_API const char* cr_status_name(cr_status status);
/* 0 ok, 1 verification failed, 2 domain/validation, 3 parse/dimension,
 * 4 I/O, 5 internal. */
CONFRATE_API int cr_status_exit_code(cr_status status);
CONFRATE_API const char* cr_last_error(void);
CONFRATE_API const char* cr_version(void);

/* Vote profile: votes a_i in [-1, 1] and a correlation bound lambda. */
typedef struct cr_profile cr_profile;
CONFRATE_API cr_status cr_profile_create(const double* votes, size_t n, double lambda,
                                         cr_profile** out);
CONFRATE_API void cr_profile_free(cr_profile* profile);
CONFRATE_API size_t cr_profile_size(const cr_profile* profile);

/* Plain game solution. Vectors are in the original example order. */
typedef struct cr_game cr_game;
CONFRATE_API cr_status cr_game_solve(const cr_profile* profile, cr_game** out);
CONFRATE_API void cr_game_free(cr_game* game);
CONFRATE_API size_t cr_game_threshold(const cr_game* game);
CONFRATE_API double cr_game_value(const cr_game* game);
CONFRATE_API double cr_game_lower_bound(const cr_game* game);
CONFRATE_API cr_status cr_game_predictor(const cr_game* game, double* out, size_t n);
CONFRATE_API cr_status cr_game_nature(const cr_game* game, double* out, size_t n);

/* Abstain game solution. */
typedef struct cr_abstain cr_abstain;
CONFRATE_API cr_status cr_abstain_solve(const cr_profile* profile, double alpha, cr_abstain** out);
CONFRATE_API void cr_abstain_free(cr_abstain* abstain);
CONFRATE_API int cr_abstain_trivial(const cr_abstain* abstain);
/* 0 when undefined (trivial game or alpha >= 1/2). */
CONFRATE_API size_t cr_abstain_w(const cr_abstain* abstain);
CONFRATE_API double cr_abstain_value(const cr_abstain* abstain);
CONFRATE_API double cr_abstain_value_lower(const cr_abstain* abstain);
CONFRATE_API double cr_abstain_value_upper(const cr_abstain* abstain);
CONFRATE_API double cr_abstain_loss_formula(const cr_abstain* abstain);
CONFRATE_API cr_status cr_abstain_strategy(const cr_abstain* abstain, double* out, size_t n);

/* PAC-Bayes helpers. */
CONFRATE_API cr_status cr_kl_bernoulli(double p, double q, double* out);
CONFRATE_API cr_status cr_epsilon(size_t m, double kl, double delta, double* out);
CONFRATE_API cr_status cr_lambda_hat(double gibbs_error, double epsilon, double* out,
                                     int* degenerate);

/* JSON documents produced by the commands. */
typedef struct cr_document cr_document;
CONFRATE_API const char* cr_document_text(const cr_document* document);
CONFRATE_API void cr_document_free(cr_document* document);
CONFRATE_API cr_status cr_error_document(cr_status status, const char* message, cr_document** out);

CONFRATE_API cr_status cr_run_solve(const char* votes_path, double lambda, int canonical,
                                    cr_document** out);
CONFRATE_API cr_status cr_run_abstain(const char* votes_path, double lambda, double alpha,
                                      int canonical, cr_document** out);

typedef struct cr_pipeline_args {
  const char* train_pred;
  const char* train_labels;
  const char* test_pred;
  const char* posterior; /* "uniform", "exp:<eta>" or a weights file; NULL means uniform */
  double delta;
  int has_alpha;
  double alpha;
  int has_seed;
  uint64_t seed;
} cr_pipeline_args;
CONFRATE_API cr_status cr_run_pipeline(const cr_pipeline_args* args, int canonical,
                                       cr_document** out);

typedef struct cr_verify_args {
  size_t count;
  uint64_t seed;
  size_t nmax;
  const char* votes_path; /* NULL for random instances */
  int has_lambda;
  double lambda;
  int has_alpha;
  double alpha;
} cr_verify_args;
/* Returns CR_VERIFICATION_FAILED, with the report in *out, when a check fails. */
CONFRATE_API cr_status cr_run_verify(const cr_verify_args* args, int canonical, cr_document** out);

typedef struct cr_generate_args {
  uint64_t seed;
  size_t m;
  size_t n;
  size_t hypotheses;
  double base_error;
  const char* out_dir;
} cr_generate_args;
CONFRATE_API cr_status cr_run_generate(const cr_generate_args* args, int canonical,
                                       cr_document** out);

#ifdef __cplusplus
}
#endif

#endif
