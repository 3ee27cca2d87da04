#pragma once

// Command implementations behind the CLI and the C API. Every command returns
// an ordered JSON document; reals carry at most 12 significant digits.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "confrate/abstain_game.hpp"
#include "confrate/error.hpp"
#include "confrate/minimax_game.hpp"
#include "confrate/model.hpp"
#include "confrate/pac_bayes.hpp"

namespace confrate::cli {

using Json = nlohmann::ordered_json;

const char* version() noexcept;

/// Process exit code for an error category: 2 domain/validation,
/// 3 parse/dimension, 4 I/O.
int exit_code(ErrorCode code) noexcept;

struct OutputOptions {
  bool canonical = false;  // omit environment metadata
};

double round12(double x);
Json real(double x);
Json reals(std::span<const double> xs);

Json error_document(ErrorCode code, const std::string& message);

Json game_document(const VoteProfile& profile, const GameSolution& solution);
Json abstain_document(const VoteProfile& profile, const AbstainSolution& solution);

Json run_solve(const std::string& votes_path, double lambda, const OutputOptions& options);
Json run_abstain(const std::string& votes_path, double lambda, double alpha,
                 const OutputOptions& options);

struct PosteriorSpec {
  enum class Kind { kUniform, kExp, kFile };
  Kind kind = Kind::kUniform;
  double eta = 0.0;
  std::string path;

  /// "uniform", "exp:<eta>" or a weights file path.
  static PosteriorSpec parse(const std::string& text);
  std::string describe() const;
};

struct PipelineRequest {
  std::string train_pred;
  std::string train_labels;
  std::string test_pred;
  PosteriorSpec posterior;
  double delta = 0.05;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
};

struct ExampleRecord {
  std::size_t index = 0;
  double vote = 0.0;
  double prediction = 0.0;
  double abstain_probability = 0.0;
  int label = 0;
};

struct PipelineReport {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t hypotheses = 0;
  double delta = 0.0;
  std::string posterior;
  std::vector<double> weights;
  BoundReport bounds;
  std::optional<GameSolution> game;
  std::optional<AbstainSolution> abstain;
  std::vector<ExampleRecord> examples;
  bool fallback = false;
  std::optional<std::uint64_t> seed;
};

PipelineReport run_pipeline(const PipelineRequest& request);
Json pipeline_document(const PipelineReport& report, const OutputOptions& options);

struct VerifyRequest {
  std::size_t count = 200;
  std::uint64_t seed = 1;
  std::size_t nmax = 6;
  std::optional<std::string> votes_path;  // certify one given instance instead
  std::optional<double> lambda;
  std::optional<double> alpha;
};

struct VerifyOutcome {
  Json document;
  bool passed = false;
};

VerifyOutcome run_verify(const VerifyRequest& request, const OutputOptions& options);

struct GenerateRequest {
  std::uint64_t seed = 7;
  std::size_t m = 2000;
  std::size_t n = 64;
  std::size_t hypotheses = 16;
  double base_error = 0.1;
  std::string out_dir = ".";
};

struct SyntheticData {
  EnsembleMatrix train;
  std::vector<std::int8_t> train_labels;
  EnsembleMatrix test;
  std::vector<double> flip_rates;
};

SyntheticData generate_data(const GenerateRequest& request);
Json run_generate(const GenerateRequest& request, const OutputOptions& options);

}  // namespace confrate::cli
