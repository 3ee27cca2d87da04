#pragma once

// File formats:
//   predictions CSV  header "h1,...,hH", one row per example, cells -1 or 1
//   labels CSV       header "label", one value per row, -1 or 1
//   votes            CSV with header "vote", or JSON {"votes": [...]}
//   weights JSON     {"weights": [...]} with an optional {"prior": [...]}

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confrate/model.hpp"

namespace confrate::io {

EnsembleMatrix read_predictions_csv(const std::string& path);
std::vector<std::int8_t> read_labels_csv(const std::string& path);
std::vector<double> read_votes(const std::string& path);

struct WeightsFile {
  WeightVector posterior;
  std::optional<WeightVector> prior;
};
WeightsFile read_weights_json(const std::string& path);

void write_predictions_csv(const std::string& path, const EnsembleMatrix& matrix);
void write_labels_csv(const std::string& path, const std::vector<std::int8_t>& labels);

}  // namespace confrate::io
