#include "confrate/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace confrate::io {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

// Non-empty lines with any trailing CR removed.
std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!line.empty()) {
      out.push_back(line);
    }
  }
  return out;
}

std::int8_t parse_sign(const std::string& cell, const std::string& where) {
  if (cell == "1") {
    return 1;
  }
  if (cell == "-1") {
    return -1;
  }
  throw Error(ErrorCode::kParse, where + ": expected -1 or 1, got '" + cell + "'");
}

double parse_real(const std::string& cell, const std::string& where) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw Error(ErrorCode::kParse, where + ": not a number: '" + cell + "'");
  }
  return x;
}

std::vector<double> json_reals(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorCode::kParse, path + ": missing array \"" + key + "\"");
  }
  std::vector<double> out;
  for (const auto& x : j[key]) {
    if (!x.is_number()) {
      throw Error(ErrorCode::kParse, path + ": non-numeric entry in \"" + key + "\"");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write " + path);
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::kIo, "write failed for " + path);
  }
}

}  // namespace

EnsembleMatrix read_predictions_csv(const std::string& path) {
  const auto lines = lines_of(slurp(path));
  if (lines.empty()) {
    throw Error(ErrorCode::kParse, path + ": empty predictions file");
  }
  const auto header = split(lines.front(), ',');
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] != "h" + std::to_string(j + 1)) {
      throw Error(ErrorCode::kParse, path + ": header must be h1,...,hH");
    }
  }
  if (lines.size() < 2) {
    throw Error(ErrorCode::kParse, path + ": no prediction rows");
  }
  const std::size_t cols = header.size();
  std::vector<std::int8_t> entries;
  entries.reserve((lines.size() - 1) * cols);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    const std::string where = path + ":" + std::to_string(r + 1);
    if (cells.size() != cols) {
      throw Error(ErrorCode::kParse, where + ": expected " + std::to_string(cols) + " cells");
    }
    for (const auto& cell : cells) {
      entries.push_back(parse_sign(cell, where));
    }
  }
  return EnsembleMatrix(lines.size() - 1, cols, std::move(entries));
}

std::vector<std::int8_t> read_labels_csv(const std::string& path) {
  const auto lines = lines_of(slurp(path));
  if (lines.empty() || lines.front() != "label") {
    throw Error(ErrorCode::kParse, path + ": header must be 'label'");
  }
  std::vector<std::int8_t> labels;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    labels.push_back(parse_sign(lines[r], path + ":" + std::to_string(r + 1)));
  }
  if (labels.empty()) {
    throw Error(ErrorCode::kParse, path + ": no labels");
  }
  return labels;
}

std::vector<double> read_votes(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse, path + ": " + e.what());
    }
    return json_reals(j, "votes", path);
  }
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "vote") {
    throw Error(ErrorCode::kParse, path + ": header must be 'vote'");
  }
  std::vector<double> votes;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    votes.push_back(parse_real(lines[r], path + ":" + std::to_string(r + 1)));
  }
  if (votes.empty()) {
    throw Error(ErrorCode::kParse, path + ": no votes");
  }
  return votes;
}

WeightsFile read_weights_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  WeightsFile out{WeightVector(json_reals(j, "weights", path)), std::nullopt};
  if (j.contains("prior")) {
    out.prior = WeightVector(json_reals(j, "prior", path), WeightRole::kPrior);
  }
  return out;
}

void write_predictions_csv(const std::string& path, const EnsembleMatrix& matrix) {
  std::string text;
  text.reserve(matrix.rows() * matrix.cols() * 3 + 16);
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    text += (j ? ",h" : "h") + std::to_string(j + 1);
  }
  text += '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (j) {
        text += ',';
      }
      text += matrix(i, j) > 0 ? "1" : "-1";
    }
    text += '\n';
  }
  write_text(path, text);
}

void write_labels_csv(const std::string& path, const std::vector<std::int8_t>& labels) {
  std::string text = "label\n";
  for (std::int8_t y : labels) {
    text += y > 0 ? "1\n" : "-1\n";
  }
  write_text(path, text);
}

}  // namespace confrate::io
