#include "cwta/matrix.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cwta/errors.hpp"

namespace cwta {

RbaMatrix::RbaMatrix(std::string name, std::vector<std::string> row_labels,
                     std::vector<std::string> col_labels, std::vector<int> scores,
                     std::vector<int> absorptive, int max_score)
    : name_(std::move(name)),
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      scores_(std::move(scores)),
      absorptive_(std::move(absorptive)),
      max_score_(max_score) {
  if (row_labels_.empty() || col_labels_.empty())
    fail(ErrorCode::InvalidMatrix, "matrix '" + name_ + "' has empty axes");
  if (scores_.size() != rows() * cols())
    fail(ErrorCode::InvalidMatrix,
         "matrix '" + name_ + "' grid size does not match its labels");
  if (absorptive_.empty())
    fail(ErrorCode::InvalidMatrix, "matrix '" + name_ + "' needs an absorptive set");
  int grid_max = *std::max_element(scores_.begin(), scores_.end());
  int grid_min = *std::min_element(scores_.begin(), scores_.end());
  if (grid_min < 0 || grid_max > max_score_)
    fail(ErrorCode::InvalidMatrix,
         "matrix '" + name_ + "' scores must lie in [0, max_score]");
  if (grid_max != max_score_)
    fail(ErrorCode::InvalidMatrix,
         "matrix '" + name_ + "' max_score is not attained by any cell");
  std::sort(absorptive_.begin(), absorptive_.end());
  absorptive_.erase(std::unique(absorptive_.begin(), absorptive_.end()),
                    absorptive_.end());
  for (int s : absorptive_) {
    if (std::find(scores_.begin(), scores_.end(), s) == scores_.end())
      fail(ErrorCode::InvalidMatrix, "absorptive score " + std::to_string(s) +
                                         " does not occur in matrix '" + name_ + "'");
  }
  if (!is_absorptive(max_score_))
    fail(ErrorCode::InvalidMatrix,
         "matrix '" + name_ + "' max_score must be absorptive");
}

HealthScore RbaMatrix::score(std::size_t row, std::size_t col) const {
  if (row >= rows() || col >= cols())
    fail(ErrorCode::InvalidMatrix, "cell (" + std::to_string(row) + ", " +
                                       std::to_string(col) + ") outside matrix '" +
                                       name_ + "'");
  return scores_[row * cols() + col];
}

bool RbaMatrix::is_absorptive(HealthScore score) const {
  return std::binary_search(absorptive_.begin(), absorptive_.end(), score);
}

RbaMatrix RbaMatrix::scaled(int c) const {
  if (c <= 0) fail(ErrorCode::InvalidMatrix, "scale factor must be positive");
  std::vector<int> scores = scores_;
  for (int& s : scores) s *= c;
  std::vector<int> absorptive = absorptive_;
  for (int& s : absorptive) s *= c;
  return RbaMatrix(name_ + "x" + std::to_string(c), row_labels_, col_labels_,
                   std::move(scores), std::move(absorptive), max_score_ * c);
}

const RbaMatrix& RbaMatrix::m3x3() {
  static const RbaMatrix m(
      "3x3", {"Nontoxic", "Toxic", "Fatal Toxicity"},
      {"Healthy", "Sick", "Fatal Disease"},
      {0, 1, 3,
       1, 2, 3,
       3, 3, 3},
      {3}, 3);
  return m;
}

const RbaMatrix& RbaMatrix::m6x5() {
  static const RbaMatrix m(
      "6x5", {"0", "1", "2", "3", "4", "5"}, {"CR", "PR", "SD", "PD", "Death"},
      {0, 2, 4, 6, 11,
       1, 3, 5, 7, 11,
       2, 4, 6, 8, 11,
       3, 5, 7, 9, 11,
       4, 6, 8, 10, 11,
       11, 11, 11, 11, 11},
      {11}, 11);
  return m;
}

const RbaMatrix& RbaMatrix::efficacy_only() {
  static const RbaMatrix m("efficacy-only", {"any"},
                           {"CR", "PR", "SD", "PD", "Death"}, {0, 2, 4, 6, 11},
                           {11}, 11);
  return m;
}

RbaMatrix RbaMatrix::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidMatrix, std::string("matrix config is not valid JSON: ") +
                                       e.what());
  }
  try {
    std::vector<std::string> rows = doc.at("rows").get<std::vector<std::string>>();
    std::vector<std::string> cols = doc.at("cols").get<std::vector<std::string>>();
    auto grid = doc.at("scores").get<std::vector<std::vector<int>>>();
    std::vector<int> absorptive = doc.at("absorptive").get<std::vector<int>>();
    int max_score = doc.at("max_score").get<int>();
    std::string name = doc.value("name", "custom");

    if (grid.size() != rows.size())
      fail(ErrorCode::InvalidMatrix, "matrix config: scores row count mismatch");
    std::vector<int> flat;
    flat.reserve(rows.size() * cols.size());
    for (const auto& row : grid) {
      if (row.size() != cols.size())
        fail(ErrorCode::InvalidMatrix, "matrix config: scores column count mismatch");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return RbaMatrix(std::move(name), std::move(rows), std::move(cols),
                     std::move(flat), std::move(absorptive), max_score);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidMatrix,
         std::string("matrix config is missing a required field: ") + e.what());
  }
}

RbaMatrix RbaMatrix::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open matrix config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

HealthScore score_3x3(ToxicityTier3 tox, EfficacyTier3 eff) {
  return RbaMatrix::m3x3().score(static_cast<std::size_t>(tox),
                                 static_cast<std::size_t>(eff));
}

HealthScore score_6x5(int ctcae_grade, EfficacyTier5 eff) {
  if (ctcae_grade < 0 || ctcae_grade > kMaxCtcaeGrade)
    fail(ErrorCode::GradeOutOfRange,
         "CTCAE grade " + std::to_string(ctcae_grade) + " outside [0, 5]");
  return RbaMatrix::m6x5().score(static_cast<std::size_t>(ctcae_grade),
                                 static_cast<std::size_t>(eff));
}

HealthScore efficacy_only_score(EfficacyTier5 eff) {
  return RbaMatrix::efficacy_only().score(0, static_cast<std::size_t>(eff));
}

}  // namespace cwta
