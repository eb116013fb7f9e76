#ifndef CWTA_MATRIX_HPP
#define CWTA_MATRIX_HPP

#include <string>
#include <vector>

namespace cwta {

using HealthScore = int;

// Simple 3x3 model tiers.
enum class EfficacyTier3 { Healthy = 0, Sick = 1, DeadFromDisease = 2 };
enum class ToxicityTier3 { Nontoxic = 0, Toxic = 1, Poisoned = 2 };

// Advanced cancer model: RECIST 1.1 response tiers, ordered best to worst.
enum class EfficacyTier5 { CR = 0, PR = 1, SD = 2, PD = 3, Death = 4 };

// CTCAE v5.0 toxicity grade, 0 (none) to 5 (fatal).
inline constexpr int kMaxCtcaeGrade = 5;

// Ordinal scoring grid mapping (toxicity tier, efficacy tier) to a combined
// health score. 0 is the best combined state; scores in the absorptive set
// end observation permanently.
class RbaMatrix {
 public:
  RbaMatrix(std::string name, std::vector<std::string> row_labels,
            std::vector<std::string> col_labels, std::vector<int> scores,
            std::vector<int> absorptive, int max_score);

  const std::string& name() const { return name_; }
  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  int max_score() const { return max_score_; }
  const std::vector<int>& absorptive_scores() const { return absorptive_; }

  HealthScore score(std::size_t row, std::size_t col) const;
  bool is_absorptive(HealthScore score) const;
  bool valid_score(HealthScore score) const {
    return score >= 0 && score <= max_score_;
  }

  // Scales every score (and the absorptive set) by c > 0.
  RbaMatrix scaled(int c) const;

  // Built-in grids.
  static const RbaMatrix& m3x3();
  static const RbaMatrix& m6x5();
  // 1x5 efficacy-only grid (toxicity ignored).
  static const RbaMatrix& efficacy_only();

  // Study-specific grid from a JSON document with fields `rows`, `cols`,
  // `scores` (RxC integer grid), `absorptive`, `max_score`.
  static RbaMatrix from_json_text(const std::string& text);
  static RbaMatrix from_json_file(const std::string& path);

 private:
  std::string name_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::vector<int> scores_;  // row-major
  std::vector<int> absorptive_;
  int max_score_;
};

HealthScore score_3x3(ToxicityTier3 tox, EfficacyTier3 eff);
HealthScore score_6x5(int ctcae_grade, EfficacyTier5 eff);
HealthScore efficacy_only_score(EfficacyTier5 eff);

}  // namespace cwta

#endif  // CWTA_MATRIX_HPP
