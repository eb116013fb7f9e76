#ifndef CWTA_INGEST_HPP
#define CWTA_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cwta/stats.hpp"
#include "cwta/trajectory.hpp"

namespace cwta {

// One study day of one subject: highest-grade symptomatic toxicity plus the
// RECIST status carried forward from the latest assessment.
struct PatientDayRecord {
  std::string patient_id;
  std::string cohort;
  int day = 0;
  int ctcae_grade = 0;
  EfficacyTier5 recist = EfficacyTier5::SD;
  bool off_study = false;
};

// CSV contract: UTF-8, comma-separated, LF line endings, header
// `patient_id,cohort,day,ctcae_grade,recist,off_study`; recist codes
// case-insensitive. Parse errors carry 1-based line numbers.
std::vector<PatientDayRecord> parse_patient_days(std::istream& in);
std::vector<PatientDayRecord> parse_patient_days_file(const std::string& path);

enum class GapPolicy { carry_forward, strict };

// Scores each subject's days through the matrix and assembles a dataset
// grouped by cohort (time unit: days). Subjects without a day-0 record get
// a (SD, grade 0) baseline under carry_forward; strict mode rejects gaps
// and missing baselines. Censoring is at the last observed day unless the
// subject was absorbed (Death or grade 5).
TrialDataset daily_trajectories(std::span<const PatientDayRecord> records,
                                const RbaMatrix& matrix,
                                GapPolicy gap_policy = GapPolicy::carry_forward);

enum class Direction { better, worse, equivalent };

const char* direction_name(Direction direction);

struct CohortComparison {
  std::string cohort;
  int n_cohort = 0;
  int n_rest = 0;
  LogrankResult result;
  Direction direction = Direction::equivalent;
};

struct CohortTestOptions {
  TestMethod method = TestMethod::permutation;
  PermutationMode mode = PermutationMode::automatic;
  long n_perm = 10000;
  std::uint64_t seed = 0;
  int workers = 0;
  double alpha = 0.05;
};

// Pools every non-cohort subject into one group and runs the weighted
// logrank. Group 1 is the cohort, so U < 0 reads "better".
CohortComparison cohort_vs_rest(const TrialDataset& dataset,
                                const std::string& cohort,
                                const CohortTestOptions& options);

}  // namespace cwta

#endif  // CWTA_INGEST_HPP
