#include "cwta/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cwta/errors.hpp"

namespace cwta {

namespace {

constexpr const char* kHeader = "patient_id,cohort,day,ctcae_grade,recist,off_study";

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

int parse_int(const std::string& text, std::size_t line_no, const char* what) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(text, &pos);
  } catch (const std::exception&) {
    fail(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": bad " +
                                      what + " '" + text + "'");
  }
  if (pos != text.size())
    fail(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": bad " +
                                      what + " '" + text + "'");
  return value;
}

EfficacyTier5 parse_recist(const std::string& text, std::size_t line_no) {
  std::string code = to_lower(text);
  if (code == "cr") return EfficacyTier5::CR;
  if (code == "pr") return EfficacyTier5::PR;
  if (code == "sd") return EfficacyTier5::SD;
  if (code == "pd") return EfficacyTier5::PD;
  if (code == "death") return EfficacyTier5::Death;
  fail(ErrorCode::UnknownRecistCode,
       "line " + std::to_string(line_no) + ": unknown RECIST code '" + text + "'");
}

bool parse_bool(const std::string& text, std::size_t line_no) {
  std::string v = to_lower(text);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorCode::MalformedRow,
       "line " + std::to_string(line_no) + ": bad off_study flag '" + text + "'");
}

const char* recist_name(EfficacyTier5 tier) {
  switch (tier) {
    case EfficacyTier5::CR: return "CR";
    case EfficacyTier5::PR: return "PR";
    case EfficacyTier5::SD: return "SD";
    case EfficacyTier5::PD: return "PD";
    case EfficacyTier5::Death: return "DEATH";
  }
  return "?";
}

}  // namespace

std::vector<PatientDayRecord> parse_patient_days(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::MalformedRow, "empty file: expected header '" +
                                      std::string(kHeader) + "'");
  if (strip_cr(line) != kHeader)
    fail(ErrorCode::MalformedRow,
         "line 1: expected header '" + std::string(kHeader) + "'");

  std::vector<PatientDayRecord> records;
  std::set<std::pair<std::string, int>> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 6)
      fail(ErrorCode::MalformedRow, "line " + std::to_string(line_no) +
                                        ": expected 6 fields, got " +
                                        std::to_string(fields.size()));
    PatientDayRecord rec;
    rec.patient_id = fields[0];
    rec.cohort = fields[1];
    rec.day = parse_int(fields[2], line_no, "day");
    if (rec.day < 0)
      fail(ErrorCode::MalformedRow,
           "line " + std::to_string(line_no) + ": negative study day");
    rec.ctcae_grade = parse_int(fields[3], line_no, "ctcae_grade");
    if (rec.ctcae_grade < 0 || rec.ctcae_grade > kMaxCtcaeGrade)
      fail(ErrorCode::GradeOutOfRange,
           "line " + std::to_string(line_no) + ": CTCAE grade " +
               std::to_string(rec.ctcae_grade) + " outside [0, 5]");
    rec.recist = parse_recist(fields[4], line_no);
    rec.off_study = parse_bool(fields[5], line_no);
    if (!seen.emplace(rec.patient_id, rec.day).second)
      fail(ErrorCode::DuplicatePatientDay,
           "line " + std::to_string(line_no) + ": duplicate day " +
               std::to_string(rec.day) + " for patient '" + rec.patient_id + "'");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PatientDayRecord> parse_patient_days_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  return parse_patient_days(in);
}

TrialDataset daily_trajectories(std::span<const PatientDayRecord> records,
                                const RbaMatrix& matrix, GapPolicy gap_policy) {
  if (matrix.rows() != 6 || matrix.cols() != 5)
    fail(ErrorCode::InvalidMatrix,
         "daily scoring needs a 6x5-shaped matrix (CTCAE grade x RECIST), got " +
             std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()));

  // keyed by patient, days sorted; cohorts keep first-seen order
  std::map<std::string, std::vector<PatientDayRecord>> by_patient;
  std::vector<std::string> patient_order;
  std::vector<std::string> cohort_order;
  for (const auto& rec : records) {
    auto [it, inserted] = by_patient.try_emplace(rec.patient_id);
    if (inserted) patient_order.push_back(rec.patient_id);
    if (!it->second.empty() && it->second.front().cohort != rec.cohort)
      fail(ErrorCode::InconsistentCohort,
           "patient '" + rec.patient_id + "' appears in cohorts '" +
               it->second.front().cohort + "' and '" + rec.cohort + "'");
    it->second.push_back(rec);
    if (std::find(cohort_order.begin(), cohort_order.end(), rec.cohort) ==
        cohort_order.end())
      cohort_order.push_back(rec.cohort);
  }

  TrialDataset dataset{matrix, TimeUnit::day, {}};
  for (const auto& cohort : cohort_order)
    dataset.groups.push_back({cohort, {}});

  for (const auto& id : patient_order) {
    auto& days = by_patient[id];
    std::sort(days.begin(), days.end(),
              [](const PatientDayRecord& a, const PatientDayRecord& b) {
                return a.day < b.day;
              });

    if (days.front().day != 0) {
      if (gap_policy == GapPolicy::strict)
        fail(ErrorCode::MissingBaseline,
             "patient '" + id + "' has no day-0 record");
      // inject the conventional baseline: stable disease, no toxicity
      PatientDayRecord baseline = days.front();
      baseline.day = 0;
      baseline.ctcae_grade = 0;
      baseline.recist = EfficacyTier5::SD;
      baseline.off_study = false;
      days.insert(days.begin(), baseline);
    }
    if (gap_policy == GapPolicy::strict) {
      for (std::size_t i = 1; i < days.size(); ++i)
        if (days[i].day != days[i - 1].day + 1)
          fail(ErrorCode::GapFound, "patient '" + id + "' is missing days " +
                                        std::to_string(days[i - 1].day + 1) + ".." +
                                        std::to_string(days[i].day - 1));
    }

    bool seen_pd = false;
    std::vector<std::pair<double, HealthScore>> pairs;
    pairs.reserve(days.size());
    for (const auto& rec : days) {
      if (rec.recist == EfficacyTier5::PD) seen_pd = true;
      if (seen_pd && static_cast<int>(rec.recist) < static_cast<int>(EfficacyTier5::PD))
        fail(ErrorCode::RecistRegressionAfterPD,
             "patient '" + id + "' improves to " + recist_name(rec.recist) +
                 " on day " + std::to_string(rec.day) + " after PD");
      pairs.emplace_back(static_cast<double>(rec.day),
                         matrix.score(static_cast<std::size_t>(rec.ctcae_grade),
                                      static_cast<std::size_t>(rec.recist)));
    }

    PatientTrajectory traj = build_trajectory(
        id, days.front().cohort, pairs, static_cast<double>(days.back().day), matrix);
    for (auto& group : dataset.groups)
      if (group.name == traj.group) group.patients.push_back(std::move(traj));
  }
  return dataset;
}

const char* direction_name(Direction direction) {
  switch (direction) {
    case Direction::better: return "better";
    case Direction::worse: return "worse";
    case Direction::equivalent: return "equivalent";
  }
  return "?";
}

CohortComparison cohort_vs_rest(const TrialDataset& dataset,
                                const std::string& cohort,
                                const CohortTestOptions& options) {
  const TrialGroup* target = dataset.find_group(cohort);
  if (target == nullptr)
    fail(ErrorCode::UnknownCohort, "no cohort named '" + cohort + "'");
  if (target->patients.empty())
    fail(ErrorCode::EmptyGroup, "cohort '" + cohort + "' has no patients");

  TrialDataset pooled{dataset.matrix, dataset.time_unit, {}};
  pooled.groups.resize(2);
  pooled.groups[0].name = cohort;
  pooled.groups[1].name = "rest";
  pooled.groups[0].patients = target->patients;
  for (const auto& group : dataset.groups) {
    if (group.name == cohort) continue;
    pooled.groups[1].patients.insert(pooled.groups[1].patients.end(),
                                     group.patients.begin(), group.patients.end());
  }
  if (pooled.groups[1].patients.empty())
    fail(ErrorCode::EmptyGroup, "no patients outside cohort '" + cohort + "'");

  CohortComparison cmp;
  cmp.cohort = cohort;
  cmp.n_cohort = static_cast<int>(pooled.groups[0].patients.size());
  cmp.n_rest = static_cast<int>(pooled.groups[1].patients.size());
  cmp.result = options.method == TestMethod::normal
                   ? weighted_logrank(pooled)
                   : permutation_logrank(pooled, options.n_perm, options.seed,
                                         options.workers, options.mode);
  if (cmp.result.p_two_sided >= options.alpha) {
    cmp.direction = Direction::equivalent;
  } else {
    // group 1 is the cohort; negative U means lighter weighted deterioration
    cmp.direction = cmp.result.U < 0 ? Direction::better : Direction::worse;
  }
  return cmp;
}

}  // namespace cwta
