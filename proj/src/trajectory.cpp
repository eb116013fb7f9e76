#include "cwta/trajectory.hpp"

#include <algorithm>

#include "cwta/errors.hpp"

namespace cwta {

const TrialGroup* TrialDataset::find_group(const std::string& name) const {
  for (const auto& g : groups)
    if (g.name == name) return &g;
  return nullptr;
}

std::size_t TrialDataset::total_patients() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.patients.size();
  return n;
}

PatientTrajectory build_trajectory(
    const std::string& id, const std::string& group,
    std::span<const std::pair<double, HealthScore>> records, double censor_time,
    const RbaMatrix& matrix) {
  if (records.empty())
    fail(ErrorCode::MissingBaseline, "patient '" + id + "' has no records");
  if (records.front().first != 0.0)
    fail(ErrorCode::MissingBaseline,
         "patient '" + id + "' records must start at time 0");
  if (censor_time < 0)
    fail(ErrorCode::ChangeAfterCensor,
         "patient '" + id + "' has negative censor time");

  PatientTrajectory traj;
  traj.id = id;
  traj.group = group;
  traj.censor_time = censor_time;

  double prev_time = 0;
  HealthScore current = records.front().second;
  if (!matrix.valid_score(current))
    fail(ErrorCode::ScoreOutOfRange, "patient '" + id + "' score " +
                                         std::to_string(current) + " outside [0, " +
                                         std::to_string(matrix.max_score()) + "]");
  traj.initial_score = current;
  bool absorbed = matrix.is_absorptive(current);

  for (std::size_t i = 1; i < records.size(); ++i) {
    auto [time, score] = records[i];
    if (!matrix.valid_score(score))
      fail(ErrorCode::ScoreOutOfRange, "patient '" + id + "' score " +
                                           std::to_string(score) + " outside [0, " +
                                           std::to_string(matrix.max_score()) + "]");
    if (time < prev_time)
      fail(ErrorCode::NonMonotoneTime,
           "patient '" + id + "' records are not time-sorted");
    if (score == current) {  // no-op change; collapse
      prev_time = time;
      continue;
    }
    if (time == prev_time)
      fail(ErrorCode::NonMonotoneTime, "patient '" + id +
                                           "' has two distinct scores at time " +
                                           std::to_string(time));
    if (absorbed)
      fail(ErrorCode::ChangeAfterAbsorption,
           "patient '" + id + "' changes state after an absorptive score");
    if (time > censor_time)
      fail(ErrorCode::ChangeAfterCensor,
           "patient '" + id + "' changes state after its censor time");
    traj.changes.push_back({time, score});
    current = score;
    prev_time = time;
    absorbed = matrix.is_absorptive(score);
  }

  traj.absorbed = absorbed;
  return traj;
}

HealthScore score_at(const PatientTrajectory& traj, double t) {
  if (t < 0 || t > traj.censor_time)
    fail(ErrorCode::TimeOutOfRange, "time " + std::to_string(t) +
                                        " outside [0, " +
                                        std::to_string(traj.censor_time) + "]");
  // latest change with time <= t, else the initial score
  auto it = std::upper_bound(
      traj.changes.begin(), traj.changes.end(), t,
      [](double value, const StateChange& change) { return value < change.time; });
  if (it == traj.changes.begin()) return traj.initial_score;
  return std::prev(it)->score;
}

}  // namespace cwta
