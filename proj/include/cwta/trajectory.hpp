#ifndef CWTA_TRAJECTORY_HPP
#define CWTA_TRAJECTORY_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwta/matrix.hpp"

namespace cwta {

struct StateChange {
  double time;
  HealthScore score;
};

// One subject's health-score step function. Right-continuous: the new score
// holds at the change time itself. Immutable once built.
struct PatientTrajectory {
  std::string id;
  std::string group;
  HealthScore initial_score = 0;
  std::vector<StateChange> changes;
  double censor_time = 0;
  bool absorbed = false;

  HealthScore final_score() const {
    return changes.empty() ? initial_score : changes.back().score;
  }
  // Time after which the subject leaves every risk set.
  double exit_time() const {
    return absorbed ? changes.back().time : censor_time;
  }
};

enum class TimeUnit { day, week };

struct TrialGroup {
  std::string name;
  std::vector<PatientTrajectory> patients;
};

struct TrialDataset {
  RbaMatrix matrix;
  TimeUnit time_unit = TimeUnit::week;
  std::vector<TrialGroup> groups;

  const TrialGroup* find_group(const std::string& name) const;
  std::size_t total_patients() const;
};

// Validates and normalizes a (time, score) record sequence into a trajectory.
// Records must be time-sorted and start at time 0 (the initial score).
// Consecutive duplicate scores collapse; the absorbed flag is derived from
// the matrix's absorptive set.
PatientTrajectory build_trajectory(
    const std::string& id, const std::string& group,
    std::span<const std::pair<double, HealthScore>> records, double censor_time,
    const RbaMatrix& matrix);

// Right-continuous step lookup; requires 0 <= t <= censor_time.
HealthScore score_at(const PatientTrajectory& traj, double t);

}  // namespace cwta

#endif  // CWTA_TRAJECTORY_HPP
