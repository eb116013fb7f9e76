#ifndef CWTA_SIM_HPP
#define CWTA_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwta/rng.hpp"
#include "cwta/trajectory.hpp"

namespace cwta {

enum class SimModel { m3x3, m6x5 };

// Weekly toxicity kernel and monthly (4-week) efficacy kernel parameters.
struct BaselineRates {
  double p_tox_event = 0;      // weekly probability a nonfatal transition is attempted
  double proximity_decay = 0.5;  // per-tier distance multiplier for the target tier
  double p_tox_fatal = 0;      // weekly probability of fatal toxicity
  double p_respond = 0;        // monthly probability of one-level improvement
  double p_worsen = 0;         // monthly probability of one-level deterioration
  double p_death_disease = 0;  // monthly death probability from PD (6x5) / Sick (3x3)
};

struct SimConfig {
  SimModel model = SimModel::m3x3;
  int sample_size = 0;      // total, 1:1 allocation
  int duration_weeks = 0;
  double hr_efficacy = 1.0;  // experimental vs control, adverse moves only
  double hr_toxicity = 1.0;
  BaselineRates baseline;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidConfig
};

enum class Arm { control = 0, experimental = 1 };

// Raw tier path of one simulated subject: states recorded whenever either
// coordinate moves, plus the week-0 state. Lets the power harness rescore
// the same trial through different matrices.
struct TierStep {
  int week;
  int tox;  // grade / tier; fatal tier = rows-1 of the combined matrix
  int eff;  // EfficacyTier index (0 = best)
};

struct RawPatient {
  std::string id;
  Arm arm = Arm::control;
  std::vector<TierStep> steps;  // first step has week = 0
  int last_week = 0;            // absorption week, or duration for censored
  bool absorbed = false;
};

struct RawTrial {
  SimModel model = SimModel::m3x3;
  int duration_weeks = 0;
  std::vector<RawPatient> patients;
};

enum class ScoringEndpoint { rba, efficacy_only };

// Discrete-time proportional hazards on the per-step probability.
double apply_hr(double p, double hr);

// Scenario labels i..v from the 3x3 study: (hr_efficacy, hr_toxicity).
std::pair<double, double> scenario_3x3(const std::string& scenario);

RawPatient simulate_patient_raw(const SimConfig& config, Arm arm, Rng& rng);

// Spec surface: one subject scored through the configured combined matrix.
PatientTrajectory simulate_patient(const SimConfig& config, Arm arm, Rng& rng);

RawTrial simulate_trial_raw(const SimConfig& config);

// Scores a raw trial through the combined matrix (rba) or the efficacy-only
// grid. Under efficacy_only, fatal toxicity maps to Death (death from any
// cause stays an efficacy event); nonfatal toxicity is invisible.
TrialDataset score_trial(const RawTrial& trial, ScoringEndpoint endpoint);

// simulate_trial_raw + rba scoring; deterministic in (config, seed).
TrialDataset simulate_trial(const SimConfig& config);

struct CalibrationTargets {
  double cr_rate = 0.10;  // P(best response = CR)
  double pr_rate = 0.50;  // P(best response = PR), exclusive of CR by default
  bool cumulative = false;  // if true, pr_rate targets P(best response <= PR)
};

struct CalibrationResult {
  BaselineRates rates;
  double achieved_cr = 0;
  double achieved_pr = 0;
  int patients_per_eval = 0;
};

// Searches (p_respond, p_worsen) by shrinking grid refinement so the
// simulated 6x5 control arm's best-response rates match the targets within
// tolerance. Other baseline fields are taken from `base` unchanged. Throws
// CalibrationFailed when no grid point lands inside the tolerance box.
CalibrationResult calibrate_control(const CalibrationTargets& targets,
                                    double tolerance, const BaselineRates& base,
                                    int duration_weeks = 104,
                                    int patients_per_eval = 20000,
                                    std::uint64_t seed = 20240101,
                                    std::optional<double> fixed_p_worsen = std::nullopt,
                                    int workers = 0);

// Control-arm best-response rates for a candidate baseline, estimated from
// n simulated patients. Used by calibration and exposed for tests.
std::pair<double, double> control_response_rates(const BaselineRates& rates,
                                                 int duration_weeks, int n_patients,
                                                 std::uint64_t seed, bool cumulative,
                                                 int workers = 0);

}  // namespace cwta

#endif  // CWTA_SIM_HPP
