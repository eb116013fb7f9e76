#include "cwta/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cwta/errors.hpp"

namespace cwta {

namespace {

struct ModelShape {
  int fatal_tox_tier;   // absorptive toxicity tier
  int death_eff_tier;   // absorptive efficacy tier
  int worst_live_eff;   // one-way efficacy tier (PD / Sick)
  int initial_eff;
  const RbaMatrix* matrix;
};

ModelShape shape_of(SimModel model) {
  if (model == SimModel::m3x3)
    return {2, 2, 1, static_cast<int>(EfficacyTier3::Healthy), &RbaMatrix::m3x3()};
  return {5, 4, static_cast<int>(EfficacyTier5::PD),
          static_cast<int>(EfficacyTier5::SD), &RbaMatrix::m6x5()};
}

// Weekly toxicity categorical: [fatal, nonfatal targets..., stay]. Worsening
// probabilities (including fatal) carry the toxicity hazard ratio.
struct ToxicityKernel {
  double p_fatal;
  std::array<double, 5> p_target;  // per nonfatal tier, 0 where target == current
  int n_nonfatal;
};

ToxicityKernel toxicity_kernel(const BaselineRates& b, int current, int fatal_tier,
                               double hr) {
  ToxicityKernel k{};
  k.n_nonfatal = fatal_tier;  // nonfatal tiers are 0 .. fatal_tier-1
  k.p_fatal = apply_hr(b.p_tox_fatal, hr);
  double norm = 0;
  for (int t = 0; t < k.n_nonfatal; ++t)
    if (t != current) norm += std::pow(b.proximity_decay, std::abs(t - current));
  if (norm <= 0) return k;
  for (int t = 0; t < k.n_nonfatal; ++t) {
    if (t == current) continue;
    double p = b.p_tox_event * std::pow(b.proximity_decay, std::abs(t - current)) / norm;
    k.p_target[static_cast<std::size_t>(t)] = t > current ? apply_hr(p, hr) : p;
  }
  return k;
}

double kernel_mass(const ToxicityKernel& k) {
  double mass = k.p_fatal;
  for (int t = 0; t < k.n_nonfatal; ++t)
    mass += k.p_target[static_cast<std::size_t>(t)];
  return mass;
}

// Monthly efficacy categorical: [improve, worsen-or-die, stay]. Returns the
// new tier. Improvement never applies past the best tier; PD (or Sick in the
// 3x3) feeds the disease-death probability instead of one-level worsening.
int efficacy_move(const ModelShape& shape, const BaselineRates& b, int current,
                  double hr, double u) {
  double p_improve = 0, p_adverse = 0;
  int improved = current, worsened = current;
  if (shape.matrix->rows() == 3) {  // 3x3 model
    if (current == static_cast<int>(EfficacyTier3::Healthy)) {
      p_adverse = apply_hr(b.p_worsen, hr);
      worsened = static_cast<int>(EfficacyTier3::Sick);
    } else {  // Sick
      p_improve = b.p_respond;
      improved = static_cast<int>(EfficacyTier3::Healthy);
      p_adverse = apply_hr(b.p_death_disease, hr);
      worsened = shape.death_eff_tier;
    }
  } else {
    switch (static_cast<EfficacyTier5>(current)) {
      case EfficacyTier5::CR:
        p_adverse = apply_hr(b.p_worsen, hr);
        worsened = static_cast<int>(EfficacyTier5::PR);
        break;
      case EfficacyTier5::PR:
        p_improve = b.p_respond;
        improved = static_cast<int>(EfficacyTier5::CR);
        p_adverse = apply_hr(b.p_worsen, hr);
        worsened = static_cast<int>(EfficacyTier5::SD);
        break;
      case EfficacyTier5::SD:
        p_improve = b.p_respond;
        improved = static_cast<int>(EfficacyTier5::PR);
        p_adverse = apply_hr(b.p_worsen, hr);
        worsened = static_cast<int>(EfficacyTier5::PD);
        break;
      case EfficacyTier5::PD:  // one-way door; only death ahead
        p_adverse = apply_hr(b.p_death_disease, hr);
        worsened = static_cast<int>(EfficacyTier5::Death);
        break;
      case EfficacyTier5::Death:
        return current;
    }
  }
  if (u < p_improve) return improved;
  if (u < p_improve + p_adverse) return worsened;
  return current;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    fail(ErrorCode::InvalidConfig, std::string(name) + " must lie in [0, 1]");
}

}  // namespace

double apply_hr(double p, double hr) {
  if (p <= 0) return 0;
  if (p >= 1) return 1;
  return -std::expm1(hr * std::log1p(-p));
}

std::pair<double, double> scenario_3x3(const std::string& scenario) {
  if (scenario == "i") return {0.5, 1.0};
  if (scenario == "ii") return {1.0, 0.5};
  if (scenario == "iii") return {0.5, 0.5};
  if (scenario == "iv") return {0.5, 2.0};
  if (scenario == "v") return {1.0, 1.0};
  fail(ErrorCode::UnknownCase, "unknown scenario '" + scenario + "' (use i..v)");
}

void SimConfig::validate() const {
  if (sample_size < 2)
    fail(ErrorCode::InvalidConfig, "sample_size must be at least 2");
  if (duration_weeks < 1)
    fail(ErrorCode::InvalidConfig, "duration_weeks must be positive");
  if (!(hr_efficacy > 0) || !(hr_toxicity > 0))
    fail(ErrorCode::InvalidConfig, "hazard ratios must be positive");
  check_probability(baseline.p_tox_event, "p_tox_event");
  check_probability(baseline.p_tox_fatal, "p_tox_fatal");
  check_probability(baseline.p_respond, "p_respond");
  check_probability(baseline.p_worsen, "p_worsen");
  check_probability(baseline.p_death_disease, "p_death_disease");
  if (!(baseline.proximity_decay > 0 && baseline.proximity_decay < 1))
    fail(ErrorCode::InvalidConfig, "proximity_decay must lie in (0, 1)");

  const ModelShape shape = shape_of(model);
  const double worst_hr_tox = std::max(hr_toxicity, 1.0);
  const double worst_hr_eff = std::max(hr_efficacy, 1.0);
  for (int tier = 0; tier < shape.fatal_tox_tier; ++tier) {
    ToxicityKernel k =
        toxicity_kernel(baseline, tier, shape.fatal_tox_tier, worst_hr_tox);
    if (kernel_mass(k) > 1.0)
      fail(ErrorCode::InvalidConfig,
           "weekly toxicity probabilities exceed 1 from tier " +
               std::to_string(tier));
  }
  double adverse = std::max(apply_hr(baseline.p_worsen, worst_hr_eff),
                            apply_hr(baseline.p_death_disease, worst_hr_eff));
  if (baseline.p_respond + adverse > 1.0)
    fail(ErrorCode::InvalidConfig, "monthly efficacy probabilities exceed 1");
}

RawPatient simulate_patient_raw(const SimConfig& config, Arm arm, Rng& rng) {
  const ModelShape shape = shape_of(config.model);
  const double hr_tox = arm == Arm::experimental ? config.hr_toxicity : 1.0;
  const double hr_eff = arm == Arm::experimental ? config.hr_efficacy : 1.0;

  RawPatient patient;
  patient.arm = arm;
  int tox = 0;
  int eff = shape.initial_eff;
  patient.steps.push_back({0, tox, eff});

  for (int week = 1; week <= config.duration_weeks; ++week) {
    const int prev_tox = tox;
    const int prev_eff = eff;

    ToxicityKernel kernel =
        toxicity_kernel(config.baseline, tox, shape.fatal_tox_tier, hr_tox);
    double u = rng.next_double();
    if (u < kernel.p_fatal) {
      tox = shape.fatal_tox_tier;
    } else {
      double acc = kernel.p_fatal;
      for (int t = 0; t < kernel.n_nonfatal; ++t) {
        acc += kernel.p_target[static_cast<std::size_t>(t)];
        if (u < acc) {
          tox = t;
          break;
        }
      }
    }

    bool tox_fatal = tox == shape.fatal_tox_tier;
    if (!tox_fatal && week % 4 == 0)
      eff = efficacy_move(shape, config.baseline, eff, hr_eff, rng.next_double());

    if (tox != prev_tox || eff != prev_eff)
      patient.steps.push_back({week, tox, eff});

    if (tox_fatal || eff == shape.death_eff_tier) {
      patient.absorbed = true;
      patient.last_week = week;
      return patient;
    }
  }
  patient.last_week = config.duration_weeks;
  return patient;
}

PatientTrajectory simulate_patient(const SimConfig& config, Arm arm, Rng& rng) {
  config.validate();
  RawPatient raw = simulate_patient_raw(config, arm, rng);
  raw.id = arm == Arm::control ? "C0" : "E0";
  RawTrial trial{config.model, config.duration_weeks, {std::move(raw)}};
  // score through the combined matrix and return the single subject
  TrialDataset scored = score_trial(trial, ScoringEndpoint::rba);
  for (auto& group : scored.groups)
    if (!group.patients.empty()) return std::move(group.patients.front());
  fail(ErrorCode::InvalidConfig, "simulation produced no patients");
}

RawTrial simulate_trial_raw(const SimConfig& config) {
  config.validate();
  RawTrial trial;
  trial.model = config.model;
  trial.duration_weeks = config.duration_weeks;
  const int n_control = (config.sample_size + 1) / 2;
  trial.patients.resize(static_cast<std::size_t>(config.sample_size));
  for (int i = 0; i < config.sample_size; ++i) {
    Rng rng(seed_mix(config.seed, 0x50415449ULL, static_cast<std::uint64_t>(i)));
    Arm arm = i < n_control ? Arm::control : Arm::experimental;
    RawPatient p = simulate_patient_raw(config, arm, rng);
    p.id = (arm == Arm::control ? "C" : "E") + std::to_string(i);
    trial.patients[static_cast<std::size_t>(i)] = std::move(p);
  }
  return trial;
}

TrialDataset score_trial(const RawTrial& trial, ScoringEndpoint endpoint) {
  const ModelShape shape = shape_of(trial.model);
  // Efficacy-only scoring reuses the model's own efficacy scale: Table 3
  // style {0,2,4,6,11} for the 6x5 model, the {0,1,3} healthy/sick/dead
  // column scores for the 3x3 model.
  const RbaMatrix& matrix =
      endpoint == ScoringEndpoint::rba
          ? *shape.matrix
          : (trial.model == SimModel::m3x3 ? RbaMatrix::m3x3()
                                           : RbaMatrix::efficacy_only());

  TrialDataset dataset{matrix, TimeUnit::week, {}};
  dataset.groups.resize(2);
  dataset.groups[0].name = "control";
  dataset.groups[1].name = "experimental";

  std::vector<std::pair<double, HealthScore>> records;
  for (const auto& patient : trial.patients) {
    records.clear();
    for (const auto& step : patient.steps) {
      HealthScore score;
      if (endpoint == ScoringEndpoint::rba) {
        score = shape.matrix->score(static_cast<std::size_t>(step.tox),
                                    static_cast<std::size_t>(step.eff));
      } else {
        // death from any cause stays an efficacy event
        int eff = step.tox == shape.fatal_tox_tier ? shape.death_eff_tier : step.eff;
        score = matrix.score(0, static_cast<std::size_t>(eff));
      }
      records.emplace_back(static_cast<double>(step.week), score);
    }
    PatientTrajectory traj =
        build_trajectory(patient.id, patient.arm == Arm::control ? "control" : "experimental",
                         records, static_cast<double>(patient.last_week), matrix);
    dataset.groups[patient.arm == Arm::control ? 0 : 1].patients.push_back(
        std::move(traj));
  }
  return dataset;
}

TrialDataset simulate_trial(const SimConfig& config) {
  return score_trial(simulate_trial_raw(config), ScoringEndpoint::rba);
}

std::pair<double, double> control_response_rates(const BaselineRates& rates,
                                                 int duration_weeks, int n_patients,
                                                 std::uint64_t seed, bool cumulative,
                                                 int workers) {
  SimConfig config;
  config.model = SimModel::m6x5;
  config.sample_size = 2;  // unused; patients are simulated directly
  config.duration_weeks = duration_weeks;
  config.baseline = rates;
  config.validate();

  long ever_cr = 0, ever_pr = 0;
  const int nt = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt) \
    reduction(+ : ever_cr, ever_pr)
  for (int i = 0; i < n_patients; ++i) {
    Rng rng(seed_mix(seed, 0x43414C49ULL, static_cast<std::uint64_t>(i)));
    RawPatient p = simulate_patient_raw(config, Arm::control, rng);
    int best = static_cast<int>(EfficacyTier5::SD);
    for (const auto& step : p.steps) best = std::min(best, step.eff);
    if (best == static_cast<int>(EfficacyTier5::CR)) ++ever_cr;
    if (best == static_cast<int>(EfficacyTier5::PR)) ++ever_pr;
  }
  double cr = static_cast<double>(ever_cr) / n_patients;
  double pr = static_cast<double>(ever_pr) / n_patients;
  if (cumulative) pr += cr;  // P(best response <= PR)
  return {cr, pr};
}

CalibrationResult calibrate_control(const CalibrationTargets& targets,
                                    double tolerance, const BaselineRates& base,
                                    int duration_weeks, int patients_per_eval,
                                    std::uint64_t seed,
                                    std::optional<double> fixed_p_worsen,
                                    int workers) {
  if (!(targets.cr_rate >= 0 && targets.cr_rate < 1) ||
      !(targets.pr_rate >= 0 && targets.pr_rate < 1))
    fail(ErrorCode::InvalidConfig, "calibration targets must lie in [0, 1)");
  if (patients_per_eval < 20000) patients_per_eval = 20000;

  auto evaluate = [&](double r, double w) {
    BaselineRates cand = base;
    cand.p_respond = r;
    cand.p_worsen = w;
    auto [cr, pr] = control_response_rates(cand, duration_weeks, patients_per_eval,
                                           seed, targets.cumulative, workers);
    return std::tuple<double, double, BaselineRates>(cr, pr, cand);
  };
  auto objective = [&](double cr, double pr) {
    return std::max(std::abs(cr - targets.cr_rate), std::abs(pr - targets.pr_rate));
  };

  double r_lo = 0.0, r_hi = 0.6;
  double w_lo = fixed_p_worsen.value_or(0.0);
  double w_hi = fixed_p_worsen.value_or(0.6);

  constexpr int kGrid = 9;
  constexpr int kRounds = 4;
  double best_obj = 1e9, best_r = 0, best_w = 0, best_cr = 0, best_pr = 0;
  BaselineRates best_rates = base;

  for (int round = 0; round < kRounds; ++round) {
    double r_step = (r_hi - r_lo) / (kGrid - 1);
    double w_step = (w_hi - w_lo) / (kGrid - 1);
    for (int ri = 0; ri < kGrid; ++ri) {
      double r = r_lo + ri * r_step;
      for (int wi = 0; wi < (fixed_p_worsen ? 1 : kGrid); ++wi) {
        double w = fixed_p_worsen.value_or(w_lo + wi * w_step);
        if (r + w > 1.0) continue;
        auto [cr, pr, cand] = evaluate(r, w);
        double obj = objective(cr, pr);
        if (obj < best_obj) {
          best_obj = obj;
          best_r = r;
          best_w = w;
          best_cr = cr;
          best_pr = pr;
          best_rates = cand;
        }
      }
    }
    // shrink the box around the incumbent
    double r_span = (r_hi - r_lo) / 3.0;
    r_lo = std::max(0.0, best_r - r_span / 2);
    r_hi = std::min(1.0, best_r + r_span / 2);
    if (!fixed_p_worsen) {
      double w_span = (w_hi - w_lo) / 3.0;
      w_lo = std::max(0.0, best_w - w_span / 2);
      w_hi = std::min(1.0, best_w + w_span / 2);
    }
  }

  if (best_obj > tolerance)
    fail(ErrorCode::CalibrationFailed,
         "no (p_respond, p_worsen) reaches cr=" + std::to_string(targets.cr_rate) +
             ", pr=" + std::to_string(targets.pr_rate) + " within " +
             std::to_string(tolerance) + "; best achieved cr=" +
             std::to_string(best_cr) + ", pr=" + std::to_string(best_pr) +
             " at p_respond=" + std::to_string(best_r) + ", p_worsen=" +
             std::to_string(best_w));

  CalibrationResult result;
  result.rates = best_rates;
  result.achieved_cr = best_cr;
  result.achieved_pr = best_pr;
  result.patients_per_eval = patients_per_eval;
  return result;
}

}  // namespace cwta
