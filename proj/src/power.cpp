#include "cwta/power.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "cwta/errors.hpp"
#include "cwta/stats.hpp"

namespace cwta {

namespace {

std::uint64_t replication_seed(std::uint64_t seed, const SimConfig& config, int rep) {
  return seed_mix(seed, static_cast<std::uint64_t>(config.sample_size),
                  hash_double(config.hr_efficacy), hash_double(config.hr_toxicity),
                  static_cast<std::uint64_t>(rep));
}

// One replication: simulate once, test both scorings on the shared dataset.
// Returns {rba significant, efficacy-only significant}.
std::pair<bool, bool> replicate(const SimConfig& config, double alpha,
                                std::uint64_t seed, int rep) {
  SimConfig rep_config = config;
  rep_config.seed = replication_seed(seed, config, rep);
  RawTrial trial = simulate_trial_raw(rep_config);
  LogrankResult rba = weighted_logrank(score_trial(trial, ScoringEndpoint::rba));
  LogrankResult eff =
      weighted_logrank(score_trial(trial, ScoringEndpoint::efficacy_only));
  return {rba.p_two_sided < alpha, eff.p_two_sided < alpha};
}

PowerPoint make_point(const SimConfig& config, ScoringEndpoint endpoint,
                      int replications, double alpha, long significant) {
  PowerPoint point;
  point.endpoint = endpoint;
  point.hr_efficacy = config.hr_efficacy;
  point.hr_toxicity = config.hr_toxicity;
  point.sample_size = config.sample_size;
  point.replications = replications;
  point.alpha = alpha;
  point.power = static_cast<double>(significant) / replications;
  point.std_error = std::sqrt(point.power * (1.0 - point.power) / replications);
  return point;
}

PowerPair pair_from_counts(const SimConfig& config, int replications, double alpha,
                           long rba_sig, long eff_sig) {
  return {make_point(config, ScoringEndpoint::rba, replications, alpha, rba_sig),
          make_point(config, ScoringEndpoint::efficacy_only, replications, alpha,
                     eff_sig)};
}

}  // namespace

PowerPair estimate_power_pair(const SimConfig& config, int replications,
                              double alpha, std::uint64_t seed, int workers) {
  if (replications < 1)
    fail(ErrorCode::InvalidConfig, "replications must be at least 1");
  config.validate();
  long rba_sig = 0, eff_sig = 0;
  const int nt = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt) \
    reduction(+ : rba_sig, eff_sig)
  for (int rep = 0; rep < replications; ++rep) {
    auto [rba, eff] = replicate(config, alpha, seed, rep);
    rba_sig += rba ? 1 : 0;
    eff_sig += eff ? 1 : 0;
  }
  return pair_from_counts(config, replications, alpha, rba_sig, eff_sig);
}

PowerPair estimate_power_pair_serial(const SimConfig& config, int replications,
                                     double alpha, std::uint64_t seed) {
  if (replications < 1)
    fail(ErrorCode::InvalidConfig, "replications must be at least 1");
  config.validate();
  long rba_sig = 0, eff_sig = 0;
  for (int rep = 0; rep < replications; ++rep) {
    auto [rba, eff] = replicate(config, alpha, seed, rep);
    rba_sig += rba ? 1 : 0;
    eff_sig += eff ? 1 : 0;
  }
  return pair_from_counts(config, replications, alpha, rba_sig, eff_sig);
}

PowerPoint estimate_power(const SimConfig& config, ScoringEndpoint endpoint,
                          int replications, double alpha, std::uint64_t seed,
                          int workers) {
  PowerPair pair = estimate_power_pair(config, replications, alpha, seed, workers);
  return endpoint == ScoringEndpoint::rba ? pair.rba : pair.efficacy_only;
}

PowerGrid power_grid(const SimConfig& base_config, const std::vector<int>& ss_list,
                     const std::vector<std::pair<double, double>>& hr_list,
                     EndpointRequest endpoints, int replications, double alpha,
                     std::uint64_t seed, int workers) {
  if (ss_list.empty() || hr_list.empty())
    fail(ErrorCode::InvalidConfig, "power grid needs non-empty SS and HR lists");
  PowerGrid grid;
  for (const auto& [hr_eff, hr_tox] : hr_list) {
    for (int ss : ss_list) {
      SimConfig config = base_config;
      config.sample_size = ss;
      config.hr_efficacy = hr_eff;
      config.hr_toxicity = hr_tox;
      PowerPair pair = estimate_power_pair(config, replications, alpha, seed, workers);
      if (endpoints != EndpointRequest::efficacy_only) grid.points.push_back(pair.rba);
      if (endpoints != EndpointRequest::rba) grid.points.push_back(pair.efficacy_only);
    }
  }
  return grid;
}

std::vector<double> isotonic_nondecreasing(const std::vector<double>& values) {
  // pool adjacent violators, unit weights
  std::vector<double> level;
  std::vector<int> count;
  for (double v : values) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      double merged = (level[level.size() - 2] * count[count.size() - 2] +
                       level.back() * count.back()) /
                      (count[count.size() - 2] + count.back());
      int n = count[count.size() - 2] + count.back();
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = n;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < level.size(); ++i)
    out.insert(out.end(), static_cast<std::size_t>(count[i]), level[i]);
  return out;
}

double interpolate_ss(const std::vector<std::pair<int, double>>& points,
                      double target_power) {
  if (points.size() < 2)
    fail(ErrorCode::TargetNotBracketed, "need at least two grid points");
  std::vector<double> powers;
  powers.reserve(points.size());
  for (const auto& [ss, p] : points) powers.push_back(p);
  std::vector<double> smooth = isotonic_nondecreasing(powers);

  if (smooth.front() >= target_power)
    fail(ErrorCode::TargetNotBracketed,
         "smallest sample size already reaches the target power");
  for (std::size_t i = 1; i < smooth.size(); ++i) {
    if (smooth[i] >= target_power) {  // first crossing
      double p_lo = smooth[i - 1], p_hi = smooth[i];
      double ss_lo = points[i - 1].first, ss_hi = points[i].first;
      if (p_hi == p_lo) return ss_hi;
      return ss_lo + (target_power - p_lo) * (ss_hi - ss_lo) / (p_hi - p_lo);
    }
  }
  fail(ErrorCode::TargetNotBracketed, "no sample size reaches the target power");
}

double interpolate_ss(const PowerGrid& grid, ScoringEndpoint endpoint,
                      double hr_efficacy, double hr_toxicity, double target_power) {
  std::vector<std::pair<int, double>> points;
  for (const auto& p : grid.points)
    if (p.endpoint == endpoint && p.hr_efficacy == hr_efficacy &&
        p.hr_toxicity == hr_toxicity)
      points.emplace_back(p.sample_size, p.power);
  std::sort(points.begin(), points.end());
  return interpolate_ss(points, target_power);
}

}  // namespace cwta
