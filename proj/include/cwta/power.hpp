#ifndef CWTA_POWER_HPP
#define CWTA_POWER_HPP

#include <cstdint>
#include <vector>

#include "cwta/sim.hpp"

namespace cwta {

struct PowerPoint {
  ScoringEndpoint endpoint = ScoringEndpoint::rba;
  double hr_efficacy = 1;
  double hr_toxicity = 1;
  int sample_size = 0;
  int replications = 0;
  double alpha = 0.05;
  double power = 0;      // significant_count / replications
  double std_error = 0;  // binomial SE
};

struct PowerGrid {
  std::vector<PowerPoint> points;
};

// Per-replication seeds derive from (seed, ss, hr_eff, hr_tox, rep), so any
// cell or subset of replications can be recomputed independently and the
// result never depends on worker count. Both endpoints of a pair share the
// simulated datasets.
struct PowerPair {
  PowerPoint rba;
  PowerPoint efficacy_only;
};

PowerPair estimate_power_pair(const SimConfig& config, int replications,
                              double alpha, std::uint64_t seed, int workers = 0);

// Serial reference implementation; identical output to estimate_power_pair.
PowerPair estimate_power_pair_serial(const SimConfig& config, int replications,
                                     double alpha, std::uint64_t seed);

PowerPoint estimate_power(const SimConfig& config, ScoringEndpoint endpoint,
                          int replications, double alpha, std::uint64_t seed,
                          int workers = 0);

enum class EndpointRequest { rba, efficacy_only, both };

PowerGrid power_grid(const SimConfig& base_config, const std::vector<int>& ss_list,
                     const std::vector<std::pair<double, double>>& hr_list,
                     EndpointRequest endpoints, int replications, double alpha,
                     std::uint64_t seed, int workers = 0);

// Linear interpolation of the sample size reaching `target_power`, applied
// after isotonic (pool-adjacent-violators) smoothing of power vs SS.
// `points` are (ss, power) sorted by ss. Throws TargetNotBracketed.
double interpolate_ss(const std::vector<std::pair<int, double>>& points,
                      double target_power = 0.8);

// Convenience: extracts one endpoint/HR series from a grid and interpolates.
double interpolate_ss(const PowerGrid& grid, ScoringEndpoint endpoint,
                      double hr_efficacy, double hr_toxicity,
                      double target_power = 0.8);

// Isotonic regression (nondecreasing), least squares; exposed for tests.
std::vector<double> isotonic_nondecreasing(const std::vector<double>& values);

}  // namespace cwta

#endif  // CWTA_POWER_HPP
