#ifndef CWTA_STATS_HPP
#define CWTA_STATS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cwta/trajectory.hpp"

namespace cwta {

// One row per distinct transition time across both groups. Weights are
// (s_new - s_old) / max_score, so deteriorations are positive.
struct EventRow {
  double time = 0;
  std::array<double, 2> n_at_risk{};     // n_gj
  std::array<double, 2> weighted_sum{};  // signed D_gj
  double pooled_weight_sum = 0;          // sum of w over all changes at t_j
  double pooled_weight_sq_sum = 0;       // sum of w^2
  double pooled_abs_weight_sum = 0;      // sum of |w|
};

struct EventTable {
  std::array<std::string, 2> group_names;
  std::array<int, 2> group_sizes{};
  std::vector<EventRow> rows;
};

struct CurvePoint {
  double time;
  double value;
};

// Product-limit weighted health-status curve. Starts at 1; may exceed 1
// when the group improves from its time-0 baseline.
struct WeightedCurve {
  std::string group;
  std::vector<CurvePoint> points;  // includes (0, 1)
};

enum class TestMethod { normal, permutation };

struct LogrankResult {
  double U = 0;  // observed-minus-expected weighted sum for group 1
  double V = 0;  // permutation-moment variance
  double Z = 0;
  double p_two_sided = 1;
  TestMethod method = TestMethod::normal;
  long n_permutations = 0;  // 0 for normal
  bool no_events = false;
};

enum class PermutationMode {
  automatic,   // exhaustive when total patients <= 12, else sampled
  sampled,     // always Monte Carlo
  exhaustive,  // always full enumeration over label assignments
};

EventTable event_table(const TrialDataset& dataset);

WeightedCurve weighted_curve(const TrialDataset& dataset,
                             const std::string& group);

// Weighted logrank with variance from exact finite-population permutation
// moments at each event time; two-sided normal-approximation p-value.
LogrankResult weighted_logrank(const TrialDataset& dataset);

// Resampling p-value: labels are permuted while trajectories stay fixed.
// p = (1 + #{|U*| >= |U|}) / (1 + n_perm) for sampled draws; exhaustive
// enumeration counts all C(n, n1) assignments instead. The permutation
// stream is partitioned into fixed chunks with derived seeds, so the result
// is independent of worker count.
LogrankResult permutation_logrank(const TrialDataset& dataset, long n_perm,
                                  std::uint64_t seed, int workers = 0,
                                  PermutationMode mode = PermutationMode::automatic);

// Serial reference for the sampled permutation path; identical output to
// permutation_logrank by construction. Kept for tests and the benchmark.
LogrankResult permutation_logrank_serial(const TrialDataset& dataset, long n_perm,
                                         std::uint64_t seed,
                                         PermutationMode mode = PermutationMode::automatic);

}  // namespace cwta

#endif  // CWTA_STATS_HPP
