// Independent reference implementations used only by tests. These stay
// deliberately naive and must not share code paths with the library.
#ifndef CWTA_TESTS_ORACLES_HPP
#define CWTA_TESTS_ORACLES_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace oracles {

// Right-censored binary survival observation.
struct Subject {
  double time;
  bool event;
  int group;  // 0 or 1
};

struct LogrankStats {
  double U;
  double V;
  double p;
};

// Textbook tied-data logrank (observed minus expected for group 0, with the
// hypergeometric variance).
LogrankStats classic_logrank(const std::vector<Subject>& subjects);

// Kaplan-Meier event-free estimate evaluated at each distinct event time.
// Returns (time, survival) pairs, excluding the implicit (0, 1) start.
std::vector<std::pair<double, double>> kaplan_meier(
    const std::vector<Subject>& subjects);

// Trajectory view used by the permutation oracle: the patient's risk-set
// exit time plus (time, weight) transitions.
struct OraclePatient {
  double exit_time;
  std::vector<std::pair<double, double>> changes;
};

// Weighted observed-minus-expected statistic computed the slow way: a full
// pass over patients at every distinct change time.
double naive_weighted_U(const std::vector<OraclePatient>& patients,
                        const std::vector<int>& assignment);

// Exact permutation p-value by enumerating all C(n, n1) label assignments.
// Shares only the tie convention |U*| >= |U| * (1 - 1e-9) with the library.
double brute_force_permutation_p(const std::vector<OraclePatient>& patients,
                                 const std::vector<int>& observed_assignment);

// Exact distribution of the monthly efficacy kernel with weekly fatal
// toxicity, tracking the best tier ever reached. Returns
// {P(best == CR), P(best == PR)}.
std::pair<double, double> dp_response_rates(double p_respond, double p_worsen,
                                            double p_death, double p_tox_fatal,
                                            int weeks);

}  // namespace oracles

#endif  // CWTA_TESTS_ORACLES_HPP
