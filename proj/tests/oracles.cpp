#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

namespace oracles {

LogrankStats classic_logrank(const std::vector<Subject>& subjects) {
  std::set<double> event_times;
  for (const auto& s : subjects)
    if (s.event) event_times.insert(s.time);

  double U = 0, V = 0;
  for (double t : event_times) {
    double n0 = 0, n1 = 0, d = 0, d0 = 0;
    for (const auto& s : subjects) {
      if (s.time >= t) (s.group == 0 ? n0 : n1) += 1;
      if (s.event && s.time == t) {
        d += 1;
        if (s.group == 0) d0 += 1;
      }
    }
    double n = n0 + n1;
    U += d0 - d * n0 / n;
    if (n > 1) V += d * (n0 / n) * (n1 / n) * (n - d) / (n - 1);
  }
  double p = 1;
  if (V > 0) p = std::erfc(std::abs(U / std::sqrt(V)) / std::sqrt(2.0));
  return {U, V, p};
}

std::vector<std::pair<double, double>> kaplan_meier(
    const std::vector<Subject>& subjects) {
  std::set<double> event_times;
  for (const auto& s : subjects)
    if (s.event) event_times.insert(s.time);

  std::vector<std::pair<double, double>> out;
  double surv = 1.0;
  for (double t : event_times) {
    double n = 0, d = 0;
    for (const auto& s : subjects) {
      if (s.time >= t) n += 1;
      if (s.event && s.time == t) d += 1;
    }
    surv *= 1.0 - d / n;
    out.emplace_back(t, surv);
  }
  return out;
}

double naive_weighted_U(const std::vector<OraclePatient>& patients,
                        const std::vector<int>& assignment) {
  std::set<double> times;
  for (const auto& p : patients)
    for (const auto& [t, w] : p.changes) times.insert(t);

  double U = 0;
  for (double t : times) {
    double n = 0, n1 = 0, sw = 0, d1 = 0;
    for (std::size_t i = 0; i < patients.size(); ++i) {
      const auto& p = patients[i];
      if (p.exit_time >= t) {
        n += 1;
        if (assignment[i] == 0) n1 += 1;
      }
      for (const auto& [ct, w] : p.changes) {
        if (ct == t) {
          sw += w;
          if (assignment[i] == 0) d1 += w;
        }
      }
    }
    if (n > 0) U += d1 - (n1 / n) * sw;
  }
  return U;
}

double brute_force_permutation_p(const std::vector<OraclePatient>& patients,
                                 const std::vector<int>& observed_assignment) {
  const int n = static_cast<int>(patients.size());
  const int k = static_cast<int>(
      std::count(observed_assignment.begin(), observed_assignment.end(), 0));
  const double u_obs = std::abs(naive_weighted_U(patients, observed_assignment));

  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  long total = 0, extreme = 0;
  while (true) {
    std::vector<int> assign(n, 1);
    for (int i : idx) assign[i] = 0;
    double u = std::abs(naive_weighted_U(patients, assign));
    ++total;
    if (u >= u_obs * (1.0 - 1e-9)) ++extreme;

    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

std::pair<double, double> dp_response_rates(double p_respond, double p_worsen,
                                            double p_death, double p_tox_fatal,
                                            int weeks) {
  // states: efficacy tier 0..4 (CR..Death) x best tier seen 0..2 (CR/PR/SD)
  const int months = weeks / 4;
  const double survive_month = std::pow(1.0 - p_tox_fatal, 4);
  std::array<std::array<double, 3>, 5> mass{};
  std::array<double, 3> frozen{};  // absorbed by fatal toxicity
  mass[2][2] = 1.0;

  for (int m = 0; m < months; ++m) {
    for (int e = 0; e < 4; ++e) {
      for (int b = 0; b < 3; ++b) {
        frozen[b] += mass[e][b] * (1.0 - survive_month);
        mass[e][b] *= survive_month;
      }
    }
    std::array<std::array<double, 3>, 5> next{};
    for (int b = 0; b < 3; ++b) {
      next[1][b] += mass[0][b] * p_worsen;  // CR -> PR
      next[0][b] += mass[0][b] * (1 - p_worsen);
      next[0][0] += mass[1][b] * p_respond;  // PR -> CR
      next[2][b] += mass[1][b] * p_worsen;
      next[1][b] += mass[1][b] * (1 - p_respond - p_worsen);
      next[1][std::min(b, 1)] += mass[2][b] * p_respond;  // SD -> PR
      next[3][b] += mass[2][b] * p_worsen;
      next[2][b] += mass[2][b] * (1 - p_respond - p_worsen);
      next[4][b] += mass[3][b] * p_death;  // PD -> Death
      next[3][b] += mass[3][b] * (1 - p_death);
      next[4][b] += mass[4][b];
    }
    mass = next;
  }

  std::array<double, 3> best{};
  for (int b = 0; b < 3; ++b) {
    best[b] = frozen[b];
    for (int e = 0; e < 5; ++e) best[b] += mass[e][b];
  }
  return {best[0], best[1]};
}

}  // namespace oracles
