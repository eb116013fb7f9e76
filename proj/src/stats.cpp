#include "cwta/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cwta/errors.hpp"
#include "cwta/rng.hpp"

namespace cwta {

namespace {

struct FlatPatient {
  int group;
  double exit_time;
  std::vector<std::pair<double, double>> changes;  // (time, weight)
};

struct FlatDataset {
  std::vector<FlatPatient> patients;
  std::vector<double> event_times;  // sorted distinct change times
  int n1 = 0;                       // observed size of group 1
};

FlatDataset flatten(const TrialDataset& dataset) {
  if (dataset.groups.size() != 2)
    fail(ErrorCode::FewerThanTwoGroups,
         "weighted logrank requires exactly 2 groups, got " +
             std::to_string(dataset.groups.size()));
  for (const auto& g : dataset.groups)
    if (g.patients.empty())
      fail(ErrorCode::EmptyGroup, "group '" + g.name + "' has no patients");

  const double max_score = dataset.matrix.max_score();
  FlatDataset flat;
  for (int g = 0; g < 2; ++g) {
    for (const auto& traj : dataset.groups[g].patients) {
      FlatPatient p;
      p.group = g;
      p.exit_time = traj.exit_time();
      double prev = traj.initial_score;
      for (const auto& change : traj.changes) {
        p.changes.emplace_back(change.time, (change.score - prev) / max_score);
        prev = change.score;
      }
      flat.patients.push_back(std::move(p));
    }
    if (g == 0) flat.n1 = static_cast<int>(flat.patients.size());
  }

  for (const auto& p : flat.patients)
    for (const auto& [time, w] : p.changes) flat.event_times.push_back(time);
  std::sort(flat.event_times.begin(), flat.event_times.end());
  flat.event_times.erase(
      std::unique(flat.event_times.begin(), flat.event_times.end()),
      flat.event_times.end());
  return flat;
}

// Per-patient logrank scores: U = sum of xi over group-1 patients. Derived
// from U = sum_j [D_1j - (n_1j/n_j) * sw_j] by swapping the summation order;
// n_j and sw_j do not depend on the labeling, so permutations only re-select
// which xi are summed.
struct ScoreDecomposition {
  std::vector<double> xi;
  std::vector<int> group;
  int n1 = 0;
  double observed_U = 0;
};

ScoreDecomposition patient_scores(const FlatDataset& flat) {
  const auto& times = flat.event_times;
  const std::size_t T = times.size();

  std::vector<double> pooled_w(T, 0.0);
  std::vector<double> n_total(T, 0.0);
  for (const auto& p : flat.patients) {
    for (const auto& [time, w] : p.changes) {
      auto j = static_cast<std::size_t>(
          std::lower_bound(times.begin(), times.end(), time) - times.begin());
      pooled_w[j] += w;
    }
  }
  {
    std::vector<double> exits;
    exits.reserve(flat.patients.size());
    for (const auto& p : flat.patients) exits.push_back(p.exit_time);
    std::sort(exits.begin(), exits.end());
    for (std::size_t j = 0; j < T; ++j) {
      n_total[j] = static_cast<double>(
          exits.end() -
          std::lower_bound(exits.begin(), exits.end(), times[j]));
    }
  }

  // prefix[j] = sum_{k <= j} sw_k / n_k
  std::vector<double> prefix(T + 1, 0.0);
  for (std::size_t j = 0; j < T; ++j)
    prefix[j + 1] = prefix[j] + (n_total[j] > 0 ? pooled_w[j] / n_total[j] : 0.0);

  ScoreDecomposition dec;
  dec.n1 = flat.n1;
  dec.xi.reserve(flat.patients.size());
  dec.group.reserve(flat.patients.size());
  for (const auto& p : flat.patients) {
    double own = 0;
    for (const auto& [time, w] : p.changes) own += w;
    auto r = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), p.exit_time) - times.begin());
    dec.xi.push_back(own - prefix[r]);
    dec.group.push_back(p.group);
  }

  // The scores sum to zero in exact arithmetic; recenter to keep permuted
  // sums comparable at the 1e-12 level.
  double mean = std::accumulate(dec.xi.begin(), dec.xi.end(), 0.0) /
                static_cast<double>(dec.xi.size());
  for (double& x : dec.xi) x -= mean;

  for (std::size_t i = 0; i < dec.xi.size(); ++i)
    if (dec.group[i] == 0) dec.observed_U += dec.xi[i];
  return dec;
}

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

LogrankResult normal_result_from_table(const EventTable& table) {
  LogrankResult res;
  res.method = TestMethod::normal;
  if (table.rows.empty()) {
    res.no_events = true;
    return res;
  }
  double U = 0, V = 0;
  for (const auto& row : table.rows) {
    const double n1 = row.n_at_risk[0];
    const double n2 = row.n_at_risk[1];
    const double n = n1 + n2;
    const double sw = row.pooled_weight_sum;
    const double sw2 = row.pooled_weight_sq_sum;
    U += row.weighted_sum[0] - (n1 / n) * sw;
    if (n > 1) V += n1 * n2 * (n * sw2 - sw * sw) / (n * n * (n - 1));
  }
  res.U = U;
  res.V = std::max(V, 0.0);
  if (res.V > 0) {
    res.Z = U / std::sqrt(res.V);
    res.p_two_sided = two_sided_normal_p(res.Z);
  } else {
    res.Z = 0;
    res.p_two_sided = 1;
  }
  return res;
}

// Tie rule shared with the test oracles: an assignment counts as at least
// as extreme when |U*| >= |U| * (1 - 1e-9), absorbing float noise between
// algebraically equal sums.
bool at_least_as_extreme(double u_perm, double u_obs) {
  return std::abs(u_perm) >= std::abs(u_obs) * (1.0 - 1e-9);
}

long count_extreme_exhaustive(const ScoreDecomposition& dec, long* total_out) {
  const int n = static_cast<int>(dec.xi.size());
  const int k = dec.n1;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  long count = 0;
  long total = 0;
  while (true) {
    double u = 0;
    for (int i : idx) u += dec.xi[i];
    ++total;
    if (at_least_as_extreme(u, dec.observed_U)) ++count;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  *total_out = total;
  return count;
}

constexpr long kPermChunk = 4096;

long count_extreme_chunk(const ScoreDecomposition& dec, std::uint64_t seed,
                         long chunk_index, long draws) {
  Rng rng(seed_mix(seed, 0x5045524dULL, static_cast<std::uint64_t>(chunk_index)));
  const int n = static_cast<int>(dec.xi.size());
  const int k = dec.n1;
  std::vector<int> idx(n);
  long count = 0;
  for (long d = 0; d < draws; ++d) {
    std::iota(idx.begin(), idx.end(), 0);
    double u = 0;
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
      u += dec.xi[idx[i]];
    }
    if (at_least_as_extreme(u, dec.observed_U)) ++count;
  }
  return count;
}

LogrankResult permutation_impl(const TrialDataset& dataset, long n_perm,
                               std::uint64_t seed, int workers,
                               PermutationMode mode, bool parallel) {
  EventTable table = event_table(dataset);
  LogrankResult res = normal_result_from_table(table);
  res.method = TestMethod::permutation;
  if (res.no_events) return res;

  FlatDataset flat = flatten(dataset);
  ScoreDecomposition dec = patient_scores(flat);

  const long total_patients = static_cast<long>(dec.xi.size());
  bool exhaustive = mode == PermutationMode::exhaustive ||
                    (mode == PermutationMode::automatic && total_patients <= 12);

  if (exhaustive) {
    long total = 0;
    long count = count_extreme_exhaustive(dec, &total);
    res.n_permutations = total;
    res.p_two_sided = static_cast<double>(count) / static_cast<double>(total);
    return res;
  }

  if (n_perm <= 0)
    fail(ErrorCode::InvalidConfig, "permutation draws must be positive");
  const long chunks = (n_perm + kPermChunk - 1) / kPermChunk;
  long count = 0;
  if (parallel) {
    const int nt = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt) reduction(+ : count)
    for (long c = 0; c < chunks; ++c) {
      long draws = std::min(kPermChunk, n_perm - c * kPermChunk);
      count += count_extreme_chunk(dec, seed, c, draws);
    }
  } else {
    for (long c = 0; c < chunks; ++c) {
      long draws = std::min(kPermChunk, n_perm - c * kPermChunk);
      count += count_extreme_chunk(dec, seed, c, draws);
    }
  }
  res.n_permutations = n_perm;
  res.p_two_sided =
      static_cast<double>(1 + count) / static_cast<double>(1 + n_perm);
  return res;
}

}  // namespace

EventTable event_table(const TrialDataset& dataset) {
  FlatDataset flat = flatten(dataset);

  EventTable table;
  table.group_names = {dataset.groups[0].name, dataset.groups[1].name};
  table.group_sizes = {flat.n1,
                       static_cast<int>(flat.patients.size()) - flat.n1};

  const auto& times = flat.event_times;
  const std::size_t T = times.size();
  if (T == 0) return table;

  std::array<std::vector<double>, 2> exits;
  for (const auto& p : flat.patients)
    exits[static_cast<std::size_t>(p.group)].push_back(p.exit_time);
  for (auto& e : exits) std::sort(e.begin(), e.end());

  table.rows.resize(T);
  for (std::size_t j = 0; j < T; ++j) {
    auto& row = table.rows[j];
    row.time = times[j];
    for (int g = 0; g < 2; ++g) {
      const auto& e = exits[static_cast<std::size_t>(g)];
      row.n_at_risk[static_cast<std::size_t>(g)] = static_cast<double>(
          e.end() - std::lower_bound(e.begin(), e.end(), times[j]));
    }
  }
  for (const auto& p : flat.patients) {
    for (const auto& [time, w] : p.changes) {
      auto j = static_cast<std::size_t>(
          std::lower_bound(times.begin(), times.end(), time) - times.begin());
      auto& row = table.rows[j];
      row.weighted_sum[static_cast<std::size_t>(p.group)] += w;
      row.pooled_weight_sum += w;
      row.pooled_weight_sq_sum += w * w;
      row.pooled_abs_weight_sum += std::abs(w);
    }
  }
  return table;
}

WeightedCurve weighted_curve(const TrialDataset& dataset,
                             const std::string& group) {
  const TrialGroup* g = dataset.find_group(group);
  if (g == nullptr)
    fail(ErrorCode::UnknownGroup, "no group named '" + group + "'");
  if (g->patients.empty())
    fail(ErrorCode::EmptyGroup, "group '" + group + "' has no patients");

  const double max_score = dataset.matrix.max_score();

  // distinct change times of this group only
  std::vector<double> times;
  for (const auto& traj : g->patients)
    for (const auto& change : traj.changes) times.push_back(change.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<double> exits;
  exits.reserve(g->patients.size());
  for (const auto& traj : g->patients) exits.push_back(traj.exit_time());
  std::sort(exits.begin(), exits.end());

  std::vector<double> weight_sum(times.size(), 0.0);
  for (const auto& traj : g->patients) {
    double prev = traj.initial_score;
    for (const auto& change : traj.changes) {
      auto j = static_cast<std::size_t>(
          std::lower_bound(times.begin(), times.end(), change.time) -
          times.begin());
      weight_sum[j] += (change.score - prev) / max_score;
      prev = change.score;
    }
  }

  WeightedCurve curve;
  curve.group = group;
  curve.points.push_back({0.0, 1.0});
  double value = 1.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    double at_risk = static_cast<double>(
        exits.end() - std::lower_bound(exits.begin(), exits.end(), times[j]));
    value *= 1.0 - weight_sum[j] / at_risk;
    curve.points.push_back({times[j], value});
  }
  return curve;
}

LogrankResult weighted_logrank(const TrialDataset& dataset) {
  return normal_result_from_table(event_table(dataset));
}

LogrankResult permutation_logrank(const TrialDataset& dataset, long n_perm,
                                  std::uint64_t seed, int workers,
                                  PermutationMode mode) {
  return permutation_impl(dataset, n_perm, seed, workers, mode, true);
}

LogrankResult permutation_logrank_serial(const TrialDataset& dataset, long n_perm,
                                         std::uint64_t seed, PermutationMode mode) {
  return permutation_impl(dataset, n_perm, seed, 1, mode, false);
}

}  // namespace cwta
