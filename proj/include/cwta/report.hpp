#ifndef CWTA_REPORT_HPP
#define CWTA_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "cwta/ingest.hpp"
#include "cwta/power.hpp"
#include "cwta/stats.hpp"

namespace cwta {

inline constexpr const char* kToolVersion = "0.1.0";

// Paper-style p formatting: 4 decimals plus an NS / significant suffix.
std::string format_p_value(double p, double alpha = 0.05);
std::string format_fixed(double value, int decimals);

struct CurvePlotSpec {
  std::vector<WeightedCurve> series;
  std::string title;
  std::string x_label = "Weeks";
  std::string y_label = "Weighted Health Status";
  std::optional<std::string> annotation;  // e.g. "p = 0.0140 (significant)"
};

// Deterministic standalone SVG with step-style polylines, one per group.
std::string render_step_svg(const CurvePlotSpec& spec);

// Horizontal bar chart (scenario power summaries) with an optional
// reference line.
struct BarPlotSpec {
  std::vector<std::string> labels;
  std::vector<double> values;
  std::string title;
  std::string x_label = "Power";
  std::optional<double> reference = 0.8;
};

std::string render_bar_svg(const BarPlotSpec& spec);

// Power-vs-sample-size line chart, one series per endpoint.
struct PowerPlotSeries {
  std::string label;
  std::vector<std::pair<int, double>> points;  // (ss, power)
};

struct PowerPlotSpec {
  std::vector<PowerPlotSeries> series;
  std::string title;
  std::optional<double> reference = 0.8;
};

std::string render_power_svg(const PowerPlotSpec& spec);

// Serialization helpers. All numeric fields use fixed precision (p-values 4
// decimals, power 3) so outputs are byte-stable across reruns and workers.
std::string dataset_to_csv(const TrialDataset& dataset);
std::string logrank_to_json(const LogrankResult& result,
                            const TrialDataset& dataset, double alpha);
std::string power_grid_to_csv(const PowerGrid& grid);
std::string power_grid_to_json(const PowerGrid& grid);
std::string comparisons_to_csv(const std::vector<CohortComparison>& comparisons);
std::string comparisons_to_json(const std::vector<CohortComparison>& comparisons,
                                double alpha);

// Reproducibility manifest written next to every subcommand's outputs.
struct RunManifest {
  std::string subcommand;
  std::string config_json;  // fully resolved flags as a JSON object text
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> input_digests;  // path, fnv64 hex
  std::string timestamp;  // ISO 8601 UTC; excluded from reproducibility checks
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex_of_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace cwta

#endif  // CWTA_REPORT_HPP
