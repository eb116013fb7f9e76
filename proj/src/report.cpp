#include "cwta/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cwta/errors.hpp"

namespace cwta {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 24, kTop = 44, kBottom = 52;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

double round_to(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Scale {
  double domain_min, domain_max, range_min, range_max;
  double operator()(double v) const {
    if (domain_max == domain_min) return range_min;
    return range_min +
           (v - domain_min) / (domain_max - domain_min) * (range_max - range_min);
  }
};

// evenly spaced axis ticks, endpoints included
std::vector<double> ticks(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(lo + (hi - lo) * i / n);
  return out;
}

void open_svg(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  if (!title.empty())
    svg << "<text x=\"" << kWidth / 2
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\" font-weight=\"bold\">"
        << xml_escape(title) << "</text>\n";
}

void draw_axes(std::ostringstream& svg, const Scale& x, const Scale& y,
               const std::string& x_label, const std::string& y_label,
               const char* x_tick_format, const char* y_tick_format) {
  const double x0 = kLeft, x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom, y1 = kTop;
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\""
      << y0 << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\""
      << y1 << "\" stroke=\"black\"/>\n";
  for (double t : ticks(x.domain_min, x.domain_max, 5)) {
    double px = x(t);
    svg << "<line x1=\"" << fmt("%.2f", px) << "\" y1=\"" << y0 << "\" x2=\""
        << fmt("%.2f", px) << "\" y2=\"" << y0 + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt("%.2f", px) << "\" y=\"" << y0 + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(x_tick_format, t) << "</text>\n";
  }
  for (double t : ticks(y.domain_min, y.domain_max, 5)) {
    double py = y(t);
    svg << "<line x1=\"" << x0 - 5 << "\" y1=\"" << fmt("%.2f", py) << "\" x2=\""
        << x0 << "\" y2=\"" << fmt("%.2f", py) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x0 - 8 << "\" y=\"" << fmt("%.2f", py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(y_tick_format, t) << "</text>\n";
  }
  svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << (y0 + y1) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_p_value(double p, double alpha) {
  return format_fixed(p, 4) + (p < alpha ? " (significant)" : " (NS)");
}

std::string render_step_svg(const CurvePlotSpec& spec) {
  if (spec.series.empty())
    fail(ErrorCode::EmptySeries, "step plot needs at least one series");

  double t_max = 1, v_max = 1;
  for (const auto& s : spec.series) {
    for (const auto& pt : s.points) {
      t_max = std::max(t_max, pt.time);
      v_max = std::max(v_max, pt.value);
    }
  }
  Scale x{0, t_max, kLeft, kWidth - kRight};
  Scale y{0, std::ceil(v_max * 1.05 * 10) / 10, kHeight - kBottom, kTop};

  std::ostringstream svg;
  open_svg(svg, spec.title);
  draw_axes(svg, x, y, spec.x_label, spec.y_label, "%.0f", "%.1f");

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& pts = spec.series[si].points;
    if (pts.empty()) fail(ErrorCode::EmptySeries, "series without points");
    std::ostringstream d;
    d << "M " << fmt("%.2f", x(pts[0].time)) << " " << fmt("%.2f", y(pts[0].value));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      // horizontal then vertical: the previous value holds until the change
      d << " H " << fmt("%.2f", x(pts[i].time));
      d << " V " << fmt("%.2f", y(pts[i].value));
    }
    d << " H " << fmt("%.2f", x(t_max));
    svg << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\""
        << kPalette[si % 8] << "\" stroke-width=\"1.8\"/>\n";
  }

  // legend, top right of the plot area
  double lx = kWidth - kRight - 170, ly = kTop + 14;
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24
        << "\" y2=\"" << ly << "\" stroke=\"" << kPalette[si % 8]
        << "\" stroke-width=\"1.8\"/>\n";
    svg << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(spec.series[si].group) << "</text>\n";
    ly += 18;
  }

  if (spec.annotation)
    svg << "<text x=\"" << kLeft + 12 << "\" y=\"" << kHeight - kBottom - 12
        << "\" font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(*spec.annotation) << "</text>\n";

  svg << "</svg>\n";
  return svg.str();
}

std::string render_bar_svg(const BarPlotSpec& spec) {
  if (spec.labels.empty() || spec.labels.size() != spec.values.size())
    fail(ErrorCode::EmptySeries, "bar plot needs matching labels and values");

  Scale x{0, 1, kLeft, kWidth - kRight};
  const double area_top = kTop, area_bottom = kHeight - kBottom;
  const double slot = (area_bottom - area_top) / spec.labels.size();

  std::ostringstream svg;
  open_svg(svg, spec.title);
  Scale y{0, 1, area_bottom, area_top};  // only for the axis frame
  draw_axes(svg, x, y, spec.x_label, "", "%.1f", "%.1f");

  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    double top = area_top + slot * i + slot * 0.18;
    double h = slot * 0.64;
    svg << "<rect x=\"" << kLeft << "\" y=\"" << fmt("%.2f", top) << "\" width=\""
        << fmt("%.2f", x(spec.values[i]) - kLeft) << "\" height=\""
        << fmt("%.2f", h) << "\" fill=\"" << kPalette[0] << "\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt("%.2f", top + h / 2 + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(spec.labels[i]) << "</text>\n";
    svg << "<text x=\"" << fmt("%.2f", x(spec.values[i]) + 6) << "\" y=\""
        << fmt("%.2f", top + h / 2 + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_fixed(spec.values[i], 3) << "</text>\n";
  }

  if (spec.reference) {
    double px = x(*spec.reference);
    svg << "<line x1=\"" << fmt("%.2f", px) << "\" y1=\"" << area_top << "\" x2=\""
        << fmt("%.2f", px) << "\" y2=\"" << area_bottom
        << "\" stroke=\"#444444\" stroke-dasharray=\"5 4\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_power_svg(const PowerPlotSpec& spec) {
  if (spec.series.empty()) fail(ErrorCode::EmptySeries, "power plot needs series");
  double ss_min = 1e18, ss_max = -1e18;
  for (const auto& s : spec.series) {
    for (const auto& [ss, p] : s.points) {
      ss_min = std::min(ss_min, static_cast<double>(ss));
      ss_max = std::max(ss_max, static_cast<double>(ss));
    }
  }
  if (ss_min > ss_max) fail(ErrorCode::EmptySeries, "power plot series are empty");
  Scale x{ss_min, ss_max, kLeft, kWidth - kRight};
  Scale y{0, 1, kHeight - kBottom, kTop};

  std::ostringstream svg;
  open_svg(svg, spec.title);
  draw_axes(svg, x, y, "Sample size", "Power", "%.0f", "%.1f");

  if (spec.reference) {
    double py = y(*spec.reference);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << fmt("%.2f", py) << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << fmt("%.2f", py)
        << "\" stroke=\"#444444\" stroke-dasharray=\"5 4\"/>\n";
  }

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& pts = spec.series[si].points;
    std::ostringstream d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d << (i == 0 ? "M " : " L ") << fmt("%.2f", x(pts[i].first)) << " "
        << fmt("%.2f", y(pts[i].second));
    }
    svg << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\""
        << kPalette[si % 8] << "\" stroke-width=\"1.8\"/>\n";
    for (const auto& [ss, p] : pts)
      svg << "<circle cx=\"" << fmt("%.2f", x(ss)) << "\" cy=\""
          << fmt("%.2f", y(p)) << "\" r=\"2.5\" fill=\"" << kPalette[si % 8]
          << "\"/>\n";
    svg << "<text x=\"" << kLeft + 12 << "\" y=\"" << kTop + 16 + 16 * si
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << kPalette[si % 8] << "\">" << xml_escape(spec.series[si].label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string dataset_to_csv(const TrialDataset& dataset) {
  std::ostringstream out;
  out << "patient_id,group,time,score,kind\n";
  for (const auto& group : dataset.groups) {
    for (const auto& traj : group.patients) {
      out << traj.id << "," << group.name << ",0," << traj.initial_score
          << ",init\n";
      for (const auto& change : traj.changes)
        out << traj.id << "," << group.name << "," << fmt("%.10g", change.time)
            << "," << change.score << ",change\n";
      out << traj.id << "," << group.name << ","
          << fmt("%.10g", traj.censor_time) << "," << traj.final_score() << ","
          << (traj.absorbed ? "absorbed" : "censored") << "\n";
    }
  }
  return out.str();
}

std::string logrank_to_json(const LogrankResult& result,
                            const TrialDataset& dataset, double alpha) {
  ordered_json j;
  j["groups"] = ordered_json::array();
  for (const auto& g : dataset.groups)
    j["groups"].push_back({{"name", g.name}, {"n", g.patients.size()}});
  j["U"] = round_to(result.U, 6);
  j["V"] = round_to(result.V, 6);
  j["Z"] = round_to(result.Z, 6);
  j["p_value"] = round_to(result.p_two_sided, 4);
  j["p_display"] = format_p_value(result.p_two_sided, alpha);
  j["method"] = result.method == TestMethod::normal ? "normal" : "permutation";
  j["n_permutations"] = result.n_permutations;
  j["no_events"] = result.no_events;
  j["alpha"] = alpha;
  j["significant"] = result.p_two_sided < alpha;
  return j.dump(2) + "\n";
}

std::string power_grid_to_csv(const PowerGrid& grid) {
  std::ostringstream out;
  out << "endpoint,hr_eff,hr_tox,ss,reps,power,se\n";
  for (const auto& p : grid.points) {
    out << (p.endpoint == ScoringEndpoint::rba ? "rba" : "efficacy") << ","
        << format_fixed(p.hr_efficacy, 3) << "," << format_fixed(p.hr_toxicity, 3)
        << "," << p.sample_size << "," << p.replications << ","
        << format_fixed(p.power, 3) << "," << format_fixed(p.std_error, 4) << "\n";
  }
  return out.str();
}

std::string power_grid_to_json(const PowerGrid& grid) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : grid.points) {
    ordered_json j;
    j["endpoint"] = p.endpoint == ScoringEndpoint::rba ? "rba" : "efficacy";
    j["hr_eff"] = round_to(p.hr_efficacy, 3);
    j["hr_tox"] = round_to(p.hr_toxicity, 3);
    j["ss"] = p.sample_size;
    j["reps"] = p.replications;
    j["alpha"] = p.alpha;
    j["power"] = round_to(p.power, 3);
    j["se"] = round_to(p.std_error, 4);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string comparisons_to_csv(const std::vector<CohortComparison>& comparisons) {
  std::ostringstream out;
  out << "cohort,n,direction,p_value,method\n";
  for (const auto& c : comparisons) {
    out << c.cohort << "," << c.n_cohort << "," << direction_name(c.direction)
        << "," << format_fixed(c.result.p_two_sided, 4) << ","
        << (c.result.method == TestMethod::normal ? "normal" : "permutation")
        << "\n";
  }
  return out.str();
}

std::string comparisons_to_json(const std::vector<CohortComparison>& comparisons,
                                double alpha) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : comparisons) {
    ordered_json j;
    j["cohort"] = c.cohort;
    j["n_cohort"] = c.n_cohort;
    j["n_rest"] = c.n_rest;
    j["direction"] = direction_name(c.direction);
    j["U"] = round_to(c.result.U, 6);
    j["Z"] = round_to(c.result.Z, 6);
    j["p_value"] = round_to(c.result.p_two_sided, 4);
    j["p_display"] = format_p_value(c.result.p_two_sided, alpha);
    j["method"] =
        c.result.method == TestMethod::normal ? "normal" : "permutation";
    j["n_permutations"] = c.result.n_permutations;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string manifest_to_json(const RunManifest& manifest) {
  ordered_json j;
  j["tool"] = "cwta";
  j["version"] = kToolVersion;
  j["subcommand"] = manifest.subcommand;
  j["seed"] = manifest.seed;
  j["config"] = ordered_json::parse(manifest.config_json);
  j["inputs"] = ordered_json::array();
  for (const auto& [path, digest] : manifest.input_digests)
    j["inputs"].push_back({{"path", path}, {"fnv1a64", digest}});
  j["timestamp"] = manifest.timestamp;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json_file(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::IoError, "manifest '" + path + "' is not valid JSON: " + e.what());
  }
  RunManifest m;
  try {
    m.subcommand = j.at("subcommand").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_json = j.at("config").dump();
    if (j.contains("timestamp")) m.timestamp = j["timestamp"].get<std::string>();
    if (j.contains("inputs"))
      for (const auto& entry : j["inputs"])
        m.input_digests.emplace_back(entry.at("path").get<std::string>(),
                                     entry.at("fnv1a64").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError,
         "manifest '" + path + "' is missing a required field: " + e.what());
  }
  return m;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex_of_file(const std::string& path) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(read_file(path))));
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace cwta
