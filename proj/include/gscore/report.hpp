#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "gscore/categories.hpp"
#include "gscore/metrics.hpp"
#include "gscore/sim.hpp"

namespace gscore {

enum class RenderFormat { csv, markdown };

inline RenderFormat parse_render_format(std::string_view s) {
  if (s == "csv") return RenderFormat::csv;
  if (s == "md" || s == "markdown") return RenderFormat::markdown;
  throw Error("unknown output format '" + std::string(s) + "' (expected csv or md)");
}

struct DenominatorRow {
  Category category = Category::points;
  double between_var = 0.0;  // sigma^2
  double tau_var = 0.0;      // tau^2
  double z_denominator = 0.0;
  double g_denominator = 0.0;
  double ratio = 1.0;  // z_denominator / g_denominator
};

struct DenominatorReport {
  double kappa = 1.0;
  std::string pool_mode;
  std::vector<DenominatorRow> rows;
};

inline DenominatorRow denominator_row(Category c, double between_var, double tau_var,
                                      double kappa_value) {
  DenominatorRow row;
  row.category = c;
  row.between_var = between_var;
  row.tau_var = tau_var;
  row.z_denominator = std::sqrt(between_var);
  row.g_denominator = std::sqrt(between_var + kappa_value * tau_var);
  row.ratio = row.g_denominator > 0.0 ? row.z_denominator / row.g_denominator : 1.0;
  return row;
}

inline DenominatorReport denominator_table(const LeagueAggregates& agg, double kappa_value,
                                           std::string pool_mode = {}) {
  DenominatorReport report;
  report.kappa = kappa_value;
  report.pool_mode = std::move(pool_mode);
  for (Category c : kAllCategories) {
    const auto& a = agg[c];
    report.rows.push_back(denominator_row(c, a.between_sd * a.between_sd, a.tau * a.tau, kappa_value));
  }
  return report;
}

struct ExperimentRow {
  int seat = 0;
  MetricKind metric = MetricKind::g;
  MetricKind field = MetricKind::z;
  ScoringFormat format = ScoringFormat::each_category;
  int n_seasons = 0;
  int wins = 0;

  double win_rate() const { return n_seasons > 0 ? static_cast<double>(wins) / n_seasons : 0.0; }
  double std_error() const { return binomial_std_error(win_rate(), n_seasons); }
};

struct ExperimentSummary {
  int n_seasons = 0;
  int wins = 0;
  double win_rate = 0.0;   // mean of per-seat rates
  double std_error = 0.0;  // binomial error over all seasons
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;

  ExperimentSummary aggregate() const {
    ExperimentSummary s;
    if (rows.empty()) return s;
    double rate_sum = 0.0;
    for (const auto& r : rows) {
      s.n_seasons += r.n_seasons;
      s.wins += r.wins;
      rate_sum += r.win_rate();
    }
    s.win_rate = rate_sum / static_cast<double>(rows.size());
    s.std_error = binomial_std_error(static_cast<double>(s.wins) / s.n_seasons, s.n_seasons);
    return s;
  }
};

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::string percent(double v) { return fixed(100.0 * v, 2); }

inline std::string join_row(const std::vector<std::string>& cells, RenderFormat format) {
  std::string out;
  if (format == RenderFormat::markdown) out += "| ";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += format == RenderFormat::csv ? "," : " | ";
    out += cells[i];
  }
  if (format == RenderFormat::markdown) out += " |";
  out += '\n';
  return out;
}

inline std::string render_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows,
                                RenderFormat format) {
  std::string out = join_row(header, format);
  if (format == RenderFormat::markdown) {
    out += join_row(std::vector<std::string>(header.size(), "---"), format);
  }
  for (const auto& r : rows) out += join_row(r, format);
  return out;
}

}  // namespace detail

inline std::string render(const DenominatorReport& report, RenderFormat format) {
  const std::vector<std::string> header{"category", "sigma2",         "tau2",
                                        "z_denominator", "g_denominator", "g_over_z_pct"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    rows.push_back({std::string(short_name(r.category)), detail::fixed(r.between_var, 4),
                    detail::fixed(r.tau_var, 4), detail::fixed(r.z_denominator, 4),
                    detail::fixed(r.g_denominator, 4), detail::percent(r.ratio)});
  }
  return detail::render_table(header, rows, format);
}

// One row per seat followed by an aggregate row; no rows gives a header only.
inline std::string render(const ExperimentReport& report, RenderFormat format) {
  const std::vector<std::string> header{"seat",      "metric", "field",         "format",
                                        "n_seasons", "wins",   "win_rate_pct", "std_error_pct"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    rows.push_back({std::to_string(r.seat), std::string(to_string(r.metric)),
                    std::string(to_string(r.field)), std::string(to_string(r.format)),
                    std::to_string(r.n_seasons), std::to_string(r.wins),
                    detail::percent(r.win_rate()), detail::percent(r.std_error())});
  }
  if (!report.rows.empty()) {
    const auto s = report.aggregate();
    const auto& first = report.rows.front();
    rows.push_back({"aggregate", std::string(to_string(first.metric)),
                    std::string(to_string(first.field)), std::string(to_string(first.format)),
                    std::to_string(s.n_seasons), std::to_string(s.wins), detail::percent(s.win_rate),
                    detail::percent(s.std_error)});
  }
  return detail::render_table(header, rows, format);
}

// Reads the CSV written by render(ExperimentReport, csv); aggregate rows
// are recomputed, not read.
inline ExperimentReport parse_experiment_csv(std::istream& in) {
  ExperimentReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    if (line_no == 1) {
      if (!trimmed.starts_with("seat,")) throw ParseError(line_no, "expected experiment header");
      continue;
    }
    const auto f = detail::split_csv(trimmed);
    if (f.size() != 8) throw ParseError(line_no, "expected 8 columns");
    if (f[0] == "aggregate") continue;
    try {
      ExperimentRow r;
      r.seat = std::stoi(std::string(f[0]));
      r.metric = parse_metric(f[1]);
      r.field = parse_metric(f[2]);
      r.format = parse_format(f[3]);
      r.n_seasons = std::stoi(std::string(f[4]));
      r.wins = std::stoi(std::string(f[5]));
      report.rows.push_back(r);
    } catch (const std::logic_error& e) {
      throw ParseError(line_no, e.what());
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return report;
}

}  // namespace gscore
