#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rear/eventstudy.hpp"
#include "rear/timeseries.hpp"

namespace rear::report {

using eventstudy::HypothesisResult;

enum class TableFormat { markdown, csv, json };

std::string_view to_string(TableFormat f);
std::optional<TableFormat> parse_format(std::string_view s);

// "***" below 0.001, "**" below 0.01, "*" below 0.05, else "".
// Absent p (uncorrected) gives "".
std::string stars(std::optional<double> p_adjusted);

enum class Tone { positive, negative, neutral };
std::string_view to_string(Tone t);

struct Cell {
  std::optional<double> value;        // absent: event skipped for this column
  std::optional<double> p_adjusted;
  std::string text;                   // "54.7***", "-85.8***", "---"
  std::string stars;
  double color = 0.0;                 // value / max |value| over the table
  Tone tone = Tone::neutral;
  bool significant = false;           // adjusted p <= alpha

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct TableRow {
  std::string date;
  std::string description;
  std::string category;
  std::vector<Cell> cells;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

struct RenderedTable {
  TableFormat format = TableFormat::markdown;
  std::string title;
  std::vector<std::string> columns;  // one per dataset (x window size)
  std::vector<TableRow> rows;
  nlohmann::json legend;
  std::string text;                  // rendered in `format`

  nlohmann::json to_json() const;    // structured content, independent of format
  static RenderedTable from_json(const nlohmann::json& j);
};

struct LabeledResult {
  std::string label;  // column heading, e.g. "MeToo news"
  const HypothesisResult* result = nullptr;
};

// Event x dataset table of percent differences. Rows follow the union of
// events in input order; one column per dataset and window size.
// Throws ConfigError unless every result is an h3 result.
RenderedTable render_event_table(std::span<const LabeledResult> results, TableFormat format);
RenderedTable render_event_table(const HypothesisResult& h3, TableFormat format, std::string label = "value");

// Plain numeric summary of any analysis: one row per k (h1, h2, h4) or per
// event (h3, h5).
std::string render_summary(const HypothesisResult& result, TableFormat format);

// {kind, analysis, alpha, points: [{k, d, ci_low, ci_high, significant,
// ci_missing, p_adjusted}]}. Only ks present in the result are emitted.
// Throws ConfigError for per-event analyses.
nlohmann::json emit_effect_plot_data(const HypothesisResult& result, std::span<const int> ks);
nlohmann::json emit_effect_plot_data(const HypothesisResult& result);

// {kind, analysis, diagonal, points: [{date, description, category, k, pre,
// post, direction, significant}], metadata: {n_points, n_skipped}}.
// Throws ConfigError unless the result is h2 or h5.
nlohmann::json emit_prepost_scatter(const HypothesisResult& result);

// {kind, dates, volume, normalized, intensity, threshold, flags}.
nlohmann::json emit_series_chart(const timeseries::DailySeries& series);

// Chart payload matching an analysis: effect plot (h1, h4), heat table (h3),
// effect plot plus scatter (h2), scatter (h5).
nlohmann::json chart_for(const HypothesisResult& result);

}  // namespace rear::report
