#include "rear/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rear/error.hpp"

namespace rear::report {

using nlohmann::json;
using eventstudy::AnalysisId;

std::string_view to_string(TableFormat f) {
  switch (f) {
    case TableFormat::markdown: return "markdown";
    case TableFormat::csv: return "csv";
    case TableFormat::json: return "json";
  }
  return "markdown";
}

std::optional<TableFormat> parse_format(std::string_view s) {
  if (s == "markdown" || s == "md") return TableFormat::markdown;
  if (s == "csv") return TableFormat::csv;
  if (s == "json") return TableFormat::json;
  return std::nullopt;
}

std::string_view to_string(Tone t) {
  switch (t) {
    case Tone::positive: return "positive";
    case Tone::negative: return "negative";
    case Tone::neutral: return "neutral";
  }
  return "neutral";
}

std::string stars(std::optional<double> p_adjusted) {
  if (!p_adjusted) return "";
  if (*p_adjusted < 0.001) return "***";
  if (*p_adjusted < 0.01) return "**";
  if (*p_adjusted < 0.05) return "*";
  return "";
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  // "-0.0" reads as a sign that the value does not have.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string fixed(std::optional<double> v, int digits) { return v ? fixed(*v, digits) : ""; }

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string general(std::optional<double> v) { return v ? general(*v) : ""; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

struct Grid {
  std::vector<std::string> headers;
  std::vector<bool> numeric;
  std::vector<std::vector<std::string>> rows;

  void add_column(std::string name, bool is_numeric) {
    headers.push_back(std::move(name));
    numeric.push_back(is_numeric);
  }

  std::string markdown() const {
    std::ostringstream out;
    out << '|';
    for (const auto& h : headers) out << ' ' << md_field(h) << " |";
    out << "\n|";
    for (bool n : numeric) out << (n ? "---:|" : "---|");
    out << '\n';
    for (const auto& r : rows) {
      out << '|';
      for (const auto& c : r) out << ' ' << md_field(c) << " |";
      out << '\n';
    }
    return out.str();
  }

  std::string csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < headers.size(); ++i) out << (i ? "," : "") << csv_field(headers[i]);
    out << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
      out << '\n';
    }
    return out.str();
  }

  json to_json() const {
    json rows_json = json::array();
    for (const auto& r : rows) {
      json o = json::object();
      for (std::size_t i = 0; i < headers.size(); ++i) o[headers[i]] = r[i];
      rows_json.push_back(std::move(o));
    }
    return {{"columns", headers}, {"rows", rows_json}};
  }

  std::string render(TableFormat f) const {
    switch (f) {
      case TableFormat::markdown: return markdown();
      case TableFormat::csv: return csv();
      case TableFormat::json: return to_json().dump(2) + "\n";
    }
    return markdown();
  }
};

json legend_json() {
  return {{"stars", {{"***", "adjusted p < 0.001"}, {"**", "adjusted p < 0.01"}, {"*", "adjusted p < 0.05"}}},
          {"p_values", "Benjamini-Hochberg adjusted"},
          {"color", "value / max |value| in the table, in [-1, 1]"},
          {"tones", {{"positive", "green"}, {"negative", "red"}, {"neutral", "none"}}},
          {"missing", "---"}};
}

json cell_to_json(const Cell& c) {
  return {{"value", c.value ? json(*c.value) : json(nullptr)},
          {"p_adjusted", c.p_adjusted ? json(*c.p_adjusted) : json(nullptr)},
          {"text", c.text},
          {"stars", c.stars},
          {"color", c.color},
          {"tone", std::string(to_string(c.tone))},
          {"significant", c.significant}};
}

Cell cell_from_json(const json& j) {
  Cell c;
  if (!j.at("value").is_null()) c.value = j.at("value").get<double>();
  if (!j.at("p_adjusted").is_null()) c.p_adjusted = j.at("p_adjusted").get<double>();
  c.text = j.at("text").get<std::string>();
  c.stars = j.at("stars").get<std::string>();
  c.color = j.at("color").get<double>();
  const auto tone = j.at("tone").get<std::string>();
  c.tone = tone == "positive" ? Tone::positive : tone == "negative" ? Tone::negative : Tone::neutral;
  c.significant = j.at("significant").get<bool>();
  return c;
}

std::string render_table_text(const RenderedTable& t) {
  if (t.format == TableFormat::json) return t.to_json().dump(2) + "\n";
  Grid g;
  g.add_column(t.format == TableFormat::csv ? "date" : "KPE", false);
  g.add_column("description", false);
  g.add_column("category", false);
  if (t.format == TableFormat::markdown) {
    for (const auto& c : t.columns) g.add_column(c, true);
    for (const auto& r : t.rows) {
      std::vector<std::string> row = {r.date, r.description, r.category};
      for (const auto& c : r.cells) row.push_back(c.text);
      g.rows.push_back(std::move(row));
    }
    std::string out = "### " + t.title + "\n\n" + g.markdown();
    out += "\nPercent difference vs baseline. *** p < 0.001, ** p < 0.01, * p < 0.05 (BH-adjusted).\n";
    return out;
  }
  // CSV: one line per cell so every annotation has its own column.
  g.add_column("dataset", false);
  for (const char* name : {"value", "p_adjusted", "text", "stars", "color", "tone", "significant"}) {
    g.add_column(name, true);
  }
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
      const auto& c = r.cells[i];
      g.rows.push_back({r.date, r.description, r.category, t.columns[i], general(c.value), general(c.p_adjusted),
                        c.text, c.stars, general(c.color), std::string(to_string(c.tone)),
                        c.significant ? "true" : "false"});
    }
  }
  return g.csv();
}

}  // namespace

json RenderedTable::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    json cells = json::array();
    for (const auto& c : r.cells) cells.push_back(cell_to_json(c));
    rows_json.push_back({{"date", r.date}, {"description", r.description}, {"category", r.category}, {"cells", cells}});
  }
  return {{"kind", "heat_table"},
          {"title", title},
          {"columns", columns},
          {"rows", rows_json},
          {"legend", legend}};
}

RenderedTable RenderedTable::from_json(const json& j) {
  RenderedTable t;
  t.format = TableFormat::json;
  t.title = j.at("title").get<std::string>();
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& rj : j.at("rows")) {
    TableRow r;
    r.date = rj.at("date").get<std::string>();
    r.description = rj.at("description").get<std::string>();
    r.category = rj.at("category").get<std::string>();
    for (const auto& cj : rj.at("cells")) r.cells.push_back(cell_from_json(cj));
    t.rows.push_back(std::move(r));
  }
  t.legend = j.value("legend", json::object());
  t.text = t.to_json().dump(2) + "\n";
  return t;
}

RenderedTable render_event_table(std::span<const LabeledResult> results, TableFormat format) {
  RenderedTable table;
  table.format = format;
  table.legend = legend_json();

  struct Column {
    std::string label;
    const HypothesisResult* result;
    const eventstudy::WindowResult* window;
  };
  std::vector<Column> columns;
  for (const auto& lr : results) {
    if (lr.result == nullptr || lr.result->analysis != AnalysisId::h3) {
      throw ConfigError("event table needs h3 results");
    }
    const bool several = lr.result->windows.size() > 1;
    for (const auto& w : lr.result->windows) {
      columns.push_back({several ? lr.label + " (k=" + std::to_string(w.k) + ")" : lr.label, lr.result, &w});
    }
  }
  int k_title = columns.empty() ? 0 : columns.front().window->k;
  bool same_k = std::all_of(columns.begin(), columns.end(), [&](const Column& c) { return c.window->k == k_title; });
  table.title = same_k && k_title > 0 ? "Key political events: window (+-" + std::to_string(k_title) + " days) vs baseline"
                                      : "Key political events: window vs baseline";

  // Row order: events by first appearance (input index, then date).
  std::vector<eventstudy::KeyEvent> events;
  auto known = [&](const eventstudy::KeyEvent& e) { return std::find(events.begin(), events.end(), e) != events.end(); };
  for (const auto& c : columns) {
    std::vector<std::pair<std::size_t, eventstudy::KeyEvent>> ordered;
    for (const auto& e : c.window->events) ordered.emplace_back(e.index, e.event);
    for (const auto& s : c.window->skipped) ordered.emplace_back(s.index, s.event);
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [idx, e] : ordered) {
      if (!known(e)) events.push_back(e);
    }
  }

  double max_abs = 0.0;
  for (const auto& c : columns) {
    for (const auto& e : c.window->events) {
      if (e.percent_change) max_abs = std::max(max_abs, std::abs(*e.percent_change));
    }
  }

  for (const auto& c : columns) table.columns.push_back(c.label);
  for (const auto& ev : events) {
    TableRow row;
    row.date = format_date(ev.date);
    row.description = ev.description;
    row.category = std::string(eventstudy::to_string(ev.category));
    for (const auto& c : columns) {
      Cell cell;
      const auto it = std::find_if(c.window->events.begin(), c.window->events.end(),
                                   [&](const eventstudy::EventRecord& r) { return r.event == ev; });
      if (it == c.window->events.end() || !it->percent_change) {
        cell.text = "---";
        if (it != c.window->events.end() && it->test) cell.p_adjusted = it->test->p_adjusted;
        row.cells.push_back(std::move(cell));
        continue;
      }
      const double v = *it->percent_change;
      cell.value = v;
      cell.p_adjusted = it->test ? it->test->p_adjusted : std::nullopt;
      cell.stars = stars(cell.p_adjusted);
      cell.text = fixed(v, 1) + cell.stars;
      cell.color = max_abs > 0.0 ? v / max_abs : 0.0;
      cell.tone = v > 0.0 ? Tone::positive : v < 0.0 ? Tone::negative : Tone::neutral;
      cell.significant = cell.p_adjusted && *cell.p_adjusted <= c.result->config.alpha;
      row.cells.push_back(std::move(cell));
    }
    table.rows.push_back(std::move(row));
  }
  table.text = render_table_text(table);
  return table;
}

RenderedTable render_event_table(const HypothesisResult& h3, TableFormat format, std::string label) {
  const LabeledResult lr{std::move(label), &h3};
  return render_event_table(std::span<const LabeledResult>(&lr, 1), format);
}

std::string render_summary(const HypothesisResult& result, TableFormat format) {
  Grid g;
  if (result.per_event()) {
    for (const char* c : {"k", "date", "description", "category"}) g.add_column(c, false);
    for (const char* c : {"window", "reference", "difference", "percent_change", "d", "p_raw", "p_adjusted"}) {
      g.add_column(c, true);
    }
    g.add_column("stars", false);
    g.add_column("direction", false);
    for (const auto& w : result.windows) {
      for (const auto& e : w.events) {
        const auto& t = *e.test;
        g.rows.push_back({std::to_string(w.k), format_date(e.event.date), e.event.description,
                          std::string(eventstudy::to_string(e.event.category)), general(e.window_value),
                          general(e.reference_value), general(e.difference), fixed(e.percent_change, 1),
                          t.d_degenerate ? "degenerate" : general(t.effect_size_d), general(t.p_raw),
                          general(t.p_adjusted), stars(t.p_adjusted),
                          e.direction ? std::string(eventstudy::to_string(*e.direction)) : ""});
      }
      for (const auto& s : w.skipped) {
        g.rows.push_back({std::to_string(w.k), format_date(s.event.date), s.event.description,
                          std::string(eventstudy::to_string(s.event.category)), "", "", "", "", "", "", "", "",
                          "skipped: " + s.reason});
      }
    }
  } else {
    g.add_column("k", true);
    for (const char* c : {"events", "statistic", "d", "d_ci_low", "d_ci_high", "ci_low", "ci_high", "p_raw",
                          "p_adjusted"}) {
      g.add_column(c, true);
    }
    g.add_column("stars", false);
    g.add_column("percent_change", true);
    const bool h2 = result.analysis == AnalysisId::h2;
    if (h2) {
      g.add_column("p_one_sided", true);
      g.add_column("p_one_sided_adjusted", true);
    }
    for (const auto& w : result.windows) {
      const auto& t = *w.aggregate;
      std::vector<std::string> row = {std::to_string(w.k), std::to_string(w.n_events_used()), general(t.statistic),
                                      t.d_degenerate ? "degenerate" : general(t.effect_size_d), general(w.d_ci_low),
                                      general(w.d_ci_high), general(t.ci_low), general(t.ci_high), general(t.p_raw),
                                      general(t.p_adjusted), stars(t.p_adjusted), fixed(w.percent_change, 2)};
      if (h2) {
        row.push_back(general(w.p_one_sided));
        row.push_back(general(w.p_one_sided_adjusted));
      }
      g.rows.push_back(std::move(row));
    }
  }
  if (format != TableFormat::markdown) return g.render(format);
  std::string out = "### " + std::string(eventstudy::to_string(result.analysis)) + " (seed " +
                    std::to_string(result.seed) + ", BH across " + result.correction_family + ")\n\n";
  return out + g.markdown();
}

json emit_effect_plot_data(const HypothesisResult& result, std::span<const int> ks) {
  if (result.per_event()) throw ConfigError("effect plot needs a per-window analysis (h1, h2 or h4)");
  json points = json::array();
  for (const int k : ks) {
    const auto it = std::find_if(result.windows.begin(), result.windows.end(),
                                 [&](const eventstudy::WindowResult& w) { return w.k == k; });
    if (it == result.windows.end() || !it->aggregate) continue;
    const auto& t = *it->aggregate;
    const bool has_ci = it->d_ci_low.has_value() && it->d_ci_high.has_value();
    points.push_back({{"k", k},
                      {"d", t.effect_size_d ? json(*t.effect_size_d) : json(nullptr)},
                      {"d_degenerate", t.d_degenerate},
                      {"ci_low", has_ci ? json(*it->d_ci_low) : json(nullptr)},
                      {"ci_high", has_ci ? json(*it->d_ci_high) : json(nullptr)},
                      {"ci_missing", !has_ci},
                      {"p_adjusted", t.p_adjusted ? json(*t.p_adjusted) : json(nullptr)},
                      {"significant", t.p_adjusted && *t.p_adjusted <= result.config.alpha}});
  }
  return {{"kind", "effect_plot"},
          {"analysis", std::string(eventstudy::to_string(result.analysis))},
          {"alpha", result.config.alpha},
          {"points", points}};
}

json emit_effect_plot_data(const HypothesisResult& result) {
  std::vector<int> ks;
  for (const auto& w : result.windows) ks.push_back(w.k);
  return emit_effect_plot_data(result, ks);
}

json emit_prepost_scatter(const HypothesisResult& result) {
  if (result.analysis != AnalysisId::h2 && result.analysis != AnalysisId::h5) {
    throw ConfigError("pre/post scatter needs an h2 or h5 result");
  }
  json points = json::array();
  std::size_t skipped = 0;
  for (const auto& w : result.windows) {
    skipped += w.skipped.size();
    for (const auto& e : w.events) {
      const double pre = e.window_value;
      const double post = e.reference_value;
      json p_json = nullptr;
      bool significant = false;
      if (e.test && e.test->p_adjusted) {
        p_json = *e.test->p_adjusted;
        significant = *e.test->p_adjusted <= result.config.alpha;
      }
      points.push_back({{"date", format_date(e.event.date)},
                        {"description", e.event.description},
                        {"category", std::string(eventstudy::to_string(e.event.category))},
                        {"k", w.k},
                        {"pre", pre},
                        {"post", post},
                        {"direction", pre > post ? "anticipatory" : "reactive"},
                        {"p_adjusted", p_json},
                        {"significant", significant}});
    }
  }
  return {{"kind", "prepost_scatter"},
          {"analysis", std::string(eventstudy::to_string(result.analysis))},
          {"x", "post"},
          {"y", "pre"},
          {"diagonal", true},
          {"points", points},
          {"metadata", {{"n_points", points.size()}, {"n_skipped", skipped}}}};
}

json emit_series_chart(const timeseries::DailySeries& series) {
  json dates = json::array();
  json intensity = json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    dates.push_back(format_date(series.date_at(i)));
    intensity.push_back(series.intensity[i] ? json(*series.intensity[i]) : json(nullptr));
  }
  json out = {{"kind", "series"},
              {"labels",
               {{"movement", series.labels.movement},
                {"platform", series.labels.platform},
                {"layer", series.labels.layer},
                {"mode", series.labels.mode}}},
              {"dates", dates},
              {"volume", series.volume},
              {"intensity", intensity}};
  if (series.size() == 0) {
    out["normalized"] = json::array();
    out["threshold"] = nullptr;
    out["normalized_threshold"] = nullptr;
    out["flags"] = json::array();
    return out;
  }
  out["normalized"] = timeseries::minmax_normalize(series).volume;
  if (series.size() < 2) {
    out["threshold"] = nullptr;
    out["normalized_threshold"] = nullptr;
    out["flags"] = std::vector<bool>(series.size(), false);
    return out;
  }
  const auto flags = timeseries::high_activity_flags(series);
  const auto [lo, hi] = std::minmax_element(series.volume.begin(), series.volume.end());
  out["threshold"] = flags.threshold;
  out["normalized_threshold"] = *hi > *lo ? json((flags.threshold - *lo) / (*hi - *lo)) : json(0.0);
  out["flags"] = flags.flags;
  return out;
}

json chart_for(const HypothesisResult& result) {
  switch (result.analysis) {
    case AnalysisId::h1:
    case AnalysisId::h4: return {{"effect_plot", emit_effect_plot_data(result)}};
    case AnalysisId::h2:
      return {{"effect_plot", emit_effect_plot_data(result)}, {"prepost_scatter", emit_prepost_scatter(result)}};
    case AnalysisId::h3: return {{"heat_table", render_event_table(result, TableFormat::json).to_json()}};
    case AnalysisId::h5: return {{"prepost_scatter", emit_prepost_scatter(result)}};
  }
  return json::object();
}

}  // namespace rear::report
