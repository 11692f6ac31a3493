#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rear/error.hpp"
#include "rear/eventstudy.hpp"

namespace rear::eventstudy {

using nlohmann::json;

std::string_view to_string(EventCategory c) {
  switch (c) {
    case EventCategory::elections: return "elections";
    case EventCategory::foreign_policy: return "foreign_policy";
    case EventCategory::domestic_policy: return "domestic_policy";
  }
  return "elections";
}

std::optional<EventCategory> parse_category(std::string_view s) {
  if (s == "elections") return EventCategory::elections;
  if (s == "foreign_policy") return EventCategory::foreign_policy;
  if (s == "domestic_policy") return EventCategory::domestic_policy;
  return std::nullopt;
}

std::string_view to_string(AnalysisId id) {
  static constexpr std::string_view names[] = {"h1", "h2", "h3", "h4", "h5"};
  return names[static_cast<int>(id)];
}

std::optional<AnalysisId> parse_analysis(std::string_view s) {
  if (s == "h1") return AnalysisId::h1;
  if (s == "h2") return AnalysisId::h2;
  if (s == "h3") return AnalysisId::h3;
  if (s == "h4") return AnalysisId::h4;
  if (s == "h5") return AnalysisId::h5;
  return std::nullopt;
}

std::string_view to_string(Direction d) { return d == Direction::anticipatory ? "anticipatory" : "reactive"; }

namespace {

KeyEvent make_event(std::string_view date, std::string description, std::string_view category,
                    std::size_t row) {
  const auto d = parse_date(date);
  if (!d) throw DataError("event " + std::to_string(row) + ": invalid date '" + std::string(date) + "'");
  const auto c = parse_category(category);
  if (!c) throw DataError("event " + std::to_string(row) + ": invalid category '" + std::string(category) + "'");
  return KeyEvent{*d, std::move(description), *c};
}

// Splits RFC 4180 CSV text into rows of fields.
std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c = 0;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw DataError("events CSV has an unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<KeyEvent> parse_events_csv(std::istream& in) {
  auto rows = read_csv(in);
  std::erase_if(rows, [](const auto& r) { return r.size() == 1 && r[0].empty(); });
  if (rows.empty()) throw DataError("events file is empty");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("events CSV lacks column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = column("date");
  const std::size_t desc_col = column("description");
  const std::size_t cat_col = column("category");
  std::vector<KeyEvent> events;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) throw DataError("events CSV row " + std::to_string(r) + " has wrong field count");
    events.push_back(make_event(row[date_col], row[desc_col], row[cat_col], r));
  }
  return events;
}

std::vector<KeyEvent> parse_events_json(const json& j) {
  if (!j.is_array()) throw DataError("events JSON must be an array");
  std::vector<KeyEvent> events;
  std::size_t row = 0;
  for (const auto& e : j) {
    ++row;
    if (!e.is_object() || !e.contains("date") || !e.contains("category") || !e["date"].is_string() ||
        !e["category"].is_string()) {
      throw DataError("event " + std::to_string(row) + ": needs string fields date and category");
    }
    events.push_back(make_event(e["date"].get<std::string>(), e.value("description", std::string{}),
                                e["category"].get<std::string>(), row));
  }
  return events;
}

json events_to_json(std::span<const KeyEvent> events) {
  json out = json::array();
  for (const auto& e : events) {
    out.push_back({{"date", format_date(e.date)},
                   {"description", e.description},
                   {"category", std::string(to_string(e.category))}});
  }
  return out;
}

std::vector<KeyEvent> load_events(const std::filesystem::path& path) {
  std::filesystem::path actual = path;
  if (!std::filesystem::exists(actual) && !path.has_extension()) {
    for (const char* ext : {".csv", ".json"}) {
      auto candidate = path;
      candidate += ext;
      if (std::filesystem::exists(candidate)) {
        actual = candidate;
        break;
      }
    }
  }
  std::ifstream in(actual);
  if (!in) throw IoError("cannot read events file: " + path.string());
  if (actual.extension() == ".json") {
    try {
      return parse_events_json(json::parse(in));
    } catch (const json::exception&) {
      throw DataError("events file is not valid JSON: " + actual.string());
    }
  }
  return parse_events_csv(in);
}

WindowConfig WindowConfig::defaults(AnalysisId id) {
  WindowConfig c;
  switch (id) {
    case AnalysisId::h1:
      c.ks = {1, 3, 5, 7, 10};
      break;
    case AnalysisId::h2:
      c.ks = {7};
      c.exclude_event_day = true;
      break;
    case AnalysisId::h3:
      c.ks = {7};
      c.n_permutations = 1000;
      break;
    case AnalysisId::h4:
      c.ks = {1, 3, 5, 7, 10};
      c.bootstrap_iters = 2000;
      break;
    case AnalysisId::h5:
      c.ks = {7};
      c.exclude_event_day = true;
      break;
  }
  return c;
}

void WindowConfig::validate(AnalysisId id) const {
  if (ks.empty()) throw ConfigError("k: at least one window size is required");
  std::set<int> seen;
  for (int k : ks) {
    if (k < 1 || k > 60) throw ConfigError("k: window sizes must lie in 1..60, got " + std::to_string(k));
    if (!seen.insert(k).second) throw ConfigError("k: duplicate window size " + std::to_string(k));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha: must lie in (0, 1)");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw ConfigError("ci_level: must lie in (0, 1)");
  if (n_permutations < 1) throw ConfigError("permutations: must be at least 1");
  if (bootstrap_iters < 100) throw ConfigError("bootstrap: must be at least 100");
  if (buffer_days < 0) throw ConfigError("buffer_days: must be non-negative");
  if (id == AnalysisId::h2) {
    const int max_k = *std::max_element(ks.begin(), ks.end());
    if (reference_from > reference_to) throw ConfigError("reference: window offsets are inverted");
    if (reference_to >= -max_k) {
      throw ConfigError("reference: window must end before the pre-event window starts (day " +
                        std::to_string(-max_k) + ")");
    }
  }
}

json WindowConfig::to_json() const {
  return {{"k", ks},
          {"exclude_event_day", exclude_event_day},
          {"reference_offsets", {reference_from, reference_to}},
          {"buffer_days", buffer_days},
          {"permutations", n_permutations},
          {"bootstrap", bootstrap_iters},
          {"alpha", alpha},
          {"ci_level", ci_level},
          {"pvalue_rule", pvalue_rule == stats::PValueRule::raw_proportion ? "raw_proportion" : "add_one"}};
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

json test_to_json(const stats::TestResult& t) {
  return {{"statistic", t.statistic},
          {"effect_size_d", opt(t.effect_size_d)},
          {"d_degenerate", t.d_degenerate},
          {"p_raw", t.p_raw},
          {"p_adjusted", opt(t.p_adjusted)},
          {"ci_low", opt(t.ci_low)},
          {"ci_high", opt(t.ci_high)},
          {"n_a", t.n_a},
          {"n_b", t.n_b},
          {"tail", std::string(stats::to_string(t.tail))}};
}

stats::TestResult test_from_json(const json& j) {
  stats::TestResult t;
  t.statistic = j.at("statistic").get<double>();
  t.effect_size_d = get_opt<double>(j, "effect_size_d");
  t.d_degenerate = j.value("d_degenerate", false);
  t.p_raw = j.at("p_raw").get<double>();
  t.p_adjusted = get_opt<double>(j, "p_adjusted");
  t.ci_low = get_opt<double>(j, "ci_low");
  t.ci_high = get_opt<double>(j, "ci_high");
  t.n_a = j.at("n_a").get<std::size_t>();
  t.n_b = j.at("n_b").get<std::size_t>();
  const auto tail = j.value("tail", std::string("two_sided"));
  t.tail = tail == "greater" ? stats::Tail::greater : tail == "less" ? stats::Tail::less : stats::Tail::two_sided;
  return t;
}

json event_to_json(const KeyEvent& e) {
  return {{"date", format_date(e.date)}, {"description", e.description}, {"category", std::string(to_string(e.category))}};
}

KeyEvent event_from_json(const json& j) {
  return make_event(j.at("date").get<std::string>(), j.value("description", std::string{}),
                    j.at("category").get<std::string>(), 0);
}

json record_to_json(const EventRecord& r) {
  json j = {{"index", r.index},
            {"event", event_to_json(r.event)},
            {"window_value", r.window_value},
            {"reference_value", r.reference_value},
            {"difference", r.difference},
            {"percent_change", opt(r.percent_change)},
            {"test", r.test ? test_to_json(*r.test) : json(nullptr)},
            {"direction", r.direction ? json(std::string(to_string(*r.direction))) : json(nullptr)},
            {"control_start", r.control_start ? json(format_date(*r.control_start)) : json(nullptr)},
            {"control_relaxed", r.control_relaxed},
            {"pre_mean", opt(r.pre_mean)},
            {"post_mean", opt(r.post_mean)},
            {"reference_mean", opt(r.reference_mean)}};
  return j;
}

EventRecord record_from_json(const json& j) {
  EventRecord r;
  r.index = j.at("index").get<std::size_t>();
  r.event = event_from_json(j.at("event"));
  r.window_value = j.at("window_value").get<double>();
  r.reference_value = j.at("reference_value").get<double>();
  r.difference = j.at("difference").get<double>();
  r.percent_change = get_opt<double>(j, "percent_change");
  if (const auto it = j.find("test"); it != j.end() && !it->is_null()) r.test = test_from_json(*it);
  if (auto dir = get_opt<std::string>(j, "direction")) {
    r.direction = *dir == "anticipatory" ? Direction::anticipatory : Direction::reactive;
  }
  if (auto cs = get_opt<std::string>(j, "control_start")) r.control_start = parse_date(*cs);
  r.control_relaxed = j.value("control_relaxed", false);
  r.pre_mean = get_opt<double>(j, "pre_mean");
  r.post_mean = get_opt<double>(j, "post_mean");
  r.reference_mean = get_opt<double>(j, "reference_mean");
  return r;
}

}  // namespace

json HypothesisResult::to_json() const {
  json windows_json = json::array();
  for (const auto& w : windows) {
    json events_json = json::array();
    for (const auto& e : w.events) events_json.push_back(record_to_json(e));
    json skipped_json = json::array();
    for (const auto& s : w.skipped) {
      skipped_json.push_back({{"index", s.index}, {"event", event_to_json(s.event)}, {"reason", s.reason}});
    }
    windows_json.push_back({{"k", w.k},
                            {"aggregate", w.aggregate ? test_to_json(*w.aggregate) : json(nullptr)},
                            {"p_one_sided", opt(w.p_one_sided)},
                            {"p_one_sided_adjusted", opt(w.p_one_sided_adjusted)},
                            {"d_ci_low", opt(w.d_ci_low)},
                            {"d_ci_high", opt(w.d_ci_high)},
                            {"percent_change", opt(w.percent_change)},
                            {"method", w.method},
                            {"n_events_used", w.n_events_used()},
                            {"events", events_json},
                            {"skipped", skipped_json},
                            {"warnings", w.warnings}});
  }
  return {{"analysis", std::string(to_string(analysis))},
          {"seed", seed},
          {"config", config.to_json()},
          {"correction_family", correction_family},
          {"n_events_total", n_events_total},
          {"windows", windows_json}};
}

HypothesisResult HypothesisResult::from_json(const json& j) {
  HypothesisResult r;
  const auto id = parse_analysis(j.at("analysis").get<std::string>());
  if (!id) throw DataError("result has an unknown analysis id");
  r.analysis = *id;
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto& c = j.at("config");
  r.config.ks = c.at("k").get<std::vector<int>>();
  r.config.exclude_event_day = c.value("exclude_event_day", false);
  const auto ref = c.value("reference_offsets", std::vector<int>{-14, -8});
  if (ref.size() == 2) {
    r.config.reference_from = ref[0];
    r.config.reference_to = ref[1];
  }
  r.config.buffer_days = c.value("buffer_days", 14);
  r.config.n_permutations = c.value("permutations", std::size_t{10000});
  r.config.bootstrap_iters = c.value("bootstrap", std::size_t{1000});
  r.config.alpha = c.value("alpha", 0.05);
  r.config.ci_level = c.value("ci_level", 0.95);
  r.config.pvalue_rule =
      c.value("pvalue_rule", std::string("raw_proportion")) == "add_one" ? stats::PValueRule::add_one
                                                                         : stats::PValueRule::raw_proportion;
  r.correction_family = j.value("correction_family", std::string{});
  r.n_events_total = j.value("n_events_total", std::size_t{0});
  for (const auto& wj : j.at("windows")) {
    WindowResult w;
    w.k = wj.at("k").get<int>();
    if (const auto it = wj.find("aggregate"); it != wj.end() && !it->is_null()) w.aggregate = test_from_json(*it);
    w.p_one_sided = get_opt<double>(wj, "p_one_sided");
    w.p_one_sided_adjusted = get_opt<double>(wj, "p_one_sided_adjusted");
    w.d_ci_low = get_opt<double>(wj, "d_ci_low");
    w.d_ci_high = get_opt<double>(wj, "d_ci_high");
    w.percent_change = get_opt<double>(wj, "percent_change");
    w.method = wj.value("method", std::string{});
    for (const auto& e : wj.at("events")) w.events.push_back(record_from_json(e));
    for (const auto& s : wj.at("skipped")) {
      w.skipped.push_back({s.at("index").get<std::size_t>(), event_from_json(s.at("event")),
                           s.at("reason").get<std::string>()});
    }
    w.warnings = wj.value("warnings", std::vector<std::string>{});
    r.windows.push_back(std::move(w));
  }
  return r;
}

}  // namespace rear::eventstudy
