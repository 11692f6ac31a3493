#include <algorithm>
#include <set>

#include "rear/app.hpp"
#include "rear/report.hpp"

namespace rear::app {

using nlohmann::json;
using eventstudy::AnalysisId;

namespace {

std::string join_fields(const std::vector<FieldError>& fields) {
  std::string out = "invalid configuration";
  for (const auto& f : fields) out += "; " + f.field + ": " + f.message;
  return out;
}

std::uint64_t non_negative(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("must be a non-negative integer");
}

}  // namespace

Date required_date(std::string_view text) {
  const auto d = parse_date(text);
  if (!d) throw ConfigError("expected a YYYY-MM-DD date, got \"" + std::string(text) + "\"");
  return *d;
}

RequestError::RequestError(std::vector<FieldError> fields)
    : ConfigError(join_fields(fields)), fields_(std::move(fields)) {}

RequestError::RequestError(std::string field, std::string message)
    : RequestError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

void RunConfig::validate() const {
  std::vector<FieldError> errors;
  try {
    movement.validate();
  } catch (const ConfigError& e) {
    errors.push_back({"movement", e.what()});
  }
  if (layer < 0 || layer > filtering::kMaxLayer) errors.push_back({"layer", "must lie in 0..8"});
  if (!(percentile > 0.0 && percentile <= 100.0)) errors.push_back({"percentile", "must lie in (0, 100]"});
  if (workers < 1 || workers > 256) errors.push_back({"workers", "must lie in 1..256"});
  if (start && end && *start > *end) errors.push_back({"start", "must not be after end"});
  std::set<int> seen;
  for (int k : ks) {
    if (k < 1 || k > 60) errors.push_back({"k", "window sizes must lie in 1..60"});
    if (!seen.insert(k).second) errors.push_back({"k", "duplicate window size " + std::to_string(k)});
  }
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) errors.push_back({"alpha", "must lie in (0, 1)"});
  if (permutations && *permutations < 1) errors.push_back({"permutations", "must be at least 1"});
  if (bootstrap && *bootstrap < 100) errors.push_back({"bootstrap", "must be at least 100"});
  if (buffer_days && *buffer_days < 0) errors.push_back({"buffer_days", "must not be negative"});
  if (!errors.empty()) throw RequestError(std::move(errors));
}

eventstudy::WindowConfig RunConfig::window_config(AnalysisId id) const {
  auto cfg = eventstudy::WindowConfig::defaults(id);
  if (!ks.empty()) cfg.ks = ks;
  if (alpha) cfg.alpha = *alpha;
  if (permutations) cfg.n_permutations = *permutations;
  if (bootstrap) cfg.bootstrap_iters = *bootstrap;
  if (buffer_days) cfg.buffer_days = *buffer_days;
  if (pvalue_rule) cfg.pvalue_rule = *pvalue_rule;
  cfg.workers = workers;
  cfg.validate(id);
  return cfg;
}

std::string RunConfig::platform_name() const {
  return platform ? std::string(corpus::to_string(*platform)) : "all";
}

std::string RunConfig::dataset_id() const { return movement.name + "-" + platform_name(); }

void apply_dataset_id(RunConfig& cfg, std::string_view id) {
  const auto dash = id.rfind('-');
  if (dash == std::string_view::npos || id.substr(0, dash) != cfg.movement.name) {
    throw NotFoundError("unknown dataset: " + std::string(id));
  }
  const auto platform = id.substr(dash + 1);
  if (platform == "all") {
    cfg.platform.reset();
  } else if (auto p = corpus::parse_platform(platform)) {
    cfg.platform = *p;
  } else {
    throw NotFoundError("unknown dataset: " + std::string(id));
  }
}

json RunConfig::to_json() const {
  std::vector<std::string> corpus_paths;
  for (const auto& p : corpus) corpus_paths.push_back(p.string());
  return {{"movement", {{"name", movement.name}, {"seed_keywords", movement.seed_keywords}}},
          {"platform", platform_name()},
          {"layer", layer},
          {"mode", std::string(filtering::to_string(mode))},
          {"percentile", percentile},
          {"k", ks},
          {"alpha", alpha ? json(*alpha) : json(nullptr)},
          {"permutations", permutations ? json(*permutations) : json(nullptr)},
          {"bootstrap", bootstrap ? json(*bootstrap) : json(nullptr)},
          {"buffer_days", buffer_days ? json(*buffer_days) : json(nullptr)},
          {"pvalue_rule", pvalue_rule ? json(*pvalue_rule == stats::PValueRule::add_one ? "add_one" : "raw_proportion")
                                      : json(nullptr)},
          {"seed", seed},
          {"workers", workers},
          {"start", start ? json(format_date(*start)) : json(nullptr)},
          {"end", end ? json(format_date(*end)) : json(nullptr)},
          {"events", events.string()},
          {"corpus", corpus_paths},
          {"output_dir", output_dir.string()}};
}

RunConfig RunConfig::from_json(const json& body, RunConfig base) {
  if (!body.is_object()) throw RequestError("body", "must be a JSON object");
  std::vector<FieldError> errors;
  auto field = [&](const std::string& name, auto&& apply) {
    const auto it = body.find(name);
    if (it == body.end() || it->is_null()) return;
    try {
      apply(*it);
    } catch (const json::exception&) {
      errors.push_back({name, "has the wrong type"});
    } catch (const Error& e) {
      errors.push_back({name, e.what()});
    }
  };
  static const std::set<std::string> known = {"dataset", "platform", "layer",   "mode",        "percentile",
                                              "k",       "alpha",    "permutations", "bootstrap", "buffer_days",
                                              "pvalue_rule", "seed", "start",   "end"};
  for (const auto& [key, value] : body.items()) {
    if (!known.contains(key)) errors.push_back({key, "unknown field"});
  }
  if (const auto it = body.find("dataset"); it != body.end() && it->is_string()) {
    apply_dataset_id(base, it->get<std::string>());
  } else if (it != body.end() && !it->is_null()) {
    errors.push_back({"dataset", "has the wrong type"});
  }
  field("platform", [&](const json& v) {
    const auto s = v.get<std::string>();
    if (s == "all") {
      base.platform.reset();
    } else if (auto p = corpus::parse_platform(s)) {
      base.platform = *p;
    } else {
      throw ConfigError("must be news, reddit or all");
    }
  });
  field("layer", [&](const json& v) { base.layer = v.get<int>(); });
  field("mode", [&](const json& v) {
    const auto m = filtering::parse_selection_mode(v.get<std::string>());
    if (!m) throw ConfigError("must be cumulative or exclusive");
    base.mode = *m;
  });
  field("percentile", [&](const json& v) { base.percentile = v.get<double>(); });
  field("k", [&](const json& v) {
    base.ks = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
  });
  field("alpha", [&](const json& v) { base.alpha = v.get<double>(); });
  field("permutations", [&](const json& v) { base.permutations = non_negative(v); });
  field("bootstrap", [&](const json& v) { base.bootstrap = non_negative(v); });
  field("buffer_days", [&](const json& v) { base.buffer_days = v.get<int>(); });
  field("pvalue_rule", [&](const json& v) {
    const auto s = v.get<std::string>();
    if (s == "raw_proportion") {
      base.pvalue_rule = stats::PValueRule::raw_proportion;
    } else if (s == "add_one") {
      base.pvalue_rule = stats::PValueRule::add_one;
    } else {
      throw ConfigError("must be raw_proportion or add_one");
    }
  });
  field("seed", [&](const json& v) { base.seed = non_negative(v); });
  field("start", [&](const json& v) { base.start = required_date(v.get<std::string>()); });
  field("end", [&](const json& v) { base.end = required_date(v.get<std::string>()); });
  // range checks on the fields that did parse, so one reply lists everything
  try {
    base.validate();
  } catch (const RequestError& e) {
    for (const auto& fe : e.fields()) {
      const bool already = std::any_of(errors.begin(), errors.end(), [&](const FieldError& x) { return x.field == fe.field; });
      if (!already) errors.push_back(fe);
    }
  }
  if (!errors.empty()) throw RequestError(std::move(errors));
  return base;
}

Dataset build_dataset(std::span<const corpus::Document> docs, const RunConfig& cfg) {
  Dataset ds;
  ds.id = cfg.dataset_id();
  std::vector<corpus::Document> subset;
  for (const auto& d : docs) {
    if (!cfg.platform || d.platform == *cfg.platform) subset.push_back(d);
  }
  ds.platform_documents = subset.size();
  ds.has_explicit_mentions = std::any_of(subset.begin(), subset.end(), [&](const corpus::Document& d) {
    return filtering::mentions_movement(d, cfg.movement);
  });
  if (!ds.has_explicit_mentions) return ds;

  const auto stats = filtering::cooccurrence_counts(subset, cfg.movement);
  if (stats.counts.empty()) {
    // No co-occurring terms: only the explicit-mention layer exists.
    for (const auto& d : subset) {
      if (filtering::mentions_movement(d, cfg.movement)) ds.assignment.layer_of[d.id] = 0;
    }
  } else {
    ds.vocabulary = filtering::high_salience_vocabulary(stats, cfg.percentile);
    ds.assignment = filtering::assign_layers(subset, ds.vocabulary, cfg.movement);
  }
  ds.selected = filtering::pick(subset, filtering::select_layer(ds.assignment, cfg.layer, cfg.mode));
  return ds;
}

timeseries::DateRange effective_range(std::span<const corpus::Document> docs, const RunConfig& cfg) {
  if (cfg.start && cfg.end) return {*cfg.start, *cfg.end};
  if (docs.empty()) throw DataError("corpus is empty");
  const auto [lo, hi] = std::minmax_element(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
    return a.published_at < b.published_at;
  });
  const timeseries::DateRange range{cfg.start.value_or(day_of(lo->published_at)),
                                    cfg.end.value_or(day_of(hi->published_at))};
  if (range.start > range.end) throw RequestError("start", "must not be after end");
  return range;
}

timeseries::DailySeries dataset_series(const Dataset& dataset, const RunConfig& cfg, timeseries::DateRange range) {
  auto series = timeseries::aggregate_daily(dataset.selected, range);
  series.labels = {cfg.movement.name, cfg.platform_name(), cfg.layer, std::string(filtering::to_string(cfg.mode))};
  return series;
}

AnalysisRun run_analysis(std::span<const corpus::Document> docs, std::span<const eventstudy::KeyEvent> events,
                         const RunConfig& cfg, AnalysisId id) {
  cfg.validate();
  const auto window_cfg = cfg.window_config(id);
  const auto dataset = build_dataset(docs, cfg);
  const auto range = effective_range(docs, cfg);
  const auto series = dataset_series(dataset, cfg, range);

  AnalysisRun run;
  run.result = eventstudy::run_analysis(id, series, events, window_cfg, stats::RandomPlan(cfg.seed));
  run.document = {{"engine_version", std::string(kEngineVersion)},
                  {"generator", std::string(stats::RandomPlan::kGeneratorVersion)},
                  {"seed", cfg.seed},
                  {"dataset",
                   {{"id", dataset.id},
                    {"movement", cfg.movement.name},
                    {"seed_keywords", cfg.movement.seed_keywords},
                    {"platform", cfg.platform_name()},
                    {"layer", cfg.layer},
                    {"mode", std::string(filtering::to_string(cfg.mode))},
                    {"percentile", cfg.percentile},
                    {"vocabulary", dataset.vocabulary.terms},
                    {"documents", dataset.selected.size()},
                    {"start", format_date(range.start)},
                    {"end", format_date(range.end)}}},
                  {"result", run.result.to_json()}};
  run.chart = report::chart_for(run.result);
  return run;
}

std::uint64_t projected_work(const eventstudy::WindowConfig& cfg, AnalysisId id, std::size_t n_events) {
  const auto ks = static_cast<std::uint64_t>(cfg.ks.size());
  const auto events = static_cast<std::uint64_t>(std::max<std::size_t>(n_events, 1));
  switch (id) {
    case AnalysisId::h1:
    case AnalysisId::h2:
    case AnalysisId::h3: return cfg.n_permutations * ks * events;
    case AnalysisId::h4: return cfg.bootstrap_iters * ks;
    case AnalysisId::h5: return ks * events;
  }
  return 0;
}

json datasets_json(std::span<const corpus::Document> docs, const RunConfig& cfg) {
  json out = json::array();
  for (const std::optional<corpus::Platform> p :
       {std::optional(corpus::Platform::news), std::optional(corpus::Platform::reddit),
        std::optional<corpus::Platform>()}) {
    RunConfig c = cfg;
    c.platform = p;
    const auto ds = build_dataset(docs, c);
    out.push_back({{"id", ds.id},
                   {"movement", c.movement.name},
                   {"platform", c.platform_name()},
                   {"documents", ds.platform_documents},
                   {"vocabulary", ds.vocabulary.terms},
                   {"percentile_threshold", ds.vocabulary.percentile_threshold},
                   {"layers", filtering::layer_summary_json(ds.assignment)},
                   {"selected", {{"layer", c.layer},
                                 {"mode", std::string(filtering::to_string(c.mode))},
                                 {"documents", ds.selected.size()}}}});
  }
  return out;
}

corpus::DocumentStore load_corpus(std::span<const std::filesystem::path> paths) {
  if (paths.empty()) throw RequestError("corpus", "at least one corpus file is required");
  corpus::DocumentStore store;
  for (const auto& p : paths) {
    const auto report = corpus::ingest_documents(p, corpus::Adapter::canonical, store);
    const auto invalid = report.rejected - report.duplicate_ids;
    if (invalid > 0) {
      throw DataError(p.string() + ": " + std::to_string(invalid) + " invalid records (first: " +
                      report.rejection_reasons.front().second + "); clean it with `rear ingest`");
    }
  }
  return store;
}

}  // namespace rear::app
