#include "rear/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rear/app.hpp"
#include "rear/report.hpp"
#include "rear/service.hpp"

namespace rear::app {

using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Raw option values; converted into a RunConfig once parsing is done.
struct Options {
  std::vector<std::string> corpus;
  std::string events;
  std::string out = "out";
  std::string movement;
  std::vector<std::string> seed_keywords;
  std::string platform = "all";
  int layer = 5;
  std::string mode = "cumulative";
  double percentile = 99.0;
  std::vector<int> ks;
  std::optional<double> alpha;
  std::optional<std::size_t> permutations;
  std::optional<std::size_t> bootstrap;
  std::optional<int> buffer_days;
  bool add_one = false;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  std::string start;
  std::string end;
};

void add_corpus_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--corpus", o.corpus, "Canonical corpus file(s) (JSON lines)")->required();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void add_dataset_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--movement", o.movement, "Movement name (default metoo)");
  cmd->add_option("--seed-keyword", o.seed_keywords, "Explicit-mention keyword (repeatable)");
  cmd->add_option("--platform", o.platform, "news, reddit or all")
      ->check(CLI::IsMember({"news", "reddit", "all"}))
      ->capture_default_str();
  cmd->add_option("--layer", o.layer, "Layer index 0..8")->check(CLI::Range(0, 8))->capture_default_str();
  cmd->add_option("--mode", o.mode, "Layer selection: cumulative or exclusive")
      ->check(CLI::IsMember({"cumulative", "exclusive"}))
      ->capture_default_str();
  cmd->add_option("--percentile", o.percentile, "Co-occurrence percentile for the vocabulary")->capture_default_str();
  cmd->add_option("--start", o.start, "First day of the series (YYYY-MM-DD)");
  cmd->add_option("--end", o.end, "Last day of the series (YYYY-MM-DD)");
}

void add_analysis_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--events", o.events, "Events file (.csv or .json; extension optional)")->required();
  cmd->add_option("--k", o.ks, "Window half-widths, e.g. --k 1,3,7")->delimiter(',');
  cmd->add_option("--alpha", o.alpha, "FDR level");
  cmd->add_option("--permutations", o.permutations, "Permutation count");
  cmd->add_option("--bootstrap", o.bootstrap, "Bootstrap draws");
  cmd->add_option("--buffer-days", o.buffer_days, "Baseline buffer around events (h4)");
  cmd->add_flag("--add-one", o.add_one, "Use (b+1)/(N+1) permutation p-values");
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--workers", o.workers, "Worker threads (results do not depend on it)")->capture_default_str();
}

RunConfig to_run_config(const Options& o) {
  RunConfig cfg;
  if (!o.movement.empty()) {
    cfg.movement.name = o.movement;
    cfg.movement.seed_keywords = o.seed_keywords.empty() ? std::vector<std::string>{"#" + o.movement}
                                                         : o.seed_keywords;
  } else if (!o.seed_keywords.empty()) {
    cfg.movement.seed_keywords = o.seed_keywords;
  }
  if (o.platform != "all") cfg.platform = corpus::parse_platform(o.platform);  // checked by the option validator
  cfg.layer = o.layer;
  cfg.mode = filtering::parse_selection_mode(o.mode).value_or(filtering::SelectionMode::cumulative);
  cfg.percentile = o.percentile;
  cfg.ks = o.ks;
  cfg.alpha = o.alpha;
  cfg.permutations = o.permutations;
  cfg.bootstrap = o.bootstrap;
  cfg.buffer_days = o.buffer_days;
  if (o.add_one) cfg.pvalue_rule = stats::PValueRule::add_one;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  if (!o.start.empty()) cfg.start = required_date(o.start);
  if (!o.end.empty()) cfg.end = required_date(o.end);
  cfg.events = o.events;
  for (const auto& c : o.corpus) cfg.corpus.emplace_back(c);
  cfg.output_dir = o.out;
  cfg.validate();
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
  if (!f) throw IoError("write failed: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  const auto j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw DataError(path.string() + ": not valid JSON");
  return j;
}

void log_config(std::ostream& err, const std::string& command, const json& config) {
  err << "rear " << command << ": effective config " << config.dump() << '\n';
}

int run_ingest(const std::vector<std::string>& inputs, const std::string& adapter_name, const std::string& store_path,
               const std::string& report_path, std::ostream& out, std::ostream& err) {
  const auto adapter = corpus::parse_adapter(adapter_name);
  log_config(err, "ingest", {{"inputs", inputs}, {"adapter", adapter_name}, {"store", store_path}});
  auto store = corpus::DocumentStore::open(store_path);
  json reports = json::array();
  for (const auto& input : inputs) {
    auto report = corpus::ingest_documents(input, adapter, store);
    auto j = report.to_json();
    j["file"] = input;
    reports.push_back(std::move(j));
  }
  const json summary = {{"store", store_path}, {"documents", store.size()}, {"files", reports}};
  if (!report_path.empty()) write_file(report_path, summary.dump(2) + "\n");
  out << summary.dump(2) << '\n';
  return 0;
}

int run_filter(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  log_config(err, "filter", cfg.to_json());
  const auto store = load_corpus(cfg.corpus);
  const auto ds = build_dataset(store.documents(), cfg);
  if (!ds.has_explicit_mentions) {
    throw DataError("movement has no explicit-mention documents in " + ds.id);
  }
  const auto dir = cfg.output_dir;
  write_file(dir / "layers.csv", filtering::layers_csv(ds.assignment));
  const json summary = {{"dataset", ds.id},
                        {"documents", ds.platform_documents},
                        {"vocabulary", ds.vocabulary.terms},
                        {"percentile", ds.vocabulary.percentile},
                        {"percentile_threshold", ds.vocabulary.percentile_threshold},
                        {"layers", filtering::layer_summary_json(ds.assignment)},
                        {"selected", {{"layer", cfg.layer},
                                      {"mode", std::string(filtering::to_string(cfg.mode))},
                                      {"documents", ds.selected.size()}}}};
  write_file(dir / "layers.json", summary.dump(2) + "\n");
  const auto md = "### Layers for " + ds.id + "\n\n" + filtering::layer_summary_markdown(ds.assignment);
  write_file(dir / "layers.md", md);
  std::string ids;
  for (const auto& d : ds.selected) ids += d.id + "\n";
  write_file(dir / "selected_ids.txt", ids);
  out << md;
  return 0;
}

int run_series(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  log_config(err, "series", cfg.to_json());
  const auto store = load_corpus(cfg.corpus);
  const auto ds = build_dataset(store.documents(), cfg);
  const auto series = dataset_series(ds, cfg, effective_range(store.documents(), cfg));
  const auto chart = report::emit_series_chart(series);
  timeseries::ActivityFlags flags;
  flags.flags.assign(series.size(), false);
  if (series.size() >= 2) flags = timeseries::high_activity_flags(series);
  write_file(cfg.output_dir / "series.csv", timeseries::series_csv(series, flags));
  write_file(cfg.output_dir / "series.json", chart.dump(2) + "\n");
  std::size_t flagged = std::count(flags.flags.begin(), flags.flags.end(), true);
  out << ds.id << ": " << series.size() << " days, " << ds.selected.size() << " documents, " << flagged
      << " days above mean + 2 sd\n";
  return 0;
}

int run_analyze(const std::string& analysis, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto id = eventstudy::parse_analysis(analysis);
  if (!id) throw ConfigError("unknown analysis: " + analysis);
  auto logged = cfg.to_json();
  logged["analysis"] = analysis;
  logged["window"] = cfg.window_config(*id).to_json();
  log_config(err, "analyze", logged);
  const auto store = load_corpus(cfg.corpus);
  const auto events = eventstudy::load_events(cfg.events);
  const auto run = run_analysis(store.documents(), events, cfg, *id);

  std::string md = report::render_summary(run.result, report::TableFormat::markdown);
  if (*id == eventstudy::AnalysisId::h3) {
    md += "\n" + report::render_event_table(run.result, report::TableFormat::markdown, cfg.dataset_id()).text;
  }
  const auto dir = cfg.output_dir;
  write_file(dir / (analysis + ".json"), run.document.dump(2) + "\n");
  write_file(dir / (analysis + "_chart.json"), run.chart.dump(2) + "\n");
  write_file(dir / (analysis + ".md"), md);
  for (const auto& w : run.result.windows) {
    for (const auto& warning : w.warnings) err << "rear analyze: warning (k=" << w.k << "): " << warning << '\n';
  }
  out << md;
  return 0;
}

int run_report(const std::vector<std::string>& results, std::vector<std::string> labels, const std::string& format_name,
               const std::string& output, std::ostream& out, std::ostream& err) {
  const auto format = report::parse_format(format_name);
  if (!format) throw ConfigError("unknown format: " + format_name);
  log_config(err, "report", {{"results", results}, {"labels", labels}, {"format", format_name}, {"output", output}});
  std::vector<eventstudy::HypothesisResult> parsed;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto doc = read_json_file(results[i]);
    const auto& body = doc.contains("result") ? doc.at("result") : doc;
    try {
      parsed.push_back(eventstudy::HypothesisResult::from_json(body));
    } catch (const json::exception& e) {
      throw DataError(results[i] + ": not a result document (" + e.what() + ")");
    }
    if (labels.size() <= i) {
      labels.push_back(doc.contains("dataset") ? doc["dataset"].value("id", results[i]) : results[i]);
    }
  }
  std::string text;
  const bool all_h3 = std::all_of(parsed.begin(), parsed.end(), [](const auto& r) {
    return r.analysis == eventstudy::AnalysisId::h3;
  });
  if (all_h3) {
    std::vector<report::LabeledResult> labeled;
    for (std::size_t i = 0; i < parsed.size(); ++i) labeled.push_back({labels[i], &parsed[i]});
    text = report::render_event_table(labeled, *format).text;
  } else {
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      if (*format == report::TableFormat::markdown) text += "## " + labels[i] + "\n\n";
      text += report::render_summary(parsed[i], *format);
      if (i + 1 < parsed.size()) text += "\n";
    }
  }
  if (output.empty()) {
    out << text;
  } else {
    write_file(output, text);
  }
  return 0;
}

int run_serve(const RunConfig& cfg, const std::string& host, int port, std::uint64_t budget, std::ostream& err) {
  log_config(err, "serve", cfg.to_json());
  auto store = load_corpus(cfg.corpus);
  auto events = eventstudy::load_events(cfg.events);
  Service service(std::move(store), std::move(events), cfg, {budget, cfg.workers});
  service.listen(host, port, [&](int bound) {
    err << "rear serve: listening on http://" << host << ":" << bound << '\n';
    err.flush();
  });
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retrospective event-study engine for social-movement discourse", "rear"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; flags override it")->envname("REAR_CONFIG");
  app.set_version_flag("--version", std::string(kEngineVersion));

  Options o;

  std::vector<std::string> ingest_inputs;
  std::string adapter = "canonical";
  std::string store_path;
  std::string ingest_report;
  auto* ingest = app.add_subcommand("ingest", "Validate corpus exports and append them to a canonical store");
  ingest->add_option("inputs", ingest_inputs, "Export files, one JSON record per line")->required();
  ingest->add_option("--adapter", adapter, "canonical, reddit_export or news_export")->capture_default_str();
  ingest->add_option("--store", store_path, "Canonical store file to append to")->required();
  ingest->add_option("--report", ingest_report, "Also write the ingest report here");

  auto* filter = app.add_subcommand("filter", "Assign layers and write the layer summary");
  add_corpus_options(filter, o);
  add_dataset_options(filter, o);

  auto* series = app.add_subcommand("series", "Write the daily series with mean + 2 sd flags");
  add_corpus_options(series, o);
  add_dataset_options(series, o);

  std::string analysis;
  auto* analyze = app.add_subcommand("analyze", "Run one hypothesis analysis");
  analyze->add_option("analysis", analysis, "h1, h2, h3, h4 or h5")
      ->required()
      ->check(CLI::IsMember({"h1", "h2", "h3", "h4", "h5"}));
  add_corpus_options(analyze, o);
  add_dataset_options(analyze, o);
  add_analysis_options(analyze, o);

  std::vector<std::string> result_files;
  std::vector<std::string> labels;
  std::string format = "markdown";
  std::string output;
  auto* report_cmd = app.add_subcommand("report", "Render result files as tables");
  report_cmd->add_option("--result", result_files, "Result JSON written by analyze (repeatable)")->required();
  report_cmd->add_option("--label", labels, "Column label per result (default: dataset id)");
  report_cmd->add_option("--format", format, "markdown, csv or json")
      ->check(CLI::IsMember({"markdown", "md", "csv", "json"}))
      ->capture_default_str();
  report_cmd->add_option("--output", output, "Output file (default: stdout)");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t budget = ServiceOptions{}.permutation_budget;
  auto* serve = app.add_subcommand("serve", "Serve the JSON API");
  add_corpus_options(serve, o);
  add_dataset_options(serve, o);
  add_analysis_options(serve, o);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--budget", budget, "Largest projected resampling work per request")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ingest) return run_ingest(ingest_inputs, adapter, store_path, ingest_report, out, err);
    if (*report_cmd) return run_report(result_files, labels, format, output, out, err);
    const RunConfig cfg = to_run_config(o);
    if (*filter) return run_filter(cfg, out, err);
    if (*series) return run_series(cfg, out, err);
    if (*analyze) return run_analyze(analysis, cfg, out, err);
    if (*serve) return run_serve(cfg, host, port, budget, err);
  } catch (const ConfigError& e) {
    err << "rear: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "rear: error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "rear: error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace rear::app
