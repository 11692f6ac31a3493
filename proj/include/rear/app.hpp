#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rear/corpus.hpp"
#include "rear/error.hpp"
#include "rear/eventstudy.hpp"
#include "rear/filtering.hpp"
#include "rear/timeseries.hpp"

namespace rear::app {

inline constexpr std::string_view kEngineVersion = "0.1.0";

struct FieldError {
  std::string field;
  std::string message;
};

// Invalid request or config, with one entry per offending field.
class RequestError : public ConfigError {
 public:
  explicit RequestError(std::vector<FieldError> fields);
  RequestError(std::string field, std::string message);
  const std::vector<FieldError>& fields() const { return fields_; }

 private:
  std::vector<FieldError> fields_;
};

// Projected work above the service's permutation budget.
class BudgetError : public DataError {
 public:
  using DataError::DataError;
};

struct RunConfig {
  corpus::MovementSpec movement{"metoo", {"#metoo", "me too movement"}};
  std::optional<corpus::Platform> platform;  // empty: both platforms
  int layer = 5;
  filtering::SelectionMode mode = filtering::SelectionMode::cumulative;
  double percentile = 99.0;

  // Unset values fall back to the analysis defaults.
  std::vector<int> ks;
  std::optional<double> alpha;
  std::optional<std::size_t> permutations;
  std::optional<std::size_t> bootstrap;
  std::optional<int> buffer_days;
  std::optional<stats::PValueRule> pvalue_rule;

  std::uint64_t seed = 42;
  std::size_t workers = 1;
  std::optional<Date> start;  // default: span of the whole corpus
  std::optional<Date> end;

  std::filesystem::path events;
  std::vector<std::filesystem::path> corpus;
  std::filesystem::path output_dir = "out";

  // Throws RequestError listing every invalid field.
  void validate() const;

  // Analysis defaults overlaid with the set fields; validated.
  eventstudy::WindowConfig window_config(eventstudy::AnalysisId id) const;

  std::string platform_name() const;  // "news", "reddit" or "all"
  std::string dataset_id() const;     // "<movement>-<platform>"

  nlohmann::json to_json() const;

  // Overlays the fields present in `body` onto `base`. Unknown fields and
  // bad values are collected into one RequestError.
  static RunConfig from_json(const nlohmann::json& body, RunConfig base);
};

// parse_date that throws ConfigError.
Date required_date(std::string_view text);

// Sets the platform from "<movement>-<news|reddit|all>". Throws
// NotFoundError for another movement or platform.
void apply_dataset_id(RunConfig& cfg, std::string_view id);

// Movement-specific documents of one platform subset.
struct Dataset {
  std::string id;
  std::size_t platform_documents = 0;
  bool has_explicit_mentions = false;
  filtering::HighSalienceVocabulary vocabulary;
  filtering::LayerAssignment assignment;
  std::vector<corpus::Document> selected;
};

// Filters `docs` by platform, vocabulary and layer. A platform subset with no
// explicit mentions yields an empty selection rather than an error.
Dataset build_dataset(std::span<const corpus::Document> docs, const RunConfig& cfg);

// The configured range, else the publication span of `docs`.
timeseries::DateRange effective_range(std::span<const corpus::Document> docs, const RunConfig& cfg);

timeseries::DailySeries dataset_series(const Dataset& dataset, const RunConfig& cfg, timeseries::DateRange range);

struct AnalysisRun {
  eventstudy::HypothesisResult result;
  nlohmann::json document;  // what `analyze` writes and the service returns
  nlohmann::json chart;
};

// Filter, aggregate and analyze. The single code path behind both the CLI
// and the service, so their result documents agree byte for byte.
AnalysisRun run_analysis(std::span<const corpus::Document> docs, std::span<const eventstudy::KeyEvent> events,
                         const RunConfig& cfg, eventstudy::AnalysisId id);

// Permutation or bootstrap draws times tests, as a rough cost.
std::uint64_t projected_work(const eventstudy::WindowConfig& cfg, eventstudy::AnalysisId id, std::size_t n_events);

// Per-platform exclusive and cumulative layer counts for the movement.
nlohmann::json datasets_json(std::span<const corpus::Document> docs, const RunConfig& cfg);

// Loads and merges canonical corpus files; later duplicates are dropped.
corpus::DocumentStore load_corpus(std::span<const std::filesystem::path> paths);

}  // namespace rear::app
