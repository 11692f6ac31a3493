#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rear/date.hpp"
#include "rear/random.hpp"
#include "rear/stats.hpp"
#include "rear/timeseries.hpp"

namespace rear::eventstudy {

using timeseries::DailySeries;

enum class EventCategory { elections, foreign_policy, domestic_policy };

std::string_view to_string(EventCategory c);
std::optional<EventCategory> parse_category(std::string_view s);

struct KeyEvent {
  Date date;
  std::string description;
  EventCategory category = EventCategory::elections;

  friend bool operator==(const KeyEvent&, const KeyEvent&) = default;
};

// CSV with header "date,description,category" (RFC 4180 quoting) or a JSON
// array of {date, description, category}. A path without an extension is
// tried with ".csv" and then ".json". Throws IoError / DataError.
std::vector<KeyEvent> load_events(const std::filesystem::path& path);
std::vector<KeyEvent> parse_events_csv(std::istream& in);
std::vector<KeyEvent> parse_events_json(const nlohmann::json& j);
nlohmann::json events_to_json(std::span<const KeyEvent> events);

enum class AnalysisId { h1, h2, h3, h4, h5 };

std::string_view to_string(AnalysisId id);
std::optional<AnalysisId> parse_analysis(std::string_view s);

struct WindowConfig {
  std::vector<int> ks;
  bool exclude_event_day = false;
  int reference_from = -14;  // reference window offsets, inclusive
  int reference_to = -8;
  int buffer_days = 14;
  std::size_t n_permutations = 10000;
  std::size_t bootstrap_iters = 1000;
  double alpha = 0.05;
  double ci_level = 0.95;
  stats::PValueRule pvalue_rule = stats::PValueRule::raw_proportion;
  std::size_t workers = 1;  // parallelism only; never changes results

  // Defaults per analysis: k in {1,3,5,7,10} for h1/h4 and {7} otherwise,
  // 10,000 permutations (1,000 for h3), 1,000 bootstrap draws (2,000 for h4).
  static WindowConfig defaults(AnalysisId id);

  // Throws ConfigError naming the offending field.
  void validate(AnalysisId id) const;

  nlohmann::json to_json() const;  // omits `workers`
};

// Days are offsets into the series the window was built for.
struct EventWindow {
  KeyEvent event;
  std::size_t center = 0;
  std::vector<std::size_t> pre_days;   // [-k, -1]
  std::vector<std::size_t> post_days;  // [+1, +k]
  std::vector<std::size_t> all_days;   // [-k, +k], minus day 0 when excluded

  std::size_t first() const { return all_days.front(); }
  std::size_t last() const { return all_days.back(); }
  std::vector<Date> dates(const DailySeries& series, std::span<const std::size_t> days) const;
};

// nullopt when the +-k span does not fit in the series ("boundary").
std::optional<EventWindow> build_windows(const DailySeries& series, const KeyEvent& event, int k,
                                         bool exclude_event_day);

// Per-day mask of days inside +-k of any event (events may lie outside the
// series; their windows are clipped).
std::vector<bool> occupied_days(const DailySeries& series, std::span<const KeyEvent> events, int k);

struct ControlDraw {
  std::size_t start = 0;            // first day of the control span
  std::vector<std::size_t> days;    // mirrors the window's day layout
  bool relaxed = false;             // weekday constraint dropped
};

// Contiguous span as long as the window, avoiding every occupied day,
// starting on the window's starting weekday when possible. Uniform over the
// eligible starts. nullopt when no span fits even without the weekday rule.
std::optional<ControlDraw> matched_control(const DailySeries& series, const EventWindow& window,
                                           const std::vector<bool>& occupied, stats::Rng& rng);

enum class Direction { anticipatory, reactive };
std::string_view to_string(Direction d);

// Per-event numbers. The two values mean, by analysis:
//   h1: median window volume / median control volume
//   h2: normalized pre mean / normalized post mean
//   h3: window mean volume / baseline mean volume
//   h5: mean pre intensity / mean post intensity
struct EventRecord {
  std::size_t index = 0;  // position in the input event list
  KeyEvent event;
  double window_value = 0.0;
  double reference_value = 0.0;
  double difference = 0.0;
  std::optional<double> percent_change;
  std::optional<stats::TestResult> test;  // h3, h5
  std::optional<Direction> direction;     // h2, h5
  std::optional<Date> control_start;      // h1
  bool control_relaxed = false;
  std::optional<double> pre_mean;         // h2 raw volumes
  std::optional<double> post_mean;
  std::optional<double> reference_mean;
};

struct SkippedEvent {
  std::size_t index = 0;
  KeyEvent event;
  std::string reason;
};

// Results for one window size.
struct WindowResult {
  int k = 0;
  std::optional<stats::TestResult> aggregate;  // h1, h2, h4
  std::optional<double> p_one_sided;           // h2: pre > post
  std::optional<double> p_one_sided_adjusted;
  std::optional<double> d_ci_low;              // bootstrap interval of d
  std::optional<double> d_ci_high;
  std::optional<double> percent_change;
  std::string method;
  std::vector<EventRecord> events;
  std::vector<SkippedEvent> skipped;
  std::vector<std::string> warnings;

  std::size_t n_events_used() const { return events.size(); }
};

struct HypothesisResult {
  AnalysisId analysis = AnalysisId::h1;
  std::uint64_t seed = 0;
  WindowConfig config;
  std::string correction_family;
  std::size_t n_events_total = 0;
  std::vector<WindowResult> windows;

  bool per_event() const { return analysis == AnalysisId::h3 || analysis == AnalysisId::h5; }
  nlohmann::json to_json() const;
  static HypothesisResult from_json(const nlohmann::json& j);
};

// Each analysis throws DataError when its preconditions fail (too few usable
// events, empty baseline, no intensity data, ...).
HypothesisResult run_h1(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const stats::RandomPlan& plan);
HypothesisResult run_h2(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const stats::RandomPlan& plan);
HypothesisResult run_h3(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const stats::RandomPlan& plan);
HypothesisResult run_h4(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const stats::RandomPlan& plan);
HypothesisResult run_h5(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const stats::RandomPlan& plan);

HypothesisResult run_analysis(AnalysisId id, const DailySeries& series, std::span<const KeyEvent> events,
                              const WindowConfig& cfg, const stats::RandomPlan& plan);

}  // namespace rear::eventstudy
