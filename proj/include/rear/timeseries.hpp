#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rear/corpus.hpp"
#include "rear/date.hpp"

namespace rear::timeseries {

struct SeriesLabels {
  std::string movement;
  std::string platform;
  int layer = -1;
  std::string mode;
};

struct DateRange {
  Date start;
  Date end;  // inclusive
};

// Day-indexed volume and mean intensity for one dataset. Volumes are stored
// as doubles so the normalized display copy shares the type.
struct DailySeries {
  Date start_date;
  Date end_date;
  std::vector<double> volume;
  std::vector<std::optional<double>> intensity;
  SeriesLabels labels;

  std::size_t size() const { return volume.size(); }
  Date date_at(std::size_t i) const { return start_date + std::chrono::days{static_cast<long>(i)}; }
  // Offset of `d` from start_date; may be negative or past the end.
  long offset_of(Date d) const { return days_between(start_date, d); }
  bool has_intensity() const;

  nlohmann::json to_json() const;
  static DailySeries from_json(const nlohmann::json& j);
};

// Builds an empty (zero-filled) series. Throws ConfigError for an inverted range.
DailySeries make_series(DateRange range);

// Counts documents per UTC day and averages emotion intensity over the
// emotion-bearing ones. Documents outside the range are ignored.
DailySeries aggregate_daily(std::span<const corpus::Document> docs, DateRange range);

// (v - min) / (max - min) on the volume channel; a constant series maps to 0.
DailySeries minmax_normalize(const DailySeries& series);

struct ActivityFlags {
  double threshold = 0.0;  // mean + 2 * sample sd
  std::vector<bool> flags;
};

// Throws DataError for fewer than two days.
ActivityFlags high_activity_flags(const DailySeries& series);

// date,volume,intensity,flag
std::string series_csv(const DailySeries& series, const ActivityFlags& flags);

}  // namespace rear::timeseries
