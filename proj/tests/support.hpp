#pragma once

#include <string>
#include <vector>

#include "rear/corpus.hpp"
#include "rear/eventstudy.hpp"
#include "rear/timeseries.hpp"

namespace rear::testing {

inline Date day(int y, unsigned m, unsigned d) { return Date{std::chrono::year{y} / m / d}; }

inline corpus::Document doc(std::string id, std::string title, std::vector<std::string> keywords = {},
                            Date when = day(2024, 9, 1), corpus::Platform platform = corpus::Platform::news) {
  corpus::Document d;
  d.id = std::move(id);
  d.title = std::move(title);
  d.keywords = corpus::normalize_keywords(std::move(keywords));
  d.published_at = Timestamp{when};
  d.platform = platform;
  return d;
}

inline timeseries::DailySeries series_of(std::vector<double> volume, Date start = day(2024, 9, 1)) {
  timeseries::DailySeries s;
  s.start_date = start;
  s.end_date = start + std::chrono::days{static_cast<long>(volume.size()) - 1};
  s.intensity.assign(volume.size(), std::nullopt);
  s.volume = std::move(volume);
  return s;
}

inline eventstudy::KeyEvent event_at(const timeseries::DailySeries& s, std::size_t offset,
                                     eventstudy::EventCategory c = eventstudy::EventCategory::elections) {
  return {s.date_at(offset), "event at " + std::to_string(offset), c};
}

}  // namespace rear::testing
