#include "rear/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rear/error.hpp"

namespace rear::timeseries {

bool DailySeries::has_intensity() const {
  return std::any_of(intensity.begin(), intensity.end(), [](const auto& v) { return v.has_value(); });
}

nlohmann::json DailySeries::to_json() const {
  nlohmann::json intens = nlohmann::json::array();
  for (const auto& v : intensity) intens.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return {{"start_date", format_date(start_date)},
          {"end_date", format_date(end_date)},
          {"volume", volume},
          {"intensity", intens},
          {"labels",
           {{"movement", labels.movement}, {"platform", labels.platform}, {"layer", labels.layer},
            {"mode", labels.mode}}}};
}

DailySeries DailySeries::from_json(const nlohmann::json& j) {
  const auto start = parse_date(j.at("start_date").get<std::string>());
  const auto end = parse_date(j.at("end_date").get<std::string>());
  if (!start || !end) throw DataError("series has invalid dates");
  DailySeries s = make_series({*start, *end});
  s.volume = j.at("volume").get<std::vector<double>>();
  const auto& intens = j.at("intensity");
  s.intensity.clear();
  for (const auto& v : intens) s.intensity.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  if (s.volume.size() != s.size() || s.intensity.size() != s.volume.size() ||
      s.volume.size() != static_cast<std::size_t>(days_between(*start, *end) + 1)) {
    throw DataError("series arrays do not match the date span");
  }
  if (const auto it = j.find("labels"); it != j.end()) {
    s.labels.movement = it->value("movement", "");
    s.labels.platform = it->value("platform", "");
    s.labels.layer = it->value("layer", -1);
    s.labels.mode = it->value("mode", "");
  }
  return s;
}

DailySeries make_series(DateRange range) {
  if (range.end < range.start) throw ConfigError("date range is inverted");
  const auto n = static_cast<std::size_t>(days_between(range.start, range.end) + 1);
  DailySeries s;
  s.start_date = range.start;
  s.end_date = range.end;
  s.volume.assign(n, 0.0);
  s.intensity.assign(n, std::nullopt);
  return s;
}

DailySeries aggregate_daily(std::span<const corpus::Document> docs, DateRange range) {
  DailySeries s = make_series(range);
  std::vector<double> intensity_sum(s.size(), 0.0);
  std::vector<std::size_t> intensity_n(s.size(), 0);
  for (const auto& doc : docs) {
    const long off = s.offset_of(day_of(doc.published_at));
    if (off < 0 || off >= static_cast<long>(s.size())) continue;
    const auto i = static_cast<std::size_t>(off);
    s.volume[i] += 1.0;
    if (doc.emotions) {
      intensity_sum[i] += corpus::emotion_intensity(*doc.emotions);
      ++intensity_n[i];
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (intensity_n[i] > 0) s.intensity[i] = intensity_sum[i] / static_cast<double>(intensity_n[i]);
  }
  return s;
}

DailySeries minmax_normalize(const DailySeries& series) {
  if (series.volume.empty()) throw DataError("cannot normalize an empty series");
  DailySeries out = series;
  const auto [lo, hi] = std::minmax_element(series.volume.begin(), series.volume.end());
  const double range = *hi - *lo;
  for (auto& v : out.volume) v = range > 0.0 ? (v - *lo) / range : 0.0;
  return out;
}

ActivityFlags high_activity_flags(const DailySeries& series) {
  const std::size_t n = series.volume.size();
  if (n < 2) throw DataError("high-activity threshold needs at least two days");
  double mean = 0.0;
  for (double v : series.volume) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : series.volume) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  ActivityFlags out;
  out.threshold = mean + 2.0 * sd;
  out.flags.reserve(n);
  for (double v : series.volume) out.flags.push_back(v > out.threshold);
  return out;
}

std::string series_csv(const DailySeries& series, const ActivityFlags& flags) {
  std::ostringstream out;
  out.precision(17);
  out << "date,volume,intensity,flag\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_date(series.date_at(i)) << ',' << series.volume[i] << ',';
    if (series.intensity[i]) out << *series.intensity[i];
    out << ',' << (i < flags.flags.size() && flags.flags[i] ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace rear::timeseries
