#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace rear {

// Calendar days are UTC; timestamps have second resolution.
using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

// Parses YYYY-MM-DD. Returns nullopt for malformed or impossible dates.
std::optional<Date> parse_date(std::string_view text);

// Parses ISO-8601: YYYY-MM-DD[(T| )HH:MM[:SS[.fff]]][Z|+HH:MM|-HH:MM|+HHMM].
// A missing zone designator is read as UTC. Fractional seconds truncate.
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);  // YYYY-MM-DDTHH:MM:SSZ

inline Date day_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

inline long days_between(Date from, Date to) { return (to - from).count(); }

// 0 = Sunday ... 6 = Saturday.
inline unsigned weekday_index(Date d) { return std::chrono::weekday{d}.c_encoding(); }

}  // namespace rear
