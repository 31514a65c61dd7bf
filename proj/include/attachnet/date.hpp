#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attachnet {

/// A header date: the wall-clock reading plus the declared zone, when any.
/// Archives that strip zone information still produce a usable wall time.
struct ParsedDate {
    std::int64_t wall_seconds = 0; // the literal clock reading, as seconds since epoch in UTC
    std::optional<int> zone_offset_minutes; // east of UTC; absent when the header had no zone
    bool valid = false;

    std::int64_t utc_seconds() const {
        return wall_seconds - std::int64_t(zone_offset_minutes.value_or(0)) * 60;
    }
};

/// Tolerant parser for RFC-822 style dates ("Tue, 1 May 2001 10:00:00 -0500
/// (CDT)") and ISO-like forms ("2001-05-01 10:00 -0500"). Returns an invalid
/// ParsedDate when nothing date-like is found.
ParsedDate parse_date(std::string_view text);

/// Candidate UTC timestamps for corpus linking: the plain UTC conversion
/// first, then one candidate per repair offset (hours added to the plain
/// conversion). Candidates are distinct and keep this order.
/// Throws UnparseableDate for an invalid date.
std::vector<std::int64_t> normalize_date_gmt(const ParsedDate& date,
                                             const std::vector<int>& repair_hours);

/// Same with the default repair set: the date's own whole-hour zone
/// difference with UTC, then 2, 3, 4, 10 and 12 hours.
std::vector<std::int64_t> normalize_date_gmt(const ParsedDate& date);

std::vector<int> default_repair_offsets(const ParsedDate& date);

/// Civil-calendar helpers (proleptic Gregorian, no zone database needed).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

/// "2001-05-01T15:00:00Z"
std::string format_utc(std::int64_t utc_seconds);

} // namespace attachnet
