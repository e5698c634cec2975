#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cloudtrace {

using UtcSeconds = std::chrono::sys_seconds;

enum class TimeEncoding {
    unix_seconds,
    unix_milliseconds,
    unix_microseconds,
    apple_absolute_seconds,
    day_ordinal_fraction,
    apache_log_date,
    rfc1123_date,
    us_short_date,
    iso8601,
    log_clock_time,
    windows_filetime,
};

/// Bit flags; an exact timestamp carries none.
enum class Confidence : unsigned {
    exact = 0,
    ambiguous_timezone = 1u << 0,
    ambiguous_format = 1u << 1,
};

constexpr Confidence operator|(Confidence a, Confidence b) {
    return static_cast<Confidence>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr Confidence operator&(Confidence a, Confidence b) {
    return static_cast<Confidence>(static_cast<unsigned>(a) & static_cast<unsigned>(b));
}
constexpr Confidence operator~(Confidence a) {
    return static_cast<Confidence>(~static_cast<unsigned>(a) & 3u);
}

enum class UnixUnit { seconds, milliseconds, microseconds };
enum class DateDialect { apache_log, rfc1123, us_short };

struct NormalizedTimestamp {
    UtcSeconds utc_instant{};
    std::string raw_value;
    TimeEncoding encoding = TimeEncoding::unix_seconds;
    Confidence confidence = Confidence::exact;
    /// Set when an operator-supplied device offset was applied to a wall-clock value.
    std::optional<int> assumed_offset_minutes;

    bool has(Confidence flag) const { return (confidence & flag) != Confidence::exact; }
    bool is_exact() const { return confidence == Confidence::exact; }
    /// "YYYY-MM-DDTHH:MM:SSZ"
    std::string iso() const;

    friend bool operator==(const NormalizedTimestamp&, const NormalizedTimestamp&) = default;
};

std::string_view to_string(TimeEncoding e);
std::string confidence_label(Confidence c);

/// Epoch 1970-01-01 plus value; truncated to whole seconds.
NormalizedTimestamp normalize_unix(std::int64_t value, UnixUnit unit, std::string raw = {});
/// Epoch 2001-01-01 plus floor(value) seconds.
NormalizedTimestamp normalize_apple_absolute(double value, std::string raw = {});
/// Proleptic Gregorian ordinal days (day 1 = 0001-01-01) with the fraction as time of day.
/// Always flagged ambiguous-timezone: the epoch used by the writing application is not documented.
NormalizedTimestamp normalize_day_ordinal(double value, std::string raw = {});
/// 100 ns ticks since 1601-01-01; nullopt unless the result lands in [1990, 2100).
std::optional<NormalizedTimestamp> normalize_filetime(std::uint64_t ticks);

/// Throws ParseError naming the dialect when the text does not match.
NormalizedTimestamp parse_date_text(std::string_view text, DateDialect dialect);
/// "YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|±HH:MM]"; without a zone the result is ambiguous-timezone.
NormalizedTimestamp parse_iso8601(std::string_view text);

/// Wall-clock time taken from a log whose header states the UTC offset.
NormalizedTimestamp make_log_clock_time(std::chrono::year_month_day date, std::chrono::seconds time_of_day,
                                        int offset_minutes, std::string raw);

/// Parses "UTC", "UTC+9", "UTC+09:00", "+0900", "-05:00" into minutes east of UTC.
std::optional<int> parse_utc_offset(std::string_view text);

/// Resolves an ambiguous-timezone wall-clock value using an assumed device offset.
/// Day-ordinal values are left alone; their ambiguity is the epoch, not the zone.
void apply_assumed_offset(NormalizedTimestamp& ts, int offset_minutes);

std::string format_iso(UtcSeconds t);
bool in_plausible_range(UtcSeconds t);

}  // namespace cloudtrace
