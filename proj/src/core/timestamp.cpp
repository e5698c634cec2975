#include <cloudtrace/error.hpp>
#include <cloudtrace/text.hpp>
#include <cloudtrace/timestamp.hpp>

#include <array>
#include <cmath>
#include <cstdio>

namespace cloudtrace {

using namespace std::chrono;

namespace {

// 0001-01-01T00:00:00Z and 9999-12-31T23:59:59Z
constexpr std::int64_t kMinSeconds = -62135596800;
constexpr std::int64_t kMaxSeconds = 253402300799;
constexpr std::int64_t kAppleEpoch = 978307200;
constexpr std::int64_t kPlausibleBegin = 0;            // 1970-01-01
constexpr std::int64_t kPlausibleEnd = 4102444800;     // 2100-01-01

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

NormalizedTimestamp make(std::int64_t seconds, std::string raw, TimeEncoding enc, Confidence conf) {
    if (seconds < kMinSeconds || seconds > kMaxSeconds) {
        seconds = seconds < kMinSeconds ? kMinSeconds : kMaxSeconds;
        conf = conf | Confidence::ambiguous_format;
    }
    NormalizedTimestamp ts;
    ts.utc_instant = UtcSeconds{std::chrono::seconds{seconds}};
    if (!in_plausible_range(ts.utc_instant)) conf = conf | Confidence::ambiguous_format;
    ts.raw_value = std::move(raw);
    ts.encoding = enc;
    ts.confidence = conf;
    return ts;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    auto q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Cursor over date text; every reader returns false on mismatch.
struct Cursor {
    std::string_view s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    bool lit(char c) {
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool digits(int min_len, int max_len, int& out) {
        int n = 0, v = 0;
        while (pos < s.size() && n < max_len && s[pos] >= '0' && s[pos] <= '9') {
            v = v * 10 + (s[pos] - '0');
            ++pos;
            ++n;
        }
        out = v;
        return n >= min_len;
    }
    bool spaces() {
        auto start = pos;
        while (pos < s.size() && s[pos] == ' ') ++pos;
        return pos > start;
    }
    bool month_name(int& month) {
        if (pos + 3 > s.size()) return false;
        auto word = s.substr(pos, 3);
        for (std::size_t i = 0; i < kMonths.size(); ++i) {
            if (text::iequals(word, kMonths[i])) {
                month = static_cast<int>(i) + 1;
                pos += 3;
                return true;
            }
        }
        return false;
    }
    // ±HHMM or ±HH:MM
    bool numeric_offset(int& minutes) {
        if (pos >= s.size() || (s[pos] != '+' && s[pos] != '-')) return false;
        int sign = s[pos] == '-' ? -1 : 1;
        ++pos;
        int hh = 0, mm = 0;
        if (!digits(2, 2, hh)) return false;
        lit(':');
        if (!digits(2, 2, mm)) return false;
        if (hh > 14 || mm > 59) return false;
        minutes = sign * (hh * 60 + mm);
        return true;
    }
};

bool valid_clock(int h, int m, int s) { return h >= 0 && h <= 23 && m >= 0 && m <= 59 && s >= 0 && s <= 59; }

std::optional<std::int64_t> civil_seconds(int y, int mo, int d, int h, int mi, int s) {
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || !valid_clock(h, mi, s)) return std::nullopt;
    auto days_since = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days_since) * 86400 + h * 3600 + mi * 60 + s;
}

[[noreturn]] void fail(std::string_view dialect, std::string_view text) {
    throw ParseError("text does not match the " + std::string(dialect) + " date grammar: '" + std::string(text) + "'");
}

NormalizedTimestamp parse_apache(std::string_view text) {
    Cursor c{text};
    int d, mo, y, h, mi, s, off;
    if (!(c.digits(1, 2, d) && c.lit('/') && c.month_name(mo) && c.lit('/') && c.digits(4, 4, y) && c.lit(':') &&
          c.digits(2, 2, h) && c.lit(':') && c.digits(2, 2, mi) && c.lit(':') && c.digits(2, 2, s) && c.spaces() &&
          c.numeric_offset(off) && c.done()))
        fail("apache-log", text);
    auto secs = civil_seconds(y, mo, d, h, mi, s);
    if (!secs) fail("apache-log", text);
    return make(*secs - off * 60, std::string(text), TimeEncoding::apache_log_date, Confidence::exact);
}

NormalizedTimestamp parse_rfc1123(std::string_view text) {
    Cursor c{text};
    // optional weekday
    if (c.s.size() > 4 && c.s[3] == ',') {
        c.pos = 4;
        c.spaces();
    }
    int d, mo, y, h, mi, s, off = 0;
    if (!(c.digits(1, 2, d) && c.spaces() && c.month_name(mo) && c.spaces() && c.digits(4, 4, y) && c.spaces() &&
          c.digits(2, 2, h) && c.lit(':') && c.digits(2, 2, mi) && c.lit(':') && c.digits(2, 2, s) && c.spaces()))
        fail("rfc1123", text);
    auto zone = c.s.substr(c.pos);
    if (zone == "GMT" || zone == "UTC" || zone == "UT" || zone == "Z") {
        c.pos = c.s.size();
    } else if (!c.numeric_offset(off)) {
        fail("rfc1123", text);
    }
    if (!c.done()) fail("rfc1123", text);
    auto secs = civil_seconds(y, mo, d, h, mi, s);
    if (!secs) fail("rfc1123", text);
    return make(*secs - off * 60, std::string(text), TimeEncoding::rfc1123_date, Confidence::exact);
}

NormalizedTimestamp parse_us_short(std::string_view text) {
    Cursor c{text};
    int mo, d, y, h, mi;
    if (!(c.digits(1, 2, mo) && c.lit('/') && c.digits(1, 2, d) && c.lit('/')))
        fail("us-short", text);
    auto year_start = c.pos;
    if (!c.digits(2, 4, y) || (c.pos - year_start != 2 && c.pos - year_start != 4)) fail("us-short", text);
    if (c.pos - year_start == 2) y += y < 70 ? 2000 : 1900;
    if (!(c.spaces() && c.digits(1, 2, h) && c.lit(':') && c.digits(2, 2, mi) && c.spaces())) fail("us-short", text);
    auto meridiem = c.s.substr(c.pos);
    if (h < 1 || h > 12) fail("us-short", text);
    if (text::iequals(meridiem, "AM")) {
        if (h == 12) h = 0;
    } else if (text::iequals(meridiem, "PM")) {
        if (h != 12) h += 12;
    } else {
        fail("us-short", text);
    }
    auto secs = civil_seconds(y, mo, d, h, mi, 0);
    if (!secs) fail("us-short", text);
    return make(*secs, std::string(text), TimeEncoding::us_short_date, Confidence::ambiguous_timezone);
}

}  // namespace

std::string_view to_string(TimeEncoding e) {
    switch (e) {
        case TimeEncoding::unix_seconds: return "unix-seconds";
        case TimeEncoding::unix_milliseconds: return "unix-milliseconds";
        case TimeEncoding::unix_microseconds: return "unix-microseconds";
        case TimeEncoding::apple_absolute_seconds: return "apple-absolute-seconds";
        case TimeEncoding::day_ordinal_fraction: return "day-ordinal-fraction";
        case TimeEncoding::apache_log_date: return "apache-log-date";
        case TimeEncoding::rfc1123_date: return "rfc1123-date";
        case TimeEncoding::us_short_date: return "us-short-date";
        case TimeEncoding::iso8601: return "iso8601";
        case TimeEncoding::log_clock_time: return "log-clock-time";
        case TimeEncoding::windows_filetime: return "windows-filetime";
    }
    return "unknown";
}

std::string confidence_label(Confidence c) {
    if (c == Confidence::exact) return "exact";
    std::string out;
    if ((c & Confidence::ambiguous_timezone) != Confidence::exact) out = "ambiguous-timezone";
    if ((c & Confidence::ambiguous_format) != Confidence::exact) {
        if (!out.empty()) out += ",";
        out += "ambiguous-format";
    }
    return out;
}

bool in_plausible_range(UtcSeconds t) {
    auto s = t.time_since_epoch().count();
    return s >= kPlausibleBegin && s < kPlausibleEnd;
}

std::string format_iso(UtcSeconds t) {
    auto dp = floor<days>(t);
    year_month_day ymd{dp};
    hh_mm_ss hms{t - dp};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

std::string NormalizedTimestamp::iso() const { return format_iso(utc_instant); }

NormalizedTimestamp normalize_unix(std::int64_t value, UnixUnit unit, std::string raw) {
    if (raw.empty()) raw = std::to_string(value);
    std::int64_t seconds = value;
    TimeEncoding enc = TimeEncoding::unix_seconds;
    if (unit == UnixUnit::milliseconds) {
        seconds = floor_div(value, 1000);
        enc = TimeEncoding::unix_milliseconds;
    } else if (unit == UnixUnit::microseconds) {
        seconds = floor_div(value, 1000000);
        enc = TimeEncoding::unix_microseconds;
    }
    return make(seconds, std::move(raw), enc, value < 0 ? Confidence::ambiguous_format : Confidence::exact);
}

NormalizedTimestamp normalize_apple_absolute(double value, std::string raw) {
    if (raw.empty()) raw = text::format_double(value);
    if (!std::isfinite(value) || std::fabs(value) > 1e15)
        return make(kAppleEpoch, std::move(raw), TimeEncoding::apple_absolute_seconds, Confidence::ambiguous_format);
    auto seconds = kAppleEpoch + static_cast<std::int64_t>(std::floor(value));
    return make(seconds, std::move(raw), TimeEncoding::apple_absolute_seconds,
                value < 0 ? Confidence::ambiguous_format : Confidence::exact);
}

NormalizedTimestamp normalize_day_ordinal(double value, std::string raw) {
    if (raw.empty()) raw = text::format_double(value);
    auto conf = Confidence::ambiguous_timezone;
    if (!std::isfinite(value) || value <= 0 || value > 4e6)
        return make(kMinSeconds, std::move(raw), TimeEncoding::day_ordinal_fraction, conf | Confidence::ambiguous_format);
    // ordinal day 1 starts at 0001-01-01T00:00:00
    auto since_day_zero = static_cast<std::int64_t>(std::floor(value * 86400.0));
    return make(kMinSeconds - 86400 + since_day_zero, std::move(raw), TimeEncoding::day_ordinal_fraction, conf);
}

std::optional<NormalizedTimestamp> normalize_filetime(std::uint64_t ticks) {
    constexpr std::uint64_t kTicksPerSecond = 10000000;
    constexpr std::int64_t kFiletimeToUnix = 11644473600;
    constexpr std::int64_t k1990 = 631152000;
    auto seconds = static_cast<std::int64_t>(ticks / kTicksPerSecond) - kFiletimeToUnix;
    if (seconds < k1990 || seconds >= kPlausibleEnd) return std::nullopt;
    return make(seconds, std::to_string(ticks), TimeEncoding::windows_filetime, Confidence::exact);
}

NormalizedTimestamp parse_date_text(std::string_view text, DateDialect dialect) {
    if (text.empty()) throw ParseError("empty date text");
    switch (dialect) {
        case DateDialect::apache_log: return parse_apache(text);
        case DateDialect::rfc1123: return parse_rfc1123(text);
        case DateDialect::us_short: return parse_us_short(text);
    }
    throw ParseError("unknown date dialect");
}

NormalizedTimestamp parse_iso8601(std::string_view text) {
    Cursor c{text};
    int y, mo, d, h, mi, s, off = 0;
    if (!(c.digits(4, 4, y) && c.lit('-') && c.digits(2, 2, mo) && c.lit('-') && c.digits(2, 2, d)))
        fail("iso8601", text);
    if (!(c.lit('T') || c.lit(' '))) fail("iso8601", text);
    if (!(c.digits(2, 2, h) && c.lit(':') && c.digits(2, 2, mi) && c.lit(':') && c.digits(2, 2, s)))
        fail("iso8601", text);
    if (c.lit('.') || c.lit(',')) {
        int frac;
        if (!c.digits(1, 9, frac)) fail("iso8601", text);
        while (!c.done() && c.s[c.pos] >= '0' && c.s[c.pos] <= '9') ++c.pos;
    }
    auto conf = Confidence::exact;
    if (c.lit('Z')) {
    } else if (!c.done()) {
        if (!c.numeric_offset(off)) fail("iso8601", text);
    } else {
        conf = Confidence::ambiguous_timezone;
    }
    if (!c.done()) fail("iso8601", text);
    auto secs = civil_seconds(y, mo, d, h, mi, s);
    if (!secs) fail("iso8601", text);
    return make(*secs - off * 60, std::string(text), TimeEncoding::iso8601, conf);
}

NormalizedTimestamp make_log_clock_time(year_month_day date, std::chrono::seconds time_of_day, int offset_minutes,
                                        std::string raw) {
    auto local = sys_days{date}.time_since_epoch().count() * std::int64_t{86400} + time_of_day.count();
    return make(local - offset_minutes * 60, std::move(raw), TimeEncoding::log_clock_time, Confidence::exact);
}

std::optional<int> parse_utc_offset(std::string_view t) {
    t = text::trim(t);
    if (text::istarts_with(t, "UTC") || text::istarts_with(t, "GMT")) t.remove_prefix(3);
    if (t.empty() || t == "Z") return 0;
    if (t[0] != '+' && t[0] != '-') return std::nullopt;
    int sign = t[0] == '-' ? -1 : 1;
    t.remove_prefix(1);
    int h = 0, m = 0;
    auto colon = t.find(':');
    if (colon != std::string_view::npos) {
        auto hh = text::parse_int(t.substr(0, colon));
        auto mm = text::parse_int(t.substr(colon + 1));
        if (!hh || !mm || t.substr(colon + 1).size() != 2) return std::nullopt;
        h = static_cast<int>(*hh);
        m = static_cast<int>(*mm);
    } else if (t.size() == 4) {
        auto v = text::parse_int(t);
        if (!v) return std::nullopt;
        h = static_cast<int>(*v / 100);
        m = static_cast<int>(*v % 100);
    } else {
        auto v = text::parse_int(t);
        if (!v || t.size() > 2) return std::nullopt;
        h = static_cast<int>(*v);
    }
    if (h > 14 || m > 59) return std::nullopt;
    return sign * (h * 60 + m);
}

void apply_assumed_offset(NormalizedTimestamp& ts, int offset_minutes) {
    if (!ts.has(Confidence::ambiguous_timezone) || ts.encoding == TimeEncoding::day_ordinal_fraction) return;
    ts.utc_instant -= std::chrono::minutes{offset_minutes};
    ts.confidence = ts.confidence & ~Confidence::ambiguous_timezone;
    ts.assumed_offset_minutes = offset_minutes;
}

}  // namespace cloudtrace
