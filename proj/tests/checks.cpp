#include "checks.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/fixtures.hpp>
#include <cloudtrace/pipeline.hpp>
#include <cloudtrace/report.hpp>
#include <cloudtrace/services/evernote.hpp>
#include <cloudtrace/services/s3.hpp>
#include <cloudtrace/timestamp.hpp>
#include <cloudtrace/triage.hpp>

#include <commands.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace cloudtrace::checks {
namespace {

using testing::TempDir;

constexpr std::size_t kShownFailures = 6;

class Failures {
public:
    void expect(bool ok, const std::string& what) {
        ++checked_;
        if (!ok) list_.push_back(what);
    }
    bool ok() const { return list_.empty(); }
    std::size_t checked() const { return checked_; }
    std::string describe(const std::string& passing) const {
        if (list_.empty()) return passing;
        std::string s = std::to_string(list_.size()) + " failed";
        for (std::size_t i = 0; i < list_.size() && i < kShownFailures; ++i) s += "; " + list_[i];
        return s;
    }
    void append(const Failures& other, const std::string& prefix) {
        checked_ += other.checked_;
        for (const auto& f : other.list_) list_.push_back(prefix + f);
    }

private:
    std::vector<std::string> list_;
    std::size_t checked_ = 0;
};

template <typename F>
Outcome timed(std::string name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    o.name = std::move(name);
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return o;
}

const ArtifactRecord* find_record(const PipelineResult& r, std::size_t device, std::string_view kind, std::string_view subject) {
    for (const auto& rec : r.records) {
        if (rec.device == device && rec.kind == kind && rec.subject && *rec.subject == subject) return &rec;
    }
    return nullptr;
}

std::vector<const ArtifactRecord*> records_from(const PipelineResult& r, std::size_t device, std::string_view kind,
                                                std::string_view path_suffix) {
    std::vector<const ArtifactRecord*> out;
    for (const auto& rec : r.records) {
        if (rec.device == device && rec.kind == kind && rec.source_path.ends_with(path_suffix)) out.push_back(&rec);
    }
    return out;
}

std::string attr(const ArtifactRecord* r, std::string_view key) {
    if (!r) return "<no record>";
    const auto v = r->attributes.get(key);
    return v ? std::string(*v) : "<absent>";
}

std::string when(const ArtifactRecord* r, std::string_view label) {
    if (!r) return "<no record>";
    const auto* t = r->time(label);
    return t ? t->iso() : "<absent>";
}

void expect_eq(Failures& f, const std::string& got, const std::string& want, const std::string& what) {
    f.expect(got == want, what + ": got '" + got + "', want '" + want + "'");
}

// ---------------------------------------------------------------------------------------------

void check_reference_values(const PipelineResult& r, Failures& f) {
    constexpr std::size_t win = 0, ios = 1, android = 2;

    // Dropbox desktop configuration and sync cache.
    const auto* profile = find_record(r, win, "account-profile", "foryou7187@yahoo.co.kr");
    f.expect(profile != nullptr, "config.db account email");
    const auto recents = records_from(r, win, "recent-file", "Dropbox/config.db");
    const std::vector<std::string> want_recents = {"/paper101.doc", "/Digital Forensic of Cloud.pdf", "/Lecture1.pdf", "/Hello.ppt",
                                                   "/snort.pdf"};
    std::vector<std::string> got_recents;
    for (const auto* rec : recents) got_recents.push_back(rec->subject.value_or(""));
    f.expect(got_recents == want_recents, "recent list order (" + std::to_string(got_recents.size()) + " entries)");
    for (std::size_t i = 0; i < recents.size(); ++i) expect_eq(f, attr(recents[i], "rank"), std::to_string(i), "recent rank");
    const auto* synced = find_record(r, win, "file-synced", "Hello");
    expect_eq(f, when(synced, "modified"), "2011-06-07T00:13:46Z", "filecache local_mtime");
    expect_eq(f, when(synced, "created"), "2011-04-13T08:57:57Z", "filecache local_ctime");

    // Bucket log.
    const auto* call = find_record(r, win, "bucket-api-call", "File Name");
    expect_eq(f, attr(call, "operation"), "REST.DELETE.OBJECT", "bucket log operation");
    expect_eq(f, attr(call, "http_status"), "204", "bucket log status");
    expect_eq(f, attr(call, "user_agent"), "S3Console/0.4", "bucket log agent");
    expect_eq(f, attr(call, "remote_ip"), "10.186.158.41", "bucket log ip");
    expect_eq(f, when(call, "requested"), "2012-01-06T08:42:20Z", "bucket log time");

    // Desktop application log.
    const auto log = records_from(r, win, "app-event", "AppLog_20110601.txt");
    std::vector<std::string> events;
    for (const auto* e : log) events.push_back(attr(e, "event") + ":" + e->subject.value_or(""));
    const std::vector<std::string> want_prefix = {"session-open:", "other:", "other:", "auth-attempt:hjhjhjhj", "auth-failure:",
                                                  "auth-attempt:dodochung"};
    f.expect(events.size() >= want_prefix.size() && std::equal(want_prefix.begin(), want_prefix.end(), events.begin()),
             "desktop log event sequence");
    if (!log.empty()) expect_eq(f, when(log.front(), "logged"), "2011-06-01T01:24:21Z", "desktop log header instant");
    if (log.size() > 3) expect_eq(f, when(log[3], "logged"), "2011-06-01T01:24:53Z", "desktop log auth instant");

    // iOS.
    const auto* aws = find_record(r, ios, "account-profile", "HyunjiChung");
    expect_eq(f, attr(aws, "access_key_id"), "Access Key ID", "iAws access key id");
    bool key_pair = false, password = false;
    for (const auto& c : r.credentials) {
        if (c.device == ios && c.secret_kind == SecretKind::access_key_pair && c.account_id == "Access Key ID" &&
            c.secret_value == "Secret Access Key" && c.enables_remote_access)
            key_pair = true;
        if (c.device == ios && c.secret_kind == SecretKind::password && c.account_id == "localchung@gmail.com" &&
            c.secret_value == "googledocspassword" && c.enables_remote_access)
            password = true;
    }
    f.expect(key_pair, "iAws access key pair finding");
    f.expect(password, "iGoogDocs password finding");
    const auto* download = find_record(r, ios, "file-downloaded", "Forensic.pdf");
    expect_eq(f, attr(download, "bucket"), "Hyunjistorage", "download bucket");
    expect_eq(f, attr(download, "size_bytes"), "8704", "download size");
    expect_eq(f, attr(download, "etag"), "[Forensic.pdf file's eTag]", "download etag");
    expect_eq(f, when(download, "downloaded"), "2012-01-05T14:21:00Z", "download time");
    expect_eq(f, when(find_record(r, ios, "file-viewed", "/folder/Hello.pdf"), "viewed"), "2011-06-08T04:42:31Z", "viewed time");
    expect_eq(f, when(find_record(r, ios, "file-uploaded", "/folder/Photo 11.6.5 PM 9 02 50.png"), "uploaded"),
              "2011-06-08T04:05:03Z", "uploaded time");
    for (const char* title : {"Note1", "Note2"}) {
        const auto* note = find_record(r, ios, "note", title);
        expect_eq(f, attr(note, "is_deleted"), "true", std::string(title) + " deleted flag");
    }
    expect_eq(f, when(find_record(r, ios, "note", "Note1"), "deleted"), "2011-06-08T06:03:47Z", "Note1 deletion time");
    const auto applog = records_from(r, ios, "app-event", "User/applog.txt");
    std::vector<std::string> ios_events;
    for (const auto* e : applog) ios_events.push_back(attr(e, "event") + "@" + when(e, "logged"));
    const std::vector<std::string> want_ios = {"other@2011-06-03T16:07:04Z",     "other@2011-06-03T16:07:05Z",
                                               "sync-start@2011-06-03T16:07:05Z", "other@2011-06-03T16:07:05Z",
                                               "other@2011-06-03T16:07:08Z",     "note-sync@2011-06-03T16:07:08Z",
                                               "sync-end@2011-06-03T16:07:09Z"};
    f.expect(ios_events == want_ios, "iOS application log events");
    if (applog.size() > 5) expect_eq(f, attr(applog[5], "target"), "hallo", "synced note title");
    expect_eq(f, attr(find_record(r, ios, "local-document", "Memo"), "text"), "ios test", "iGoogDocs local file text");

    // Android.
    const auto* note = find_record(r, android, "note", "Note Test");
    expect_eq(f, attr(note, "available"), "true", "is_active flag");
    expect_eq(f, attr(note, "is_deleted"), "false", "deleted flag");
    expect_eq(f, when(note, "created"), "2011-06-03T07:09:22Z", "Android note created");
    const auto* upload = find_record(r, android, "file-uploaded", "Forensics.pdf");
    expect_eq(f, attr(upload, "size_bytes"), "49050", "human size 47.9KB");
    expect_eq(f, when(upload, "modified"), "2011-03-17T00:42:24Z", "upload modified");
    const auto* hello = find_record(r, android, "doc-entry", "Hello");
    const auto* test = find_record(r, android, "doc-entry", "Test");
    expect_eq(f, attr(hello, "account"), "localchung@gmail.com", "Hello owner");
    expect_eq(f, attr(test, "account"), "abc123@gmail.com", "Test owner");
    expect_eq(f, when(hello, "created"), "2011-07-14T04:49:44Z", "Hello created");
    expect_eq(f, when(hello, "last_sync"), "2011-07-14T04:38:32Z", "Hello last sync");
    expect_eq(f, when(test, "created"), "2011-07-14T00:34:14Z", "Test created");
    expect_eq(f, when(test, "modified"), "2011-07-14T03:24:27Z", "Test modified");
    expect_eq(f, when(test, "last_sync"), "2011-07-14T04:52:12Z", "Test last sync");
}

// ---------------------------------------------------------------------------------------------

struct OracleCase {
    std::string encoding;
    std::int64_t expected;  ///< unix seconds from the oracle
    NormalizedTimestamp got;
    std::string input;
};

void oracle_compare(Failures& f, const OracleCase& c) {
    const auto got = c.got.utc_instant.time_since_epoch().count();
    const bool close = std::llabs(got - c.expected) <= kOracleToleranceSeconds;
    f.expect(close, c.encoding + " " + c.input + ": got " + c.got.iso() + ", oracle " + oracle::iso(c.expected));
}

oracle::Civil random_civil(std::mt19937_64& rng, std::int64_t y0, std::int64_t y1) {
    oracle::Civil c;
    c.year = std::uniform_int_distribution<std::int64_t>(y0, y1)(rng);
    c.month = std::uniform_int_distribution<int>(1, 12)(rng);
    c.day = std::uniform_int_distribution<int>(1, oracle::month_length(c.year, c.month))(rng);
    c.hour = std::uniform_int_distribution<int>(0, 23)(rng);
    c.minute = std::uniform_int_distribution<int>(0, 59)(rng);
    c.second = std::uniform_int_distribution<int>(0, 59)(rng);
    return c;
}

int random_offset_minutes(std::mt19937_64& rng) { return std::uniform_int_distribution<int>(-48, 56)(rng) * 15; }

std::string offset_text(int minutes, bool colon) {
    char buf[16];
    const int a = std::abs(minutes);
    std::snprintf(buf, sizeof buf, colon ? "%c%02d:%02d" : "%c%02d%02d", minutes < 0 ? '-' : '+', a / 60, a % 60);
    return buf;
}

std::string fmt(const char* pattern, auto... args) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

// ---------------------------------------------------------------------------------------------

std::string random_token(std::mt19937_64& rng, std::string_view alphabet, std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    return s;
}

/// A bucket-log line in the canonical layout, built field by field without the library formatter.
std::string random_bucket_log_line(std::mt19937_64& rng) {
    const auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    const auto maybe = [&](const std::string& v) { return pick(4) == 0 ? std::string("-") : v; };
    const auto number = [&]() { return maybe(std::to_string(std::uniform_int_distribution<std::int64_t>(0, 5'000'000'000)(rng))); };
    static const char* ops[] = {"REST.GET.OBJECT", "REST.PUT.OBJECT", "REST.DELETE.OBJECT", "REST.HEAD.BUCKET", "WEBSITE.GET.OBJECT"};
    static const char* verbs[] = {"GET", "PUT", "DELETE", "HEAD", "POST"};
    static const int statuses[] = {200, 204, 206, 304, 403, 404, 500, 503};
    const auto c = random_civil(rng, 2006, 2030);
    const std::string hex = "0123456789abcdef";
    const std::string bucket = random_token(rng, "abcdefghijklmnopqrstuvwxyz0123456789-", 3 + pick(20));
    const std::string key = random_token(rng, "abcdefghijklmnopqrstuvwxyz0123456789/._-%", 1 + pick(40));
    std::string line = random_token(rng, hex, 64) + " " + bucket + " [" +
                       fmt("%02d/%s/%04lld:%02d:%02d:%02d ", c.day, oracle::month_abbrev(c.month), static_cast<long long>(c.year),
                           c.hour, c.minute, c.second) +
                       offset_text(random_offset_minutes(rng), false) + "] ";
    line += maybe(fmt("%d.%d.%d.%d", pick(256), pick(256), pick(256), pick(256))) + " ";
    line += maybe(random_token(rng, hex, 64)) + " ";
    line += maybe(random_token(rng, "ABCDEF0123456789", 16)) + " ";
    line += std::string(ops[pick(5)]) + " " + maybe(key) + " ";
    line += "\"" + maybe(std::string(verbs[pick(5)]) + " /" + bucket + "/" + key + " HTTP/1.1") + "\" ";
    line += std::to_string(statuses[pick(8)]) + " " + maybe(random_token(rng, "ABCDEFGHIJKLMNOPQRSTUVWXYZ", 5 + pick(10))) + " ";
    line += number() + " " + number() + " " + number() + " " + number() + " ";
    line += "\"" + maybe("https://" + random_token(rng, "abcdefghijklmnopqrstuvwxyz", 8) + ".example/") + "\" ";
    line += "\"" + maybe("S3Console/0." + std::to_string(pick(9)) + " (client " + std::to_string(pick(100)) + ")") + "\"";
    if (pick(5) == 0) line += " " + random_token(rng, hex, 20);
    return line;
}

// ---------------------------------------------------------------------------------------------

struct TriageRow {
    bool has_finding;
    SecretKind kind;
    std::optional<bool> jurisdiction;
    bool warrant;
};

/// Independent statement of the decision table: credential strength, then the jurisdiction and warrant gates.
std::pair<triage::Branch, std::vector<std::string>> expected_decision(const TriageRow& row) {
    using triage::Branch;
    if (!row.has_finding) return {Branch::no_credentials, {"analyze-local-only"}};
    if (row.kind != SecretKind::none) {
        if (row.warrant) return {Branch::full_credentials, {"remote-collection", "analyze-cloud-and-local"}};
        return {Branch::full_credentials, {"obtain-warrant", "analyze-local-only"}};
    }
    if (!row.jurisdiction) return {Branch::id_only_jurisdiction_unspecified, {"supply-jurisdiction", "analyze-local-only"}};
    if (!*row.jurisdiction)
        return {Branch::id_only_out_of_jurisdiction, {"request-judicial-assistance", "spoliation-risk", "analyze-local-only"}};
    if (row.warrant) return {Branch::id_only_in_jurisdiction, {"provider-collection", "analyze-cloud-and-local"}};
    return {Branch::id_only_in_jurisdiction, {"obtain-warrant", "analyze-local-only"}};
}

CredentialFinding finding_of(SecretKind kind, Service service, const std::string& account) {
    if (kind == SecretKind::none) return CredentialFinding::account_only(service, account, "x");
    CredentialFinding c;
    c.service = service;
    c.account_id = account;
    c.secret_kind = kind;
    if (kind != SecretKind::portable_session_file) c.secret_value = "secret";
    c.enables_remote_access = true;
    c.source_path = "x";
    return c;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::uint8_t> as_bytes(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

// =============================================================================================

Outcome reference_value_recovery() {
    return timed("reference-value recovery", [](Outcome& o) {
        TempDir dir("reference");
        const std::pair<OsFamily, std::vector<Service>> plans[] = {
            {OsFamily::windows_vista7, {Service::amazon_s3, Service::dropbox, Service::evernote}},
            {OsFamily::ios_app_sandbox, fixtures::supported_services(OsFamily::ios_app_sandbox)},
            {OsFamily::android_data, fixtures::supported_services(OsFamily::android_data)}};
        std::vector<DeviceInput> devices;
        int n = 0;
        for (const auto& [family, services] : plans) {
            fixtures::FixtureSpec spec;
            spec.os_family = family;
            spec.services = services;
            const auto root = dir / ("device" + std::to_string(n++));
            fixtures::generate(spec, root);
            devices.push_back({root, std::nullopt});
        }
        const auto result = run_pipeline(devices);
        Failures f;
        check_reference_values(result, f);
        o.pass = f.ok();
        o.detail = f.describe(std::to_string(f.checked()) + " values exact");
    });
}

Outcome timestamp_oracle(std::uint64_t seed, int samples) {
    return timed("timestamp oracle", [seed, samples](Outcome& o) {
        std::mt19937_64 rng(seed);
        Failures f;
        const std::int64_t lo = oracle::seconds_from_civil({1900, 1, 1, 0, 0, 0});
        const std::int64_t hi = oracle::seconds_from_civil({2100, 1, 1, 0, 0, 0});
        const auto secs = [&]() { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };

        // Epoch identities are exact.
        f.expect(normalize_unix(0, UnixUnit::seconds).iso() == "1970-01-01T00:00:00Z", "unix epoch");
        f.expect(normalize_apple_absolute(0).utc_instant.time_since_epoch().count() == oracle::unix_of_2001(), "apple epoch");
        f.expect(normalize_apple_absolute(0).iso() == "2001-01-01T00:00:00Z", "apple epoch text");
        const double ordinal_1970 = static_cast<double>(1 - oracle::days_from_civil(1, 1, 1));
        f.expect(normalize_day_ordinal(ordinal_1970).utc_instant.time_since_epoch().count() == 0, "day-ordinal epoch alignment");

        for (int i = 0; i < samples; ++i) {
            const std::int64_t s = secs();
            oracle_compare(f, {"unix-seconds", s, normalize_unix(s, UnixUnit::seconds), std::to_string(s)});
            const std::int64_t ms = s * 1000 + std::uniform_int_distribution<int>(0, 999)(rng);
            oracle_compare(f, {"unix-milliseconds", s, normalize_unix(ms, UnixUnit::milliseconds), std::to_string(ms)});
            const std::int64_t us = s * 1000000 + std::uniform_int_distribution<int>(0, 999999)(rng);
            oracle_compare(f, {"unix-microseconds", s, normalize_unix(us, UnixUnit::microseconds), std::to_string(us)});

            const double apple = static_cast<double>(s - oracle::unix_of_2001()) + std::uniform_real_distribution<double>(0, 0.999)(rng);
            oracle_compare(f, {"apple-absolute", oracle::unix_of_2001() + static_cast<std::int64_t>(std::floor(apple)),
                               normalize_apple_absolute(apple), fmt("%.6f", apple)});

            const double ordinal = static_cast<double>(oracle::days_from_civil(1, 1, 1) * -1 + 1) +
                                   static_cast<double>(s) / 86400.0;
            const std::int64_t whole = static_cast<std::int64_t>(std::floor(ordinal));
            const std::int64_t ord_expected = oracle::unix_of_year_one() + (whole - 1) * 86400 +
                                              static_cast<std::int64_t>(std::floor((ordinal - static_cast<double>(whole)) * 86400.0));
            oracle_compare(f, {"day-ordinal", ord_expected, normalize_day_ordinal(ordinal), fmt("%.9f", ordinal)});

            const std::int64_t plausible = std::uniform_int_distribution<std::int64_t>(
                oracle::seconds_from_civil({1990, 1, 1, 0, 0, 0}), oracle::seconds_from_civil({2099, 12, 31, 0, 0, 0}))(rng);
            const std::uint64_t ticks = static_cast<std::uint64_t>(plausible - oracle::unix_of_1601()) * 10'000'000ULL +
                                        std::uniform_int_distribution<std::uint64_t>(0, 9'999'999)(rng);
            const auto ft = normalize_filetime(ticks);
            f.expect(ft.has_value(), "filetime in range " + std::to_string(ticks));
            if (ft) oracle_compare(f, {"filetime", plausible, *ft, std::to_string(ticks)});

            const auto c = random_civil(rng, 1971, 2099);
            const std::int64_t local = oracle::seconds_from_civil(c);
            const int off = random_offset_minutes(rng);
            const std::string apache = fmt("%02d/%s/%04lld:%02d:%02d:%02d ", c.day, oracle::month_abbrev(c.month),
                                           static_cast<long long>(c.year), c.hour, c.minute, c.second) +
                                       offset_text(off, false);
            oracle_compare(f, {"apache-log", local - off * 60, parse_date_text(apache, DateDialect::apache_log), apache});

            const bool gmt = i % 2 == 0;
            const std::string rfc = fmt("%s, %02d %s %04lld %02d:%02d:%02d ", oracle::weekday_abbrev(local), c.day,
                                        oracle::month_abbrev(c.month), static_cast<long long>(c.year), c.hour, c.minute, c.second) +
                                    (gmt ? std::string("GMT") : offset_text(off, false));
            oracle_compare(f, {"rfc1123", local - (gmt ? 0 : off * 60), parse_date_text(rfc, DateDialect::rfc1123), rfc});

            const int h12 = c.hour % 12 == 0 ? 12 : c.hour % 12;
            const bool short_year = c.year < 2070 && i % 3 == 0;
            const std::string us_text = short_year ? fmt("%02d/%02d/%02lld %02d:%02d %s", c.month, c.day, static_cast<long long>(c.year % 100),
                                                    h12, c.minute, c.hour < 12 ? "AM" : "PM")
                                              : fmt("%d/%d/%04lld %d:%02d %s", c.month, c.day, static_cast<long long>(c.year), h12,
                                                    c.minute, c.hour < 12 ? "AM" : "PM");
            oracle_compare(f, {"us-short", local - c.second, parse_date_text(us_text, DateDialect::us_short), us_text});

            const std::string iso = fmt("%04lld-%02d-%02dT%02d:%02d:%02d.%03d", static_cast<long long>(c.year), c.month, c.day,
                                        c.hour, c.minute, c.second, static_cast<int>(i % 1000)) +
                                    (i % 2 ? std::string("Z") : offset_text(off, true));
            oracle_compare(f, {"iso8601", local - (i % 2 ? 0 : off * 60), parse_iso8601(iso), iso});
        }
        o.pass = f.ok();
        o.detail = f.describe(std::to_string(samples) + " samples x 10 encodings within " + std::to_string(kOracleToleranceSeconds) +
                              " s, epoch identities exact");
    });
}

Outcome thumbnail_carving() {
    return timed("thumbnail carving", [](Outcome& o) {
        std::mt19937 rng(17);
        Failures f;
        for (int n : {0, 1, 2, 3, 17}) {
            std::vector<std::vector<std::uint8_t>> pngs;
            for (int k = 0; k < n; ++k)
                pngs.push_back(fixtures::make_png(1 + rng() % 64, 1 + rng() % 64, static_cast<std::uint32_t>(rng())));
            const std::string tag = "N=" + std::to_string(n);
            const auto carved = evernote::carve_thumbnails(fixtures::ent0_container(pngs));
            f.expect(carved.size() == pngs.size(), tag + " count " + std::to_string(carved.size()));
            for (std::size_t k = 0; k < std::min(carved.size(), pngs.size()); ++k) {
                f.expect(carved[k].bytes == pngs[k], tag + " image " + std::to_string(k) + " bytes");
                f.expect(!carved[k].truncated, tag + " image " + std::to_string(k) + " flagged");
            }
            if (n == 0) continue;
            const auto cut = evernote::carve_thumbnails(fixtures::ent0_container(pngs, true));
            f.expect(cut.size() == pngs.size(), tag + " truncated count " + std::to_string(cut.size()));
            for (std::size_t k = 0; k + 1 < std::min(cut.size(), pngs.size()); ++k) {
                f.expect(cut[k].bytes == pngs[k] && !cut[k].truncated, tag + " truncated-case image " + std::to_string(k));
            }
            if (cut.size() == pngs.size()) {
                const auto& last = cut.back();
                const auto& orig = pngs.back();
                f.expect(last.truncated, tag + " partial image flagged");
                f.expect(last.bytes.size() < orig.size() && std::equal(last.bytes.begin(), last.bytes.end(), orig.begin()),
                         tag + " partial image is a prefix of the original");
            }
        }
        o.pass = f.ok();
        o.detail = f.describe("N in {0,1,2,3,17} byte-identical; truncated tail gives N-1 complete + 1 flagged partial");
    });
}

Outcome round_trips(std::uint64_t seed) {
    return timed("round trips", [seed](Outcome& o) {
        Failures logs;
        std::mt19937_64 rng(seed);
        for (int i = 0; i < kBucketLogLines; ++i) {
            const auto line = random_bucket_log_line(rng);
            try {
                const auto parsed = s3::parse_bucket_log_line(line);
                const auto again = s3::format_bucket_log_line(parsed);
                logs.expect(again == line, "format(parse(x)) != x for: " + line);
                logs.expect(s3::parse_bucket_log_line(again) == parsed, "parse not stable for: " + line);
            } catch (const Error& e) {
                logs.expect(false, std::string("rejected: ") + e.what());
            }
        }

        Failures closure;
        std::size_t pairs = 0;
        for (auto family : {OsFamily::windows_xp, OsFamily::windows_vista7, OsFamily::mac, OsFamily::ios_app_sandbox,
                            OsFamily::android_data}) {
            for (auto service : {Service::amazon_s3, Service::dropbox, Service::evernote, Service::google_docs, Service::browser}) {
                TempDir dir("roundtrip");
                fixtures::FixtureSpec spec;
                spec.os_family = family;
                spec.services = {service};
                spec.seed = seed + pairs;
                spec.accounts = 2;
                spec.notes = 3;
                spec.log_events = 4;
                spec.index_gaps = true;
                const std::string tag = std::string(to_string(family)) + "/" + std::string(to_string(service));
                if (!fixtures::is_supported(family, service)) {
                    bool rejected = false;
                    try {
                        fixtures::generate(spec, dir / "tree");
                    } catch (const Error&) {
                        rejected = true;
                    }
                    closure.expect(rejected, tag + " should be rejected");
                    continue;
                }
                ++pairs;
                const auto manifest = fixtures::generate(spec, dir / "tree");
                const auto report = fixtures::check_closure(manifest, run_pipeline({{dir / "tree", std::nullopt}}));
                closure.expect(report.ok(), tag + ": " + report.summary());
            }
        }
        Failures all;
        all.append(logs, "bucket log: ");
        all.append(closure, "closure: ");
        o.pass = all.ok();
        o.detail = all.describe(std::to_string(kBucketLogLines) + " log lines identical; closure exact on " + std::to_string(pairs) +
                                " of 25 os x service pairs, the " + std::to_string(25 - pairs) +
                                " pairs with no catalogued location rejected by name");
    });
}

Outcome triage_table(std::uint64_t seed) {
    return timed("triage decision table", [seed](Outcome& o) {
        Failures f;
        std::size_t rows = 0;
        const std::optional<bool> jurisdictions[] = {std::nullopt, true, false};
        std::vector<TriageRow> table;
        for (bool warrant : {false, true}) {
            for (const auto& j : jurisdictions) {
                table.push_back({false, SecretKind::none, j, warrant});
                for (auto kind : {SecretKind::none, SecretKind::password, SecretKind::access_key_pair, SecretKind::portable_session_file})
                    table.push_back({true, kind, j, warrant});
            }
        }
        for (const auto& row : table) {
            ++rows;
            std::vector<CredentialFinding> findings;
            if (row.has_finding) findings.push_back(finding_of(row.kind, Service::dropbox, "someone@example.com"));
            const auto d = triage::decide_branch(findings, row.jurisdiction, row.warrant);
            const auto [branch, codes] = expected_decision(row);
            std::vector<std::string> got;
            for (const auto& r : d.recommendations) got.push_back(r.code);
            const std::string tag = std::string(row.has_finding ? to_string(row.kind) : "no-finding") + "/" +
                                    (row.jurisdiction ? (*row.jurisdiction ? "in" : "out") : "unspecified") + "/" +
                                    (row.warrant ? "warrant" : "no-warrant");
            f.expect(d.branch == branch, tag + " branch " + std::string(triage::to_string(d.branch)));
            f.expect(got == codes, tag + " recommendations");
            f.expect(d.needs_jurisdiction_input == (branch == triage::Branch::id_only_jurisdiction_unspecified), tag + " input flag");
        }

        std::mt19937_64 rng(seed);
        const SecretKind kinds[] = {SecretKind::none, SecretKind::password, SecretKind::access_key_pair, SecretKind::portable_session_file};
        const Service services[] = {Service::amazon_s3, Service::dropbox, Service::evernote, Service::google_docs};
        for (int trial = 0; trial < kMonotonicityTrials; ++trial) {
            const auto j = jurisdictions[rng() % 3];
            const bool warrant = rng() % 2;
            std::vector<CredentialFinding> findings;
            int previous = triage::strength(triage::decide_branch(findings, j, warrant).branch);
            const int steps = 1 + static_cast<int>(rng() % 8);
            for (int s = 0; s < steps; ++s) {
                auto c = finding_of(kinds[rng() % 4], services[rng() % 4], "acct" + std::to_string(rng() % 5));
                if (rng() % 5 == 0) c.account_id.clear();
                findings.push_back(std::move(c));
                const int now = triage::strength(triage::decide_branch(findings, j, warrant).branch);
                f.expect(now >= previous, "trial " + std::to_string(trial) + " strength fell from " + std::to_string(previous) +
                                              " to " + std::to_string(now));
                previous = now;
            }
        }
        o.pass = f.ok();
        o.detail = f.describe(std::to_string(rows) + " table rows match; monotone over " + std::to_string(kMonotonicityTrials) +
                              " growth trials");
    });
}

Outcome case_study_replay() {
    return timed("case-study replay", [](Outcome& o) {
        TempDir dir("case");
        const auto cs = fixtures::generate_case_study(dir.path());
        PipelineOptions options;
        options.known_files = {cs.secret_file};
        auto result = run_pipeline({{cs.pc_root, std::nullopt}, {cs.phone_root, std::nullopt}}, options);
        const auto report = report::assemble(std::move(result), {});
        const auto& r = report.result;
        Failures f;

        f.expect(r.devices.size() == 2 && r.devices[0].profile.os_family == OsFamily::windows_vista7, "PC detected as Windows 7");
        f.expect(r.devices.size() == 2 && r.devices[1].profile.os_family == OsFamily::android_data, "phone detected as Android");
        f.expect(std::any_of(r.records.begin(), r.records.end(),
                             [](const ArtifactRecord& a) { return a.device == 0 && a.service == Service::dropbox; }),
                 "Dropbox detected on the PC");
        f.expect(std::any_of(r.credentials.begin(), r.credentials.end(),
                             [](const CredentialFinding& c) {
                                 return c.device == 0 && c.secret_kind == SecretKind::portable_session_file &&
                                        c.source_path.ends_with("Dropbox/config.db") && c.enables_remote_access;
                             }),
                 "portable session file finding from config.db");

        std::vector<std::string> recents;
        for (const auto* rec : records_from(r, 0, "recent-file", "config.db")) recents.push_back(rec->subject.value_or(""));
        f.expect(recents == cs.pc_recents, "PC recent list matches the five planted names");

        const bool linked = std::any_of(report.correlations.begin(), report.correlations.end(), [&](const triage::Correlation& c) {
            const auto& left = r.records[c.left];
            const auto& right = r.records[c.right];
            return c.kind == triage::CorrelationKind::same_filename && c.evidence == "abc.pdf" && left.device == 0 &&
                   left.kind == "recent-file" && right.device == 1 && right.source_path.ends_with("files/log.txt");
        });
        f.expect(linked, "abc.pdf correlation between the PC recent list and the phone's log.txt");

        const bool hash_match = std::any_of(r.known_file_matches.begin(), r.known_file_matches.end(), [&](const KnownFileMatch& m) {
            const auto& rec = r.records[m.record];
            return m.sha256 == cs.secret_sha256 && rec.device == 1 && rec.source_path == "sdcard/dropbox/abc.pdf";
        });
        f.expect(hash_match, "sd-card copy hashes to the planted secret file");
        f.expect(cs.secret_sha256 == codec::sha256_hex(as_bytes(read_file(cs.secret_file))), "reference hash of the secret file");

        // Every planted instant appears on the timeline, and nothing else does.
        std::multiset<std::tuple<std::string, std::string, std::size_t>> planted(cs.planted_instants.begin(), cs.planted_instants.end());
        std::multiset<std::tuple<std::string, std::string, std::size_t>> seen;
        for (const auto& e : report.timeline) seen.insert({e.instant.iso(), e.source_path, e.device});
        f.expect(planted == seen, "timeline instants equal the planted instants (" + std::to_string(seen.size()) + " vs " +
                                      std::to_string(planted.size()) + ")");
        o.pass = f.ok();
        o.detail = f.describe("Dropbox on PC, portable-session finding, abc.pdf PC<->log.txt link, sd-card hash match");
    });
}

Outcome catalog_completeness() {
    return timed("catalog completeness", [](Outcome& o) {
        std::ostringstream out;
        cli::cmd_catalog({}, out);
        const auto doc = nlohmann::json::parse(out.str());
        Failures f;
        const auto total = doc.at("entries").size();
        f.expect(total == catalog::kServiceRowTotal, "entries " + std::to_string(total) + " vs audited " +
                                                         std::to_string(catalog::kServiceRowTotal));
        const std::pair<const char*, std::size_t> groups[] = {{"service-windows", catalog::kWindowsServiceRows},
                                                              {"service-mac", catalog::kMacServiceRows},
                                                              {"service-ios", catalog::kIosServiceRows},
                                                              {"service-android", catalog::kAndroidServiceRows}};
        for (const auto& [group, want] : groups) {
            const auto got = static_cast<std::size_t>(std::count_if(doc["entries"].begin(), doc["entries"].end(),
                                                                    [&](const auto& e) { return e.at("source") == group; }));
            f.expect(got == want, std::string(group) + " " + std::to_string(got) + " vs " + std::to_string(want));
        }
        o.pass = f.ok();
        o.detail = f.describe(std::to_string(total) + " entries = audited total " + std::to_string(catalog::kServiceRowTotal));
    });
}

Outcome determinism() {
    return timed("determinism", [](Outcome& o) {
        TempDir dir("determinism");
        std::vector<DeviceInput> devices;
        int n = 0;
        for (auto family : {OsFamily::windows_xp, OsFamily::windows_vista7, OsFamily::mac, OsFamily::ios_app_sandbox,
                            OsFamily::android_data}) {
            fixtures::FixtureSpec spec;
            spec.os_family = family;
            spec.services = fixtures::supported_services(family);
            spec.seed = 31;
            spec.notes = 5;
            spec.log_events = 5;
            spec.accounts = 2;
            const auto root = dir / ("d" + std::to_string(n++));
            fixtures::generate(spec, root);
            devices.push_back({root, std::nullopt});
        }
        Failures f;
        std::vector<std::string> reports;
        for (int run = 0; run < 3; ++run) {
            PipelineOptions options;
            options.parallel = run != 2;  // the last run takes the serial route
            const auto out = dir / ("report" + std::to_string(run));
            report::write_report(report::assemble(run_pipeline(devices, options), {}), out, {report::Format::json});
            reports.push_back(read_file(out / "report.json"));
        }
        f.expect(!reports[0].empty(), "report written");
        f.expect(reports[0] == reports[1], "two parallel scans differ");
        f.expect(reports[0] == reports[2], "parallel and serial scans differ");
        o.pass = f.ok();
        o.detail = f.describe("report.json byte-identical across 3 scans (" + std::to_string(reports[0].size()) + " bytes)");
    });
}

std::vector<Outcome> run_all() {
    return {reference_value_recovery(), timestamp_oracle(), thumbnail_carving(), round_trips(),
            triage_table(),             case_study_replay(), catalog_completeness(), determinism()};
}

}  // namespace cloudtrace::checks
