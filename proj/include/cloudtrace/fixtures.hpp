#pragma once

#include <cloudtrace/pipeline.hpp>
#include <cloudtrace/plist.hpp>
#include <cloudtrace/types.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Synthetic device trees with a manifest of every planted value.
namespace cloudtrace::fixtures {

// ---- format writers (independent of the parsers they feed) ----

/// Runs each statement against a fresh database file at `path`.
void write_sqlite(const std::filesystem::path& path, const std::vector<std::string>& statements);
std::string sql_text(std::string_view s);

std::vector<std::uint8_t> binary_plist(const plist::Value& root);
std::string xml_plist(const plist::Value& root);

/// Valid RGB PNG with a pattern derived from `seed`.
std::vector<std::uint8_t> make_png(std::uint32_t width, std::uint32_t height, std::uint32_t seed);
/// ENT0 container: 16-byte header, then per image an 8-byte prefix and the PNG. With `truncate_last` the
/// final image loses its tail.
std::vector<std::uint8_t> ent0_container(const std::vector<std::vector<std::uint8_t>>& pngs, bool truncate_last = false);

struct IndexUrl {
    std::string tag;  ///< "URL ", "LEAK" or "REDR"
    std::string url;
    std::uint64_t filetime = 0;
};
std::vector<std::uint8_t> index_dat(const std::vector<IndexUrl>& urls);
std::uint64_t unix_to_filetime(std::int64_t unix_seconds);
/// 76-byte shell link header.
std::vector<std::uint8_t> lnk_header();

// ---- manifest ----

struct ExpectedRecord {
    std::string service;
    std::string source_path;
    std::string kind;
    std::optional<std::string> subject;
    std::map<std::string, std::string> attributes;  ///< subset that must match exactly
    std::map<std::string, std::string> times;       ///< label -> ISO instant; label set must match exactly
    std::optional<GeoPoint> geo;
};

struct ExpectedCredential {
    std::string service;
    std::string account_id;
    std::string secret_kind;
    std::optional<std::string> secret_value;
    bool enables_remote_access = false;
    std::string source_path;

    friend bool operator==(const ExpectedCredential&, const ExpectedCredential&) = default;
};

struct Manifest {
    std::string os_family;
    std::vector<std::string> services;
    std::vector<std::string> planted_files;
    std::vector<ExpectedRecord> records;
    std::vector<ExpectedCredential> credentials;
};

nlohmann::ordered_json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);

struct FixtureSpec {
    OsFamily os_family = OsFamily::windows_vista7;
    std::vector<Service> services;
    std::string user = "dodochung";
    std::uint64_t seed = 1;
    int accounts = 1;    ///< accounts beyond the first are synthetic
    int notes = 0;       ///< extra synthetic notes per note store
    int log_events = 0;  ///< extra synthetic log lines per log
    bool index_gaps = false;  ///< drop sequential note indices in the iOS note store
};

/// Throws Error on unknown keys' values (bad family/service names).
FixtureSpec spec_from_json(const nlohmann::json& j);

/// Services with catalogued artifact locations on the family.
std::vector<Service> supported_services(OsFamily family);
bool is_supported(OsFamily family, Service service);

/// Writes the tree under `root` (created if absent). Throws Error naming the gap for an unsupported pair.
Manifest generate(const FixtureSpec& spec, const std::filesystem::path& root);

struct CaseStudy {
    std::filesystem::path pc_root;
    std::filesystem::path phone_root;
    std::filesystem::path secret_file;  ///< the original document the suspect leaked
    std::string secret_sha256;
    Manifest pc;
    Manifest phone;
    std::vector<std::string> pc_recents;  ///< in recency order
    /// Every planted instant, as (ISO, source path relative to its tree, device index).
    std::vector<std::tuple<std::string, std::string, std::size_t>> planted_instants;
};

/// Windows 7 PC and Android phone trees plus the secret document, under `out`.
CaseStudy generate_case_study(const std::filesystem::path& out, std::uint64_t seed = 5);
nlohmann::ordered_json to_json(const CaseStudy& c);

struct ClosureReport {
    std::vector<std::string> missing;  ///< expected items with no matching output
    std::vector<std::string> extra;    ///< outputs no expected item accounts for

    bool ok() const { return missing.empty() && extra.empty(); }
    std::string summary() const;
};

/// Matches a device's records and credentials one-to-one against the manifest.
ClosureReport check_closure(const Manifest& m, const PipelineResult& result, std::size_t device = 0);

}  // namespace cloudtrace::fixtures
