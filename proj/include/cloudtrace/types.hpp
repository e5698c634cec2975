#pragma once

#include <cloudtrace/timestamp.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cloudtrace {

enum class Service { amazon_s3, dropbox, evernote, google_docs, browser };

enum class OsFamily { windows_xp, windows_vista7, mac, ios_app_sandbox, android_data };

enum class ContainerKind { sqlite3, binary_plist, xml_plist, generic_xml, png, html, lnk, index_dat, text, unknown };

std::string_view to_string(Service s);
std::string_view to_string(OsFamily f);
std::string_view to_string(ContainerKind k);
std::optional<Service> parse_service(std::string_view s);
std::optional<OsFamily> parse_os_family(std::string_view s);

inline bool is_windows(OsFamily f) { return f == OsFamily::windows_xp || f == OsFamily::windows_vista7; }

/// Insertion-ordered string map with unique keys.
class AttributeMap {
public:
    using Entry = std::pair<std::string, std::string>;

    void set(std::string key, std::string value);
    std::optional<std::string_view> get(std::string_view key) const;
    bool contains(std::string_view key) const { return get(key).has_value(); }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    friend bool operator==(const AttributeMap&, const AttributeMap&) = default;

private:
    std::vector<Entry> entries_;
};

struct LabeledTimestamp {
    std::string label;
    NormalizedTimestamp value;

    friend bool operator==(const LabeledTimestamp&, const LabeledTimestamp&) = default;
};

struct GeoPoint {
    double latitude = 0;
    double longitude = 0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// True when both coordinates are inside their valid ranges.
bool valid_geo(double latitude, double longitude);

struct ArtifactRecord {
    Service service = Service::browser;
    std::size_t device = 0;  ///< index into the scan's device list
    std::string source_path;  ///< '/'-separated, relative to the device tree root
    std::string kind;
    std::optional<std::string> subject;
    std::vector<LabeledTimestamp> timestamps;
    AttributeMap attributes;
    std::optional<GeoPoint> geo;

    void add_time(std::string label, NormalizedTimestamp ts) {
        timestamps.push_back({std::move(label), std::move(ts)});
    }
    const NormalizedTimestamp* time(std::string_view label) const;

    friend bool operator==(const ArtifactRecord&, const ArtifactRecord&) = default;
};

enum class SecretKind { none, password, access_key_pair, portable_session_file };
std::string_view to_string(SecretKind k);

struct CredentialFinding {
    Service service = Service::browser;
    std::string account_id;
    SecretKind secret_kind = SecretKind::none;
    std::optional<std::string> secret_value;
    bool enables_remote_access = false;
    std::string source_path;
    std::size_t device = 0;

    /// Account identifier with no secret material.
    static CredentialFinding account_only(Service service, std::string account, std::string source_path);

    friend bool operator==(const CredentialFinding&, const CredentialFinding&) = default;
};

struct DeviceProfile {
    OsFamily os_family = OsFamily::windows_vista7;
    std::vector<std::string> profile_roots;  ///< relative to the tree root; "" is the root itself
    std::vector<std::string> evidence;

    friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

enum class DiagnosticKind { skipped_file, parse_warning };

struct Diagnostic {
    DiagnosticKind kind = DiagnosticKind::parse_warning;
    std::size_t device = 0;
    std::string source_path;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Bytes pulled out of a container (carved thumbnail, cached page text) and written beside the report.
struct ExtractedBlob {
    std::string file_name;
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const ExtractedBlob&, const ExtractedBlob&) = default;
};

}  // namespace cloudtrace
