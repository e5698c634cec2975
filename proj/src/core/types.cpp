#include <cloudtrace/error.hpp>
#include <cloudtrace/types.hpp>

#include <array>

namespace cloudtrace {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view name) {
    for (const auto& [value, label] : table)
        if (label == name) return value;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view label_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [v, label] : table)
        if (v == value) return label;
    return "unknown";
}

constexpr std::array<std::pair<Service, std::string_view>, 5> kServices{{
    {Service::amazon_s3, "amazon-s3"},
    {Service::dropbox, "dropbox"},
    {Service::evernote, "evernote"},
    {Service::google_docs, "google-docs"},
    {Service::browser, "browser"},
}};

constexpr std::array<std::pair<OsFamily, std::string_view>, 5> kFamilies{{
    {OsFamily::windows_xp, "windows-xp"},
    {OsFamily::windows_vista7, "windows-vista7"},
    {OsFamily::mac, "mac"},
    {OsFamily::ios_app_sandbox, "ios-app-sandbox"},
    {OsFamily::android_data, "android-data"},
}};

constexpr std::array<std::pair<ContainerKind, std::string_view>, 10> kContainers{{
    {ContainerKind::sqlite3, "sqlite3"},
    {ContainerKind::binary_plist, "binary-plist"},
    {ContainerKind::xml_plist, "xml-plist"},
    {ContainerKind::generic_xml, "generic-xml"},
    {ContainerKind::png, "png"},
    {ContainerKind::html, "html"},
    {ContainerKind::lnk, "lnk"},
    {ContainerKind::index_dat, "index-dat"},
    {ContainerKind::text, "text"},
    {ContainerKind::unknown, "unknown"},
}};

constexpr std::array<std::pair<SecretKind, std::string_view>, 4> kSecrets{{
    {SecretKind::none, "none"},
    {SecretKind::password, "password"},
    {SecretKind::access_key_pair, "access-key-pair"},
    {SecretKind::portable_session_file, "portable-session-file"},
}};

}  // namespace

std::string_view to_string(Service s) { return label_of(kServices, s); }
std::string_view to_string(OsFamily f) { return label_of(kFamilies, f); }
std::string_view to_string(ContainerKind k) { return label_of(kContainers, k); }
std::string_view to_string(SecretKind k) { return label_of(kSecrets, k); }

std::optional<Service> parse_service(std::string_view s) {
    if (s == "s3") return Service::amazon_s3;
    if (s == "gdocs") return Service::google_docs;
    return lookup(kServices, s);
}

std::optional<OsFamily> parse_os_family(std::string_view s) {
    if (s == "ios") return OsFamily::ios_app_sandbox;
    if (s == "android") return OsFamily::android_data;
    if (s == "xp") return OsFamily::windows_xp;
    if (s == "windows" || s == "vista7" || s == "win7") return OsFamily::windows_vista7;
    return lookup(kFamilies, s);
}

void AttributeMap::set(std::string key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string_view> AttributeMap::get(std::string_view key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return std::string_view{v};
    return std::nullopt;
}

const NormalizedTimestamp* ArtifactRecord::time(std::string_view label) const {
    for (const auto& t : timestamps)
        if (t.label == label) return &t.value;
    return nullptr;
}

bool valid_geo(double latitude, double longitude) {
    return latitude >= -90.0 && latitude <= 90.0 && longitude >= -180.0 && longitude <= 180.0;
}

CredentialFinding CredentialFinding::account_only(Service service, std::string account, std::string source_path) {
    CredentialFinding f;
    f.service = service;
    f.account_id = std::move(account);
    f.source_path = std::move(source_path);
    return f;
}

MissingTableError::MissingTableError(const std::string& table, std::vector<std::string> available)
    : SqliteError([&] {
          std::string msg = "no table named '" + table + "'; available tables:";
          for (const auto& t : available) msg += " " + t;
          return msg;
      }()),
      available_(std::move(available)) {}

}  // namespace cloudtrace
