#pragma once

#include <cloudtrace/types.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrace::catalog {

enum class Platform { windows, mac, ios, android };
std::string_view to_string(Platform p);
Platform platform_of(OsFamily f);

/// One artifact location. Service rows and browser-log rows share this shape.
struct CatalogEntry {
    std::string id;
    std::string source;  ///< "service-windows".."service-android", "browser-ie", "browser-firefox"
    Service service = Service::browser;
    Platform platform = Platform::windows;
    /// '/'-separated, placeholders kept: %UserProfile%, %Profile%, [user name], [userID], [n], <Random>, ...
    /// For Windows rows this is the Vista/7 column.
    std::string path_template;
    std::optional<std::string> xp_path_template;  ///< Windows XP column; absent when not applicable
    bool vista7 = true;                           ///< false for XP-only rows
    std::string file_name;                        ///< as listed in the source table
    ContainerKind file_kind = ContainerKind::unknown;
    std::string details;  ///< description column, verbatim
    std::string parser;   ///< handler id; empty for inventory-only locations
    /// Wildcard locations that only count when the content has the expected kind (cache payloads).
    bool requires_kind_match = false;

    bool is_service_row() const { return source.rfind("service-", 0) == 0; }
    bool applies_to(OsFamily family) const;
    const std::string& template_for(OsFamily family) const;
};

/// Per-service artifact locations for the four platforms, in table order.
const std::vector<CatalogEntry>& service_entries();
/// Browser log locations (Internet Explorer and Firefox tables).
const std::vector<CatalogEntry>& browser_entries();
/// Service rows followed by browser rows.
const std::vector<const CatalogEntry*>& all_entries();

/// Row counts from a manual audit of the published location tables.
inline constexpr std::size_t kWindowsServiceRows = 14;
inline constexpr std::size_t kMacServiceRows = 8;
inline constexpr std::size_t kIosServiceRows = 11;
inline constexpr std::size_t kAndroidServiceRows = 11;
inline constexpr std::size_t kServiceRowTotal = kWindowsServiceRows + kMacServiceRows + kIosServiceRows + kAndroidServiceRows;

struct ExpandedPattern {
    std::string glob;  ///< '*' matches within one component, '**' spans components
    const CatalogEntry* entry = nullptr;
    std::string profile_root;
};

/// Replaces placeholders with the profile's roots and wildcards. Only entries for the
/// profile's OS family are emitted.
std::vector<ExpandedPattern> expand_catalog(const DeviceProfile& profile);
/// Placeholder substitution for one template and root.
std::string expand_template(std::string_view path_template, std::string_view root, OsFamily family);

struct CatalogFilter {
    std::optional<Service> service;
    std::optional<Platform> platform;
};
/// JSON document: schema_version, entries (service rows), browser_locations.
std::string catalog_json(const CatalogFilter& filter = {});

}  // namespace cloudtrace::catalog
