#pragma once

#include <cloudtrace/catalog.hpp>
#include <cloudtrace/types.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrace {

/// Classifies bytes by magic prefix, then XML/HTML/text heuristics. Total: empty input is `unknown`.
ContainerKind identify_container(std::span<const std::uint8_t> bytes);
/// Reads the leading bytes of a file and classifies them. Throws Error when the file is unreadable.
ContainerKind identify_file(const std::filesystem::path& file);
/// Whether content of kind `actual` can satisfy a location that expects `expected`.
bool kind_compatible(ContainerKind expected, ContainerKind actual);

/// Throws LayoutError("unrecognized device layout") when no marker directory is present. With a hint, the
/// hinted family's profile is used and its markers must exist.
DeviceProfile detect_device_layout(const std::filesystem::path& tree_root, std::optional<OsFamily> hint = std::nullopt);

/// Component-wise glob: '*' matches within one path component, a "**" component matches zero or more.
bool glob_match(std::string_view pattern, std::string_view path, bool case_insensitive);

struct CandidateFile {
    std::string path;  ///< relative to the tree root, '/'-separated
    const catalog::CatalogEntry* entry = nullptr;
    ContainerKind kind = ContainerKind::unknown;
    std::size_t device = 0;

    friend bool operator==(const CandidateFile&, const CandidateFile&) = default;
};

struct ScanResult {
    std::vector<CandidateFile> candidates;  ///< sorted by path, then catalog order
    std::vector<Diagnostic> diagnostics;
};

/// Walks the tree without following symlinks and matches every regular file against the expanded catalog.
ScanResult scan(const std::filesystem::path& tree_root, const DeviceProfile& profile, std::size_t device = 0);

}  // namespace cloudtrace
