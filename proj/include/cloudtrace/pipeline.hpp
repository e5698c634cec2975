#pragma once

#include <cloudtrace/scan.hpp>
#include <cloudtrace/services/common.hpp>
#include <cloudtrace/types.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cloudtrace {

struct DeviceInput {
    std::filesystem::path root;
    std::optional<OsFamily> os_hint;
};

struct PipelineOptions {
    /// Applied to every ambiguous-timezone wall-clock value after parsing.
    std::optional<int> assumed_offset_minutes;
    bool parallel = true;
    /// Reference files whose hashes are looked for among hashed records.
    std::vector<std::filesystem::path> known_files;
};

struct DeviceScan {
    std::string root;  ///< as given by the caller
    DeviceProfile profile;
    std::vector<CandidateFile> candidates;
};

struct KnownFileMatch {
    std::string reference;  ///< reference file path as given
    std::string sha256;
    std::size_t record = 0;

    friend bool operator==(const KnownFileMatch&, const KnownFileMatch&) = default;
};

struct PipelineResult {
    std::vector<DeviceScan> devices;
    std::vector<ArtifactRecord> records;
    std::vector<CredentialFinding> credentials;
    std::vector<Diagnostic> diagnostics;
    std::vector<ExtractedBlob> blobs;
    std::vector<KnownFileMatch> known_file_matches;

    std::vector<OsFamily> device_families() const;
    bool has_skipped_files() const;
};

/// Reads one candidate and runs its handler. Read failures become skipped-file diagnostics and
/// handler exceptions become parse warnings, so the call never throws.
ParseOutput parse_candidate(const std::filesystem::path& tree_root, const CandidateFile& c);

/// Reference implementation: candidates parsed one after another, outputs concatenated in order.
ParseOutput parse_candidates_serial(const std::filesystem::path& tree_root, const std::vector<CandidateFile>& candidates);
/// Same result as the serial form; candidates are parsed on OpenMP threads and merged in candidate order.
ParseOutput parse_candidates_parallel(const std::filesystem::path& tree_root, const std::vector<CandidateFile>& candidates);

/// Detect, scan and parse every device tree. Throws LayoutError for an unrecognizable tree.
PipelineResult run_pipeline(const std::vector<DeviceInput>& devices, const PipelineOptions& options = {});

}  // namespace cloudtrace
