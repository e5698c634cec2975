#pragma once

#include <cloudtrace/plist.hpp>
#include <cloudtrace/sqlite_reader.hpp>
#include <cloudtrace/types.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrace {

/// One candidate file as handed to a service handler.
struct FileInput {
    std::string source_path;
    std::size_t device = 0;
    ContainerKind kind = ContainerKind::unknown;
    std::vector<std::uint8_t> bytes;
};

/// Everything a handler learned from one file.
struct ParseOutput {
    std::vector<ArtifactRecord> records;
    std::vector<CredentialFinding> credentials;
    std::vector<Diagnostic> diagnostics;
    std::vector<ExtractedBlob> blobs;

    void append(ParseOutput&& other);
    bool empty() const { return records.empty() && credentials.empty() && diagnostics.empty() && blobs.empty(); }
};

namespace services {

/// Record stamped with the input's service, device and path.
ArtifactRecord make_record(Service service, const FileInput& in, std::string kind);
Diagnostic warning(const FileInput& in, std::string message);

/// XML plist dates keep their ISO text; binary plist dates are apple-absolute seconds.
NormalizedTimestamp plist_time(const plist::Date& d);

/// Verbatim text of a column as stored, or nullopt for NULL/absent.
std::optional<std::string> column_text(const sqlite::Row& row, std::string_view column);

/// Handler ids are "<service>.<name>"; returns false when the id is not owned by any service.
bool dispatch(std::string_view parser, const FileInput& in, ParseOutput& out);

}  // namespace services
}  // namespace cloudtrace
