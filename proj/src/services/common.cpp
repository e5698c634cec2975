#include <cloudtrace/services/common.hpp>
#include <cloudtrace/services/dropbox.hpp>
#include <cloudtrace/services/evernote.hpp>
#include <cloudtrace/services/gdocs.hpp>
#include <cloudtrace/services/s3.hpp>
#include <cloudtrace/text.hpp>

#include <iterator>

namespace cloudtrace {

void ParseOutput::append(ParseOutput&& other) {
    const auto move_all = [](auto& dst, auto& src) {
        dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
    };
    move_all(records, other.records);
    move_all(credentials, other.credentials);
    move_all(diagnostics, other.diagnostics);
    move_all(blobs, other.blobs);
}

namespace services {

ArtifactRecord make_record(Service service, const FileInput& in, std::string kind) {
    ArtifactRecord r;
    r.service = service;
    r.device = in.device;
    r.source_path = in.source_path;
    r.kind = std::move(kind);
    return r;
}

Diagnostic warning(const FileInput& in, std::string message) {
    return {DiagnosticKind::parse_warning, in.device, in.source_path, std::move(message)};
}

NormalizedTimestamp plist_time(const plist::Date& d) {
    if (!d.text.empty()) return parse_iso8601(d.text);
    return normalize_apple_absolute(d.apple_seconds, text::format_double(d.apple_seconds));
}

std::optional<std::string> column_text(const sqlite::Row& row, std::string_view column) {
    if (!row.find(column) || row.is_null(column)) return std::nullopt;
    return row.text(column);
}

bool dispatch(std::string_view parser, const FileInput& in, ParseOutput& out) {
    const auto owned = [&](std::string_view prefix) { return parser.rfind(prefix, 0) == 0; };
    if (owned("dropbox.")) return dropbox::handle(parser, in, out);
    if (owned("evernote.")) return evernote::handle(parser, in, out);
    if (owned("s3.")) return s3::handle(parser, in, out);
    if (owned("gdocs.") || owned("browser.")) return gdocs::handle(parser, in, out);
    return false;
}

}  // namespace services
}  // namespace cloudtrace
