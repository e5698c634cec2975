#pragma once

#include <cloudtrace/services/common.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Evernote note stores, thumbnail containers and application logs.
//
// Record kinds and attribute keys:
//   note            title, is_deleted, available, source, country, attachments, content_excerpt, index
//                   times: created, updated, deleted, last_accessed
//   attachment      file_name, mime, note_id                        times: created
//   local-file      file_name                                       times: last_accessed, last_modified
//   index-gap       missing_index, interpretation
//   thumbnail       index, offset, size_bytes, truncated, metadata_hex, sha256, extracted_as
//   app-event       event, account, target, connection, line, detail     times: logged
//   app-start       line                                            times: started
//   last-sync                                                       times: last_sync
//   account-profile username
//   note-content    content
namespace cloudtrace::evernote {

enum class StorePlatform { windows_exb, mac_sql };

struct NoteRecord {
    std::string title;
    std::optional<NormalizedTimestamp> created;
    std::optional<NormalizedTimestamp> updated;
    std::optional<NormalizedTimestamp> deleted;
    std::optional<NormalizedTimestamp> last_accessed;
    std::optional<double> latitude;
    std::optional<double> longitude;
    std::optional<std::string> source_platform;
    bool is_deleted = false;
    std::optional<bool> availability;
    std::vector<std::string> attachment_names;
    std::optional<std::int64_t> index_number;
    std::optional<std::string> content_excerpt;
    std::optional<std::string> country;
};

struct AttachmentRecord {
    std::string file_name;
    std::optional<std::string> mime;
    std::optional<std::int64_t> note_id;
    std::optional<NormalizedTimestamp> created;
};

struct NoteStore {
    std::vector<NoteRecord> notes;
    std::vector<AttachmentRecord> attachments;
};

/// Desktop note store. Column names resolve through a per-platform alias table; times are day ordinals.
/// Throws MissingTableError when no note table is present.
NoteStore parse_note_store(const sqlite::Database& db, StorePlatform platform);

struct CarvedImage {
    std::vector<std::uint8_t> bytes;
    std::size_t offset = 0;  ///< of the PNG signature within the container
    bool truncated = false;
    std::string metadata_hex;  ///< up to 16 opaque bytes preceding the signature
};

inline constexpr std::size_t kThumbnailHeaderBytes = 24;

/// PNG images following the 24-byte ENT0 header, in file order. Each complete image runs from its
/// signature through the IEND chunk CRC. Throws ParseError without the ENT0 magic.
std::vector<CarvedImage> carve_thumbnails(std::span<const std::uint8_t> container);

enum class LogDialect { windows_applog, mac_log, ios_applog };

enum class AppEventKind { session_open, auth_attempt, auth_failure, db_open, sync_start, sync_end, note_sync, update_check, other };
std::string_view to_string(AppEventKind k);

struct AppEvent {
    std::optional<NormalizedTimestamp> timestamp;
    AppEventKind kind = AppEventKind::other;
    std::optional<std::string> account;
    std::optional<std::string> target;      ///< database path or note title
    std::optional<std::string> connection;  ///< reachability status, e.g. WiFi or 3G
    std::string detail;                     ///< the source line, verbatim
    std::size_t line = 0;                   ///< 1-based
};

/// Windows/Mac: a "Log opened on ... (UTC+h:mm)" header dates the clock-only lines that follow and
/// supplies their offset. iOS: each line carries its own local date and time (ambiguous zone).
std::vector<AppEvent> parse_app_log(std::string_view text, LogDialect dialect);

/// First dated line of an enclipper log.
std::optional<NormalizedTimestamp> parse_enclipper_start(std::string_view text);

struct LocalFileRecord {
    std::optional<std::string> file_name;
    std::optional<NormalizedTimestamp> last_accessed;
    std::optional<NormalizedTimestamp> last_modified;
};

struct IosStore {
    std::vector<NoteRecord> notes;
    std::vector<LocalFileRecord> local_files;
    std::optional<NormalizedTimestamp> last_sync;
    std::vector<std::int64_t> missing_indices;
};

IosStore parse_ios_store(const sqlite::Database& main_db, const plist::Value* md);
std::optional<NormalizedTimestamp> parse_ios_md(const plist::Value& md);

/// Android Evernote.db: unix-millisecond times, availability from is_active, deletion from the deleted flag.
std::vector<NoteRecord> parse_android_db(const sqlite::Database& db);

/// Integers strictly between min and max that are absent from the list, ascending.
std::vector<std::int64_t> detect_index_gaps(std::span<const std::int64_t> index_numbers);

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out);

}  // namespace cloudtrace::evernote
