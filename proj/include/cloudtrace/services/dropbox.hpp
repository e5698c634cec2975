#pragma once

#include <cloudtrace/services/common.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Dropbox client artifacts.
//
// Record kinds and attribute keys:
//   account-profile   email, dropbox_path, display_name, country
//   recent-file       rank, server_id, path
//   file-synced       server_path, local_filename       times: modified, created
//   account-login     email                              times: first_login
//   file-viewed       path                               times: viewed
//   file-uploaded     path | display_name, size, size_bytes   times: uploaded | modified
//   log-event         line, component, message           times: logged
//   file-present      size_bytes, sha256
namespace cloudtrace::dropbox {

struct RecentEntry {
    std::optional<std::string> server_id;
    std::string path;

    friend bool operator==(const RecentEntry&, const RecentEntry&) = default;
};

struct DropboxProfile {
    std::optional<std::string> email;
    std::optional<std::string> dropbox_path;
    std::vector<RecentEntry> recent_entries;  ///< index 0 is the most recent; at most 5
    std::string source_path;
};

struct ConfigResult {
    DropboxProfile profile;
    CredentialFinding credential;
};

inline constexpr std::size_t kMaxRecentEntries = 5;

/// Throws MissingTableError when no key/value config table exists.
ConfigResult parse_config_db(const sqlite::Database& db, std::string source_path);
/// Tokens of the form V<digits>./<path> in blob order. Tolerates both the line-oriented
/// serialization and a flattened single-line rendering of it.
std::vector<RecentEntry> extract_recent_list(std::string_view blob);

struct SyncedFileRecord {
    std::string server_path;
    std::string local_filename;
    NormalizedTimestamp modified;
    NormalizedTimestamp created;
};
/// Throws MissingColumnError naming the absent column.
std::vector<SyncedFileRecord> parse_filecache_db(const sqlite::Database& db);

struct IosAccount {
    std::optional<std::string> email;
    std::optional<NormalizedTimestamp> first_login;
};
IosAccount parse_ios_plist(const plist::Value& root);

struct ActivityResult {
    std::vector<ArtifactRecord> records;
    std::vector<Diagnostic> diagnostics;
};
/// Either store may be absent; a store without the expected table is skipped with a diagnostic.
ActivityResult parse_ios_activity(const FileInput* viewed, const FileInput* uploads);

struct AndroidProfile {
    std::optional<std::string> display_name;
    std::optional<std::string> country;
    std::optional<std::string> email;
};
struct AndroidStores {
    AndroidProfile profile;
    std::vector<ArtifactRecord> records;
};
/// Each store is searched for both the key/value profile table and the file metadata table,
/// so the result does not depend on which file holds which.
AndroidStores parse_android_stores(const FileInput* prefs_db, const FileInput* db_db);

/// "47.9KB" -> 49050 (1 KB = 1024 bytes, nearest integer). nullopt for unrecognized text.
std::optional<std::int64_t> parse_human_size(std::string_view text);

/// One record per input line, in order.
std::vector<ArtifactRecord> parse_android_log(std::string_view text, const FileInput& in);

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out);

}  // namespace cloudtrace::dropbox
