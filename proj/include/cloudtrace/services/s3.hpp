#pragma once

#include <cloudtrace/services/common.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Amazon S3 client traces.
//
// Record kinds and attribute keys:
//   bucket-api-call            owner, bucket, remote_ip, requester, request_id, operation, key, request_uri,
//                              http_status, error_code, bytes_sent, object_size, total_ms, turnaround_ms,
//                              referrer, user_agent, raw_tail, line          times: requested
//   file-downloaded-and-opened file_name, office_document
//   account-profile            display_name, access_key_id, trailing_flag
//   file-downloaded            bucket, local_path, etag, size_bytes          times: downloaded
//   bucket-config              bucket, remote_dir, access_key_id, local_dir, decode_failed, non_utf8
//                              times: last_sync
namespace cloudtrace::s3 {

struct BucketLogEntry {
    std::string owner_canonical_id;
    std::string bucket;
    NormalizedTimestamp time;
    std::optional<std::string> remote_ip;
    std::optional<std::string> requester_canonical_id;
    std::optional<std::string> request_id;
    std::string operation;
    std::optional<std::string> key;
    std::optional<std::string> request_uri;
    int http_status = 0;
    std::optional<std::string> error_code;
    std::optional<std::int64_t> bytes_sent;
    std::optional<std::int64_t> object_size;
    std::optional<std::int64_t> total_ms;
    std::optional<std::int64_t> turnaround_ms;
    std::optional<std::string> referrer;
    std::optional<std::string> user_agent;
    std::string raw_tail;  ///< fields after the user agent, verbatim

    friend bool operator==(const BucketLogEntry&, const BucketLogEntry&) = default;
};

/// Accepts the canonical access-log layout and the fully bracketed rendering. Throws ParseError
/// carrying the raw line when fewer than ten fields (through the status) are present.
BucketLogEntry parse_bucket_log_line(std::string_view line);
/// Canonical layout: bracketed time, quoted uri/referrer/user-agent, "-" for absent fields.
std::string format_bucket_log_line(const BucketLogEntry& e);

struct LnkTrace {
    std::string file_name;
    bool office_document = false;
};
/// "<F> on s3.amazonaws.com.lnk" -> F.
std::optional<LnkTrace> detect_lnk_trace(std::string_view filename);

struct S3Account {
    std::string display_name;
    std::string access_key_id;
    std::string secret_access_key;
    std::string trailing_flag;
    std::string source_path;
};
struct IawsAccounts {
    std::vector<S3Account> accounts;
    std::vector<std::string> malformed;  ///< ACCOUNTS strings with fewer than four segments, verbatim
};
inline constexpr std::string_view kAccountDelimiter = "<$$$>";
IawsAccounts parse_iaws_plist(const plist::Value& root, std::string source_path);

struct DownloadRecord {
    std::string local_path;
    std::string s3_key;
    std::string bucket;
    std::optional<std::int64_t> size_bytes;
    std::optional<std::string> etag;
    std::optional<NormalizedTimestamp> downloaded;
};
std::vector<DownloadRecord> parse_iaws_db(const sqlite::Database& db);

struct DecodedValue {
    std::string text;  ///< decoded UTF-8, hex when not UTF-8, raw when not base64
    bool decode_failed = false;
    bool non_utf8 = false;
};
struct BucketConfig {
    std::string bucket;
    std::optional<DecodedValue> remote_dir;
    std::optional<DecodedValue> access_key_id;
    std::optional<DecodedValue> secret_key;
    std::optional<DecodedValue> last_sync_raw;
    std::optional<NormalizedTimestamp> last_sync;
    std::optional<DecodedValue> local_dir;
};
/// Buckets in order of first appearance.
std::vector<BucketConfig> parse_s3anywhere_xml(std::string_view document);

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out);

}  // namespace cloudtrace::s3
