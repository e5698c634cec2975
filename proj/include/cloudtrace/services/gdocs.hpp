#pragma once

#include <cloudtrace/services/common.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Google Docs browser-cache and mobile-client artifacts, plus service-related browser history.
//
// Record kinds and attribute keys:
//   temp-file        temp_kind, sequence_n, extracted_as, extracted_text, harvested_titles, confidence, sha256
//   cache-page       extracted_as, extracted_text
//   cache-image      sha256, size_bytes, attribution
//   account-settings username, rememberme, password_present
//   local-document   text
//   doc-entry        account, title, doc_kind, time_order_violation    times: created, modified, last_sync
//   account-email    role, email, context
//   browser-visit    url, host, title                                   times: visited
//   browser-cookie   host, name, path                                   times: created, last_accessed, expiry
//   browser-url      record_type, url, host, timestamp_raw              times: last_accessed
namespace cloudtrace::gdocs {

enum class TempKind { doc_list, document_view_or_edit, spreadsheet, pdf_viewer_html, pdf_viewer_text, pdf_viewer_image };
std::string_view to_string(TempKind k);

struct TempClassification {
    TempKind kind;
    int sequence_n = 1;
};
/// Case-insensitive match of "<stem>[n].<ext>" against the Internet Explorer temporary-file names.
std::optional<TempClassification> classify_temp_file(std::string_view filename);

/// Positive only when the page mentions "docs", carries an id starting "goog_", and has the
/// <div dir="ltr"> signature inside the body. Returns the tag-stripped text after the signature.
std::optional<std::string> detect_gdocs_cache_html(std::string_view html);

/// Tag-stripped, entity-decoded text with whitespace runs collapsed.
std::string html_text(std::string_view html);
/// Anchor texts from a document-list page, in order.
std::vector<std::string> harvest_anchor_texts(std::string_view html);

struct IGoogDocsSettings {
    std::optional<std::string> username;
    std::optional<std::string> password;
    std::optional<bool> rememberme;
    std::optional<CredentialFinding> credential;
};
IGoogDocsSettings parse_igoogdocs_plist(const plist::Value& root, std::string source_path);

inline constexpr std::string_view kLocalFileElementId = "iGoogDocs-Formatted";
/// Inner text of the element whose id is iGoogDocs-Formatted. Throws ParseError when absent.
std::string extract_local_file_html(std::string_view html);

struct GDocsDocRecord {
    std::string account_email;
    std::string title;
    std::string kind;
    std::optional<NormalizedTimestamp> created;
    std::optional<NormalizedTimestamp> modified;
    std::optional<NormalizedTimestamp> last_sync;
    bool time_order_violation = false;  ///< created later than modified
};
/// Reads either a single flattened table or the account/entry pair joined on the account id.
std::vector<GDocsDocRecord> parse_doclist_db(const sqlite::Database& db);

struct SharedPrefsEmails {
    std::optional<std::string> admin_email;
    std::optional<std::string> latest_email;
};
/// Either document may be absent (nullptr).
SharedPrefsEmails parse_gdocs_shared_prefs(const std::string_view* drive_xml, const std::string_view* webview_xml);
/// First e-mail-shaped value in an Android shared-preferences map, preferring account/email keys.
std::optional<std::string> shared_prefs_email(std::string_view xml);

/// Service hosts used to filter browser stores.
const std::vector<std::string>& service_hosts();
/// Lower-cased host of a URL (tolerates "Visited: user@" prefixes); empty when none.
/// Lower-cased host of an absolute URL or of an index.dat "Cookie:user@host/path" entry; empty otherwise.
std::string url_host(std::string_view url);
bool is_service_host(std::string_view host);

struct HistoryResult {
    std::vector<ArtifactRecord> records;
    std::vector<Diagnostic> diagnostics;
};
/// Visits and cookies whose host belongs to a cloud service. Either store may be absent.
HistoryResult extract_firefox_history(const FileInput* places_db, const FileInput* cookies_db);

struct IndexDatUrl {
    std::string record_type;  ///< "URL ", "LEAK" or "REDR", trailing space trimmed
    std::string url;
    std::optional<std::uint64_t> timestamp_raw;
    std::optional<NormalizedTimestamp> last_accessed;  ///< set when the FILETIME value is plausible
};
/// Shallow scan for activity records; only service-host URLs are returned. Throws ParseError on bad magic.
std::vector<IndexDatUrl> carve_index_dat_urls(std::span<const std::uint8_t> bytes);

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out);

}  // namespace cloudtrace::gdocs
