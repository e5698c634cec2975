#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/services/s3.hpp>
#include <cloudtrace/text.hpp>
#include <cloudtrace/xml.hpp>

#include <array>
#include <regex>

namespace cloudtrace::s3 {
namespace {

using services::column_text;
using services::make_record;
using services::warning;

struct Token {
    std::string value;
    std::size_t begin = 0;
};

// Splits on spaces; "[...]" and "\"...\"" group, and a bracketed token whose content is quoted
// (the fully bracketed rendering) yields the quoted content. Backslash escapes inside quotes are kept verbatim.
std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        if (i >= line.size()) break;
        Token t;
        t.begin = i;
        if (line[i] == '[') {
            const std::size_t close = line.find(']', i + 1);
            if (close == std::string_view::npos) throw ParseError("bucket log: unterminated '[' in line: " + std::string(line));
            std::string_view inner = line.substr(i + 1, close - i - 1);
            if (inner.size() >= 2 && inner.front() == '"' && inner.back() == '"') inner = inner.substr(1, inner.size() - 2);
            t.value = std::string(inner);
            i = close + 1;
        } else if (line[i] == '"') {
            std::size_t j = i + 1;
            while (j < line.size() && line[j] != '"') j += line[j] == '\\' ? 2 : 1;
            if (j >= line.size()) throw ParseError("bucket log: unterminated quote in line: " + std::string(line));
            t.value = std::string(line.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            const std::size_t j = std::min(line.find(' ', i), line.size());
            t.value = std::string(line.substr(i, j - i));
            i = j;
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::optional<std::string> opt(const std::string& v) {
    if (v == "-") return std::nullopt;
    return v;
}

std::optional<std::int64_t> opt_int(const std::string& v) {
    if (v == "-") return std::nullopt;
    return text::parse_int(v);
}

std::string bare(const std::optional<std::string>& v) {
    if (!v) return "-";
    if (v->empty() || v->find(' ') != std::string::npos || v->front() == '[' || v->front() == '"') return "[" + *v + "]";
    return *v;
}

std::string quoted(const std::optional<std::string>& v) { return "\"" + v.value_or("-") + "\""; }

std::string number(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : "-"; }

}  // namespace

BucketLogEntry parse_bucket_log_line(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    const auto tokens = tokenize(line);
    constexpr std::size_t kMinFields = 10;
    if (tokens.size() < kMinFields)
        throw ParseError("bucket log: malformed line (" + std::to_string(tokens.size()) + " fields): " + std::string(line));
    const auto field = [&](std::size_t i) -> const std::string& {
        static const std::string dash = "-";
        return i < tokens.size() ? tokens[i].value : dash;
    };
    BucketLogEntry e;
    e.owner_canonical_id = field(0);
    e.bucket = field(1);
    e.time = parse_date_text(field(2), DateDialect::apache_log);
    e.remote_ip = opt(field(3));
    e.requester_canonical_id = opt(field(4));
    e.request_id = opt(field(5));
    e.operation = field(6);
    e.key = opt(field(7));
    e.request_uri = opt(field(8));
    const auto status = text::parse_int(field(9));
    if (!status || *status < 100 || *status > 599)
        throw ParseError("bucket log: invalid HTTP status '" + field(9) + "' in line: " + std::string(line));
    e.http_status = static_cast<int>(*status);
    e.error_code = opt(field(10));
    e.bytes_sent = opt_int(field(11));
    e.object_size = opt_int(field(12));
    e.total_ms = opt_int(field(13));
    e.turnaround_ms = opt_int(field(14));
    e.referrer = opt(field(15));
    e.user_agent = opt(field(16));
    if (tokens.size() > 17) e.raw_tail = std::string(line.substr(tokens[17].begin));
    return e;
}

std::string format_bucket_log_line(const BucketLogEntry& e) {
    std::string s;
    s += bare(e.owner_canonical_id) + ' ' + bare(e.bucket) + " [" + e.time.raw_value + "] ";
    s += bare(e.remote_ip) + ' ' + bare(e.requester_canonical_id) + ' ' + bare(e.request_id) + ' ';
    s += bare(e.operation) + ' ' + bare(e.key) + ' ' + quoted(e.request_uri) + ' ' + std::to_string(e.http_status) + ' ';
    s += bare(e.error_code) + ' ' + number(e.bytes_sent) + ' ' + number(e.object_size) + ' ' + number(e.total_ms) + ' ';
    s += number(e.turnaround_ms) + ' ' + quoted(e.referrer) + ' ' + quoted(e.user_agent);
    if (!e.raw_tail.empty()) s += ' ' + e.raw_tail;
    return s;
}

std::optional<LnkTrace> detect_lnk_trace(std::string_view filename) {
    constexpr std::string_view suffix = " on s3.amazonaws.com.lnk";
    if (filename.size() <= suffix.size() || !text::iends_with(filename, suffix)) return std::nullopt;
    LnkTrace t;
    t.file_name = std::string(filename.substr(0, filename.size() - suffix.size()));
    static constexpr std::array<std::string_view, 6> office = {".ppt", ".pptx", ".doc", ".docx", ".xls", ".xlsx"};
    for (auto ext : office) {
        if (text::iends_with(t.file_name, ext)) t.office_document = true;
    }
    return t;
}

IawsAccounts parse_iaws_plist(const plist::Value& root, std::string source_path) {
    IawsAccounts out;
    const auto* accounts = root.find("ACCOUNTS");
    if (!accounts || !accounts->array()) return out;
    for (const auto& item : *accounts->array()) {
        const auto s = item.string();
        if (!s) continue;
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t at; (at = s->find(kAccountDelimiter, start)) != std::string::npos; start = at + kAccountDelimiter.size())
            parts.emplace_back(text::trim(std::string_view(*s).substr(start, at - start)));
        parts.emplace_back(text::trim(std::string_view(*s).substr(start)));
        if (parts.size() < 4 || parts[0].empty() || parts[1].empty() || parts[2].empty()) {
            out.malformed.push_back(*s);
            continue;
        }
        out.accounts.push_back({parts[0], parts[1], parts[2], parts[3], source_path});
    }
    return out;
}

std::vector<DownloadRecord> parse_iaws_db(const sqlite::Database& db) {
    const auto* t = db.find_table("DOWNLOADS");
    if (!t) t = db.find_table_with_columns({"FILENAME", "S3KEY", "S3BUCKET"});
    if (!t) throw MissingTableError("DOWNLOADS", db.table_names());
    std::vector<DownloadRecord> out;
    for (const auto& row : db.read_table(t->name)) {
        DownloadRecord d;
        d.local_path = column_text(row, "FILENAME").value_or("");
        d.s3_key = column_text(row, "S3KEY").value_or("");
        d.bucket = column_text(row, "S3BUCKET").value_or("");
        if (row.find("FILE_SIZE") && !row.is_null("FILE_SIZE")) d.size_bytes = row.integer("FILE_SIZE");
        // The local copy is named after the object's eTag.
        const std::string_view base = text::basename(d.local_path);
        if (const auto dot = base.rfind('.'); dot != std::string_view::npos && dot > 0) d.etag = std::string(base.substr(0, dot));
        else if (!base.empty()) d.etag = std::string(base);
        if (const auto when = column_text(row, "DOWNLOAD_DATE")) d.downloaded = parse_date_text(*when, DateDialect::us_short);
        out.push_back(std::move(d));
    }
    return out;
}

namespace {

DecodedValue decode_value(std::string_view element_text) {
    DecodedValue v;
    const auto raw = text::trim(element_text);
    const auto bytes = codec::base64_decode(raw);
    if (!bytes) {
        v.text = std::string(raw);
        v.decode_failed = true;
        return v;
    }
    const std::string_view decoded = text::as_chars(*bytes);
    if (text::is_valid_utf8(decoded)) {
        v.text = std::string(decoded);
    } else {
        v.text = text::to_hex(*bytes);
        v.non_utf8 = true;
    }
    return v;
}

void collect_strings(const xml::Element& e, std::vector<const xml::Element*>& out) {
    if (e.name == "string" && e.attribute("name")) out.push_back(&e);
    for (const auto& c : e.children) collect_strings(c, out);
}

}  // namespace

std::vector<BucketConfig> parse_s3anywhere_xml(std::string_view document) {
    std::vector<BucketConfig> out;
    if (text::trim(document).empty()) return out;
    const auto root = xml::parse(document);
    std::vector<const xml::Element*> strings;
    collect_strings(root, strings);
    static const std::regex key_re(R"(^s3\.(remotedir|keyid|key|sync\.last\.date|sync\.localdir)\[(.*)\]$)");
    for (const auto* s : strings) {
        const std::string name(*s->attribute("name"));
        std::smatch m;
        if (!std::regex_match(name, m, key_re)) continue;
        const std::string bucket = m[2].str();
        auto it = std::find_if(out.begin(), out.end(), [&](const BucketConfig& b) { return b.bucket == bucket; });
        if (it == out.end()) {
            out.push_back(BucketConfig{});
            out.back().bucket = bucket;
            it = out.end() - 1;
        }
        const std::string field = m[1].str();
        DecodedValue v = decode_value(s->text);
        if (field == "remotedir") it->remote_dir = std::move(v);
        else if (field == "keyid") it->access_key_id = std::move(v);
        else if (field == "key") it->secret_key = std::move(v);
        else if (field == "sync.localdir") it->local_dir = std::move(v);
        else {
            if (!v.decode_failed && !v.non_utf8) {
                if (const auto n = text::parse_int(v.text)) {
                    // Second counts stay below 1e11 until the year 5138; larger values are milliseconds.
                    it->last_sync = *n >= 100'000'000'000 ? normalize_unix(*n, UnixUnit::milliseconds, v.text)
                                                          : normalize_unix(*n, UnixUnit::seconds, v.text);
                }
            }
            it->last_sync_raw = std::move(v);
        }
    }
    return out;
}

namespace {

void emit_bucket_log(const FileInput& in, ParseOutput& out) {
    const auto lines = text::split_lines(text::as_chars(in.bytes));
    ParseOutput local;
    std::size_t parsed = 0;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (text::trim(lines[n]).empty()) continue;
        try {
            const auto e = parse_bucket_log_line(lines[n]);
            ++parsed;
            auto r = make_record(Service::amazon_s3, in, "bucket-api-call");
            r.subject = e.key.value_or(e.bucket);
            auto& a = r.attributes;
            a.set("owner", e.owner_canonical_id);
            a.set("bucket", e.bucket);
            const auto put = [&](const char* k, const auto& v) {
                if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::optional<std::int64_t>>) {
                    if (v) a.set(k, std::to_string(*v));
                } else {
                    if (v) a.set(k, *v);
                }
            };
            put("remote_ip", e.remote_ip);
            put("requester", e.requester_canonical_id);
            put("request_id", e.request_id);
            a.set("operation", e.operation);
            put("key", e.key);
            put("request_uri", e.request_uri);
            a.set("http_status", std::to_string(e.http_status));
            put("error_code", e.error_code);
            put("bytes_sent", e.bytes_sent);
            put("object_size", e.object_size);
            put("total_ms", e.total_ms);
            put("turnaround_ms", e.turnaround_ms);
            put("referrer", e.referrer);
            put("user_agent", e.user_agent);
            if (!e.raw_tail.empty()) a.set("raw_tail", e.raw_tail);
            a.set("line", std::to_string(n + 1));
            r.add_time("requested", e.time);
            local.records.push_back(std::move(r));
        } catch (const ParseError& err) {
            local.diagnostics.push_back(warning(in, "line " + std::to_string(n + 1) + ": " + err.what()));
        }
    }
    // Other cached text files share this location; only report on files that are bucket logs.
    if (parsed > 0) out.append(std::move(local));
}

void emit_lnk(const FileInput& in, ParseOutput& out) {
    const auto trace = detect_lnk_trace(text::basename(in.source_path));
    if (!trace) return;
    auto r = make_record(Service::amazon_s3, in, "file-downloaded-and-opened");
    r.subject = trace->file_name;
    r.attributes.set("file_name", trace->file_name);
    r.attributes.set("office_document", trace->office_document ? "true" : "false");
    out.records.push_back(std::move(r));
}

void emit_iaws_plist(const FileInput& in, ParseOutput& out) {
    const auto parsed = parse_iaws_plist(plist::parse(in.bytes), in.source_path);
    for (const auto& acc : parsed.accounts) {
        auto r = make_record(Service::amazon_s3, in, "account-profile");
        r.subject = acc.display_name;
        r.attributes.set("display_name", acc.display_name);
        r.attributes.set("access_key_id", acc.access_key_id);
        r.attributes.set("trailing_flag", acc.trailing_flag);
        out.records.push_back(std::move(r));
        CredentialFinding c;
        c.service = Service::amazon_s3;
        c.account_id = acc.access_key_id;
        c.secret_kind = SecretKind::access_key_pair;
        c.secret_value = acc.secret_access_key;
        c.enables_remote_access = true;
        c.source_path = in.source_path;
        c.device = in.device;
        out.credentials.push_back(std::move(c));
    }
    for (const auto& bad : parsed.malformed) out.diagnostics.push_back(warning(in, "malformed ACCOUNTS entry: " + bad));
}

void emit_iaws_db(const FileInput& in, ParseOutput& out) {
    for (const auto& d : parse_iaws_db(sqlite::Database(in.bytes))) {
        auto r = make_record(Service::amazon_s3, in, "file-downloaded");
        r.subject = d.s3_key;
        r.attributes.set("bucket", d.bucket);
        r.attributes.set("local_path", d.local_path);
        if (d.etag) r.attributes.set("etag", *d.etag);
        if (d.size_bytes) r.attributes.set("size_bytes", std::to_string(*d.size_bytes));
        if (d.downloaded) r.add_time("downloaded", *d.downloaded);
        out.records.push_back(std::move(r));
    }
}

void emit_s3anywhere(const FileInput& in, ParseOutput& out) {
    for (const auto& b : parse_s3anywhere_xml(text::as_chars(in.bytes))) {
        auto r = make_record(Service::amazon_s3, in, "bucket-config");
        r.subject = b.bucket;
        r.attributes.set("bucket", b.bucket);
        std::vector<std::string> failed, hexed;
        const auto put = [&](const char* k, const std::optional<DecodedValue>& v) {
            if (!v) return;
            r.attributes.set(k, v->text);
            if (v->decode_failed) failed.emplace_back(k);
            if (v->non_utf8) hexed.emplace_back(k);
        };
        put("remote_dir", b.remote_dir);
        put("access_key_id", b.access_key_id);
        put("local_dir", b.local_dir);
        if (b.last_sync_raw && !b.last_sync) put("last_sync_raw", b.last_sync_raw);
        if (b.secret_key && (b.secret_key->decode_failed || b.secret_key->non_utf8)) put("secret_key_undecoded", b.secret_key);
        if (!failed.empty()) r.attributes.set("decode_failed", text::join(failed, ","));
        if (!hexed.empty()) r.attributes.set("non_utf8", text::join(hexed, ","));
        if (b.last_sync) r.add_time("last_sync", *b.last_sync);
        out.records.push_back(std::move(r));
        if (b.access_key_id && b.secret_key) {
            CredentialFinding c;
            c.service = Service::amazon_s3;
            c.account_id = b.access_key_id->text;
            c.secret_kind = SecretKind::access_key_pair;
            c.secret_value = b.secret_key->text;
            c.enables_remote_access = true;
            c.source_path = in.source_path;
            c.device = in.device;
            out.credentials.push_back(std::move(c));
        }
    }
}

}  // namespace

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out) {
    if (parser == "s3.bucket-log") emit_bucket_log(in, out);
    else if (parser == "s3.office-lnk") emit_lnk(in, out);
    else if (parser == "s3.iawsmanager-plist") emit_iaws_plist(in, out);
    else if (parser == "s3.iawsmanager-db") emit_iaws_db(in, out);
    else if (parser == "s3.s3anywhere-prefs") emit_s3anywhere(in, out);
    else return false;
    return true;
}

}  // namespace cloudtrace::s3
