#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/services/gdocs.hpp>
#include <cloudtrace/text.hpp>
#include <cloudtrace/xml.hpp>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <regex>

namespace cloudtrace::gdocs {
namespace {

using services::column_text;
using services::make_record;
using services::warning;

std::string lower(std::string_view s) { return text::to_lower(s); }

}  // namespace

std::string_view to_string(TempKind k) {
    switch (k) {
        case TempKind::doc_list: return "doc-list";
        case TempKind::document_view_or_edit: return "document-view-or-edit";
        case TempKind::spreadsheet: return "spreadsheet";
        case TempKind::pdf_viewer_html: return "pdf-viewer-html";
        case TempKind::pdf_viewer_text: return "pdf-viewer-text";
        case TempKind::pdf_viewer_image: return "pdf-viewer-image";
    }
    return "doc-list";
}

std::optional<TempClassification> classify_temp_file(std::string_view filename) {
    static const std::regex re(R"(^(docs_google_com|edit|ccc|viewer)\[([0-9]+)\]\.(htm|txt|png|xml)$)", std::regex::icase);
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(filename.begin(), filename.end(), m, re)) return std::nullopt;
    const std::string stem = lower(m[1].str());
    const std::string ext = lower(m[3].str());
    const auto n = text::parse_int(m[2].str());
    if (!n || *n < 1 || *n > 1'000'000) return std::nullopt;
    TempClassification c{TempKind::doc_list, static_cast<int>(*n)};
    if (stem == "viewer") {
        if (ext == "htm") c.kind = TempKind::pdf_viewer_html;
        else if (ext == "png") c.kind = TempKind::pdf_viewer_image;
        else c.kind = TempKind::pdf_viewer_text;  // .txt, and the .xml name used for the same text
        return c;
    }
    if (ext != "htm") return std::nullopt;
    c.kind = stem == "docs_google_com" ? TempKind::doc_list
             : stem == "edit"          ? TempKind::document_view_or_edit
                                       : TempKind::spreadsheet;
    return c;
}

std::string html_text(std::string_view html) {
    std::string raw;
    raw.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] != '<') {
            raw += html[i++];
            continue;
        }
        const std::size_t close = html.find('>', i);
        if (close == std::string_view::npos) break;
        const std::string tag = lower(html.substr(i + 1, std::min<std::size_t>(close - i - 1, 16)));
        for (const char* skip : {"script", "style"}) {
            if (tag.rfind(skip, 0) == 0) {
                const auto end = lower(html.substr(close)).find(std::string("</") + skip);
                i = end == std::string::npos ? html.size() : close + end;
                break;
            }
        }
        if (i < close) {
            raw += ' ';
            i = close + 1;
        }
    }
    const std::string decoded = text::decode_entities(raw);
    std::string out;
    bool space = false;
    for (char c : decoded) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '\xA0') {
            space = !out.empty();
        } else {
            if (space) out += ' ';
            space = false;
            out += c;
        }
    }
    return out;
}

std::vector<std::string> harvest_anchor_texts(std::string_view html) {
    static const std::regex re(R"(<a\b[^>]*>([\s\S]*?)</a\s*>)", std::regex::icase);
    std::vector<std::string> out;
    for (std::regex_iterator<std::string_view::const_iterator> it(html.begin(), html.end(), re), end; it != end; ++it) {
        auto t = html_text((*it)[1].str());
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::optional<std::string> detect_gdocs_cache_html(std::string_view html) {
    const std::string low = lower(html);
    if (low.find("docs") == std::string::npos) return std::nullopt;
    static const std::regex goog_id(R"re(\bid\s*=\s*["']goog_)re", std::regex::icase);
    if (!std::regex_search(low, goog_id)) return std::nullopt;
    const auto body = low.find("<body");
    if (body == std::string::npos) return std::nullopt;
    const auto body_open_end = low.find('>', body);
    const auto body_close = low.find("</body>", body);
    if (body_open_end == std::string::npos || body_close == std::string::npos) return std::nullopt;
    static const std::regex signature(R"re(<div\s+dir\s*=\s*["']ltr["']\s*>)re");
    std::smatch m;
    const auto from = low.cbegin() + static_cast<std::ptrdiff_t>(body_open_end);
    const auto to = low.cbegin() + static_cast<std::ptrdiff_t>(body_close);
    if (!std::regex_search(from, to, m, signature)) return std::nullopt;
    const std::size_t content = static_cast<std::size_t>(m[0].second - low.cbegin());
    return html_text(html.substr(content, body_close - content));
}

IGoogDocsSettings parse_igoogdocs_plist(const plist::Value& root, std::string source_path) {
    IGoogDocsSettings s;
    if (const auto* v = root.find("username")) s.username = v->string();
    if (const auto* v = root.find("password")) s.password = v->string();
    if (const auto* v = root.find("rememberme")) s.rememberme = v->boolean();
    if (!s.username && !s.password) return s;
    CredentialFinding c;
    c.service = Service::google_docs;
    c.account_id = s.username.value_or("");
    c.source_path = std::move(source_path);
    if (s.rememberme.value_or(false) && s.password) {
        c.secret_kind = SecretKind::password;
        c.secret_value = *s.password;
        c.enables_remote_access = true;
    }
    s.credential = std::move(c);
    return s;
}

std::string extract_local_file_html(std::string_view html) {
    static const std::regex id_re(R"re(\bid\s*=\s*(["'])iGoogDocs-Formatted\1)re");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(html.begin(), html.end(), m, id_re))
        throw ParseError("element not found: id=" + std::string(kLocalFileElementId));
    const std::size_t id_at = static_cast<std::size_t>(m.position(0));
    const std::size_t open = html.rfind('<', id_at);
    const std::size_t open_end = html.find('>', id_at);
    if (open == std::string_view::npos || open_end == std::string_view::npos)
        throw ParseError("element not found: id=" + std::string(kLocalFileElementId));
    std::size_t name_end = open + 1;
    while (name_end < html.size() && std::isalnum(static_cast<unsigned char>(html[name_end]))) ++name_end;
    const std::string name = lower(html.substr(open + 1, name_end - open - 1));
    const std::string low = lower(html);
    // Walk forward to the matching close tag, counting nested elements of the same name.
    int depth = 1;
    std::size_t pos = open_end + 1, inner_end = html.size();
    while (depth > 0) {
        const std::size_t next_open = low.find("<" + name, pos);
        const std::size_t next_close = low.find("</" + name, pos);
        if (next_close == std::string::npos) break;
        if (next_open != std::string::npos && next_open < next_close) {
            ++depth;
            pos = next_open + name.size() + 1;
        } else {
            if (--depth == 0) inner_end = next_close;
            pos = next_close + name.size() + 2;
        }
    }
    const std::string_view inner = html.substr(open_end + 1, inner_end - open_end - 1);
    static const std::regex br(R"(<br\s*/?>|</br>)", std::regex::icase);
    static const std::regex tag(R"(<[^>]*>)");
    std::string stripped = std::regex_replace(std::string(inner), br, "\n");
    stripped = std::regex_replace(stripped, tag, "");
    return text::decode_entities(stripped);
}

std::vector<GDocsDocRecord> parse_doclist_db(const sqlite::Database& db) {
    std::vector<GDocsDocRecord> out;
    const auto ms = [](const sqlite::Row& row, std::string_view col) -> std::optional<NormalizedTimestamp> {
        const auto v = row.find(col) && !row.is_null(col) ? row.integer(col) : std::nullopt;
        if (!v) return std::nullopt;
        return normalize_unix(*v, UnixUnit::milliseconds, column_text(row, col).value_or(""));
    };
    const auto fill = [&](GDocsDocRecord& d, const sqlite::Row& entry) {
        d.title = column_text(entry, "title").value_or("");
        d.kind = column_text(entry, "kind").value_or("");
        d.created = ms(entry, "creationTime");
        d.modified = ms(entry, "lastModifiedTime");
        d.time_order_violation = d.created && d.modified && d.created->utc_instant > d.modified->utc_instant;
    };

    if (const auto* flat = db.find_table_with_columns({"accountHolderName", "title", "kind", "creationTime", "lastModifiedTime"})) {
        for (const auto& row : db.read_table(flat->name)) {
            GDocsDocRecord d;
            d.account_email = column_text(row, "accountHolderName").value_or("");
            d.last_sync = ms(row, "lastSyncTime");
            fill(d, row);
            out.push_back(std::move(d));
        }
        return out;
    }
    const auto* accounts = db.find_table_with_columns({"accountHolderName"});
    const auto* entries = db.find_table_with_columns({"title", "kind", "creationTime", "lastModifiedTime"});
    if (!entries) throw MissingTableError("Entry", db.table_names());
    struct Account {
        std::string email;
        std::optional<NormalizedTimestamp> last_sync;
    };
    std::map<std::int64_t, Account> by_id;
    if (accounts) {
        for (const auto& row : db.read_table(accounts->name)) {
            const auto id = row.find("_id") && !row.is_null("_id") ? *row.integer("_id") : row.rowid();
            by_id[id] = {column_text(row, "accountHolderName").value_or(""), ms(row, "lastSyncTime")};
        }
    }
    const std::string_view join_col = entries->has_column("accountId") ? "accountId" : "account_id";
    for (const auto& row : db.read_table(entries->name)) {
        GDocsDocRecord d;
        if (const auto id = row.find(join_col) ? row.integer(join_col) : std::nullopt) {
            if (auto it = by_id.find(*id); it != by_id.end()) {
                d.account_email = it->second.email;
                d.last_sync = it->second.last_sync;
            }
        }
        fill(d, row);
        out.push_back(std::move(d));
    }
    return out;
}

std::optional<std::string> shared_prefs_email(std::string_view document) {
    if (text::trim(document).empty()) return std::nullopt;
    const auto root = xml::parse(document);
    static const std::regex email(R"(^[^@\s]+@[^@\s]+\.[^@\s]+$)");
    std::optional<std::string> any, preferred;
    const std::function<void(const xml::Element&)> walk = [&](const xml::Element& e) {
        if (e.name == "string") {
            const std::string value(text::trim(e.text));
            if (std::regex_match(value, email)) {
                const std::string key = lower(e.attribute("name").value_or(""));
                if (!preferred && (key.find("account") != std::string::npos || key.find("email") != std::string::npos))
                    preferred = value;
                if (!any) any = value;
            }
        }
        for (const auto& c : e.children) walk(c);
    };
    walk(root);
    return preferred ? preferred : any;
}

SharedPrefsEmails parse_gdocs_shared_prefs(const std::string_view* drive_xml, const std::string_view* webview_xml) {
    SharedPrefsEmails s;
    if (drive_xml) s.admin_email = shared_prefs_email(*drive_xml);
    if (webview_xml) s.latest_email = shared_prefs_email(*webview_xml);
    return s;
}

const std::vector<std::string>& service_hosts() {
    static const std::vector<std::string> hosts = {"dropbox.com", "docs.google.com", "s3.amazonaws.com", "evernote.com",
                                                   "accounts.google.com"};
    return hosts;
}

std::string url_host(std::string_view url) {
    const auto scheme = url.find("://");
    std::string_view rest;
    if (scheme != std::string_view::npos) {
        rest = url.substr(scheme + 3);
    } else if (text::istarts_with(url, "Cookie:")) {
        // Cookie index entries read "Cookie:<user>@<host><path>".
        rest = url.substr(7);
    } else {
        return {};
    }
    rest = rest.substr(0, std::min(rest.find_first_of("/?#"), rest.size()));
    if (const auto at = rest.rfind('@'); at != std::string_view::npos) rest.remove_prefix(at + 1);
    if (const auto colon = rest.find(':'); colon != std::string_view::npos) rest = rest.substr(0, colon);
    return lower(rest);
}

bool is_service_host(std::string_view host) {
    while (!host.empty() && host.front() == '.') host.remove_prefix(1);
    const std::string h = lower(host);
    return std::any_of(service_hosts().begin(), service_hosts().end(), [&](const std::string& s) {
        return h == s || (h.size() > s.size() && h.compare(h.size() - s.size(), s.size(), s) == 0 &&
                          h[h.size() - s.size() - 1] == '.');
    });
}

namespace {

std::optional<NormalizedTimestamp> micros(const sqlite::Row& row, std::string_view col) {
    if (!row.find(col) || row.is_null(col)) return std::nullopt;
    const auto v = row.integer(col);
    if (!v || *v <= 0) return std::nullopt;
    return normalize_unix(*v, UnixUnit::microseconds, column_text(row, col).value_or(""));
}

void read_places(const FileInput& in, HistoryResult& out) {
    sqlite::Database db(in.bytes);
    const auto* places = db.find_table("moz_places");
    if (!places) {
        out.diagnostics.push_back(warning(in, "moz_places table missing"));
        return;
    }
    struct Place {
        std::string url, title;
        std::optional<NormalizedTimestamp> last_visit;
    };
    std::map<std::int64_t, Place> by_id;
    for (const auto& row : db.read_table(places->name)) {
        const auto id = row.find("id") && !row.is_null("id") ? *row.integer("id") : row.rowid();
        by_id[id] = {column_text(row, "url").value_or(""), column_text(row, "title").value_or(""),
                     micros(row, "last_visit_date")};
    }
    const auto emit = [&](const Place& p, std::optional<NormalizedTimestamp> when) {
        const std::string host = url_host(p.url);
        if (!is_service_host(host)) return;
        auto r = make_record(Service::browser, in, "browser-visit");
        r.subject = p.url;
        r.attributes.set("url", p.url);
        r.attributes.set("host", host);
        if (!p.title.empty()) r.attributes.set("title", p.title);
        if (when) r.add_time("visited", *when);
        out.records.push_back(std::move(r));
    };
    if (const auto* visits = db.find_table("moz_historyvisits")) {
        std::map<std::int64_t, bool> visited;
        for (const auto& row : db.read_table(visits->name)) {
            const auto pid = row.integer("place_id");
            if (!pid) continue;
            auto it = by_id.find(*pid);
            if (it == by_id.end()) continue;
            visited[*pid] = true;
            emit(it->second, micros(row, "visit_date"));
        }
        for (const auto& [id, p] : by_id) {
            if (!visited.count(id) && p.last_visit) emit(p, p.last_visit);
        }
    } else {
        for (const auto& [id, p] : by_id) emit(p, p.last_visit);
    }
}

void read_cookies(const FileInput& in, HistoryResult& out) {
    sqlite::Database db(in.bytes);
    const auto* t = db.find_table("moz_cookies");
    if (!t) {
        out.diagnostics.push_back(warning(in, "moz_cookies table missing"));
        return;
    }
    for (const auto& row : db.read_table(t->name)) {
        const std::string host = column_text(row, "host").value_or("");
        if (!is_service_host(host)) continue;
        auto r = make_record(Service::browser, in, "browser-cookie");
        r.subject = host;
        r.attributes.set("host", host);
        if (auto v = column_text(row, "name")) r.attributes.set("name", *v);
        if (auto v = column_text(row, "path")) r.attributes.set("path", *v);
        if (auto t1 = micros(row, "creationTime")) r.add_time("created", *t1);
        if (auto t2 = micros(row, "lastAccessed")) r.add_time("last_accessed", *t2);
        if (const auto e = row.find("expiry") && !row.is_null("expiry") ? row.integer("expiry") : std::nullopt)
            r.add_time("expiry", normalize_unix(*e, UnixUnit::seconds, column_text(row, "expiry").value_or("")));
        out.records.push_back(std::move(r));
    }
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint32_t{b[at]} | (std::uint32_t{b[at + 1]} << 8) | (std::uint32_t{b[at + 2]} << 16) |
           (std::uint32_t{b[at + 3]} << 24);
}

std::uint64_t le64(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint64_t{le32(b, at)} | (std::uint64_t{le32(b, at + 4)} << 32);
}

std::optional<std::string> c_string(std::span<const std::uint8_t> b, std::size_t at, std::size_t limit) {
    std::string s;
    for (std::size_t i = at; i < limit; ++i) {
        if (b[i] == 0) return s.empty() ? std::nullopt : std::optional<std::string>(s);
        if (b[i] < 0x20 || b[i] > 0x7E) return std::nullopt;
        s += static_cast<char>(b[i]);
    }
    return std::nullopt;
}

}  // namespace

HistoryResult extract_firefox_history(const FileInput* places_db, const FileInput* cookies_db) {
    HistoryResult out;
    if (places_db) read_places(*places_db, out);
    if (cookies_db) read_cookies(*cookies_db, out);
    return out;
}

std::vector<IndexDatUrl> carve_index_dat_urls(std::span<const std::uint8_t> bytes) {
    constexpr std::string_view magic = "Client UrlCache MMF";
    if (bytes.size() < magic.size() || !std::equal(magic.begin(), magic.end(), bytes.begin()))
        throw ParseError("index.dat: missing 'Client UrlCache MMF' signature");
    constexpr std::size_t kBlock = 0x80;
    constexpr std::size_t kUrlOffsetField = 0x34;
    constexpr std::size_t kAccessedField = 0x10;
    constexpr std::size_t kRedirectUrl = 0x10;
    std::vector<IndexDatUrl> out;
    std::size_t at = kBlock;
    while (at + 0x40 <= bytes.size()) {
        const char* tags[] = {"URL ", "LEAK", "REDR"};
        const char* tag = nullptr;
        for (const char* t : tags) {
            if (std::memcmp(bytes.data() + at, t, 4) == 0) tag = t;
        }
        const std::uint32_t blocks = tag ? le32(bytes, at + 4) : 0;
        if (!tag || blocks == 0 || at + std::size_t{blocks} * kBlock > bytes.size()) {
            at += 8;
            continue;
        }
        const std::size_t end = at + std::size_t{blocks} * kBlock;
        IndexDatUrl u;
        u.record_type = std::string(text::trim(std::string_view(tag, 4)));
        std::optional<std::string> url;
        if (u.record_type == "REDR") {
            url = c_string(bytes, at + kRedirectUrl, end);
        } else {
            const std::uint32_t rel = le32(bytes, at + kUrlOffsetField);
            if (rel >= 0x38 && at + rel < end) url = c_string(bytes, at + rel, end);
            u.timestamp_raw = le64(bytes, at + kAccessedField);
            if (*u.timestamp_raw != 0) u.last_accessed = normalize_filetime(*u.timestamp_raw);
        }
        if (url && is_service_host(url_host(*url))) {
            u.url = std::move(*url);
            out.push_back(std::move(u));
        }
        at = end;
    }
    return out;
}

namespace {

std::string blob_stem(const FileInput& in) {
    std::string stem = "d" + std::to_string(in.device) + "_" + in.source_path;
    std::replace_if(stem.begin(), stem.end(), [](char c) { return c == '/' || c == '\\' || c == ' ' || c == ':'; }, '_');
    return stem;
}

constexpr std::size_t kExcerptChars = 2000;

std::string excerpt(std::string s) {
    if (s.size() > kExcerptChars) {
        std::size_t cut = kExcerptChars;
        while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
        s.resize(cut);
    }
    return s;
}

void emit_temp_file(const FileInput& in, ParseOutput& out) {
    const auto cls = classify_temp_file(text::basename(in.source_path));
    if (!cls) return;
    auto r = make_record(Service::google_docs, in, "temp-file");
    r.subject = std::string(text::basename(in.source_path));
    r.attributes.set("temp_kind", std::string(to_string(cls->kind)));
    r.attributes.set("sequence_n", std::to_string(cls->sequence_n));
    r.attributes.set(std::string(codec::kHashAlgorithm), codec::sha256_hex(in.bytes));
    const std::string_view body = text::as_chars(in.bytes);
    if (cls->kind == TempKind::pdf_viewer_image) {
        const std::string name = blob_stem(in) + ".extract.1.png";
        r.attributes.set("extracted_as", name);
        out.blobs.push_back({name, in.bytes});
    } else {
        std::string extracted;
        if (cls->kind == TempKind::pdf_viewer_text && in.kind != ContainerKind::html) {
            extracted = in.kind == ContainerKind::generic_xml ? html_text(body) : std::string(body);
        } else {
            extracted = html_text(body);
        }
        if (cls->kind == TempKind::doc_list) {
            const auto titles = harvest_anchor_texts(body);
            if (!titles.empty()) r.attributes.set("harvested_titles", text::join(titles, " | "));
            r.attributes.set("confidence", "low");
        }
        const std::string name = blob_stem(in) + ".extract.1.txt";
        r.attributes.set("extracted_as", name);
        r.attributes.set("extracted_text", excerpt(extracted));
        out.blobs.push_back({name, std::vector<std::uint8_t>(extracted.begin(), extracted.end())});
    }
    out.records.push_back(std::move(r));
}

void emit_cache_html(const FileInput& in, ParseOutput& out) {
    const auto text = detect_gdocs_cache_html(text::as_chars(in.bytes));
    if (!text) return;
    auto r = make_record(Service::google_docs, in, "cache-page");
    r.subject = std::string(text::basename(in.source_path));
    const std::string name = blob_stem(in) + ".extract.1.txt";
    r.attributes.set("extracted_as", name);
    r.attributes.set("extracted_text", excerpt(*text));
    out.records.push_back(std::move(r));
    out.blobs.push_back({name, std::vector<std::uint8_t>(text->begin(), text->end())});
}

void emit_cache_png(const FileInput& in, ParseOutput& out) {
    auto r = make_record(Service::google_docs, in, "cache-image");
    r.subject = std::string(text::basename(in.source_path));
    r.attributes.set(std::string(codec::kHashAlgorithm), codec::sha256_hex(in.bytes));
    r.attributes.set("size_bytes", std::to_string(in.bytes.size()));
    r.attributes.set("attribution", "location-only");
    out.records.push_back(std::move(r));
}

void emit_igoogdocs(const FileInput& in, ParseOutput& out) {
    auto s = parse_igoogdocs_plist(plist::parse(in.bytes), in.source_path);
    auto r = make_record(Service::google_docs, in, "account-settings");
    if (s.username) {
        r.subject = *s.username;
        r.attributes.set("username", *s.username);
    }
    if (s.rememberme) r.attributes.set("rememberme", *s.rememberme ? "true" : "false");
    r.attributes.set("password_present", s.password ? "true" : "false");
    out.records.push_back(std::move(r));
    if (s.credential) {
        s.credential->device = in.device;
        out.credentials.push_back(std::move(*s.credential));
    }
}

void emit_local_file(const FileInput& in, ParseOutput& out) {
    auto r = make_record(Service::google_docs, in, "local-document");
    std::string name(text::basename(in.source_path));
    if (text::iends_with(name, ".txt")) name.resize(name.size() - 4);
    r.subject = name;
    r.attributes.set("text", extract_local_file_html(text::as_chars(in.bytes)));
    out.records.push_back(std::move(r));
}

void emit_doclist(const FileInput& in, ParseOutput& out) {
    std::vector<std::string> seen;
    for (const auto& d : parse_doclist_db(sqlite::Database(in.bytes))) {
        auto r = make_record(Service::google_docs, in, "doc-entry");
        r.subject = d.title;
        r.attributes.set("account", d.account_email);
        r.attributes.set("title", d.title);
        r.attributes.set("doc_kind", d.kind);
        if (d.time_order_violation) r.attributes.set("time_order_violation", "true");
        if (d.created) r.add_time("created", *d.created);
        if (d.modified) r.add_time("modified", *d.modified);
        if (d.last_sync) r.add_time("last_sync", *d.last_sync);
        out.records.push_back(std::move(r));
        if (!d.account_email.empty() && std::find(seen.begin(), seen.end(), d.account_email) == seen.end()) {
            seen.push_back(d.account_email);
            auto c = CredentialFinding::account_only(Service::google_docs, d.account_email, in.source_path);
            c.device = in.device;
            out.credentials.push_back(std::move(c));
        }
    }
}

void emit_shared_prefs(const FileInput& in, ParseOutput& out) {
    const bool webview = text::iequals(text::basename(in.source_path), "webview.xml");
    const auto email = shared_prefs_email(text::as_chars(in.bytes));
    if (!email) return;
    auto r = make_record(Service::google_docs, in, "account-email");
    r.subject = *email;
    r.attributes.set("role", webview ? "latest" : "admin");
    r.attributes.set("email", *email);
    if (webview) r.attributes.set("context", "most recent account to connect; relevant when several accounts share the device");
    out.records.push_back(std::move(r));
    auto c = CredentialFinding::account_only(Service::google_docs, *email, in.source_path);
    c.device = in.device;
    out.credentials.push_back(std::move(c));
}

void emit_index_dat(const FileInput& in, ParseOutput& out) {
    for (const auto& u : carve_index_dat_urls(in.bytes)) {
        auto r = make_record(Service::browser, in, "browser-url");
        r.subject = u.url;
        r.attributes.set("record_type", u.record_type);
        r.attributes.set("url", u.url);
        r.attributes.set("host", url_host(u.url));
        if (u.last_accessed) r.add_time("last_accessed", *u.last_accessed);
        else if (u.timestamp_raw) r.attributes.set("timestamp_raw", std::to_string(*u.timestamp_raw));
        out.records.push_back(std::move(r));
    }
}

}  // namespace

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out) {
    if (parser == "gdocs.temp-file") emit_temp_file(in, out);
    else if (parser == "gdocs.firefox-cache-html") emit_cache_html(in, out);
    else if (parser == "gdocs.firefox-cache-png") emit_cache_png(in, out);
    else if (parser == "gdocs.igoogdocs-plist") emit_igoogdocs(in, out);
    else if (parser == "gdocs.igoogdocs-local-file") emit_local_file(in, out);
    else if (parser == "gdocs.doclist") emit_doclist(in, out);
    else if (parser == "gdocs.shared-prefs") emit_shared_prefs(in, out);
    else if (parser == "browser.index-dat") emit_index_dat(in, out);
    else if (parser == "browser.firefox-places" || parser == "browser.firefox-cookies") {
        auto res = parser == "browser.firefox-places" ? extract_firefox_history(&in, nullptr)
                                                      : extract_firefox_history(nullptr, &in);
        for (auto& r : res.records) out.records.push_back(std::move(r));
        for (auto& d : res.diagnostics) out.diagnostics.push_back(std::move(d));
    } else {
        return false;
    }
    return true;
}

}  // namespace cloudtrace::gdocs
