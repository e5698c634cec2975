#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/services/evernote.hpp>
#include <cloudtrace/text.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <regex>
#include <set>

namespace cloudtrace::evernote {
namespace {

using services::column_text;
using services::make_record;
using services::warning;
using svmatch = std::match_results<std::string_view::const_iterator>;

struct Alias {
    std::vector<std::string_view> title, created, updated, deleted, source, latitude, longitude;
};

// Column names differ between the Windows and Mac desktop stores; the first name present wins.
const Alias& aliases(StorePlatform p) {
    static const Alias windows{{"title"}, {"date_created"}, {"date_updated"}, {"is_deleted"},
                               {"source"}, {"latitude"}, {"longitude"}};
    static const Alias mac{{"ZTITLE", "title"},          {"ZDATECREATED", "ZCREATED", "date_created"},
                           {"ZDATEUPDATED", "ZUPDATED", "date_updated"}, {"ZISDELETED", "ZDELETED", "is_deleted"},
                           {"ZSOURCE", "source"},        {"ZLATITUDE", "latitude"},
                           {"ZLONGITUDE", "longitude"}};
    return p == StorePlatform::windows_exb ? windows : mac;
}

std::optional<std::string_view> pick(const sqlite::TableSchema& t, const std::vector<std::string_view>& names) {
    for (auto n : names) {
        if (t.has_column(n)) return n;
    }
    return std::nullopt;
}

std::optional<std::string_view> pick(const sqlite::TableSchema& t, std::initializer_list<std::string_view> names) {
    return pick(t, std::vector<std::string_view>(names));
}

const sqlite::TableSchema* find_with_any(const sqlite::Database& db, const std::vector<std::string_view>& a,
                                         const std::vector<std::string_view>& b) {
    for (const auto& name : db.table_names()) {
        const auto* t = db.find_table(name);
        if (pick(*t, a) && pick(*t, b)) return t;
    }
    return nullptr;
}

std::optional<double> coordinate(const sqlite::Row& row, std::optional<std::string_view> col, double limit) {
    if (!col) return std::nullopt;
    const auto v = row.real(*col);
    if (!v || std::abs(*v) > limit) return std::nullopt;
    return v;
}

std::optional<NormalizedTimestamp> day_ordinal(const sqlite::Row& row, std::optional<std::string_view> col) {
    if (!col) return std::nullopt;
    const auto v = row.real(*col);
    if (!v || *v <= 0) return std::nullopt;
    return normalize_day_ordinal(*v, column_text(row, *col).value_or(""));
}

std::optional<NormalizedTimestamp> apple(const sqlite::Row& row, std::optional<std::string_view> col) {
    if (!col) return std::nullopt;
    const auto v = row.real(*col);
    if (!v) return std::nullopt;
    return normalize_apple_absolute(*v, column_text(row, *col).value_or(""));
}

std::optional<NormalizedTimestamp> unix_ms(const sqlite::Row& row, std::optional<std::string_view> col) {
    if (!col) return std::nullopt;
    const auto v = row.integer(*col);
    if (!v) return std::nullopt;
    return normalize_unix(*v, UnixUnit::milliseconds, column_text(row, *col).value_or(""));
}

std::optional<std::string> text_of(const sqlite::Row& row, std::optional<std::string_view> col) {
    if (!col) return std::nullopt;
    return column_text(row, *col);
}

}  // namespace

NoteStore parse_note_store(const sqlite::Database& db, StorePlatform platform) {
    const Alias& a = aliases(platform);
    const auto* notes = find_with_any(db, a.title, a.created);
    if (!notes) throw MissingTableError("notes", db.table_names());
    NoteStore store;
    const auto c_title = pick(*notes, a.title), c_created = pick(*notes, a.created), c_updated = pick(*notes, a.updated),
               c_deleted = pick(*notes, a.deleted), c_source = pick(*notes, a.source), c_lat = pick(*notes, a.latitude),
               c_lon = pick(*notes, a.longitude);
    std::map<std::int64_t, std::size_t> by_rowid;
    for (const auto& row : db.read_table(notes->name)) {
        NoteRecord n;
        n.title = text_of(row, c_title).value_or("");
        n.created = day_ordinal(row, c_created);
        n.updated = day_ordinal(row, c_updated);
        n.is_deleted = c_deleted && row.integer(*c_deleted).value_or(0) != 0;
        n.source_platform = text_of(row, c_source);
        n.latitude = coordinate(row, c_lat, 90);
        n.longitude = coordinate(row, c_lon, 180);
        if (!n.latitude || !n.longitude) n.latitude = n.longitude = std::nullopt;
        by_rowid[row.rowid()] = store.notes.size();
        store.notes.push_back(std::move(n));
    }
    const auto* att = db.find_table_with_columns({"file_name", "note_id"});
    if (!att) att = db.find_table_with_columns({"ZFILENAME", "ZNOTE"});
    if (att && att != notes) {
        const auto c_name = pick(*att, {"file_name", "ZFILENAME"});
        const auto c_note = pick(*att, {"note_id", "ZNOTE"});
        const auto c_mime = pick(*att, {"mime", "ZMIME"});
        const auto c_made = pick(*att, {"date_created", "ZDATECREATED"});
        for (const auto& row : db.read_table(att->name)) {
            AttachmentRecord r;
            r.file_name = text_of(row, c_name).value_or("");
            r.mime = text_of(row, c_mime);
            if (c_note) r.note_id = row.integer(*c_note);
            r.created = day_ordinal(row, c_made);
            if (r.note_id) {
                if (auto it = by_rowid.find(*r.note_id); it != by_rowid.end())
                    store.notes[it->second].attachment_names.push_back(r.file_name);
            }
            store.attachments.push_back(std::move(r));
        }
    }
    return store;
}

namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) | b[at + 3];
}

bool chunk_type_ok(std::span<const std::uint8_t> b, std::size_t at) {
    return std::all_of(b.begin() + static_cast<std::ptrdiff_t>(at), b.begin() + static_cast<std::ptrdiff_t>(at + 4),
                       [](std::uint8_t c) { return std::isalpha(c) != 0; });
}

/// End offset (exclusive) of the PNG starting at `start`, or nullopt when it runs past the data.
std::optional<std::size_t> png_end(std::span<const std::uint8_t> b, std::size_t start) {
    std::size_t at = start + kPngSignature.size();
    while (at + 12 <= b.size()) {
        const std::uint32_t len = be32(b, at);
        if (!chunk_type_ok(b, at + 4) || len > b.size()) return std::nullopt;
        const std::size_t next = at + 12 + len;
        if (next > b.size()) return std::nullopt;
        if (std::equal(b.begin() + static_cast<std::ptrdiff_t>(at + 4), b.begin() + static_cast<std::ptrdiff_t>(at + 8),
                       "IEND"))
            return next;
        at = next;
    }
    return std::nullopt;
}

std::size_t find_signature(std::span<const std::uint8_t> b, std::size_t from) {
    const auto it = std::search(b.begin() + static_cast<std::ptrdiff_t>(std::min(from, b.size())), b.end(),
                                kPngSignature.begin(), kPngSignature.end());
    return static_cast<std::size_t>(it - b.begin());
}

}  // namespace

std::vector<CarvedImage> carve_thumbnails(std::span<const std::uint8_t> container) {
    if (container.size() < 4 || !std::equal(container.begin(), container.begin() + 4, "ENT0"))
        throw ParseError("thumbnail container: missing ENT0 magic");
    std::vector<CarvedImage> out;
    std::size_t region = 0;
    std::size_t pos = std::min(kThumbnailHeaderBytes, container.size());
    while ((pos = find_signature(container, pos)) < container.size()) {
        CarvedImage img;
        img.offset = pos;
        const std::size_t meta_from = std::max(region, pos >= 16 ? pos - 16 : 0);
        img.metadata_hex = text::to_hex(container.subspan(meta_from, pos - meta_from));
        const auto end = png_end(container, pos);
        if (end) {
            img.bytes.assign(container.begin() + static_cast<std::ptrdiff_t>(pos),
                             container.begin() + static_cast<std::ptrdiff_t>(*end));
            region = pos = *end;
        } else {
            // Either the tail is cut short or the chunk chain is damaged; keep bytes up to the next image.
            const std::size_t next = find_signature(container, pos + kPngSignature.size());
            img.bytes.assign(container.begin() + static_cast<std::ptrdiff_t>(pos),
                             container.begin() + static_cast<std::ptrdiff_t>(next));
            img.truncated = true;
            region = pos = next;
        }
        out.push_back(std::move(img));
    }
    return out;
}

std::string_view to_string(AppEventKind k) {
    switch (k) {
        case AppEventKind::session_open: return "session-open";
        case AppEventKind::auth_attempt: return "auth-attempt";
        case AppEventKind::auth_failure: return "auth-failure";
        case AppEventKind::db_open: return "db-open";
        case AppEventKind::sync_start: return "sync-start";
        case AppEventKind::sync_end: return "sync-end";
        case AppEventKind::note_sync: return "note-sync";
        case AppEventKind::update_check: return "update-check";
        case AppEventKind::other: return "other";
    }
    return "other";
}

namespace {

const std::regex kHeader(R"(^Log opened on (\d{4})/(\d{1,2})/(\d{1,2}) (\d{1,2}):(\d{2}):(\d{2}) \(([^)]*)\))");
const std::regex kClockLine(R"(^(\d{1,2}):(\d{2}):(\d{2}) (.*)$)");
const std::regex kIsoLine(R"(^(\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2}:\d{2})(\.\d+)? (.*)$)");
const std::regex kAuth(R"re(Authenticating user "([^"]*)")re");
const std::regex kOpenDb(R"(Opened database: (.*?)(?: \([^()]*\))?\s*$)");
const std::regex kSyncNote(R"(Syncing note '([^']*)')");
const std::regex kReach(R"(currentReachabilityStatus=([A-Za-z0-9]+))");

int to_int(const svmatch& m, int i) { return static_cast<int>(text::parse_int(m[i].str()).value_or(0)); }

void classify(std::string_view message, AppEvent& e) {
    svmatch m;
    if (std::regex_search(message.begin(), message.end(), m, kAuth)) {
        e.kind = AppEventKind::auth_attempt;
        e.account = m[1].str();
    } else if (text::icontains(message, "Session terminated abnormally") || text::icontains(message, "authentication failed")) {
        e.kind = AppEventKind::auth_failure;
    } else if (std::regex_search(message.begin(), message.end(), m, kOpenDb)) {
        e.kind = AppEventKind::db_open;
        e.target = m[1].str();
    } else if (text::icontains(message, "Sync started")) {
        e.kind = AppEventKind::sync_start;
    } else if (text::icontains(message, "Sync complete") || text::icontains(message, "Sync finished")) {
        e.kind = AppEventKind::sync_end;
    } else if (std::regex_search(message.begin(), message.end(), m, kSyncNote)) {
        e.kind = AppEventKind::note_sync;
        e.target = m[1].str();
    } else if (text::icontains(message, "AutoUpdate") || text::icontains(message, "update check")) {
        e.kind = AppEventKind::update_check;
    }
    if (std::regex_search(message.begin(), message.end(), m, kReach)) e.connection = m[1].str();
}

}  // namespace

std::vector<AppEvent> parse_app_log(std::string_view text, LogDialect dialect) {
    using namespace std::chrono;
    std::vector<AppEvent> out;
    std::optional<year_month_day> day;
    std::optional<int> offset;
    std::optional<seconds> last_clock;
    const auto lines = text::split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string_view line = lines[n];
        if (text::trim(line).empty()) continue;
        AppEvent e;
        e.detail = std::string(line);
        e.line = n + 1;
        svmatch m;
        if (std::regex_search(line.begin(), line.end(), m, kHeader)) {
            day = year_month_day{year{to_int(m, 1)}, month{static_cast<unsigned>(to_int(m, 2))},
                                 std::chrono::day{static_cast<unsigned>(to_int(m, 3))}};
            offset = parse_utc_offset(m[7].str());
            const seconds clock = hours{to_int(m, 4)} + minutes{to_int(m, 5)} + seconds{to_int(m, 6)};
            last_clock = clock;
            e.kind = AppEventKind::session_open;
            const std::string raw = m[0].str().substr(std::string_view("Log opened on ").size());
            e.timestamp = make_log_clock_time(*day, clock, offset.value_or(0), raw);
            if (!offset) e.timestamp->confidence = e.timestamp->confidence | Confidence::ambiguous_timezone;
        } else if (dialect != LogDialect::ios_applog && std::regex_match(line.begin(), line.end(), m, kClockLine)) {
            seconds clock = hours{to_int(m, 1)} + minutes{to_int(m, 2)} + seconds{to_int(m, 3)};
            const std::string_view message(&*m[4].first, static_cast<std::size_t>(m.length(4)));
            classify(message, e);
            if (day) {
                if (last_clock && clock < *last_clock) day = year_month_day{sys_days{*day} + days{1}};
                last_clock = clock;
                e.timestamp = make_log_clock_time(*day, clock, offset.value_or(0), std::string(line.substr(0, static_cast<std::size_t>(m.position(4)) - 1)));
                if (!offset) e.timestamp->confidence = e.timestamp->confidence | Confidence::ambiguous_timezone;
            }
        } else if (std::regex_match(line.begin(), line.end(), m, kIsoLine)) {
            const std::string raw = m[1].str() + m[2].str();
            e.timestamp = parse_iso8601(raw);
            const std::string_view message(&*m[3].first, static_cast<std::size_t>(m.length(3)));
            classify(message, e);
        } else {
            classify(line, e);
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::optional<NormalizedTimestamp> parse_enclipper_start(std::string_view text) {
    for (const auto& e : parse_app_log(text, LogDialect::windows_applog)) {
        if (e.timestamp) return e.timestamp;
    }
    return std::nullopt;
}

std::optional<NormalizedTimestamp> parse_ios_md(const plist::Value& md) {
    if (const auto* v = md.find("lastSyncTime"); v && v->date()) return services::plist_time(*v->date());
    return std::nullopt;
}

IosStore parse_ios_store(const sqlite::Database& db, const plist::Value* md) {
    IosStore store;
    if (const auto* t = db.find_table("ZENSERVICEENTITY")) {
        const auto c_updated = pick(*t, {"ZDATEUPDATED", "ZDATE UPDATED"});
        const auto c_created = pick(*t, {"ZDATECREATED", "ZDATE CREATED"});
        const auto c_deleted = pick(*t, {"ZDATEDELETED", "ZDATE DELETED"});
        const auto c_lat = pick(*t, {"ZLATITUDE", "ZALTITUDE"});
        const auto c_lon = pick(*t, {"ZLONGITUDE"});
        const auto c_source = pick(*t, {"ZSOURCE"});
        const auto c_file = pick(*t, {"ZFILENAME"});
        const auto c_content = pick(*t, {"ZSEARCHCONTENT", "ZFILENAME SEARCHCONTENT"});
        const auto c_pk = pick(*t, {"Z_PK"});
        std::vector<std::int64_t> indices;
        for (const auto& row : db.read_table(t->name)) {
            NoteRecord n;
            n.title = column_text(row, "ZTITLE").value_or("");
            n.updated = apple(row, c_updated);
            n.created = apple(row, c_created);
            n.deleted = apple(row, c_deleted);
            n.is_deleted = n.deleted.has_value();
            n.latitude = coordinate(row, c_lat, 90);
            n.longitude = coordinate(row, c_lon, 180);
            if (!n.latitude || !n.longitude) n.latitude = n.longitude = std::nullopt;
            n.source_platform = text_of(row, c_source);
            if (auto f = text_of(row, c_file)) n.attachment_names.push_back(*f);
            n.content_excerpt = text_of(row, c_content);
            n.index_number = c_pk ? row.integer(*c_pk) : std::optional<std::int64_t>(row.rowid());
            if (n.index_number) indices.push_back(*n.index_number);
            store.notes.push_back(std::move(n));
        }
        if (!indices.empty()) store.missing_indices = detect_index_gaps(indices);
    }
    if (const auto* t = db.find_table("ZENLOCALFILE")) {
        const auto c_accessed = pick(*t, {"ZLASTACCESSED"});
        const auto c_modified = pick(*t, {"ZLASTMODIFIED"});
        const auto c_name = pick(*t, {"ZFILENAME", "ZNAME"});
        for (const auto& row : db.read_table(t->name)) {
            LocalFileRecord f;
            f.file_name = text_of(row, c_name);
            f.last_accessed = apple(row, c_accessed);
            if (auto m = text_of(row, c_modified)) f.last_modified = parse_date_text(*m, DateDialect::rfc1123);
            store.local_files.push_back(std::move(f));
        }
    }
    if (store.notes.empty() && store.local_files.empty() && !db.find_table("ZENSERVICEENTITY") && !db.find_table("ZENLOCALFILE"))
        throw MissingTableError("ZENSERVICEENTITY", db.table_names());
    if (md) store.last_sync = parse_ios_md(*md);
    return store;
}

std::vector<NoteRecord> parse_android_db(const sqlite::Database& db) {
    const auto* t = db.find_table_with_columns({"title", "created", "updated", "is_active"});
    if (!t) throw MissingTableError("notes", db.table_names());
    const auto c_deleted = pick(*t, {"deleted", "delete"});
    std::vector<NoteRecord> out;
    for (const auto& row : db.read_table(t->name)) {
        NoteRecord n;
        n.title = column_text(row, "title").value_or("");
        n.created = unix_ms(row, "created");
        n.updated = unix_ms(row, "updated");
        const auto deleted = c_deleted ? row.integer(*c_deleted) : std::nullopt;
        n.is_deleted = deleted.value_or(0) != 0;
        // A deletion column holding a millisecond instant doubles as the recycle-bin time.
        if (deleted && *deleted > 1) n.deleted = unix_ms(row, c_deleted);
        if (const auto a = row.integer("is_active")) n.availability = *a == 1;
        n.latitude = coordinate(row, pick(*t, {"latitude"}), 90);
        n.longitude = coordinate(row, pick(*t, {"longitude"}), 180);
        if (!n.latitude || !n.longitude) n.latitude = n.longitude = std::nullopt;
        n.source_platform = text_of(row, pick(*t, {"source"}));
        n.country = text_of(row, pick(*t, {"country"}));
        out.push_back(std::move(n));
    }
    return out;
}

std::vector<std::int64_t> detect_index_gaps(std::span<const std::int64_t> index_numbers) {
    if (index_numbers.empty()) return {};
    const std::set<std::int64_t> present(index_numbers.begin(), index_numbers.end());
    std::vector<std::int64_t> out;
    for (std::int64_t i = *present.begin() + 1; i < *present.rbegin(); ++i) {
        if (!present.count(i)) out.push_back(i);
    }
    return out;
}

namespace {

void emit_note(const FileInput& in, const NoteRecord& n, ParseOutput& out) {
    auto r = make_record(Service::evernote, in, "note");
    r.subject = n.title;
    r.attributes.set("title", n.title);
    r.attributes.set("is_deleted", n.is_deleted ? "true" : "false");
    if (n.availability) r.attributes.set("available", *n.availability ? "true" : "false");
    if (n.source_platform) r.attributes.set("source", *n.source_platform);
    if (n.country) r.attributes.set("country", *n.country);
    if (!n.attachment_names.empty()) r.attributes.set("attachments", text::join(n.attachment_names, "; "));
    if (n.content_excerpt) r.attributes.set("content_excerpt", *n.content_excerpt);
    if (n.index_number) r.attributes.set("index", std::to_string(*n.index_number));
    if (n.created) r.add_time("created", *n.created);
    if (n.updated) r.add_time("updated", *n.updated);
    if (n.deleted) r.add_time("deleted", *n.deleted);
    if (n.last_accessed) r.add_time("last_accessed", *n.last_accessed);
    if (n.latitude && n.longitude) r.geo = GeoPoint{*n.latitude, *n.longitude};
    out.records.push_back(std::move(r));
}

void emit_store(const FileInput& in, StorePlatform platform, ParseOutput& out) {
    const auto store = parse_note_store(sqlite::Database(in.bytes), platform);
    for (const auto& n : store.notes) emit_note(in, n, out);
    for (const auto& a : store.attachments) {
        auto r = make_record(Service::evernote, in, "attachment");
        r.subject = a.file_name;
        r.attributes.set("file_name", a.file_name);
        if (a.mime) r.attributes.set("mime", *a.mime);
        if (a.note_id) r.attributes.set("note_id", std::to_string(*a.note_id));
        if (a.created) r.add_time("created", *a.created);
        out.records.push_back(std::move(r));
    }
}

std::string blob_stem(const FileInput& in) {
    std::string stem = "d" + std::to_string(in.device) + "_" + in.source_path;
    std::replace_if(stem.begin(), stem.end(), [](char c) { return c == '/' || c == '\\' || c == ' ' || c == ':'; }, '_');
    return stem;
}

void emit_thumbnails(const FileInput& in, ParseOutput& out) {
    const auto images = carve_thumbnails(in.bytes);
    for (std::size_t k = 0; k < images.size(); ++k) {
        const auto& img = images[k];
        auto r = make_record(Service::evernote, in, "thumbnail");
        const std::string name = blob_stem(in) + ".thumb." + std::to_string(k + 1) + ".png";
        r.subject = name;
        r.attributes.set("index", std::to_string(k + 1));
        r.attributes.set("offset", std::to_string(img.offset));
        r.attributes.set("size_bytes", std::to_string(img.bytes.size()));
        r.attributes.set("truncated", img.truncated ? "true" : "false");
        r.attributes.set("metadata_hex", img.metadata_hex);
        r.attributes.set(std::string(codec::kHashAlgorithm), codec::sha256_hex(img.bytes));
        r.attributes.set("extracted_as", name);
        out.records.push_back(std::move(r));
        out.blobs.push_back({name, img.bytes});
        if (img.truncated) out.diagnostics.push_back(warning(in, "thumbnail " + std::to_string(k + 1) + " is truncated"));
    }
}

void emit_log(const FileInput& in, LogDialect dialect, ParseOutput& out) {
    for (const auto& e : parse_app_log(text::as_chars(in.bytes), dialect)) {
        auto r = make_record(Service::evernote, in, "app-event");
        r.attributes.set("event", std::string(to_string(e.kind)));
        if (e.account) {
            r.subject = *e.account;
            r.attributes.set("account", *e.account);
        }
        if (e.target) {
            if (!r.subject) r.subject = *e.target;
            r.attributes.set("target", *e.target);
        }
        if (e.connection) r.attributes.set("connection", *e.connection);
        r.attributes.set("line", std::to_string(e.line));
        r.attributes.set("detail", e.detail);
        if (e.timestamp) r.add_time("logged", *e.timestamp);
        out.records.push_back(std::move(r));
        if (e.kind == AppEventKind::auth_attempt && e.account) {
            auto c = CredentialFinding::account_only(Service::evernote, *e.account, in.source_path);
            c.device = in.device;
            out.credentials.push_back(std::move(c));
        }
    }
}

void emit_ios_store(const FileInput& in, ParseOutput& out) {
    const auto store = parse_ios_store(sqlite::Database(in.bytes), nullptr);
    for (const auto& n : store.notes) emit_note(in, n, out);
    for (const auto& f : store.local_files) {
        auto r = make_record(Service::evernote, in, "local-file");
        if (f.file_name) {
            r.subject = *f.file_name;
            r.attributes.set("file_name", *f.file_name);
        }
        if (f.last_accessed) r.add_time("last_accessed", *f.last_accessed);
        if (f.last_modified) r.add_time("last_modified", *f.last_modified);
        out.records.push_back(std::move(r));
    }
    for (auto idx : store.missing_indices) {
        auto r = make_record(Service::evernote, in, "index-gap");
        r.subject = "index " + std::to_string(idx);
        r.attributes.set("missing_index", std::to_string(idx));
        r.attributes.set("interpretation", "no row carries this sequential index; the item it numbered was likely deleted");
        out.records.push_back(std::move(r));
    }
}

void emit_blob_record(const FileInput& in, std::string kind, ParseOutput& out) {
    auto r = make_record(Service::evernote, in, std::move(kind));
    r.subject = std::string(text::basename(in.source_path));
    r.attributes.set("size_bytes", std::to_string(in.bytes.size()));
    r.attributes.set(std::string(codec::kHashAlgorithm), codec::sha256_hex(in.bytes));
    out.records.push_back(std::move(r));
}

}  // namespace

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out) {
    if (parser == "evernote.note-store") {
        emit_store(in, text::iends_with(in.source_path, ".exb") ? StorePlatform::windows_exb : StorePlatform::mac_sql, out);
    } else if (parser == "evernote.thumbnails") {
        emit_thumbnails(in, out);
    } else if (parser == "evernote.thumbnail-png" || parser == "evernote.notethumb") {
        emit_blob_record(in, "thumbnail", out);
    } else if (parser == "evernote.applog-windows") {
        emit_log(in, LogDialect::windows_applog, out);
    } else if (parser == "evernote.applog-mac") {
        emit_log(in, LogDialect::mac_log, out);
    } else if (parser == "evernote.applog-ios") {
        emit_log(in, LogDialect::ios_applog, out);
    } else if (parser == "evernote.enclipper") {
        auto r = make_record(Service::evernote, in, "app-start");
        if (auto t = parse_enclipper_start(text::as_chars(in.bytes))) r.add_time("started", *t);
        out.records.push_back(std::move(r));
    } else if (parser == "evernote.ios-plist") {
        const auto root = plist::parse(in.bytes);
        const auto* v = root.find("username");
        auto r = make_record(Service::evernote, in, "account-profile");
        if (v && v->string()) {
            r.subject = *v->string();
            r.attributes.set("username", *v->string());
            auto c = CredentialFinding::account_only(Service::evernote, *v->string(), in.source_path);
            c.device = in.device;
            out.credentials.push_back(std::move(c));
        }
        out.records.push_back(std::move(r));
    } else if (parser == "evernote.ios-store") {
        emit_ios_store(in, out);
    } else if (parser == "evernote.ios-md") {
        auto r = make_record(Service::evernote, in, "last-sync");
        if (auto t = parse_ios_md(plist::parse(in.bytes))) r.add_time("last_sync", *t);
        out.records.push_back(std::move(r));
    } else if (parser == "evernote.android-db") {
        for (const auto& n : parse_android_db(sqlite::Database(in.bytes))) emit_note(in, n, out);
    } else if (parser == "evernote.enml") {
        auto r = make_record(Service::evernote, in, "note-content");
        r.attributes.set("content", std::string(text::as_chars(in.bytes)));
        out.records.push_back(std::move(r));
    } else {
        return false;
    }
    return true;
}

}  // namespace cloudtrace::evernote
