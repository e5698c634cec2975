#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/services/dropbox.hpp>
#include <cloudtrace/text.hpp>

#include <cctype>
#include <cmath>
#include <regex>

namespace cloudtrace::dropbox {
namespace {

using services::column_text;
using services::make_record;
using services::warning;

const sqlite::TableSchema& require_table(const sqlite::Database& db, std::initializer_list<std::string_view> columns,
                                         std::string_view what) {
    if (const auto* t = db.find_table_with_columns(columns)) return *t;
    throw MissingTableError(std::string(what), db.table_names());
}

// End of a recent-list path in the flattened rendering: " Ntp3", " 100 tp2", " I100 tp2".
const std::regex& flattened_terminator() {
    static const std::regex re(R"( (?:N|I?-?\d+ )tp\d+)");
    return re;
}

}  // namespace

std::vector<RecentEntry> extract_recent_list(std::string_view blob) {
    std::vector<RecentEntry> out;
    std::size_t i = 0;
    while ((i = blob.find('V', i)) != std::string_view::npos) {
        const bool at_token = i == 0 || blob[i - 1] == '(' || blob[i - 1] == '\n' || blob[i - 1] == '\r';
        std::size_t j = i + 1;
        while (j < blob.size() && std::isdigit(static_cast<unsigned char>(blob[j]))) ++j;
        const std::string_view digits = blob.substr(i + 1, j - i - 1);
        if (j < blob.size() && blob[j] == '.') ++j;
        if (!at_token || j >= blob.size() || blob[j] != '/') {
            ++i;
            continue;
        }
        std::size_t end = j;
        while (end < blob.size()) {
            const auto c = static_cast<unsigned char>(blob[end]);
            if (c < 0x20 && c != '\t') break;
            ++end;
        }
        std::string_view path = blob.substr(j, end - j);
        std::match_results<std::string_view::const_iterator> m;
        if (std::regex_search(path.begin(), path.end(), m, flattened_terminator())) {
            // Flattened rendering: the next entry follows on the same line.
            end = j + static_cast<std::size_t>(m.position(0) + m.length(0));
            path = path.substr(0, static_cast<std::size_t>(m.position(0)));
        }
        RecentEntry e;
        if (!digits.empty()) e.server_id = std::string(digits);
        e.path = std::string(text::trim(path));
        out.push_back(std::move(e));
        i = end;
    }
    return out;
}

ConfigResult parse_config_db(const sqlite::Database& db, std::string source_path) {
    const auto& table = require_table(db, {"key", "value"}, "config");
    ConfigResult r;
    r.profile.source_path = source_path;
    for (const auto& row : db.read_table(table.name)) {
        const auto key = column_text(row, "key");
        const auto value = column_text(row, "value");
        if (!key || !value) continue;
        if (*key == "email") r.profile.email = *value;
        else if (*key == "dropbox_path") r.profile.dropbox_path = *value;
        else if (*key == "recently_changed3") r.profile.recent_entries = extract_recent_list(*value);
    }
    if (r.profile.recent_entries.size() > kMaxRecentEntries) r.profile.recent_entries.resize(kMaxRecentEntries);
    r.credential.service = Service::dropbox;
    r.credential.account_id = r.profile.email.value_or("");
    r.credential.secret_kind = SecretKind::portable_session_file;
    r.credential.enables_remote_access = true;
    r.credential.source_path = std::move(source_path);
    return r;
}

std::vector<SyncedFileRecord> parse_filecache_db(const sqlite::Database& db) {
    static constexpr std::string_view columns[] = {"server_path", "local_filename", "local_mtime", "local_ctime"};
    const sqlite::TableSchema* table = db.find_table_with_columns({"server_path"});
    if (!table) throw MissingTableError("file_journal", db.table_names());
    for (auto c : columns) {
        if (!table->has_column(c)) throw MissingColumnError(table->name, std::string(c));
    }
    std::vector<SyncedFileRecord> out;
    for (const auto& row : db.read_table(table->name)) {
        SyncedFileRecord r;
        r.server_path = column_text(row, "server_path").value_or("");
        r.local_filename = column_text(row, "local_filename").value_or("");
        const auto mtime = row.integer("local_mtime").value_or(0);
        const auto ctime = row.integer("local_ctime").value_or(0);
        r.modified = normalize_unix(mtime, UnixUnit::seconds, column_text(row, "local_mtime").value_or(""));
        r.created = normalize_unix(ctime, UnixUnit::seconds, column_text(row, "local_ctime").value_or(""));
        out.push_back(std::move(r));
    }
    return out;
}

IosAccount parse_ios_plist(const plist::Value& root) {
    IosAccount a;
    if (const auto* v = root.find("Dropbox Username")) a.email = v->string();
    if (const auto* v = root.find("AnalyticsLastUploaded"); v && v->date()) a.first_login = services::plist_time(*v->date());
    return a;
}

namespace {

void read_activity(const FileInput& in, std::string_view time_column, std::string kind, std::string label,
                   ActivityResult& out) {
    sqlite::Database db(in.bytes);
    const auto* table = db.find_table_with_columns({"ZPATH", time_column});
    if (!table) {
        out.diagnostics.push_back(warning(in, "no table with ZPATH and " + std::string(time_column) + "; store skipped"));
        return;
    }
    for (const auto& row : db.read_table(table->name)) {
        auto r = make_record(Service::dropbox, in, kind);
        const auto path = column_text(row, "ZPATH");
        if (path) {
            r.subject = *path;
            r.attributes.set("path", *path);
        }
        if (const auto t = row.real(time_column))
            r.add_time(label, normalize_apple_absolute(*t, column_text(row, time_column).value_or("")));
        out.records.push_back(std::move(r));
    }
}

}  // namespace

ActivityResult parse_ios_activity(const FileInput* viewed, const FileInput* uploads) {
    ActivityResult out;
    if (viewed) read_activity(*viewed, "ZLASTVIEWDDATE", "file-viewed", "viewed", out);
    if (uploads) read_activity(*uploads, "ZDATEUPLOADED", "file-uploaded", "uploaded", out);
    return out;
}

std::optional<std::int64_t> parse_human_size(std::string_view text) {
    static const std::regex re(R"(^\s*([0-9]+(?:\.[0-9]+)?)\s*([KMGT]?)B?\s*$)", std::regex::icase);
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(text.begin(), text.end(), m, re)) return std::nullopt;
    const auto number = text::parse_double(m[1].str());
    if (!number) return std::nullopt;
    const char unit = m[2].length() ? static_cast<char>(std::toupper(static_cast<unsigned char>(*m[2].first))) : ' ';
    double scale = 1;
    switch (unit) {
        case 'K': scale = 1024.0; break;
        case 'M': scale = 1024.0 * 1024; break;
        case 'G': scale = 1024.0 * 1024 * 1024; break;
        case 'T': scale = 1024.0 * 1024 * 1024 * 1024; break;
        default: break;
    }
    return static_cast<std::int64_t>(std::llround(*number * scale));
}

namespace {

void read_android_store(const FileInput& in, AndroidStores& out) {
    sqlite::Database db(in.bytes);
    if (const auto* kv = db.find_table_with_columns({"pref_name", "pref_value"})) {
        for (const auto& row : db.read_table(kv->name)) {
            const auto name = column_text(row, "pref_name");
            const auto value = column_text(row, "pref_value");
            if (!name || !value) continue;
            if (*name == "DISPLAY_NAME") out.profile.display_name = *value;
            else if (*name == "COUNTRY") out.profile.country = *value;
            else if (*name == "EMAIL") out.profile.email = *value;
        }
    }
    if (const auto* files = db.find_table_with_columns({"modified", "_display_name", "size"})) {
        for (const auto& row : db.read_table(files->name)) {
            auto r = make_record(Service::dropbox, in, "file-uploaded");
            if (const auto name = column_text(row, "_display_name")) {
                r.subject = *name;
                r.attributes.set("display_name", *name);
            }
            if (const auto size = column_text(row, "size")) {
                r.attributes.set("size", *size);
                if (const auto bytes = parse_human_size(*size)) r.attributes.set("size_bytes", std::to_string(*bytes));
            }
            if (const auto modified = column_text(row, "modified")) r.add_time("modified", parse_date_text(*modified, DateDialect::rfc1123));
            out.records.push_back(std::move(r));
        }
    }
}

}  // namespace

AndroidStores parse_android_stores(const FileInput* prefs_db, const FileInput* db_db) {
    AndroidStores out;
    if (prefs_db) read_android_store(*prefs_db, out);
    if (db_db) read_android_store(*db_db, out);
    return out;
}

namespace {

std::string classify_log(std::string_view component, std::string_view message) {
    if (text::icontains(message, "authenticat")) return "auth-state";
    if (text::icontains(message, "has been started") || text::icontains(message, "starting up")) return "service-start";
    if (text::icontains(message, "has been stopped") || text::icontains(message, "shutting down") ||
        text::icontains(message, "destroyed"))
        return "service-stop";
    if (text::icontains(message, "SCREEN_") || text::icontains(component, ".lock.")) return "screen-lock";
    if (message.find(" /") != std::string_view::npos || message.find(": /") != std::string_view::npos) return "file-watch";
    return "other";
}

}  // namespace

std::vector<ArtifactRecord> parse_android_log(std::string_view text, const FileInput& in) {
    std::vector<ArtifactRecord> out;
    const auto lines = text::split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string_view line = lines[n];
        if (n + 1 == lines.size() && line.empty()) break;  // trailing newline
        auto r = make_record(Service::dropbox, in, "other");
        r.attributes.set("line", std::to_string(n + 1));

        std::size_t d = 0;
        while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
        const std::size_t comp_end = d < line.size() && line[d] == ' ' ? line.find(' ', d + 1) : std::string_view::npos;
        if (d == 0 || d > 16 || comp_end == std::string_view::npos) {
            r.attributes.set("message", std::string(line));
            out.push_back(std::move(r));
            continue;
        }
        const std::string_view stamp = line.substr(0, d);
        const std::string_view component = line.substr(d + 1, comp_end - d - 1);
        const std::string_view message = line.substr(comp_end + 1);
        r.kind = classify_log(component, message);
        r.attributes.set("component", std::string(component));
        r.attributes.set("message", std::string(message));
        if (const auto ms = text::parse_int(stamp)) r.add_time("logged", normalize_unix(*ms, UnixUnit::milliseconds, std::string(stamp)));
        if (r.kind == "file-watch") {
            const auto slash = message.find(" /");
            r.subject = std::string(text::trim(message.substr(slash + 1)));
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

void emit_config(const FileInput& in, ParseOutput& out) {
    auto result = parse_config_db(sqlite::Database(in.bytes), in.source_path);
    auto profile = make_record(Service::dropbox, in, "account-profile");
    if (result.profile.email) {
        profile.subject = *result.profile.email;
        profile.attributes.set("email", *result.profile.email);
    }
    if (result.profile.dropbox_path) profile.attributes.set("dropbox_path", *result.profile.dropbox_path);
    out.records.push_back(std::move(profile));
    for (std::size_t i = 0; i < result.profile.recent_entries.size(); ++i) {
        const auto& e = result.profile.recent_entries[i];
        auto r = make_record(Service::dropbox, in, "recent-file");
        r.subject = e.path;
        r.attributes.set("rank", std::to_string(i));
        if (e.server_id) r.attributes.set("server_id", *e.server_id);
        r.attributes.set("path", e.path);
        out.records.push_back(std::move(r));
    }
    result.credential.device = in.device;
    out.credentials.push_back(std::move(result.credential));
}

void emit_filecache(const FileInput& in, ParseOutput& out) {
    for (auto& f : parse_filecache_db(sqlite::Database(in.bytes))) {
        auto r = make_record(Service::dropbox, in, "file-synced");
        r.subject = f.local_filename;
        r.attributes.set("server_path", f.server_path);
        r.attributes.set("local_filename", f.local_filename);
        r.add_time("modified", std::move(f.modified));
        r.add_time("created", std::move(f.created));
        out.records.push_back(std::move(r));
    }
}

void emit_account(const FileInput& in, const std::optional<std::string>& email, ParseOutput& out) {
    if (!email) return;
    auto c = CredentialFinding::account_only(Service::dropbox, *email, in.source_path);
    c.device = in.device;
    out.credentials.push_back(std::move(c));
}

void emit_ios_plist(const FileInput& in, ParseOutput& out) {
    const auto account = parse_ios_plist(plist::parse(in.bytes));
    auto r = make_record(Service::dropbox, in, "account-login");
    if (account.email) {
        r.subject = *account.email;
        r.attributes.set("email", *account.email);
    }
    if (account.first_login) r.add_time("first_login", *account.first_login);
    out.records.push_back(std::move(r));
    emit_account(in, account.email, out);
}

void emit_android_store(const FileInput& in, ParseOutput& out) {
    auto stores = parse_android_stores(&in, nullptr);
    const auto& p = stores.profile;
    if (p.display_name || p.country || p.email) {
        auto r = make_record(Service::dropbox, in, "account-profile");
        if (p.email) {
            r.subject = *p.email;
            r.attributes.set("email", *p.email);
        }
        if (p.display_name) r.attributes.set("display_name", *p.display_name);
        if (p.country) r.attributes.set("country", *p.country);
        out.records.push_back(std::move(r));
        emit_account(in, p.email, out);
    }
    for (auto& r : stores.records) out.records.push_back(std::move(r));
}

void emit_sdcard(const FileInput& in, ParseOutput& out) {
    auto r = make_record(Service::dropbox, in, "file-present");
    r.subject = std::string(text::basename(in.source_path));
    r.attributes.set("size_bytes", std::to_string(in.bytes.size()));
    r.attributes.set(std::string(codec::kHashAlgorithm), codec::sha256_hex(in.bytes));
    out.records.push_back(std::move(r));
}

}  // namespace

bool handle(std::string_view parser, const FileInput& in, ParseOutput& out) {
    if (parser == "dropbox.config-db") emit_config(in, out);
    else if (parser == "dropbox.filecache-db") emit_filecache(in, out);
    else if (parser == "dropbox.ios-plist") emit_ios_plist(in, out);
    else if (parser == "dropbox.ios-viewed" || parser == "dropbox.ios-uploads") {
        auto res = parser == "dropbox.ios-viewed" ? parse_ios_activity(&in, nullptr) : parse_ios_activity(nullptr, &in);
        for (auto& r : res.records) out.records.push_back(std::move(r));
        for (auto& d : res.diagnostics) out.diagnostics.push_back(std::move(d));
    } else if (parser == "dropbox.android-prefs" || parser == "dropbox.android-db") emit_android_store(in, out);
    else if (parser == "dropbox.android-log") {
        for (auto& r : parse_android_log(text::as_chars(in.bytes), in)) out.records.push_back(std::move(r));
    } else if (parser == "dropbox.sdcard-file") emit_sdcard(in, out);
    else return false;
    return true;
}

}  // namespace cloudtrace::dropbox
