#include <cloudtrace/catalog.hpp>

#include <json.hpp>

#include <regex>

namespace cloudtrace::catalog {
namespace {

using CK = ContainerKind;

constexpr const char* kIeCacheVista = "%UserProfile%/AppData/Local/Microsoft/Windows/Temporary Internet Files/Content.IE5";
constexpr const char* kIeCacheXp = "%UserProfile%/Local Settings/Temporary Internet Files/Content.IE5";
constexpr const char* kEvernoteVista = "%UserProfile%/AppData/Local/Evernote/Evernote";
constexpr const char* kEvernoteXp = "%UserProfile%/Local Settings/Application Data/Evernote/Evernote";
constexpr const char* kMacEvernote = "/Users/[user name]/Library/Application Support/Evernote";
constexpr const char* kMacFirefoxCache = "/Users/[user name]/Library/Caches/Firefox/Profiles/[random 8 digits].default/Cache";

std::string cat(const char* dir, std::string_view tail) {
    std::string out = dir;
    out += '/';
    out += tail;
    return out;
}

CatalogEntry win(std::string id, Service svc, std::string vista, std::string xp, std::string file_name, CK kind,
                 std::string details, std::string parser) {
    CatalogEntry e;
    e.id = std::move(id);
    e.source = "service-windows";
    e.service = svc;
    e.platform = Platform::windows;
    e.path_template = std::move(vista);
    e.xp_path_template = std::move(xp);
    e.file_name = std::move(file_name);
    e.file_kind = kind;
    e.details = std::move(details);
    e.parser = std::move(parser);
    return e;
}

CatalogEntry row(std::string source, Platform platform, std::string id, Service svc, std::string path,
                 std::string file_name, CK kind, std::string details, std::string parser) {
    CatalogEntry e;
    e.id = std::move(id);
    e.source = std::move(source);
    e.service = svc;
    e.platform = platform;
    e.path_template = std::move(path);
    e.file_name = std::move(file_name);
    e.file_kind = kind;
    e.details = std::move(details);
    e.parser = std::move(parser);
    return e;
}

std::vector<CatalogEntry> build_service_rows() {
    std::vector<CatalogEntry> v;
    const auto gdocs_temp = [&](std::string id, std::string name, CK kind, std::string details, std::string parser) {
        v.push_back(win(std::move(id), Service::google_docs, cat(kIeCacheVista, "<Random>/" + name),
                        cat(kIeCacheXp, "<Random>/" + name), name, kind, std::move(details), std::move(parser)));
    };

    // Windows
    v.push_back(win("win.s3.office-recent-lnk", Service::amazon_s3,
                    "%UserProfile%/AppData/Roaming/Microsoft/Office/Recent/<File name> on s3.amazonaws.com.lnk",
                    "%UserProfile%/Application Data/Microsoft/Office/Recent/<File name> on s3.amazonaws.com.lnk",
                    "File name on s3.amazonaws.com.lnk", CK::lnk,
                    "- MS Office Files that are downloaded and opened", "s3.office-lnk"));
    v.push_back(win("win.s3.bucket-log", Service::amazon_s3, cat(kIeCacheVista, "<Random>/<Log file name>[n].txt"),
                    cat(kIeCacheXp, "<Random>/<Log file name>[n].txt"), "Log file name[n].txt", CK::text,
                    "- API that user requests - Time at which user requests API - Name of bucket that accessed Windows "
                    "system - User's canonical ID",
                    "s3.bucket-log"));
    v.push_back(win("win.dropbox.config-db", Service::dropbox, "%UserProfile%/AppData/Roaming/Dropbox/config.db",
                    "%UserProfile%/Application Data/Dropbox/config.db", "config.db", CK::sqlite3,
                    "- E-mail address for login - Files that has been accessed most recently(At most five)",
                    "dropbox.config-db"));
    v.push_back(win("win.dropbox.filecache-db", Service::dropbox, "%UserProfile%/AppData/Roaming/Dropbox/filecache.db",
                    "%UserProfile%/Application Data/Dropbox/filecache.db", "filecache.db", CK::sqlite3,
                    "- Synced file name and path of cloud server - Creation Time - Modification Time",
                    "dropbox.filecache-db"));
    v.push_back(win("win.evernote.exb", Service::evernote, cat(kEvernoteVista, "Databases/[userID].exb"),
                    cat(kEvernoteXp, "Databases/[userID].exb"), "userID.exb", CK::sqlite3,
                    "- Location that user created note - Flag that represents deletion of note - Type of smartphone "
                    "operating system - Creation Time - Modification Time - Information about attached file",
                    "evernote.note-store"));
    v.push_back(win("win.evernote.exb-thumbnails", Service::evernote, cat(kEvernoteVista, "Databases/[userID].exb.thumbnails"),
                    cat(kEvernoteXp, "Databases/[userID].exb.thumbnails"), "userID.exb.thumbnails", CK::unknown,
                    "- Combination of PNG files that take a snapshot of note", "evernote.thumbnails"));
    v.push_back(win("win.evernote.applog", Service::evernote, cat(kEvernoteVista, "Logs/AppLog_[Date].txt"),
                    cat(kEvernoteXp, "Logs/AppLog_[Date].txt"), "AppLog_Date.txt", CK::text,
                    "- Authentication information - Account ID - History of user's behavior", "evernote.applog-windows"));
    v.push_back(win("win.evernote.enclipper", Service::evernote, cat(kEvernoteVista, "Logs/enclipper_[Date].txt"),
                    cat(kEvernoteXp, "Logs/enclipper_[Date].txt"), "enclipper_Date.txt", CK::text,
                    "- Time at which Evernote started", "evernote.enclipper"));
    gdocs_temp("win.gdocs.doc-list", "docs_google_com[n].htm", CK::html, "- List of files in Google Docs", "gdocs.temp-file");
    gdocs_temp("win.gdocs.edit", "edit[n].htm", CK::html,
               "- Contents of MS Document and Presentation when browsing it - The first page of MS Document, .ppt, "
               ".txt when editing it",
               "gdocs.temp-file");
    gdocs_temp("win.gdocs.ccc", "ccc[n].htm", CK::html,
               "- Contents of MS Spreadsheet when browsing it - Contents of MS Spreadsheet when editing it",
               "gdocs.temp-file");
    gdocs_temp("win.gdocs.viewer-xml", "viewer[n].xml", CK::generic_xml, "- Text of PDF", "gdocs.temp-file");
    gdocs_temp("win.gdocs.viewer-png", "viewer[n].png", CK::png, "- Each page of PDF in image", "gdocs.temp-file");
    gdocs_temp("win.gdocs.viewer-txt", "Viewer[n].txt", CK::text, "- The metadata and contents of PDF", "gdocs.temp-file");

    // Mac
    const auto mac = [&](std::string id, Service svc, std::string path, std::string name, CK kind, std::string details,
                         std::string parser) {
        v.push_back(row("service-mac", Platform::mac, std::move(id), svc, std::move(path), std::move(name), kind,
                        std::move(details), std::move(parser)));
    };
    mac("mac.dropbox.config-db", Service::dropbox, "/Users/[user name]/.dropbox/config.db", "config.db", CK::sqlite3,
        "- E-mail address for login - Files that has been accessed most recently(At most five)", "dropbox.config-db");
    mac("mac.dropbox.filecache-db", Service::dropbox, "/Users/[user name]/.dropbox/filecache.db", "filecache.db",
        CK::sqlite3, "- Synced file name and path of cloud server - Creation Time - Modification Time",
        "dropbox.filecache-db");
    mac("mac.evernote.sql", Service::evernote, cat(kMacEvernote, "data/Evernote.sql"), "Evernote.sql", CK::sqlite3,
        "- Location that user created note - Flag that represents deletion of note - Type of smartphone operating "
        "system - Creation Time - Modification Time - Information about attached file",
        "evernote.note-store");
    mac("mac.evernote.fullscreen-thumbnail", Service::evernote, cat(kMacEvernote, "data/Contents/fullscreenThumbnail.png"),
        "fullscreenThumbnail.png", CK::png, "- Full screenshot of note", "evernote.thumbnail-png");
    mac("mac.evernote.thumbnail", Service::evernote, cat(kMacEvernote, "data/Contents/thumbnail.png"), "thumbnail.png",
        CK::png, "- Snapshot of content in note", "evernote.thumbnail-png");
    mac("mac.evernote.log", Service::evernote, cat(kMacEvernote, "logs/Evernote.log"), "Evernote.log", CK::text,
        "- Authentication information - Account ID - History of user's behavior", "evernote.applog-mac");
    mac("mac.gdocs.cache-png", Service::google_docs, cat(kMacFirefoxCache, "**/<PNG file>"), "PNG file", CK::png,
        "- Each page of uploaded file(ppt, pptx, doc, docx, pdf) in image - Each page of edited file(doc) in image",
        "gdocs.firefox-cache-png");
    v.back().requires_kind_match = true;
    mac("mac.gdocs.cache-html", Service::google_docs, cat(kMacFirefoxCache, "**/<HTML file>"), "HTML file", CK::html,
        "- Part of contents of doc when browsing it - Part of contents of ppt, pptx when editing it",
        "gdocs.firefox-cache-html");
    v.back().requires_kind_match = true;

    // iOS app sandbox
    const auto ios = [&](std::string id, Service svc, std::string path, CK kind, std::string details, std::string parser) {
        std::string name = path.substr(path.rfind('/') + 1);
        v.push_back(row("service-ios", Platform::ios, std::move(id), svc, std::move(path), std::move(name), kind,
                        std::move(details), std::move(parser)));
    };
    ios("ios.s3.iawsmanager-plist", Service::amazon_s3, "Library/Preferences/com.moninnovations.iAwsManager.plist",
        CK::binary_plist, "- User's name - User's access Key ID - User's secret access Key", "s3.iawsmanager-plist");
    ios("ios.s3.iawsmanager-db", Service::amazon_s3, "Documents/iAwsManager/iAwsManager.3.0.db", CK::sqlite3,
        "- Path, eTag, name and size of downloaded file - Name of bucket that accessed iPhone - Time at which file was "
        "downloaded",
        "s3.iawsmanager-db");
    ios("ios.dropbox.plist", Service::dropbox, "Library/Preferences/com.getdropbox.Dropbox.plist", CK::binary_plist,
        "- E-mail address for login - The first login time", "dropbox.ios-plist");
    ios("ios.dropbox.viewed-sqlite", Service::dropbox, "Documents/Dropbox.sqlite", CK::sqlite3,
        "- Time at which user browsed folder or file - Name and path of file that user browsed", "dropbox.ios-viewed");
    ios("ios.dropbox.uploads-sqlite", Service::dropbox, "Documents/Uploads.sqlite", CK::sqlite3,
        "- Time at which file was uploaded - Name and path of uploaded file", "dropbox.ios-uploads");
    ios("ios.evernote.applog", Service::evernote, "Documents/www.evernote.com/User/applog.txt", CK::text,
        "- Beginning and end of service access - Beginning and end of synchronization time - connection "
        "status(Wi-Fi, 3G)",
        "evernote.applog-ios");
    ios("ios.evernote.plist", Service::evernote, "Library/Preferences/com.evernote.iPhone.Evernote.plist",
        CK::binary_plist, "- Account ID", "evernote.ios-plist");
    ios("ios.evernote.sqlite", Service::evernote, "Documents/www.evernote.com/User/Evernote2.sqlite", CK::sqlite3,
        "- Time at which user created and modified note - Location that user created note - Flag that represents "
        "deletion of note - Type of smartphone operating system - Information about attached file - Title and "
        "contents of note",
        "evernote.ios-store");
    ios("ios.evernote.sqlite-md", Service::evernote, "Documents/www.evernote.com/User/Evernote2.sqlite.md",
        CK::xml_plist, "- The latest synchronization time", "evernote.ios-md");
    ios("ios.gdocs.igoogdocs-plist", Service::google_docs, "Library/Preferences/com.jade.iGoogDocs.plist",
        CK::binary_plist,
        "- Value for auto login that can be true or false - User's Google Docs ID - User's Google Docs Password "
        "(when auto login is true)",
        "gdocs.igoogdocs-plist");
    ios("ios.gdocs.local-file", Service::google_docs, "Documents/[Title of Document].txt", CK::html,
        "- Contents of created text file", "gdocs.igoogdocs-local-file");
    v.back().file_name = "[Title of Document].txt";
    v.back().requires_kind_match = true;

    // Android
    const auto android = [&](std::string id, Service svc, std::string path, std::string name, CK kind,
                             std::string details, std::string parser) {
        v.push_back(row("service-android", Platform::android, std::move(id), svc, std::move(path), std::move(name), kind,
                        std::move(details), std::move(parser)));
    };
    android("android.s3.shared-prefs", Service::amazon_s3, "/data/data/s3anywherepro/shared_prefs/<XML file>", "XML file",
            CK::generic_xml,
            "- Bucket name that accessed Android smartphone - Folder's name on Amazon S3 - User's access Key ID - "
            "User's secret access Key - The last synchronization time - Path of local directory",
            "s3.s3anywhere-prefs");
    android("android.dropbox.prefs-db", Service::dropbox, "/data/data/com.dropbox.android/database/prefs.db", "prefs.db",
            CK::sqlite3, "- User's name - E-mail address for login", "dropbox.android-prefs");
    android("android.dropbox.db-db", Service::dropbox, "/data/data/com.dropbox.android/database/db.db", "db.db",
            CK::sqlite3, "- Name, size, and time of modification of uploaded file", "dropbox.android-db");
    android("android.dropbox.log", Service::dropbox, "/data/data/com.dropbox.android/files/log.txt", "log.txt",
            CK::text, "- Success or failure of login attempts - Beginning and end of the service - File "
                      "synchronization time",
            "dropbox.android-log");
    android("android.dropbox.sdcard", Service::dropbox, "/sdcard/dropbox/**/<Downloaded file>", "-", CK::unknown,
            "- Existence of file that user downloaded", "dropbox.sdcard-file");
    android("android.evernote.db", Service::evernote, "/data/data/com.evernote/databases/Evernote.db", "Evernote.db",
            CK::sqlite3,
            "- Location that user created note - Flag that represents deletion of note - Flag that represents "
            "availability of note - Type of smartphone operating system - Creation Time - Modification Time - Time at "
            "which note moved to bin",
            "evernote.android-db");
    android("android.evernote.content", Service::evernote, "/sdcard/Evernote/notes/**/content.enml", "content.enml",
            CK::unknown, "- Contents of note", "evernote.enml");
    android("android.evernote.notethumbs", Service::evernote, "/sdcard/Evernote/notethumbs/**/<Image file>", "-",
            CK::unknown, "- Image file that take a snapshot of note", "evernote.notethumb");
    android("android.gdocs.doclist", Service::google_docs,
            "/data/data/com.google.android.apps.docs/databases/DocList.db", "DocList.db", CK::sqlite3,
            "- Email address of the account that accessed smartphone and the last synchronization time - Title of "
            "file - Type of file - Time of the first upload and the last modification",
            "gdocs.doclist");
    android("android.gdocs.drive-prefs", Service::google_docs,
            "/data/data/com.google.android.apps.docs/shared_prefs/GoogleDriveSharedPreferences.xml",
            "GoogleDriveSharedPreferences.xml", CK::generic_xml, "- Email address that the administrator has used",
            "gdocs.shared-prefs");
    android("android.gdocs.webview", Service::google_docs,
            "/data/data/com.google.android.apps.docs/shared_prefs/webview.xml", "webview.xml", CK::generic_xml,
            "- The latest email address that has connected to Google Docs", "gdocs.shared-prefs");
    return v;
}

std::vector<CatalogEntry> build_browser() {
    std::vector<CatalogEntry> v;
    const auto ie = [&](std::string id, std::string data, std::string vista, std::optional<std::string> xp,
                        std::string name, CK kind, std::string parser) {
        CatalogEntry e;
        e.id = std::move(id);
        e.source = "browser-ie";
        e.service = Service::browser;
        e.platform = Platform::windows;
        e.path_template = std::move(vista);
        e.xp_path_template = std::move(xp);
        e.file_name = std::move(name);
        e.file_kind = kind;
        e.details = std::move(data);
        e.parser = std::move(parser);
        v.push_back(std::move(e));
    };
    ie("win.ie.cache-index", "Cache", cat(kIeCacheVista, "index.dat"), cat(kIeCacheXp, "index.dat"), "index.dat",
       CK::index_dat, "browser.index-dat");
    ie("win.ie.cache-files", "Cache", cat(kIeCacheVista, "<Random>/<All of the files>"),
       cat(kIeCacheXp, "<Random>/<All of the files>"), "<All of the files>", CK::unknown, "");
    ie("win.ie.history-index", "History", "%UserProfile%/AppData/Local/Microsoft/Windows/History/History.IE5/index.dat",
       "%UserProfile%/Local Settings/History/History.IE5/index.dat", "index.dat", CK::index_dat, "browser.index-dat");
    ie("win.ie.cookie-index", "Cookie", "%UserProfile%/AppData/Roaming/Microsoft/Windows/Cookies/index.dat",
       "%UserProfile%/Cookies/index.dat", "index.dat", CK::index_dat, "browser.index-dat");
    ie("win.ie.cookie-files", "Cookie", "%UserProfile%/AppData/Roaming/Microsoft/Windows/Cookies/<All of the files>",
       "%UserProfile%/Cookies/<All of the text file>", "<All of the files>", CK::text, "");
    ie("win.ie.download-index", "Download",
       "%UserProfile%/AppData/Roaming/Microsoft/Windows/IEDownloadHistory/index.dat", std::nullopt, "index.dat",
       CK::index_dat, "browser.index-dat");

    const auto ff = [&](std::string id, std::string data, std::string path, CK kind, std::string parser) {
        std::string name = path.substr(path.rfind('/') + 1);
        v.push_back(row("browser-firefox", Platform::mac, std::move(id), Service::browser, std::move(path), std::move(name), kind,
                        std::move(data), std::move(parser)));
    };
    const std::string ff_root = "/Users/<user name>/Library/Application Support/Firefox/Profiles/xxxxxxxx.default/";
    ff("mac.firefox.cache-map", "Cache",
       "/Users/<user name>/Library/Caches/Firefox/Profiles/xxxxxxxx.default/Cache/_CACHE_MAP", CK::unknown, "");
    ff("mac.firefox.places", "History", ff_root + "places.sqlite", CK::sqlite3, "browser.firefox-places");
    ff("mac.firefox.cookies", "Cookie", ff_root + "cookies.sqlite", CK::sqlite3, "browser.firefox-cookies");
    ff("mac.firefox.session", "Session", ff_root + "sessionstore.js", CK::text, "");
    return v;
}

}  // namespace

std::string_view to_string(Platform p) {
    switch (p) {
        case Platform::windows: return "windows";
        case Platform::mac: return "mac";
        case Platform::ios: return "ios";
        case Platform::android: return "android";
    }
    return "windows";
}

Platform platform_of(OsFamily f) {
    switch (f) {
        case OsFamily::windows_xp:
        case OsFamily::windows_vista7: return Platform::windows;
        case OsFamily::mac: return Platform::mac;
        case OsFamily::ios_app_sandbox: return Platform::ios;
        case OsFamily::android_data: return Platform::android;
    }
    return Platform::windows;
}

bool CatalogEntry::applies_to(OsFamily family) const {
    if (platform_of(family) != platform) return false;
    if (family == OsFamily::windows_xp) return xp_path_template.has_value();
    if (family == OsFamily::windows_vista7) return vista7;
    return true;
}

const std::string& CatalogEntry::template_for(OsFamily family) const {
    if (family == OsFamily::windows_xp && xp_path_template) return *xp_path_template;
    return path_template;
}

const std::vector<CatalogEntry>& service_entries() {
    static const std::vector<CatalogEntry> entries = build_service_rows();
    return entries;
}

const std::vector<CatalogEntry>& browser_entries() {
    static const std::vector<CatalogEntry> entries = build_browser();
    return entries;
}

const std::vector<const CatalogEntry*>& all_entries() {
    static const std::vector<const CatalogEntry*> all = [] {
        std::vector<const CatalogEntry*> v;
        for (const auto& e : service_entries()) v.push_back(&e);
        for (const auto& e : browser_entries()) v.push_back(&e);
        return v;
    }();
    return all;
}

std::string expand_template(std::string_view path_template, std::string_view root, OsFamily family) {
    std::string t(path_template);
    const auto replace_prefix = [&](std::string_view prefix) {
        if (t.rfind(prefix, 0) != 0) return false;
        std::string rest = t.substr(prefix.size());
        if (!rest.empty() && rest.front() == '/') rest.erase(0, 1);
        t = root.empty() ? rest : std::string(root) + "/" + rest;
        return true;
    };
    if (!replace_prefix("%UserProfile%") && !replace_prefix("%Profile%") && !replace_prefix("/Users/[user name]") &&
        !replace_prefix("/Users/<user name>")) {
        if (!t.empty() && t.front() == '/') t.erase(0, 1);
        if (family == OsFamily::ios_app_sandbox && !root.empty()) t = std::string(root) + "/" + t;
    }
    // "[n]" is the browser's literal duplicate counter: keep the brackets, wildcard the digits.
    static const std::regex counter(R"(\[n\])");
    static const std::regex square(R"(\[[^\]]+\])");
    static const std::regex angle(R"(<[^>]+>)");
    static const std::regex random_profile(R"(xxxxxxxx\.default)");
    static const std::regex sentinel("\x01");
    t = std::regex_replace(t, counter, "\x01");
    t = std::regex_replace(t, square, "*");
    t = std::regex_replace(t, angle, "*");
    t = std::regex_replace(t, random_profile, "*.default");
    std::string out = std::regex_replace(t, sentinel, "[*]");
    return out;
}

std::vector<ExpandedPattern> expand_catalog(const DeviceProfile& profile) {
    std::vector<ExpandedPattern> out;
    std::vector<std::string> roots = profile.profile_roots;
    if (roots.empty()) roots.emplace_back();
    for (const CatalogEntry* e : all_entries()) {
        if (!e->applies_to(profile.os_family)) continue;
        for (const auto& root : roots) {
            out.push_back({expand_template(e->template_for(profile.os_family), root, profile.os_family), e, root});
        }
    }
    return out;
}

namespace {
nlohmann::ordered_json entry_json(const CatalogEntry& e) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["source"] = e.source;
    j["service"] = std::string(to_string(e.service));
    j["platform"] = std::string(to_string(e.platform));
    j["path_template"] = e.path_template;
    if (e.xp_path_template) j["xp_path_template"] = *e.xp_path_template;
    j["file_name"] = e.file_name;
    j["file_kind"] = std::string(to_string(e.file_kind));
    j["details"] = e.details;
    j["parser"] = e.parser;
    return j;
}

bool keep(const CatalogEntry& e, const CatalogFilter& f) {
    return (!f.service || *f.service == e.service) && (!f.platform || *f.platform == e.platform);
}
}  // namespace

std::string catalog_json(const CatalogFilter& filter) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["service_row_total"] = kServiceRowTotal;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : service_entries())
        if (keep(e, filter)) entries.push_back(entry_json(e));
    auto browser = nlohmann::ordered_json::array();
    for (const auto& e : browser_entries())
        if (keep(e, filter)) browser.push_back(entry_json(e));
    doc["entries"] = std::move(entries);
    doc["browser_locations"] = std::move(browser);
    return doc.dump(2) + "\n";
}

}  // namespace cloudtrace::catalog
