#include "support.hpp"

#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/fixtures.hpp>
#include <cloudtrace/services/dropbox.hpp>
#include <cloudtrace/services/evernote.hpp>
#include <cloudtrace/services/gdocs.hpp>
#include <cloudtrace/services/s3.hpp>

#include <doctest.h>

using namespace cloudtrace;
using cloudtrace::testing::TempDir;

namespace {

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

std::string b64(std::string_view s) { return codec::base64_encode(bytes(s)); }

sqlite::Database make_db(const std::vector<std::string>& sql) {
    TempDir dir("svc");
    fixtures::write_sqlite(dir / "x.db", sql);
    return sqlite::Database::open(dir / "x.db");
}

}  // namespace

// ---- Dropbox ----

TEST_CASE("recent list in both serializations") {
    const std::vector<dropbox::RecentEntry> want = {{"1", "/paper101.doc"}, {"22", "/Digital Forensic of Cloud.pdf"}, {"3", "/a b.pdf"}};
    SUBCASE("line oriented") {
        const auto got = dropbox::extract_recent_list(
            "(lp1\n(V1./paper101.doc\np2\nI100\ntp3\na(V22./Digital Forensic of Cloud.pdf\np4\nNtp5\na(V3./a b.pdf\np6\nNtp7\na.");
        CHECK(got == want);
    }
    SUBCASE("flattened onto one line") {
        const auto got =
            dropbox::extract_recent_list("(lp1 (V1./paper101.doc 100 tp2 a(V22./Digital Forensic of Cloud.pdf Ntp3 a(V3./a b.pdf Ntp4 a.");
        CHECK(got == want);
    }
    SUBCASE("nothing recognizable") { CHECK(dropbox::extract_recent_list("garbage").empty()); }
}

TEST_CASE("config database") {
    const auto db = make_db({"CREATE TABLE config (key TEXT, value TEXT)", "INSERT INTO config VALUES ('email', 'x@y.z')",
                             "INSERT INTO config VALUES ('dropbox_path', 'C:\\Users\\u\\Dropbox')",
                             "INSERT INTO config VALUES ('recently_changed3', '(lp1\n(V7./one.txt\np2\nNtp3\na(V8./two.txt\np4\nNtp5\na.')"});
    const auto r = dropbox::parse_config_db(db, "AppData/Roaming/Dropbox/config.db");
    CHECK(r.profile.email == "x@y.z");
    CHECK(r.profile.dropbox_path == "C:\\Users\\u\\Dropbox");
    REQUIRE(r.profile.recent_entries.size() == 2);
    CHECK(r.profile.recent_entries[1].path == "/two.txt");
    CHECK(r.credential.secret_kind == SecretKind::portable_session_file);
    CHECK(r.credential.enables_remote_access);
    CHECK(r.credential.account_id == "x@y.z");

    CHECK_THROWS_AS(dropbox::parse_config_db(make_db({"CREATE TABLE other (a TEXT)"}), "c"), MissingTableError);
}

TEST_CASE("filecache names the missing column") {
    const auto db = make_db({"CREATE TABLE file_journal (server_path TEXT, local_mtime INTEGER)"});
    try {
        (void)dropbox::parse_filecache_db(db);
        FAIL("expected MissingColumnError");
    } catch (const MissingColumnError& e) {
        CHECK((e.column() == "local_filename" || e.column() == "local_ctime"));
        CHECK(std::string(e.what()).find(e.column()) != std::string::npos);
    }
}

TEST_CASE("human readable sizes") {
    CHECK(dropbox::parse_human_size("47.9KB") == 49050);
    CHECK(dropbox::parse_human_size("1.2KB") == 1229);
    CHECK(dropbox::parse_human_size("512 B") == 512);
    CHECK(dropbox::parse_human_size("2MB") == 2097152);
    CHECK(dropbox::parse_human_size("3") == 3);
    CHECK_FALSE(dropbox::parse_human_size("big"));
    CHECK_FALSE(dropbox::parse_human_size(""));
}

// ---- Amazon S3 ----

TEST_CASE("bucket log lines") {
    const std::string canonical =
        "79a59df900b949e55d96a1e698fbacedfd6e09d98eacf8f8d5218e7cd47ef2be mybucket [06/Jan/2012:08:42:20 +0000] 10.186.158.41 "
        "79a59df900b949e55d96a1e698fbacedfd6e09d98eacf8f8d5218e7cd47ef2be 3E57427F3EXAMPLE REST.DELETE.OBJECT File%20Name "
        "\"DELETE /mybucket/File%20Name HTTP/1.1\" 204 - - 12 24 - \"-\" \"S3Console/0.4\"";
    const auto e = s3::parse_bucket_log_line(canonical);
    CHECK(e.bucket == "mybucket");
    CHECK(e.time.iso() == "2012-01-06T08:42:20Z");
    CHECK(e.operation == "REST.DELETE.OBJECT");
    CHECK(e.http_status == 204);
    CHECK_FALSE(e.error_code);
    CHECK_FALSE(e.bytes_sent);
    CHECK(e.object_size == 12);
    CHECK_FALSE(e.referrer);
    CHECK(e.user_agent == "S3Console/0.4");
    CHECK(s3::format_bucket_log_line(e) == canonical);

    SUBCASE("fully bracketed rendering parses to the same entry") {
        const std::string bracketed =
            "79a59df900b949e55d96a1e698fbacedfd6e09d98eacf8f8d5218e7cd47ef2be mybucket [06/Jan/2012:08:42:20 +0000] [10.186.158.41] "
            "[79a59df900b949e55d96a1e698fbacedfd6e09d98eacf8f8d5218e7cd47ef2be] [3E57427F3EXAMPLE] [REST.DELETE.OBJECT] "
            "[File%20Name] [\"DELETE /mybucket/File%20Name HTTP/1.1\"] [204] [-] [-] [12] [24] [-] [\"-\"] [\"S3Console/0.4\"]";
        CHECK(s3::parse_bucket_log_line(bracketed) == e);
    }
    SUBCASE("malformed lines") {
        CHECK_THROWS_AS(s3::parse_bucket_log_line("owner bucket [06/Jan/2012:08:42:20 +0000] ip"), ParseError);
        CHECK_THROWS_AS(s3::parse_bucket_log_line(canonical.substr(0, 40)), ParseError);
        std::string bad_status = canonical;
        bad_status.replace(bad_status.find(" 204 "), 5, " 999 ");
        CHECK_THROWS_AS(s3::parse_bucket_log_line(bad_status), ParseError);
    }
}

TEST_CASE("shortcut names that leak S3 file names") {
    const auto t = s3::detect_lnk_trace("Report.pptx on s3.amazonaws.com.lnk");
    REQUIRE(t);
    CHECK(t->file_name == "Report.pptx");
    CHECK(t->office_document);
    CHECK_FALSE(s3::detect_lnk_trace("photo.png on s3.amazonaws.com.lnk")->office_document);
    CHECK_FALSE(s3::detect_lnk_trace("Report.pptx.lnk"));
    CHECK_FALSE(s3::detect_lnk_trace(" on s3.amazonaws.com.lnk"));
}

TEST_CASE("iAws accounts plist") {
    plist::Value root = plist::Dict{{"ACCOUNTS", plist::Array{"HyunjiChung<$$$>Access Key ID<$$$>Secret Access Key<$$$>0", "broken"}}};
    const auto a = s3::parse_iaws_plist(root, "p");
    REQUIRE(a.accounts.size() == 1);
    CHECK(a.accounts[0].display_name == "HyunjiChung");
    CHECK(a.accounts[0].access_key_id == "Access Key ID");
    CHECK(a.accounts[0].secret_access_key == "Secret Access Key");
    CHECK(a.malformed == std::vector<std::string>{"broken"});
}

TEST_CASE("s3anywhere preferences decode per bucket") {
    const std::string xml = "<map><string name=\"s3.keyid[b1]\">" + b64("AKIA1") + "</string><string name=\"s3.sync.last.date[b1]\">" +
                            b64("1310618312848") + "</string><string name=\"s3.remotedir[b2]\">%%%</string>" +
                            "<string name=\"s3.key[b2]\">" + codec::base64_encode(std::vector<std::uint8_t>{0xff, 0xfe}) +
                            "</string><string name=\"s3.sync.last.date[b2]\">" + b64("1310618312") + "</string></map>";
    const auto buckets = s3::parse_s3anywhere_xml(xml);
    REQUIRE(buckets.size() == 2);
    CHECK(buckets[0].bucket == "b1");
    CHECK(buckets[0].access_key_id->text == "AKIA1");
    CHECK(buckets[0].last_sync->iso() == "2011-07-14T04:38:32Z");  // milliseconds
    CHECK(buckets[1].last_sync->iso() == "2011-07-14T04:38:32Z");  // seconds
    CHECK(buckets[1].remote_dir->decode_failed);
    CHECK(buckets[1].remote_dir->text == "%%%");
    CHECK(buckets[1].secret_key->non_utf8);
    CHECK(buckets[1].secret_key->text == "fffe");
    CHECK(s3::parse_s3anywhere_xml("").empty());
}

// ---- Evernote ----

TEST_CASE("thumbnail container edge cases") {
    CHECK_THROWS_AS(evernote::carve_thumbnails(bytes("PNG0 not a container")), ParseError);
    const auto one = fixtures::make_png(4, 4, 9);
    const auto c = fixtures::ent0_container({one});
    const auto carved = evernote::carve_thumbnails(c);
    REQUIRE(carved.size() == 1);
    CHECK(carved[0].offset == evernote::kThumbnailHeaderBytes);
    CHECK(carved[0].metadata_hex.size() <= 32);
    CHECK(carved[0].bytes == one);
}

TEST_CASE("index gaps") {
    const std::vector<std::int64_t> idx = {5, 1, 2, 9, 2};
    CHECK(evernote::detect_index_gaps(idx) == std::vector<std::int64_t>{3, 4, 6, 7, 8});
    CHECK(evernote::detect_index_gaps(std::vector<std::int64_t>{}).empty());
    CHECK(evernote::detect_index_gaps(std::vector<std::int64_t>{4}).empty());
}

TEST_CASE("desktop log with header offset and day rollover") {
    const std::string log =
        "Log opened on 2011/06/01 23:59:50 (UTC+9:00)\n"
        "23:59:55 [3036] 0% Authenticating user \"someone\"\n"
        "00:00:05 [4900] Syncing note 'late'\n";
    const auto events = evernote::parse_app_log(log, evernote::LogDialect::windows_applog);
    REQUIRE(events.size() == 3);
    CHECK(events[0].kind == evernote::AppEventKind::session_open);
    CHECK(events[0].timestamp->iso() == "2011-06-01T14:59:50Z");
    CHECK(events[1].kind == evernote::AppEventKind::auth_attempt);
    CHECK(events[1].account == "someone");
    CHECK(events[2].kind == evernote::AppEventKind::note_sync);
    CHECK(events[2].target == "late");
    CHECK(events[2].timestamp->iso() == "2011-06-01T15:00:05Z");
    CHECK(events[2].line == 3);
}

TEST_CASE("iOS log lines carry local time") {
    const auto events = evernote::parse_app_log(
        "2011-06-03 16:07:05.129 [lvl=2] -[ENSyncEngine sync] Starting sync\n"
        "2011-06-03 16:07:08.661 [lvl=2] -[ENSyncEngine(Notes) updateServerNoteFromLocalNote:] Syncing note 'hallo'\n",
        evernote::LogDialect::ios_applog);
    REQUIRE(events.size() == 2);
    CHECK(events[1].kind == evernote::AppEventKind::note_sync);
    CHECK(events[1].target == "hallo");
    CHECK(events[1].timestamp->has(Confidence::ambiguous_timezone));
}

TEST_CASE("Android note database") {
    const auto db = make_db({"CREATE TABLE notes (title TEXT, country TEXT, created INTEGER, updated INTEGER, deleted INTEGER, "
                             "is_active INTEGER, latitude REAL, longitude REAL, source TEXT)",
                             "INSERT INTO notes VALUES ('Note Test', 'South Korea', 1307084962000, 1307426703000, 0, 1, 37.5902, "
                             "127.026, 'mobile.iphone')",
                             "INSERT INTO notes VALUES ('Gone', NULL, 1307084962000, 1307084962000, 1, 0, NULL, NULL, NULL)"});
    const auto notes = evernote::parse_android_db(db);
    REQUIRE(notes.size() == 2);
    CHECK(notes[0].created->iso() == "2011-06-03T07:09:22Z");
    CHECK(notes[0].updated->iso() == "2011-06-07T06:05:03Z");
    CHECK(notes[0].availability == true);
    CHECK_FALSE(notes[0].is_deleted);
    CHECK(notes[0].latitude == doctest::Approx(37.5902));
    CHECK(notes[0].country == "South Korea");
    CHECK(notes[1].is_deleted);
    CHECK(notes[1].availability == false);
}

// ---- Google Docs ----

TEST_CASE("temporary file names") {
    const auto list = gdocs::classify_temp_file("DOCS_GOOGLE_COM[3].htm");
    REQUIRE(list);
    CHECK(list->kind == gdocs::TempKind::doc_list);
    CHECK(list->sequence_n == 3);
    CHECK(gdocs::classify_temp_file("edit[1].htm")->kind == gdocs::TempKind::document_view_or_edit);
    CHECK(gdocs::classify_temp_file("ccc[2].htm")->kind == gdocs::TempKind::spreadsheet);
    CHECK(gdocs::classify_temp_file("viewer[1].png")->kind == gdocs::TempKind::pdf_viewer_image);
    CHECK(gdocs::classify_temp_file("viewer[1].xml")->kind == gdocs::TempKind::pdf_viewer_text);
    CHECK_FALSE(gdocs::classify_temp_file("edit[1].png"));
    CHECK_FALSE(gdocs::classify_temp_file("edit[0].htm"));
    CHECK_FALSE(gdocs::classify_temp_file("edit.htm"));
}

TEST_CASE("cached page detection") {
    const std::string page =
        "<html><head><title>docs</title></head><body><div id=\"goog_1311\"></div><div dir=\"ltr\">Slide one: <b>Cloud</b> "
        "forensics</div></body></html>";
    CHECK(gdocs::detect_gdocs_cache_html(page) == "Slide one: Cloud forensics");
    CHECK_FALSE(gdocs::detect_gdocs_cache_html("<html><body><div dir=\"ltr\">unrelated page</div></body></html>"));
    CHECK_FALSE(gdocs::detect_gdocs_cache_html("<html><body>docs <div id=\"goog_1\"></div></body></html>"));
}

TEST_CASE("html helpers") {
    CHECK(gdocs::html_text("<p>a&amp;b</p>\n<script>x()</script>  c") == "a&b c");
    CHECK(gdocs::harvest_anchor_texts("<a href=1>One</a> <A href=2><b>Two</b></A><a></a>") == std::vector<std::string>{"One", "Two"});
    CHECK(gdocs::extract_local_file_html("<font id='iGoogDocs-Formatted' size='17'>ios test</font>") == "ios test");
    CHECK_THROWS_AS(gdocs::extract_local_file_html("<font>ios test</font>"), ParseError);
}

TEST_CASE("service hosts") {
    CHECK(gdocs::url_host("https://docs.google.com/present/edit?id=1") == "docs.google.com");
    CHECK(gdocs::url_host("Visited: user@https://www.Dropbox.com:443/home") == "www.dropbox.com");
    CHECK(gdocs::url_host("Cookie:user@s3.amazonaws.com/") == "s3.amazonaws.com");
    CHECK(gdocs::url_host("about:blank").empty());
    CHECK(gdocs::is_service_host("www.dropbox.com"));
    CHECK(gdocs::is_service_host(".evernote.com"));
    CHECK_FALSE(gdocs::is_service_host("notdropbox.com"));
    CHECK_FALSE(gdocs::is_service_host("www.example.org"));
}

TEST_CASE("iGoogDocs settings") {
    const auto with = gdocs::parse_igoogdocs_plist(
        plist::Dict{{"username", "localchung@gmail.com"}, {"password", "googledocspassword"}, {"rememberme", true}}, "s");
    REQUIRE(with.credential);
    CHECK(with.credential->secret_kind == SecretKind::password);
    CHECK(with.credential->secret_value == "googledocspassword");

    const auto without = gdocs::parse_igoogdocs_plist(
        plist::Dict{{"username", "localchung@gmail.com"}, {"password", ""}, {"rememberme", false}}, "s");
    REQUIRE(without.credential);
    CHECK(without.credential->secret_kind == SecretKind::none);
    CHECK_FALSE(without.credential->enables_remote_access);
}

TEST_CASE("document list joins accounts to entries") {
    const auto db = make_db({"CREATE TABLE account (_id INTEGER PRIMARY KEY, accountHolderName TEXT)",
                             "CREATE TABLE entry (title TEXT, kind TEXT, creationTime INTEGER, lastModifiedTime INTEGER, "
                             "lastSyncTime INTEGER, accountId INTEGER)",
                             "INSERT INTO account VALUES (1, 'localchung@gmail.com')",
                             "INSERT INTO entry VALUES ('Hello', 'document', 1310618984190, 1310618312848, 1310618312848, 1)"});
    const auto docs = gdocs::parse_doclist_db(db);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].account_email == "localchung@gmail.com");
    CHECK(docs[0].created->iso() == "2011-07-14T04:49:44Z");
    CHECK(docs[0].time_order_violation);
}

TEST_CASE("index.dat carving") {
    const auto dat = fixtures::index_dat({{"URL ", "Visited: u@https://www.dropbox.com/home", fixtures::unix_to_filetime(1307405626)},
                                          {"URL ", "http://www.example.org/", fixtures::unix_to_filetime(1307405626)},
                                          {"LEAK", "https://docs.google.com/", 5}});
    const auto urls = gdocs::carve_index_dat_urls(dat);
    REQUIRE(urls.size() == 2);
    CHECK(urls[0].record_type == "URL");
    CHECK(urls[0].last_accessed->iso() == "2011-06-07T00:13:46Z");
    CHECK(urls[1].record_type == "LEAK");
    CHECK_FALSE(urls[1].last_accessed);
    CHECK(urls[1].timestamp_raw == 5u);
    CHECK_THROWS_AS(gdocs::carve_index_dat_urls(bytes("not an index")), ParseError);
}
