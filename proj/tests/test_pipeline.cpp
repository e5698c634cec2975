#include "checks.hpp"
#include "support.hpp"

#include <cloudtrace/catalog.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/fixtures.hpp>
#include <cloudtrace/pipeline.hpp>
#include <cloudtrace/report.hpp>
#include <cloudtrace/scan.hpp>
#include <cloudtrace/triage.hpp>

#include <commands.hpp>
#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace cloudtrace;
using cloudtrace::testing::TempDir;

namespace {

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

ArtifactRecord record(std::size_t device, std::string path, std::string kind, std::optional<std::string> subject = std::nullopt) {
    ArtifactRecord r;
    r.service = Service::dropbox;
    r.device = device;
    r.source_path = std::move(path);
    r.kind = std::move(kind);
    r.subject = std::move(subject);
    return r;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "cloudtrace");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

}  // namespace

// ---- scanning ----

TEST_CASE("container identification") {
    CHECK(identify_container(bytes(std::string("SQLite format 3\0", 16))) == ContainerKind::sqlite3);
    CHECK(identify_container(bytes("bplist00....")) == ContainerKind::binary_plist);
    CHECK(identify_container(bytes("<?xml version=\"1.0\"?><!DOCTYPE plist><plist>")) == ContainerKind::xml_plist);
    CHECK(identify_container(bytes("<?xml version='1.0'?><map/>")) == ContainerKind::generic_xml);
    CHECK(identify_container(bytes("\x89PNG\r\n\x1a\n")) == ContainerKind::png);
    CHECK(identify_container(bytes("<html><body>")) == ContainerKind::html);
    CHECK(identify_container(bytes("plain words\n")) == ContainerKind::text);
    CHECK(identify_container({}) == ContainerKind::unknown);
    CHECK(identify_container(fixtures::lnk_header()) == ContainerKind::lnk);
}

TEST_CASE("component globbing") {
    CHECK(glob_match("Users/*/AppData/Dropbox/config.db", "Users/a/AppData/Dropbox/config.db", false));
    CHECK_FALSE(glob_match("Users/*/config.db", "Users/a/b/config.db", false));
    CHECK(glob_match("cache/**/*.htm", "cache/x/y/z/edit[1].htm", false));
    CHECK(glob_match("cache/**/f", "cache/f", false));
    CHECK(glob_match("USERS/*/F.DB", "Users/a/f.db", true));
    CHECK_FALSE(glob_match("USERS/*/F.DB", "Users/a/f.db", false));
}

TEST_CASE("layout detection") {
    TempDir dir("layout");
    CHECK_THROWS_AS(detect_device_layout(dir.path()), LayoutError);
    for (auto family : {OsFamily::windows_xp, OsFamily::windows_vista7, OsFamily::mac, OsFamily::ios_app_sandbox,
                        OsFamily::android_data}) {
        CAPTURE(to_string(family));
        TempDir tree("layout-family");
        fixtures::FixtureSpec spec;
        spec.os_family = family;
        fixtures::generate(spec, tree.path());
        CHECK(detect_device_layout(tree.path()).os_family == family);
        CHECK(detect_device_layout(tree.path(), family).os_family == family);
    }
}

TEST_CASE("catalog shape") {
    CHECK(catalog::service_entries().size() == catalog::kServiceRowTotal);
    CHECK(catalog::all_entries().size() == catalog::service_entries().size() + catalog::browser_entries().size());
    for (const auto& e : catalog::service_entries()) {
        CAPTURE(e.id);
        CHECK(e.is_service_row());
        CHECK_FALSE(e.path_template.empty());
    }
    const auto doc = nlohmann::json::parse(catalog::catalog_json({Service::evernote, catalog::Platform::ios}));
    REQUIRE_FALSE(doc["entries"].empty());
    for (const auto& e : doc["entries"]) {
        CHECK(e["service"] == "evernote");
        CHECK(e["platform"] == "ios");
    }
}

// ---- pipeline ----

TEST_CASE("serial and parallel parse stages agree") {
    TempDir dir("parallel");
    fixtures::FixtureSpec spec;
    spec.os_family = OsFamily::windows_vista7;
    spec.services = fixtures::supported_services(spec.os_family);
    spec.notes = 6;
    spec.log_events = 6;
    fixtures::generate(spec, dir / "tree");
    const auto profile = detect_device_layout(dir / "tree");
    const auto scanned = scan(dir / "tree", profile);
    REQUIRE(scanned.candidates.size() > 10);
    const auto a = parse_candidates_serial(dir / "tree", scanned.candidates);
    const auto b = parse_candidates_parallel(dir / "tree", scanned.candidates);
    CHECK(a.records == b.records);
    CHECK(a.credentials == b.credentials);
    CHECK(a.diagnostics == b.diagnostics);
    CHECK(a.blobs == b.blobs);
}

TEST_CASE("unreadable and damaged files become diagnostics") {
    TempDir dir("damaged");
    fixtures::FixtureSpec spec;
    spec.os_family = OsFamily::windows_vista7;
    spec.services = {Service::dropbox};
    fixtures::generate(spec, dir / "tree");
    const auto config = dir / "tree/Users/dodochung/AppData/Roaming/Dropbox/config.db";
    REQUIRE(std::filesystem::exists(config));
    {
        std::ofstream f(config, std::ios::binary | std::ios::trunc);
        f << std::string("SQLite format 3\0", 16) << "truncated";
    }
    const auto r = run_pipeline({{dir / "tree", std::nullopt}});
    const bool warned = std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [](const Diagnostic& d) {
        return d.source_path.ends_with("config.db");
    });
    CHECK(warned);
}

// ---- triage ----

TEST_CASE("timeline ordering") {
    std::vector<ArtifactRecord> recs;
    auto late = record(0, "b", "k", "late");
    late.add_time("t", normalize_unix(200, UnixUnit::seconds));
    auto early = record(1, "a", "k", "early");
    early.add_time("t", normalize_unix(100, UnixUnit::seconds));
    early.add_time("u", parse_iso8601("1970-01-01 00:03:20"));
    recs = {late, early};
    const auto t = triage::build_timeline(recs);
    REQUIRE(t.size() == 3);
    CHECK(t[0].record == 1);
    CHECK(t[1].source_path == "a");  // equal instants sort by path
    CHECK(t[1].ambiguous);
    CHECK(t[2].source_path == "b");
}

TEST_CASE("correlation across devices") {
    std::vector<ArtifactRecord> recs;
    auto a = record(0, "pc/config.db", "recent-file", "/Docs/ABC.pdf");
    a.attributes.set("path", "/Docs/ABC.pdf");
    auto b = record(1, "phone/log.txt", "log-event");
    b.attributes.set("message", "Downloading file: /mnt/sdcard/dropbox/abc.pdf");
    auto c = record(1, "phone/prefs.db", "account-profile", "Foo@Example.com");
    c.attributes.set("email", "Foo@Example.com");
    auto d = record(0, "pc/config.db", "account-profile", "foo@example.com");
    d.attributes.set("email", "foo@example.com");
    auto same_device = record(0, "pc/other.db", "account-profile", "foo@example.com");
    same_device.attributes.set("email", "foo@example.com");
    recs = {a, b, c, d, same_device};
    const std::vector<OsFamily> families = {OsFamily::windows_vista7, OsFamily::android_data};
    const auto links = triage::correlate(recs, families);
    const auto has = [&](triage::CorrelationKind k, std::size_t l, std::size_t r) {
        return std::any_of(links.begin(), links.end(), [&](const auto& c) { return c.kind == k && c.left == l && c.right == r; });
    };
    CHECK(has(triage::CorrelationKind::same_account, 3, 2));
    CHECK(has(triage::CorrelationKind::same_account, 4, 2));
    for (const auto& l : links) CHECK(recs[l.left].device != recs[l.right].device);
}

TEST_CASE("triage keeps jurisdiction as operator input") {
    const std::vector<CredentialFinding> id_only = {CredentialFinding::account_only(Service::evernote, "dodochung", "log")};
    const auto d = triage::decide_branch(id_only, std::nullopt, false);
    CHECK(d.branch == triage::Branch::id_only_jurisdiction_unspecified);
    CHECK(d.needs_jurisdiction_input);
    const std::vector<CredentialFinding> empty_id = {CredentialFinding::account_only(Service::evernote, "", "log")};
    CHECK(triage::decide_branch(empty_id, true, true).branch == triage::Branch::no_credentials);
}

// ---- report ----

TEST_CASE("report field encoding") {
    CHECK(report::csv_field("plain") == "plain");
    CHECK(report::csv_field("a,b") == "\"a,b\"");
    CHECK(report::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(report::csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(report::html_escape("<a href=\"x\">&'") == "&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
    CHECK(report::redact("googledocspassword").find("googledocspassword") == std::string::npos);
}

TEST_CASE("report documents") {
    TempDir dir("report");
    const auto cs = fixtures::generate_case_study(dir / "case");
    auto result = run_pipeline({{cs.pc_root, std::nullopt}, {cs.phone_root, std::nullopt}});
    const auto r = report::assemble(std::move(result), {});
    const auto json = nlohmann::json::parse(report::render_json(r));
    CHECK(json["schema_version"] == report::kSchemaVersion);
    CHECK(json["records"].size() == r.result.records.size());
    CHECK(json["timeline"].size() == r.timeline.size());
    CHECK(report::render_json(r) == report::render_json(r));

    const auto csv = report::render_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= static_cast<std::ptrdiff_t>(r.timeline.size()) + 1);

    const auto html = report::render_html(r);
    CHECK(html.find("<html") != std::string::npos);
    for (const auto& c : r.result.credentials) {
        if (c.secret_value && c.secret_value->size() > 4) CHECK(html.find(*c.secret_value) == std::string::npos);
    }

    report::write_report(r, dir / "out", {report::Format::json, report::Format::csv, report::Format::html});
    CHECK(std::filesystem::exists(dir / "out/report.json"));
    CHECK(std::filesystem::exists(dir / "out/report.csv"));
    CHECK(std::filesystem::exists(dir / "out/report.html"));
}

// ---- command line ----

TEST_CASE("command line exit codes") {
    TempDir dir("cli");
    std::string text;
    CHECK(run_cli({"scan", (dir / "missing").string(), "--out", (dir / "o1").string()}, &text) == cli::kExitFatal);
    CHECK(text.find("cannot read tree root") != std::string::npos);

    std::filesystem::create_directories(dir / "empty/Users/nobody/AppData");
    CHECK(run_cli({"scan", (dir / "empty").string(), "--os", "windows-vista7", "--out", (dir / "o2").string()}) == cli::kExitClean);
    CHECK(std::filesystem::exists(dir / "o2/report.json"));

    CHECK(run_cli({"scan", (dir / "empty").string(), "--format", "pdf"}) == cli::kExitFatal);
    CHECK(run_cli({"scan", (dir / "empty").string(), "--os", "beos"}) == cli::kExitFatal);
    CHECK(run_cli({"frobnicate"}) == cli::kExitFatal);

    CHECK(run_cli({"fixtures", "--preset", "case-study", "--out", (dir / "cs").string()}) == cli::kExitClean);
    CHECK(std::filesystem::exists(dir / "cs/manifest.json"));
    CHECK(run_cli({"scan", (dir / "cs/pc").string(), (dir / "cs/android").string(), "--known-file",
                   (dir / "cs/reference/A_design.pdf").string(), "--jurisdiction", "out", "--out", (dir / "o3").string()},
                  &text) == cli::kExitClean);
    CHECK(text.find("full-credentials") != std::string::npos);

    CHECK(run_cli({"catalog", "--service", "dropbox", "--os", "android-data"}, &text) == cli::kExitClean);
    const auto doc = nlohmann::json::parse(text);
    REQUIRE_FALSE(doc["entries"].empty());
    for (const auto& e : doc["entries"]) CHECK(e["service"] == "dropbox");
    CHECK(run_cli({"catalog", "--service", "myspace"}) == cli::kExitFatal);
}

TEST_CASE("skipped files give exit code 2") {
    TempDir dir("cli-skip");
    fixtures::FixtureSpec spec;
    spec.os_family = OsFamily::windows_vista7;
    spec.services = {Service::dropbox};
    fixtures::generate(spec, dir / "tree");
    const auto config = dir / "tree/Users/dodochung/AppData/Roaming/Dropbox/config.db";
    std::filesystem::permissions(config, std::filesystem::perms::none);
    std::ifstream probe(config);
    if (probe.good()) {
        MESSAGE("running with privileges that ignore file modes; skipped-file path not exercised");
    } else {
        CHECK(run_cli({"scan", (dir / "tree").string(), "--out", (dir / "o").string()}) == cli::kExitSkipped);
    }
    std::filesystem::permissions(config, std::filesystem::perms::owner_all);
}

TEST_CASE("fixture spec validation") {
    TempDir dir("spec");
    {
        std::ofstream f(dir / "bad.json");
        f << R"({"os_family": "windows-vista7", "services": ["dropbox"], "colour": "blue"})";
    }
    {
        std::ofstream f(dir / "gap.json");
        f << R"({"os_family": "mac", "services": ["amazon-s3"]})";
    }
    std::string text;
    CHECK(run_cli({"fixtures", (dir / "bad.json").string(), "--out", (dir / "o").string()}) == cli::kExitFatal);
    CHECK(run_cli({"fixtures", (dir / "gap.json").string(), "--out", (dir / "o").string()}, &text) == cli::kExitFatal);
    CHECK(text.find("amazon-s3") != std::string::npos);
}

// ---- acceptance checks, also runnable from the unit suite ----

TEST_CASE("acceptance checks") {
    for (const auto& o : checks::run_all()) {
        INFO(o.name << ": " << o.detail);
        CHECK(o.pass);
    }
}
