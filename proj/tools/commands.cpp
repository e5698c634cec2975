#include "commands.hpp"

#include <cloudtrace/error.hpp>
#include <cloudtrace/fixtures.hpp>
#include <cloudtrace/text.hpp>
#include <cloudtrace/timestamp.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <ostream>

namespace fs = std::filesystem;

namespace cloudtrace::cli {

std::vector<report::Format> parse_formats(std::string_view list) {
    std::vector<report::Format> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = std::min(list.find(',', start), list.size());
        const auto name = text::to_lower(text::trim(list.substr(start, comma - start)));
        report::Format f;
        if (name == "json") f = report::Format::json;
        else if (name == "csv") f = report::Format::csv;
        else if (name == "html") f = report::Format::html;
        else throw Error("unknown report format '" + name + "' (expected json, csv or html)");
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
        start = comma + 1;
    }
    if (out.empty()) throw Error("no report format selected");
    return out;
}

int cmd_scan(const ScanConfig& config, std::ostream& out, std::ostream& err) {
    if (config.roots.empty()) {
        err << "scan: no tree root given\n";
        return kExitFatal;
    }
    if (config.formats.empty()) {
        err << "scan: no report format selected\n";
        return kExitFatal;
    }
    std::vector<DeviceInput> devices;
    for (const auto& root : config.roots) {
        std::error_code ec;
        if (!fs::is_directory(root, ec)) {
            err << "scan: cannot read tree root " << root.string() << "\n";
            return kExitFatal;
        }
        devices.push_back({root, config.os_hint});
    }
    PipelineOptions options;
    options.assumed_offset_minutes = config.assumed_offset_minutes;
    options.known_files = config.known_files;
    try {
        auto result = run_pipeline(devices, options);
        const bool skipped = result.has_skipped_files();
        report::ReportOptions ro;
        ro.in_jurisdiction = config.in_jurisdiction;
        ro.warrant_assumed = config.warrant;
        ro.reveal_secrets = config.reveal_secrets;
        ro.assumed_offset_minutes = config.assumed_offset_minutes;
        const auto r = report::assemble(std::move(result), ro);
        report::write_report(r, config.out_dir, config.formats);
        for (std::size_t d = 0; d < r.result.devices.size(); ++d) {
            const auto& dev = r.result.devices[d];
            out << "device " << d << ": " << dev.root << " (" << to_string(dev.profile.os_family) << "), "
                << dev.candidates.size() << " candidate files\n";
        }
        out << r.result.records.size() << " records, " << r.result.credentials.size() << " credential findings, "
            << r.correlations.size() << " correlations, " << r.result.diagnostics.size() << " diagnostics\n";
        out << "triage: " << triage::to_string(r.decision.branch) << "\n";
        for (const auto& rec : r.decision.recommendations) out << "  - " << rec.text << "\n";
        out << "report written to " << config.out_dir.string() << "\n";
        return skipped ? kExitSkipped : kExitClean;
    } catch (const Error& e) {
        err << "scan: " << e.what() << "\n";
        return kExitFatal;
    } catch (const fs::filesystem_error& e) {
        err << "scan: " << e.what() << "\n";
        return kExitFatal;
    }
}

int cmd_fixtures(const std::optional<fs::path>& spec_file, bool case_study, const fs::path& out_dir, std::ostream& out,
                 std::ostream& err) {
    try {
        nlohmann::ordered_json manifest;
        if (case_study) {
            manifest = fixtures::to_json(fixtures::generate_case_study(out_dir));
        } else {
            if (!spec_file) {
                err << "fixtures: give a spec file or --preset case-study\n";
                return kExitFatal;
            }
            std::ifstream in(*spec_file);
            if (!in) {
                err << "fixtures: cannot read " << spec_file->string() << "\n";
                return kExitFatal;
            }
            const auto spec = fixtures::spec_from_json(nlohmann::json::parse(in));
            manifest = fixtures::to_json(fixtures::generate(spec, out_dir / "tree"));
        }
        fs::create_directories(out_dir);
        std::ofstream f(out_dir / "manifest.json", std::ios::trunc);
        f << manifest.dump(2) << "\n";
        out << "fixtures written to " << out_dir.string() << "\n";
        return kExitClean;
    } catch (const nlohmann::json::exception& e) {
        err << "fixtures: bad spec: " << e.what() << "\n";
        return kExitFatal;
    } catch (const Error& e) {
        err << "fixtures: " << e.what() << "\n";
        return kExitFatal;
    }
}

int cmd_catalog(const catalog::CatalogFilter& filter, std::ostream& out) {
    out << catalog::catalog_json(filter);
    return kExitClean;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Locate, parse and triage cloud storage client artifacts on seized device trees."};
    app.require_subcommand(1);

    ScanConfig scan;
    std::vector<std::string> roots;
    std::string os_hint, formats = "json,csv,html", jurisdiction, out_dir = "cloudtrace-report";
    std::vector<std::string> known;
    auto* scan_cmd = app.add_subcommand("scan", "Scan one or more device trees and write a report");
    scan_cmd->add_option("root", roots, "Device tree root (one per device)")->required();
    scan_cmd->add_option("--os", os_hint, "Override layout detection (windows-xp, windows-vista7, mac, ios, android)");
    scan_cmd->add_option("--out", out_dir, "Report directory");
    scan_cmd->add_option("--format", formats, "Comma-separated subset of json,csv,html");
    scan_cmd->add_option("--jurisdiction", jurisdiction, "Whether the provider is inside the investigator's jurisdiction")
        ->check(CLI::IsMember({"in", "out"}));
    scan_cmd->add_flag("--warrant", scan.warrant, "Assume a warrant is held");
    scan_cmd->add_flag("--reveal-secrets", scan.reveal_secrets, "Show secrets in the HTML report");
    scan_cmd->add_option("--known-file", known, "Reference file whose SHA-256 is matched against recovered content");

    std::string spec_file, preset, fixtures_out = "fixtures";
    auto* fix_cmd = app.add_subcommand("fixtures", "Generate a synthetic device tree and its manifest");
    fix_cmd->add_option("spec", spec_file, "Fixture spec JSON");
    fix_cmd->add_option("--preset", preset, "Named scenario")->check(CLI::IsMember({"case-study"}));
    fix_cmd->add_option("--out", fixtures_out, "Output directory");

    std::string cat_service, cat_os;
    auto* cat_cmd = app.add_subcommand("catalog", "Print the artifact location catalog as JSON");
    cat_cmd->add_option("--service", cat_service, "Only rows for this service");
    cat_cmd->add_option("--os", cat_os, "Only rows for this platform");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitClean : kExitFatal;
    }

    if (scan_cmd->parsed()) {
        for (const auto& r : roots) scan.roots.emplace_back(r);
        if (!os_hint.empty()) {
            scan.os_hint = parse_os_family(os_hint);
            if (!scan.os_hint) {
                err << "scan: unknown --os '" << os_hint << "'\n";
                return kExitFatal;
            }
        }
        try {
            scan.formats = parse_formats(formats);
        } catch (const Error& e) {
            err << "scan: " << e.what() << "\n";
            return kExitFatal;
        }
        if (!jurisdiction.empty()) scan.in_jurisdiction = jurisdiction == "in";
        if (const char* tz = std::getenv("CLOUDTRACE_TZ"); tz && *tz) {
            scan.assumed_offset_minutes = parse_utc_offset(tz);
            if (!scan.assumed_offset_minutes) {
                err << "scan: CLOUDTRACE_TZ '" << tz << "' is not a UTC offset such as +09:00\n";
                return kExitFatal;
            }
        }
        scan.out_dir = out_dir;
        for (const auto& k : known) scan.known_files.emplace_back(k);
        return cmd_scan(scan, out, err);
    }
    if (fix_cmd->parsed()) {
        const std::optional<fs::path> spec = spec_file.empty() ? std::nullopt : std::optional<fs::path>(spec_file);
        return cmd_fixtures(spec, preset == "case-study", fixtures_out, out, err);
    }
    catalog::CatalogFilter filter;
    if (!cat_service.empty()) {
        filter.service = parse_service(cat_service);
        if (!filter.service) {
            err << "catalog: unknown service '" << cat_service << "'\n";
            return kExitFatal;
        }
    }
    if (!cat_os.empty()) {
        const auto family = parse_os_family(cat_os);
        if (!family) {
            err << "catalog: unknown --os '" << cat_os << "'\n";
            return kExitFatal;
        }
        filter.platform = catalog::platform_of(*family);
    }
    return cmd_catalog(filter, out);
}

}  // namespace cloudtrace::cli
