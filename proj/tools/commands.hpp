#pragma once

#include <cloudtrace/catalog.hpp>
#include <cloudtrace/report.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Subcommands of the cloudtrace tool, callable without a process boundary.
namespace cloudtrace::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitSkipped = 2;

struct ScanConfig {
    std::vector<std::filesystem::path> roots;
    std::optional<OsFamily> os_hint;  ///< applied to every root
    std::filesystem::path out_dir = "cloudtrace-report";
    std::vector<report::Format> formats = {report::Format::json, report::Format::csv, report::Format::html};
    std::optional<bool> in_jurisdiction;
    bool warrant = false;
    bool reveal_secrets = false;
    std::optional<int> assumed_offset_minutes;
    std::vector<std::filesystem::path> known_files;
};

/// Parses "json,csv,html". Throws Error on an unknown or empty list.
std::vector<report::Format> parse_formats(std::string_view list);

/// Runs the full pipeline and writes the report. Errors go to `err`; returns the exit code.
int cmd_scan(const ScanConfig& config, std::ostream& out, std::ostream& err);

/// `spec_file` is a JSON FixtureSpec; with `case_study` the named preset is generated instead.
int cmd_fixtures(const std::optional<std::filesystem::path>& spec_file, bool case_study, const std::filesystem::path& out_dir,
                 std::ostream& out, std::ostream& err);

int cmd_catalog(const catalog::CatalogFilter& filter, std::ostream& out);

/// Full command line, including argv[0].
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cloudtrace::cli
