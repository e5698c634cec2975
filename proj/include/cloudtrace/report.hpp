#pragma once

#include <cloudtrace/pipeline.hpp>
#include <cloudtrace/triage.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cloudtrace::report {

inline constexpr int kSchemaVersion = 1;

struct ReportOptions {
    std::optional<bool> in_jurisdiction;
    bool warrant_assumed = false;
    bool reveal_secrets = false;  ///< HTML only; JSON always carries secrets verbatim
    std::optional<int> assumed_offset_minutes;
};

struct Report {
    PipelineResult result;
    std::vector<triage::TimelineEvent> timeline;
    std::vector<triage::Correlation> correlations;
    triage::Decision decision;
    ReportOptions options;
};

Report assemble(PipelineResult result, const ReportOptions& options);

/// Keys sorted, arrays in pipeline/timeline order.
nlohmann::json to_json(const Report& r);
/// Two-space indented JSON with a trailing newline; byte-identical for identical input.
std::string render_json(const Report& r);
/// One row per timeline event, RFC 4180 quoting.
std::string render_csv(const Report& r);
/// Self-contained page with inline styles.
std::string render_html(const Report& r);

enum class Format { json, csv, html };

/// Writes the selected report files plus every extracted blob into `out_dir`.
void write_report(const Report& r, const std::filesystem::path& out_dir, const std::vector<Format>& formats);

std::string csv_field(std::string_view s);
std::string html_escape(std::string_view s);
std::string redact(std::string_view secret);

}  // namespace cloudtrace::report
