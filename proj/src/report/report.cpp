#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/report.hpp>

#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace cloudtrace::report {

Report assemble(PipelineResult result, const ReportOptions& options) {
    Report r;
    r.options = options;
    r.timeline = triage::build_timeline(result.records);
    const auto families = result.device_families();
    r.correlations = triage::correlate(result.records, families);
    r.decision = triage::decide_branch(result.credentials, options.in_jurisdiction, options.warrant_assumed);
    r.result = std::move(result);
    return r;
}

namespace {

std::string_view to_string(DiagnosticKind k) { return k == DiagnosticKind::skipped_file ? "skipped-file" : "parse-warning"; }

json timestamp_json(const NormalizedTimestamp& t) {
    json j;
    j["utc"] = t.iso();
    j["raw"] = t.raw_value;
    j["encoding"] = std::string(to_string(t.encoding));
    j["confidence"] = confidence_label(t.confidence);
    if (t.assumed_offset_minutes) j["assumed_offset_minutes"] = *t.assumed_offset_minutes;
    return j;
}

json record_json(std::size_t id, const ArtifactRecord& r) {
    json j;
    j["id"] = id;
    j["service"] = std::string(to_string(r.service));
    j["device"] = r.device;
    j["source_path"] = r.source_path;
    j["kind"] = r.kind;
    j["subject"] = r.subject ? json(*r.subject) : json(nullptr);
    json ts = json::array();
    for (const auto& t : r.timestamps) {
        auto e = timestamp_json(t.value);
        e["label"] = t.label;
        ts.push_back(std::move(e));
    }
    j["timestamps"] = std::move(ts);
    json attrs = json::object();
    for (const auto& [k, v] : r.attributes) attrs[k] = v;
    j["attributes"] = std::move(attrs);
    if (r.geo) j["geo"] = {{"latitude", r.geo->latitude}, {"longitude", r.geo->longitude}};
    return j;
}

json credential_json(const CredentialFinding& c) {
    return {{"service", std::string(to_string(c.service))},
            {"account_id", c.account_id},
            {"secret_kind", std::string(to_string(c.secret_kind))},
            {"secret_value", c.secret_value ? json(*c.secret_value) : json(nullptr)},
            {"enables_remote_access", c.enables_remote_access},
            {"source_path", c.source_path},
            {"device", c.device}};
}

}  // namespace

json to_json(const Report& r) {
    const auto& res = r.result;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["hash_algorithm"] = std::string(codec::kHashAlgorithm);

    json opts;
    opts["jurisdiction"] = r.options.in_jurisdiction ? json(*r.options.in_jurisdiction ? "in" : "out") : json(nullptr);
    opts["warrant_assumed"] = r.options.warrant_assumed;
    opts["assumed_offset_minutes"] = r.options.assumed_offset_minutes ? json(*r.options.assumed_offset_minutes) : json(nullptr);
    j["options"] = std::move(opts);

    json devices = json::array();
    json candidates = json::array();
    for (std::size_t d = 0; d < res.devices.size(); ++d) {
        const auto& ds = res.devices[d];
        devices.push_back({{"index", d},
                           {"root", ds.root},
                           {"os_family", std::string(to_string(ds.profile.os_family))},
                           {"profile_roots", ds.profile.profile_roots},
                           {"evidence", ds.profile.evidence},
                           {"candidate_count", ds.candidates.size()}});
        for (const auto& c : ds.candidates) {
            candidates.push_back({{"device", c.device},
                                  {"path", c.path},
                                  {"entry", c.entry ? json(c.entry->id) : json(nullptr)},
                                  {"service", c.entry ? json(std::string(to_string(c.entry->service))) : json(nullptr)},
                                  {"kind", std::string(to_string(c.kind))}});
        }
    }
    j["devices"] = std::move(devices);
    j["candidates"] = std::move(candidates);

    json records = json::array();
    for (std::size_t i = 0; i < res.records.size(); ++i) records.push_back(record_json(i, res.records[i]));
    j["records"] = std::move(records);

    json creds = json::array();
    for (const auto& c : res.credentials) creds.push_back(credential_json(c));
    j["credentials"] = std::move(creds);

    json timeline = json::array();
    std::size_t ambiguous = 0;
    for (const auto& e : r.timeline) {
        ambiguous += e.ambiguous ? 1 : 0;
        timeline.push_back({{"utc", e.instant.iso()},
                            {"record", e.record},
                            {"device", e.device},
                            {"time_label", e.time_label},
                            {"label", e.label},
                            {"source_path", e.source_path},
                            {"ambiguous", e.ambiguous},
                            {"confidence", confidence_label(e.instant.confidence)}});
    }
    j["timeline"] = std::move(timeline);

    json corr = json::array();
    for (const auto& c : r.correlations)
        corr.push_back({{"kind", std::string(triage::to_string(c.kind))}, {"left", c.left}, {"right", c.right}, {"evidence", c.evidence}});
    j["correlations"] = std::move(corr);

    json known = json::array();
    for (const auto& m : res.known_file_matches) known.push_back({{"reference", m.reference}, {"sha256", m.sha256}, {"record", m.record}});
    j["known_file_matches"] = std::move(known);

    json recs = json::array();
    for (const auto& rec : r.decision.recommendations) recs.push_back({{"code", rec.code}, {"text", rec.text}});
    json stats;
    stats["events"] = r.timeline.size();
    stats["ambiguous_events"] = ambiguous;
    stats["first"] = r.timeline.empty() ? json(nullptr) : json(r.timeline.front().instant.iso());
    stats["last"] = r.timeline.empty() ? json(nullptr) : json(r.timeline.back().instant.iso());
    j["triage"] = {{"branch", std::string(triage::to_string(r.decision.branch))},
                   {"warrant_assumed", r.options.warrant_assumed},
                   {"needs_jurisdiction_input", r.decision.needs_jurisdiction_input},
                   {"finding_count", res.credentials.size()},
                   {"correlation_count", r.correlations.size()},
                   {"recommendations", std::move(recs)},
                   {"timeline_stats", std::move(stats)}};

    json diags = json::array();
    for (const auto& d : res.diagnostics)
        diags.push_back({{"kind", std::string(to_string(d.kind))}, {"device", d.device}, {"source_path", d.source_path}, {"message", d.message}});
    j["diagnostics"] = std::move(diags);
    return j;
}

std::string render_json(const Report& r) {
    return to_json(r).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_csv(const Report& r) {
    std::ostringstream os;
    os << "utc,device,service,kind,subject,time_label,encoding,confidence,raw,source_path\r\n";
    for (const auto& e : r.timeline) {
        const auto& rec = r.result.records[e.record];
        const std::string fields[] = {e.instant.iso(),
                                      std::to_string(e.device),
                                      std::string(to_string(rec.service)),
                                      rec.kind,
                                      rec.subject.value_or(""),
                                      e.time_label,
                                      std::string(to_string(e.instant.encoding)),
                                      confidence_label(e.instant.confidence),
                                      e.instant.raw_value,
                                      e.source_path};
        for (std::size_t i = 0; i < std::size(fields); ++i) os << (i ? "," : "") << csv_field(fields[i]);
        os << "\r\n";
    }
    return os.str();
}

std::string html_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string redact(std::string_view secret) {
    if (secret.empty()) return "";
    return "[redacted " + std::to_string(secret.size()) + " chars]";
}

namespace {

void row(std::ostringstream& os, std::initializer_list<std::string> cells, bool head = false) {
    os << "<tr>";
    for (const auto& c : cells) os << (head ? "<th>" : "<td>") << html_escape(c) << (head ? "</th>" : "</td>");
    os << "</tr>\n";
}

}  // namespace

std::string render_html(const Report& r) {
    const auto& res = r.result;
    std::ostringstream os;
    os << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>cloudtrace report</title>\n"
          "<style>body{font-family:sans-serif;margin:1.5em}table{border-collapse:collapse;margin-bottom:1.5em}"
          "td,th{border:1px solid #999;padding:2px 6px;font-size:90%;vertical-align:top}th{background:#eee}"
          ".amb{background:#fff3c4}</style></head><body>\n<h1>cloudtrace report</h1>\n";

    os << "<h2>Triage</h2>\n<p>Branch: <b>" << html_escape(triage::to_string(r.decision.branch)) << "</b>; warrant assumed: "
       << (r.options.warrant_assumed ? "yes" : "no") << "</p>\n<ol>\n";
    for (const auto& rec : r.decision.recommendations) os << "<li>" << html_escape(rec.text) << "</li>\n";
    os << "</ol>\n";

    os << "<h2>Devices</h2>\n<table>\n";
    row(os, {"#", "root", "os family", "candidates"}, true);
    for (std::size_t d = 0; d < res.devices.size(); ++d)
        row(os, {std::to_string(d), res.devices[d].root, std::string(to_string(res.devices[d].profile.os_family)),
                 std::to_string(res.devices[d].candidates.size())});
    os << "</table>\n";

    os << "<h2>Credential findings</h2>\n<table>\n";
    row(os, {"service", "account", "secret kind", "secret", "remote access", "device", "source"}, true);
    for (const auto& c : res.credentials) {
        const std::string secret = c.secret_value ? (r.options.reveal_secrets ? *c.secret_value : redact(*c.secret_value)) : "";
        row(os, {std::string(to_string(c.service)), c.account_id, std::string(to_string(c.secret_kind)), secret,
                 c.enables_remote_access ? "yes" : "no", std::to_string(c.device), c.source_path});
    }
    os << "</table>\n";

    os << "<h2>Correlations</h2>\n<table>\n";
    row(os, {"kind", "evidence", "left", "right"}, true);
    const auto where = [&](std::size_t i) {
        const auto& rec = res.records[i];
        return "device " + std::to_string(rec.device) + ": " + rec.source_path;
    };
    for (const auto& c : r.correlations) row(os, {std::string(triage::to_string(c.kind)), c.evidence, where(c.left), where(c.right)});
    for (const auto& m : res.known_file_matches) row(os, {"known-file", m.reference, where(m.record), m.sha256});
    os << "</table>\n";

    os << "<h2>Timeline</h2>\n<table>\n";
    row(os, {"utc", "event", "confidence", "raw", "device", "source"}, true);
    for (const auto& e : r.timeline) {
        os << (e.ambiguous ? "<tr class=\"amb\">" : "<tr>");
        for (const auto& c : {e.instant.iso(), e.label, confidence_label(e.instant.confidence), e.instant.raw_value,
                              std::to_string(e.device), e.source_path})
            os << "<td>" << html_escape(c) << "</td>";
        os << "</tr>\n";
    }
    os << "</table>\n";

    if (!res.diagnostics.empty()) {
        os << "<h2>Diagnostics</h2>\n<table>\n";
        row(os, {"kind", "device", "source", "message"}, true);
        for (const auto& d : res.diagnostics)
            row(os, {std::string(to_string(d.kind)), std::to_string(d.device), d.source_path, d.message});
        os << "</table>\n";
    }
    os << "</body></html>\n";
    return os.str();
}

namespace {

void write_file(const fs::path& p, std::string_view data) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw Error("cannot write " + p.string());
}

}  // namespace

void write_report(const Report& r, const fs::path& out_dir, const std::vector<Format>& formats) {
    fs::create_directories(out_dir);
    for (auto f : formats) {
        switch (f) {
            case Format::json: write_file(out_dir / "report.json", render_json(r)); break;
            case Format::csv: write_file(out_dir / "report.csv", render_csv(r)); break;
            case Format::html: write_file(out_dir / "report.html", render_html(r)); break;
        }
    }
    for (const auto& b : r.result.blobs)
        write_file(out_dir / b.file_name, std::string_view(reinterpret_cast<const char*>(b.bytes.data()), b.bytes.size()));
}

}  // namespace cloudtrace::report
