#include <cloudtrace/codec.hpp>
#include <cloudtrace/error.hpp>
#include <cloudtrace/pipeline.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>

namespace fs = std::filesystem;

namespace cloudtrace {

std::vector<OsFamily> PipelineResult::device_families() const {
    std::vector<OsFamily> out;
    for (const auto& d : devices) out.push_back(d.profile.os_family);
    return out;
}

bool PipelineResult::has_skipped_files() const {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.kind == DiagnosticKind::skipped_file; });
}

namespace {

std::optional<std::vector<std::uint8_t>> read_all(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return std::nullopt;
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) return std::nullopt;
    return bytes;
}

}  // namespace

ParseOutput parse_candidate(const fs::path& tree_root, const CandidateFile& c) {
    ParseOutput out;
    if (!c.entry || c.entry->parser.empty()) return out;
    auto bytes = read_all(tree_root / fs::path(c.path));
    if (!bytes) {
        out.diagnostics.push_back({DiagnosticKind::skipped_file, c.device, c.path, "unreadable file"});
        return out;
    }
    FileInput in{c.path, c.device, c.kind, std::move(*bytes)};
    try {
        if (!services::dispatch(c.entry->parser, in, out))
            out.diagnostics.push_back({DiagnosticKind::parse_warning, c.device, c.path, "no handler for " + c.entry->parser});
    } catch (const std::exception& e) {
        ParseOutput failed;
        failed.diagnostics.push_back({DiagnosticKind::parse_warning, c.device, c.path, c.entry->parser + ": " + e.what()});
        return failed;
    }
    return out;
}

ParseOutput parse_candidates_serial(const fs::path& tree_root, const std::vector<CandidateFile>& candidates) {
    ParseOutput all;
    for (const auto& c : candidates) all.append(parse_candidate(tree_root, c));
    return all;
}

ParseOutput parse_candidates_parallel(const fs::path& tree_root, const std::vector<CandidateFile>& candidates) {
    std::vector<ParseOutput> parts(candidates.size());
    const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) parts[static_cast<std::size_t>(i)] = parse_candidate(tree_root, candidates[static_cast<std::size_t>(i)]);
    ParseOutput all;
    for (auto& p : parts) all.append(std::move(p));
    return all;
}

PipelineResult run_pipeline(const std::vector<DeviceInput>& devices, const PipelineOptions& options) {
    PipelineResult result;
    for (std::size_t d = 0; d < devices.size(); ++d) {
        const auto& input = devices[d];
        DeviceScan ds;
        ds.root = input.root.generic_string();
        ds.profile = detect_device_layout(input.root, input.os_hint);
        auto scanned = scan(input.root, ds.profile, d);
        ds.candidates = std::move(scanned.candidates);
        for (auto& diag : scanned.diagnostics) result.diagnostics.push_back(std::move(diag));

        auto parsed = options.parallel ? parse_candidates_parallel(input.root, ds.candidates)
                                       : parse_candidates_serial(input.root, ds.candidates);
        std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(result.records));
        std::move(parsed.credentials.begin(), parsed.credentials.end(), std::back_inserter(result.credentials));
        std::move(parsed.diagnostics.begin(), parsed.diagnostics.end(), std::back_inserter(result.diagnostics));
        std::move(parsed.blobs.begin(), parsed.blobs.end(), std::back_inserter(result.blobs));
        result.devices.push_back(std::move(ds));
    }

    if (options.assumed_offset_minutes) {
        for (auto& r : result.records)
            for (auto& t : r.timestamps) apply_assumed_offset(t.value, *options.assumed_offset_minutes);
    }

    for (const auto& ref : options.known_files) {
        auto bytes = read_all(ref);
        if (!bytes) throw Error("cannot read known file: " + ref.string());
        const auto hash = codec::sha256_hex(*bytes);
        for (std::size_t i = 0; i < result.records.size(); ++i) {
            const auto h = result.records[i].attributes.get(codec::kHashAlgorithm);
            if (h && *h == hash) result.known_file_matches.push_back({ref.generic_string(), hash, i});
        }
    }
    return result;
}

}  // namespace cloudtrace
