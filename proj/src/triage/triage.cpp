#include <cloudtrace/text.hpp>
#include <cloudtrace/triage.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace cloudtrace::triage {

std::string event_label(const ArtifactRecord& r, std::string_view time_label) {
    std::string s = std::string(to_string(r.service)) + " " + r.kind;
    if (r.subject) s += ": " + *r.subject;
    s += " [" + std::string(time_label) + "]";
    return s;
}

std::vector<TimelineEvent> build_timeline(std::span<const ArtifactRecord> records) {
    std::vector<TimelineEvent> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        for (const auto& t : r.timestamps) {
            TimelineEvent e;
            e.instant = t.value;
            e.record = i;
            e.time_label = t.label;
            e.label = event_label(r, t.label);
            e.source_path = r.source_path;
            e.device = r.device;
            e.ambiguous = !t.value.is_exact();
            out.push_back(std::move(e));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
        return std::tie(a.instant.utc_instant, a.source_path, a.label, a.device, a.record) <
               std::tie(b.instant.utc_instant, b.source_path, b.label, b.device, b.record);
    });
    return out;
}

std::string_view to_string(CorrelationKind k) {
    switch (k) {
        case CorrelationKind::same_account: return "same-account";
        case CorrelationKind::same_filename: return "same-filename";
        case CorrelationKind::same_content_hash: return "same-content-hash";
    }
    return "same-account";
}

std::vector<std::string> record_accounts(const ArtifactRecord& r) {
    std::vector<std::string> out;
    for (const char* key : {"email", "account", "username", "access_key_id"}) {
        if (const auto v = r.attributes.get(key)) {
            auto norm = text::to_lower(text::trim(*v));
            if (!norm.empty() && std::find(out.begin(), out.end(), norm) == out.end()) out.push_back(std::move(norm));
        }
    }
    return out;
}

std::optional<std::string> record_filename(const ArtifactRecord& r) {
    static const std::set<std::string, std::less<>> file_kinds = {
        "recent-file", "file-synced",   "file-watch",     "file-present", "file-uploaded",
        "file-viewed", "file-downloaded", "file-downloaded-and-opened", "attachment", "local-file"};
    if (!r.subject || !file_kinds.count(r.kind)) return std::nullopt;
    const auto base = text::basename(*r.subject);
    if (base.empty()) return std::nullopt;
    return std::string(base);
}

namespace {

struct Keyed {
    std::string key;    ///< grouping key (case-folded for file names)
    std::string value;  ///< value as seen in the record
    std::size_t record;
};

void pair_up(CorrelationKind kind, std::vector<Keyed> items, std::span<const ArtifactRecord> records,
             std::span<const OsFamily> families, std::vector<Correlation>& out) {
    std::stable_sort(items.begin(), items.end(), [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
    std::set<std::tuple<std::string, std::size_t, std::string, std::size_t, std::string>> seen;
    const auto windows = [&](std::size_t rec) {
        const auto d = records[rec].device;
        return d < families.size() && is_windows(families[d]);
    };
    for (std::size_t lo = 0; lo < items.size();) {
        std::size_t hi = lo;
        while (hi < items.size() && items[hi].key == items[lo].key) ++hi;
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = lo; j < hi; ++j) {
                const auto& a = items[i];
                const auto& b = items[j];
                if (records[a.record].device >= records[b.record].device) continue;
                if (kind == CorrelationKind::same_filename && !windows(a.record) && !windows(b.record) && a.value != b.value)
                    continue;
                const auto& ra = records[a.record];
                const auto& rb = records[b.record];
                const auto tag = std::make_tuple(a.key, ra.device, ra.source_path, rb.device, rb.source_path);
                if (!seen.insert(tag).second) continue;
                out.push_back({kind, a.record, b.record, a.value});
            }
        }
        lo = hi;
    }
}

}  // namespace

std::vector<Correlation> correlate(std::span<const ArtifactRecord> records, std::span<const OsFamily> device_families) {
    std::vector<Keyed> accounts, names, hashes;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        for (auto& a : record_accounts(r)) accounts.push_back({a, a, i});
        if (auto f = record_filename(r)) names.push_back({text::to_lower(*f), *f, i});
        if (const auto h = r.attributes.get("sha256")) hashes.push_back({std::string(*h), std::string(*h), i});
    }
    std::vector<Correlation> out;
    pair_up(CorrelationKind::same_account, std::move(accounts), records, device_families, out);
    pair_up(CorrelationKind::same_filename, std::move(names), records, device_families, out);
    pair_up(CorrelationKind::same_content_hash, std::move(hashes), records, device_families, out);
    return out;
}

std::string_view to_string(Branch b) {
    switch (b) {
        case Branch::no_credentials: return "no-credentials";
        case Branch::id_only_in_jurisdiction: return "id-only-in-jurisdiction";
        case Branch::id_only_out_of_jurisdiction: return "id-only-out-of-jurisdiction";
        case Branch::id_only_jurisdiction_unspecified: return "id-only-jurisdiction-unspecified";
        case Branch::full_credentials: return "full-credentials";
    }
    return "no-credentials";
}

int strength(Branch b) {
    switch (b) {
        case Branch::no_credentials: return 0;
        case Branch::full_credentials: return 2;
        default: return 1;
    }
}

namespace {

const Recommendation kObtainWarrant{"obtain-warrant", "Secure a warrant covering the account before any remote access."};
const Recommendation kRemoteCollection{"remote-collection", "Sign in with the recovered credential and image the account's storage."};
const Recommendation kProviderCollection{"provider-collection", "Collect the account's stored files under the warrant."};
const Recommendation kAnalyzeAll{"analyze-cloud-and-local", "Examine collected cloud data together with device artifacts."};
const Recommendation kLocalOnly{"analyze-local-only", "Limit analysis to artifacts on the seized devices."};
const Recommendation kJudicialAssistance{"request-judicial-assistance",
                                         "Provider storage is outside the jurisdiction; file a mutual legal assistance request."};
const Recommendation kSpoliation{"spoliation-risk", "Expect delay; preserve local evidence promptly."};
const Recommendation kNeedJurisdiction{"supply-jurisdiction",
                                       "Account ids found but jurisdiction unknown; rerun with --jurisdiction in|out."};

}  // namespace

Decision decide_branch(std::span<const CredentialFinding> findings, std::optional<bool> in_jurisdiction,
                       bool warrant_assumed) {
    const bool full = std::any_of(findings.begin(), findings.end(), [](const CredentialFinding& f) {
        return f.enables_remote_access && f.secret_kind != SecretKind::none;
    });
    const bool id_only = std::any_of(findings.begin(), findings.end(),
                                     [](const CredentialFinding& f) { return !f.account_id.empty(); });
    Decision d;
    if (full) {
        d.branch = Branch::full_credentials;
        d.recommendations = warrant_assumed ? std::vector{kRemoteCollection, kAnalyzeAll} : std::vector{kObtainWarrant, kLocalOnly};
    } else if (id_only && !in_jurisdiction) {
        d.branch = Branch::id_only_jurisdiction_unspecified;
        d.needs_jurisdiction_input = true;
        d.recommendations = {kNeedJurisdiction, kLocalOnly};
    } else if (id_only && *in_jurisdiction) {
        d.branch = Branch::id_only_in_jurisdiction;
        d.recommendations = warrant_assumed ? std::vector{kProviderCollection, kAnalyzeAll} : std::vector{kObtainWarrant, kLocalOnly};
    } else if (id_only) {
        d.branch = Branch::id_only_out_of_jurisdiction;
        d.recommendations = {kJudicialAssistance, kSpoliation, kLocalOnly};
    } else {
        d.branch = Branch::no_credentials;
        d.recommendations = {kLocalOnly};
    }
    return d;
}

}  // namespace cloudtrace::triage
