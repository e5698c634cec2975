#pragma once

#include <cloudtrace/types.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrace::triage {

struct TimelineEvent {
    NormalizedTimestamp instant;
    std::size_t record = 0;  ///< index into the record list
    std::string time_label;  ///< which of the record's timestamps this is
    std::string label;       ///< one-line summary
    std::string source_path;
    std::size_t device = 0;
    bool ambiguous = false;  ///< any confidence flag set

    friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

/// One event per (record, labeled timestamp), ordered by (instant, source path, label) with
/// device and record index as final tie-breakers.
std::vector<TimelineEvent> build_timeline(std::span<const ArtifactRecord> records);
std::string event_label(const ArtifactRecord& r, std::string_view time_label);

enum class CorrelationKind { same_account, same_filename, same_content_hash };
std::string_view to_string(CorrelationKind k);

struct Correlation {
    CorrelationKind kind = CorrelationKind::same_account;
    std::size_t left = 0;   ///< record index on the lower-numbered device
    std::size_t right = 0;  ///< record index on the higher-numbered device
    std::string evidence;

    friend bool operator==(const Correlation&, const Correlation&) = default;
};

/// Account identifiers a record carries (normalized to lower case).
std::vector<std::string> record_accounts(const ArtifactRecord& r);
/// Terminal file name the record refers to, when it refers to a file.
std::optional<std::string> record_filename(const ArtifactRecord& r);

/// Cross-device matches only. One correlation per (kind, matched value, source file pair), using the
/// first record from each file. `device_families[d]` selects case folding for file names.
std::vector<Correlation> correlate(std::span<const ArtifactRecord> records, std::span<const OsFamily> device_families);

enum class Branch {
    no_credentials,
    id_only_in_jurisdiction,
    id_only_out_of_jurisdiction,
    id_only_jurisdiction_unspecified,
    full_credentials,
};
std::string_view to_string(Branch b);
/// 0 = no credentials, 1 = account id only, 2 = full credentials.
int strength(Branch b);

struct Recommendation {
    std::string code;
    std::string text;

    friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

struct Decision {
    Branch branch = Branch::no_credentials;
    std::vector<Recommendation> recommendations;
    bool needs_jurisdiction_input = false;
};

/// A finding counts as full when it enables remote access and carries secret material; otherwise a
/// non-empty account id counts as id-only. Jurisdiction is operator input and is never inferred.
Decision decide_branch(std::span<const CredentialFinding> findings, std::optional<bool> in_jurisdiction,
                       bool warrant_assumed);

}  // namespace cloudtrace::triage
