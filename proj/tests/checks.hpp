#pragma once

#include <cstdint>
#include <string>
#include <vector>

// End-to-end acceptance checks shared by the doctest suite and the acceptance runner.
namespace cloudtrace::checks {

struct Outcome {
    std::string name;
    bool pass = false;
    std::string detail;  ///< first failures, or a summary when passing
    double seconds = 0;
};

/// Runtime ceilings for the timed checks.
inline constexpr double kReferenceValueBudgetSeconds = 5.0;
inline constexpr double kCaseStudyBudgetSeconds = 10.0;
/// Permitted disagreement between converter and oracle.
inline constexpr std::int64_t kOracleToleranceSeconds = 1;
inline constexpr int kOracleSamples = 1000;
inline constexpr int kBucketLogLines = 500;
inline constexpr int kMonotonicityTrials = 1000;

Outcome reference_value_recovery();
Outcome timestamp_oracle(std::uint64_t seed = 20111231, int samples = kOracleSamples);
Outcome thumbnail_carving();
Outcome round_trips(std::uint64_t seed = 4242);
Outcome triage_table(std::uint64_t seed = 99);
Outcome case_study_replay();
Outcome catalog_completeness();
Outcome determinism();

/// All eight, in the order above.
std::vector<Outcome> run_all();

}  // namespace cloudtrace::checks
