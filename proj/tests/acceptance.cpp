// Prints one PASS/FAIL line per acceptance criterion; exits non-zero when any fails.
#include "checks.hpp"

#include <cstdio>

int main() {
    using namespace cloudtrace::checks;
    int failed = 0;
    for (const auto& o : run_all()) {
        bool pass = o.pass;
        std::string detail = o.detail;
        if (o.name == "reference-value recovery" && o.seconds >= kReferenceValueBudgetSeconds) {
            pass = false;
            detail += "; over the runtime budget";
        }
        if (o.name == "case-study replay" && o.seconds >= kCaseStudyBudgetSeconds) {
            pass = false;
            detail += "; over the runtime budget";
        }
        failed += pass ? 0 : 1;
        std::printf("%s  %-26s %7.3fs  %s\n", pass ? "PASS" : "FAIL", o.name.c_str(), o.seconds, detail.c_str());
    }
    std::printf("%d of 8 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
