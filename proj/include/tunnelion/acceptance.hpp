#pragma once

#include <span>
#include <string>
#include <vector>

namespace tunnelion {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string measured;
    double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

// Runs criterion id in 1..10. Numerical failures are reported as a failed
// criterion with the error message, never thrown.
CriterionResult run_criterion(int id);

// Empty selection runs all criteria in order.
std::vector<CriterionResult> run_acceptance(std::span<const int> ids = {});

// "PASS  3 sfa-peak-ridge  (1.2 s)  <measured>"
std::string format_result(const CriterionResult& r);

}  // namespace tunnelion
