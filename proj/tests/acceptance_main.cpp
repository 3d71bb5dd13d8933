#include <algorithm>
#include <iostream>

#include "tunnelion/acceptance.hpp"

int main() {
    int failed = 0;
    for (int id = 1; id <= tunnelion::kCriterionCount; ++id) {
        const tunnelion::CriterionResult r = tunnelion::run_criterion(id);
        std::cout << tunnelion::format_result(r) << std::endl;
        failed += r.pass ? 0 : 1;
    }
    std::cout << (tunnelion::kCriterionCount - failed) << "/" << tunnelion::kCriterionCount << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
