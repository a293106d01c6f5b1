#pragma once

#include <string>
#include <vector>

namespace grokk::acceptance {

struct Outcome {
    int criterion = 0;
    bool pass = false;
    std::string title;
    std::string summary;
    std::vector<std::string> details;
};

inline constexpr int kCriteria = 10;

/// Runs one criterion. `scale` is the d_in used where the criterion does not
/// fix one itself (engine equivalence and the property suite).
Outcome run_criterion(int n, int scale = 256);

/// Formats the single "PASS|FAIL criterion N ..." line plus indented details.
std::string format(const Outcome& o, bool verbose);

} // namespace grokk::acceptance
