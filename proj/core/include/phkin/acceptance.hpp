#ifndef PHKIN_ACCEPTANCE_HPP
#define PHKIN_ACCEPTANCE_HPP

#include <ostream>
#include <string>
#include <vector>

namespace phkin {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceReport {
    std::vector<CriterionResult> results;
    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

/// Run the full acceptance suite at its pinned parameters and tolerances.
/// One line per criterion is streamed to progress (if non-null) as results
/// arrive.
AcceptanceReport run_acceptance(std::ostream* progress = nullptr);

}  // namespace phkin

#endif
