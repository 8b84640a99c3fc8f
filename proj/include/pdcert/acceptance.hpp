#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pdcert {

/// Fault injection for the acceptance checks; all zero in normal runs.
struct AcceptanceOptions {
    std::uint64_t seed = 1;
    /// Shifts the tiling grid by this fraction of a cell side.
    double grid_offset_fraction = 0.0;
    /// Added to every lattice interior count.
    std::int64_t lattice_count_bias = 0;
    /// Scales the random witness count of check 3 (1 = 500 per configuration).
    double witness_fraction = 1.0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string statement;  ///< the mathematical fact being checked
    bool passed = false;
    double seconds = 0.0;
    double limit_seconds = 0.0;
    std::string detail;
};

inline constexpr int kCriterionCount = 8;

CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line per criterion: "[PASS] 3  witness containment  (12.3 s / 120 s)  detail".
void print_results(std::ostream& out, const std::vector<CriterionResult>& results);

} // namespace pdcert
