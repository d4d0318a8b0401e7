#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qreset {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double worst = 0;      ///< worst measured error / statistic
    double tolerance = 0;  ///< threshold it is compared against
    std::string detail;
};

struct AcceptanceOptions {
    std::uint64_t seed = 30035001;
    std::size_t n_traj = 100000;  ///< Monte Carlo population for MC-backed checks
    bool verbose = false;
};

/// Runs the full verification suite; one entry per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// Prints one PASS/FAIL line per criterion; returns the number of failures.
int report_acceptance(const std::vector<CriterionResult>& results);

}  // namespace qreset
