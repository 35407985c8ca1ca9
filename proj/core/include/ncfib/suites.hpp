#pragma once

// Verification suites shared by the command line tool and the acceptance runner.

#include "ncfib/spectral.hpp"

#include <optional>

namespace ncfib {

struct SuiteConfig {
    std::string calculus = "3d";  // "3d" or "4d"
    /// truncation; each suite has its own default when unset
    std::optional<int> N;
    ScalarMode scalar = ScalarMode::symbolic();
    unsigned seed = 20240607;
    /// replace one constant or datum by a wrong one; the suite must then fail
    bool corrupt = false;

    int truncation(int fallback) const { return N.value_or(fallback); }
};

struct SuiteResult {
    std::string suite;
    Report report;
    /// named values echoed into goldens, in emission order
    std::vector<std::pair<std::string, std::string>> values;
};

/// presentation, calculus, maps, base, fibration, lemma, fibre, spectral, connection, product, condition-k
const std::vector<std::string>& suite_names();
/// a suite name, or one of the groups "fibration-all", "spectral-all", "all"
std::vector<std::string> expand_suite(const std::string& name);
/// throws std::invalid_argument for unknown suites or unsupported combinations
SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg);

/// fibration for the configured calculus (4d over the derived higher degrees)
std::shared_ptr<const FibrationData> configured_fibration(const SuiteConfig& cfg);

/// copy of ps with sigma negated on forms of positive degree
ProductStructure corrupt_sigma(ProductStructure ps);

}  // namespace ncfib
