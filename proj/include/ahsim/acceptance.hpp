// acceptance.hpp — The acceptance suite run by `ahsim check` and the acceptance test binary

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ahsim {

struct CriterionResult {
    int id{0};
    std::string name;
    bool passed{false};
    std::string detail;
    double seconds{0.0};
};

constexpr int kCriterionCount = 12;

// Runs the selected criteria (all when empty) in order. An exception inside a
// criterion marks it failed with the message as detail.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {}, std::ostream* progress = nullptr);

// "PASS  3 trace-hermiticity  <detail>  (0.41 s)"
std::string format_result(const CriterionResult& r);

} // namespace ahsim
