#ifndef NEWSUM_VERIFY_HPP
#define NEWSUM_VERIFY_HPP

#include <functional>
#include <string>
#include <vector>

namespace newsum::verify {

// Self-verification: oracle-equivalence and property checks at desk scale,
// one result per criterion with measured values in the detail lines.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::vector<std::string> lines;
    double seconds = 0;
};

using LineSink = std::function<void(const std::string&)>;

// Suites: "all", "newton", "sigma", "classify", "oracle".
std::vector<std::string> suite_names();
bool is_suite(const std::string& name);

std::vector<CriterionResult> run_suite(const std::string& suite,
                                       const LineSink& sink = {});

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace newsum::verify

#endif
