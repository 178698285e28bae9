#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cdem::acceptance {

enum class Outcome { pass, fail, skip };

struct CriterionResult {
    int id = 0;
    std::string name;
    Outcome outcome = Outcome::fail;
    std::string detail;
    double seconds = 0.0;
};

/// One line per criterion: "PASS 6 synthetic adaptation: ... (1.23 s)".
std::string format_line(const CriterionResult& r);

/// Runs every acceptance criterion in order, reporting each result as soon as it is known.
/// The Office-Caltech check runs only when CDEM_OFFICE_CALTECH_CONFIG names a config file.
std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result = {});

/// True when no criterion failed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace cdem::acceptance
