#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aaamdp {

// One violated invariant, located by a human-readable path such as
// "transition[k=67][u=perform-surgery][i=50-55 mm]" or "rupture_prob[>80 mm]".
struct Violation {
    std::string path;
    std::string rule;
    double value = 0.0;

    std::string str() const;
};

// Collects every violation found by a validation pass. Empty iff the
// validated object satisfies all of its invariants.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }

    void add(std::string path, std::string rule, double value = 0.0) {
        violations.push_back({std::move(path), std::move(rule), value});
    }

    // One line per violation.
    std::string str() const;
};

// Thrown by operations whose precondition is a clean ValidationReport.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(ValidationReport report);

    const ValidationReport& report() const { return report_; }

  private:
    ValidationReport report_;
};

}  // namespace aaamdp
