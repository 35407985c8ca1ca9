#pragma once

// Verification reports: named checks with pass/fail status and a witness.

#include <string>
#include <vector>

namespace ncfib {

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
    std::string check;
    CheckStatus status = CheckStatus::Pass;
    std::string witness;  // empty unless failed or skipped
    std::string detail;   // optional informational value
};

class Report {
public:
    Report() = default;
    explicit Report(std::string name) : name_(std::move(name)) {}

    void pass(std::string check, std::string detail = {});
    void fail(std::string check, std::string witness);
    void skip(std::string check, std::string reason);
    /// Records pass or fail; the witness is kept only on failure.
    bool expect(bool ok, std::string check, std::string witness = {});
    /// appends the checks of other, names prefixed
    void merge(const Report& other, const std::string& prefix = {});

    bool passed() const;
    const std::string& name() const { return name_; }
    const std::vector<CheckResult>& checks() const { return checks_; }
    const CheckResult* first_failure() const;

    int truncation = -1;
    std::string scalar_mode = "symbolic";

private:
    std::string name_;
    std::vector<CheckResult> checks_;
};

const char* to_string(CheckStatus s);

}  // namespace ncfib
