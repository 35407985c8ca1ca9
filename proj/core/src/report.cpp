#include "ncfib/report.hpp"

#include <algorithm>

namespace ncfib {

void Report::pass(std::string check, std::string detail)
{
    checks_.push_back({std::move(check), CheckStatus::Pass, {}, std::move(detail)});
}

void Report::fail(std::string check, std::string witness)
{
    checks_.push_back({std::move(check), CheckStatus::Fail, std::move(witness), {}});
}

void Report::skip(std::string check, std::string reason)
{
    checks_.push_back({std::move(check), CheckStatus::Skipped, std::move(reason), {}});
}

bool Report::expect(bool ok, std::string check, std::string witness)
{
    if (ok)
        pass(std::move(check));
    else
        fail(std::move(check), std::move(witness));
    return ok;
}

void Report::merge(const Report& other, const std::string& prefix)
{
    for (auto c : other.checks_) {
        c.check = prefix + c.check;
        checks_.push_back(std::move(c));
    }
}

bool Report::passed() const
{
    return std::none_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult* Report::first_failure() const
{
    for (const auto& c : checks_)
        if (c.status == CheckStatus::Fail)
            return &c;
    return nullptr;
}

const char* to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass:
        return "pass";
    case CheckStatus::Fail:
        return "fail";
    case CheckStatus::Skipped:
        return "skipped";
    }
    return "?";
}

}  // namespace ncfib
