#include "report_json.hpp"

namespace ncfib {

namespace {

const char* status_str(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass:
        return "pass";
    case CheckStatus::Fail:
        return "fail";
    default:
        return "skipped";
    }
}

}  // namespace

nlohmann::ordered_json report_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["name"] = r.name();
    j["passed"] = r.passed();
    j["truncation"] = r.truncation;
    j["scalar"] = r.scalar_mode;
    auto& checks = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks()) {
        nlohmann::ordered_json e;
        e["check"] = c.check;
        e["status"] = status_str(c.status);
        if (!c.witness.empty())
            e["witness"] = c.witness;
        if (!c.detail.empty())
            e["detail"] = c.detail;
        checks.push_back(std::move(e));
    }
    return j;
}

nlohmann::ordered_json suite_json(const SuiteResult& s, const SuiteConfig& cfg)
{
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["suite"] = s.suite;
    j["calculus"] = cfg.calculus;
    j["seed"] = cfg.seed;
    j["report"] = report_json(s.report);
    auto& values = j["values"] = nlohmann::ordered_json::array();
    for (const auto& [k, v] : s.values)
        values.push_back({{"name", k}, {"value", v}});
    return j;
}

std::string golden_name(const std::string& suite, const SuiteConfig& cfg)
{
    std::string n = suite + "-" + cfg.calculus;
    if (cfg.N)
        n += "-N" + std::to_string(*cfg.N);
    return n + ".json";
}

}  // namespace ncfib
