#pragma once

#include "ncfib/suites.hpp"

#include <json.hpp>

namespace ncfib {

inline constexpr const char* kReportSchema = "ncfib-report/1";

nlohmann::ordered_json report_json(const Report& r);
/// canonical golden document for one suite run
nlohmann::ordered_json suite_json(const SuiteResult& s, const SuiteConfig& cfg);
/// file name used for goldens, e.g. "calculus-3d.json"
std::string golden_name(const std::string& suite, const SuiteConfig& cfg);

}  // namespace ncfib
