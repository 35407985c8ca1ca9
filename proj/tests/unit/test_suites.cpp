#include "ncfib/suites.hpp"

#include <doctest.h>

using namespace ncfib;

namespace {

int count(const Report& r, CheckStatus s)
{
    int n = 0;
    for (const auto& c : r.checks())
        n += c.status == s;
    return n;
}

std::string value(const SuiteResult& r, const std::string& key)
{
    for (const auto& [k, v] : r.values)
        if (k == key)
            return v;
    return {};
}

}  // namespace

TEST_CASE("suite groups expand")
{
    CHECK(expand_suite("all").size() == suite_names().size());
    CHECK(expand_suite("fibration-all") == std::vector<std::string>{"maps", "base", "fibration"});
    CHECK_THROWS_AS(run_suite("nope", SuiteConfig{}), std::invalid_argument);
}

TEST_CASE("small truncations skip rather than fail")
{
    for (int N : {0, 1}) {
        SuiteConfig cfg;
        cfg.N = N;
        for (const char* s : {"base", "condition-k"}) {
            SuiteResult r = run_suite(s, cfg);
            CHECK_MESSAGE(r.report.passed(), s << " N=" << N);
            CHECK(count(r.report, CheckStatus::Skipped) >= 1);
        }
    }
    SuiteConfig cfg;
    cfg.N = 4;
    CHECK(count(run_suite("condition-k", cfg).report, CheckStatus::Skipped) == 0);
}

TEST_CASE("spectral suite: total cohomology through d_2")
{
    SuiteResult r = run_suite("spectral", SuiteConfig{});
    CHECK(r.report.passed());
    CHECK(value(r, "rank d_2 zdeg 0") == "1");
    CHECK(value(r, "H(B) truncated") == "[1, 0, 1]");
    CHECK(value(r, "H(X) truncated") == "[1, 0, 0, 1, 0]");
}

TEST_CASE("every corrupted suite fails without throwing")
{
    for (const auto& s : suite_names()) {
        SuiteConfig cfg;
        cfg.corrupt = true;
        SuiteResult r;
        CHECK_NOTHROW(r = run_suite(s, cfg));
        CHECK_MESSAGE(!r.report.passed(), s);
    }
}
