#include "report_json.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace ncfib;

namespace {

struct Criterion {
    int id;
    std::string suite;
    double budget_s;  // zero for no runtime target
};

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_failure(const Report& r)
{
    const CheckResult* f = r.first_failure();
    return f ? f->check + (f->witness.empty() ? "" : ": " + f->witness) : "";
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: acceptance <goldens directory>\n";
        return 2;
    }
    const std::filesystem::path goldens = argv[1];
    // truncations are the suite defaults: N = 4 for the lemma and condition K, N = 3 elsewhere
    const std::vector<Criterion> criteria = {
        {1, "presentation", 5}, {2, "calculus", 0},    {3, "maps", 0},
        {4, "base", 0},                    {5, "fibration", 60}, {6, "lemma", 0},
        {7, "fibre", 0},                   {8, "spectral", 0},   {9, "connection", 0},
        {10, "product", 0},                {11, "condition-k", 0}};

    bool all = true;
    auto line = [&](int id, const std::string& name, bool ok, double secs, const std::string& why) {
        all = all && ok;
        std::cout << "criterion " << std::setw(2) << id << ": " << (ok ? "PASS" : "FAIL") << " " << name << " (" << std::fixed
                  << std::setprecision(2) << secs << " s)";
        if (!why.empty())
            std::cout << " [" << why << "]";
        std::cout << std::endl;
    };

    for (const auto& c : criteria) {
        SuiteConfig cfg;
        auto t0 = std::chrono::steady_clock::now();
        std::string why;
        bool ok = false;
        try {
            SuiteResult r = run_suite(c.suite, cfg);
            ok = r.report.passed();
            why = first_failure(r.report);
            if (c.id == 2) {
                std::string want = read_file(goldens / golden_name(c.suite, cfg));
                std::string got = suite_json(r, cfg).dump(2) + "\n";
                if (got != want) {
                    ok = false;
                    why = "output differs from the stored golden " + golden_name(c.suite, cfg);
                }
            }
        }
        catch (const std::exception& e) {
            why = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && c.budget_s > 0 && secs > c.budget_s) {
            ok = false;
            why = "over the runtime target";
        }
        line(c.id, c.suite, ok, secs, why);
    }

    // every suite must flag its corrupted constant
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> silent;
    for (const auto& c : criteria) {
        SuiteConfig cfg;
        cfg.corrupt = true;
        try {
            if (run_suite(c.suite, cfg).report.passed())
                silent.push_back(c.suite);
        }
        catch (const std::exception& e) {
            silent.push_back(c.suite + " (threw " + e.what() + ")");
        }
    }
    std::string why;
    for (const auto& s : silent)
        why += (why.empty() ? "not flagged: " : ", ") + s;
    line(12, "negative controls", silent.empty(), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), why);

    std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
    return all ? 0 : 1;
}
