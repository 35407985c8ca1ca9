#include "report_json.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace ncfib;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string calculus = "3d";
    int N = -1;
    std::string q = "symbolic";
    bool json = false;
    unsigned seed = SuiteConfig().seed;
};

SuiteConfig make_config(const Options& o)
{
    SuiteConfig cfg;
    cfg.calculus = o.calculus;
    if (o.N >= 0)
        cfg.N = o.N;
    cfg.scalar = ScalarMode::parse(o.q);
    cfg.seed = o.seed;
    configured_fibration(cfg);
    return cfg;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        }
        else
            cur += ch;
    }
    return out;
}

std::vector<std::string> expand_all(const std::string& list)
{
    std::vector<std::string> out;
    for (const auto& s : split_list(list)) {
        std::string name = s;
        // "fibration" groups several criteria
        if (name == "fibration")
            name = "fibration-all";
        for (const auto& e : expand_suite(name))
            if (std::find(out.begin(), out.end(), e) == out.end())
                out.push_back(e);
    }
    return out;
}

void print_report(const Report& r)
{
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name();
    if (r.truncation >= 0)
        std::cout << " (N=" << r.truncation << ", " << r.scalar_mode << ")";
    std::cout << "\n";
    for (const auto& c : r.checks()) {
        const char* tag = c.status == CheckStatus::Pass ? "ok  " : c.status == CheckStatus::Fail ? "FAIL" : "skip";
        std::cout << "  " << tag << " " << c.check;
        if (!c.detail.empty())
            std::cout << " = " << c.detail;
        if (!c.witness.empty())
            std::cout << "  [" << c.witness << "]";
        std::cout << "\n";
    }
}

int cmd_verify(const Options& o, const std::string& suites, bool show_values)
{
    SuiteConfig cfg = make_config(o);
    auto names = expand_all(suites);
    bool ok = true;
    ordered_json all = ordered_json::array();
    for (const auto& n : names) {
        SuiteResult r = run_suite(n, cfg);
        ok = ok && r.report.passed();
        if (o.json)
            all.push_back(suite_json(r, cfg));
        else {
            print_report(r.report);
            if (show_values)
                for (const auto& [k, v] : r.values)
                    std::cout << "  " << k << ": " << v << "\n";
        }
    }
    if (o.json)
        std::cout << ordered_json{{"schema", kReportSchema}, {"passed", ok}, {"suites", all}}.dump(2) << "\n";
    else
        std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

int cmd_table(const Options& o)
{
    SuiteConfig cfg = make_config(o);
    FilteredComplex fc = make_filtered_complex(configured_fibration(cfg), cfg.truncation(3));
    auto table = xi_table(fc);
    if (o.json) {
        ordered_json rows = ordered_json::array();
        for (const auto& e : table) {
            ordered_json dims = ordered_json::object();
            for (const auto& [z, d] : e.dims)
                dims[std::to_string(z)] = d;
            rows.push_back({{"m", e.m}, {"n", e.n}, {"generators", e.generators}, {"dims", dims}});
        }
        std::cout << ordered_json{{"schema", kReportSchema}, {"calculus", cfg.calculus}, {"N", fc.N}, {"xi", rows}}.dump(2) << "\n";
        return 0;
    }
    std::cout << "Xi_m^n generators over X (" << cfg.calculus << ", N=" << fc.N << ")\n";
    int top = fc.filt.top;
    for (int m = 0; m <= fc.filt.pmax; ++m) {
        std::cout << "m=" << m << ":";
        for (int n = 0; n <= top; ++n) {
            std::string cell = "0";
            for (const auto& e : table)
                if (e.m == m && e.n == n && !e.generators.empty()) {
                    cell = "<";
                    for (std::size_t i = 0; i < e.generators.size(); ++i)
                        cell += (i ? ", " : "") + e.generators[i];
                    cell += ">";
                }
            std::cout << "  n=" << n << " " << cell;
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_cohomology(const Options& o)
{
    SuiteConfig cfg = make_config(o);
    FilteredComplex fc = make_filtered_complex(configured_fibration(cfg), cfg.truncation(3));
    FibreCohomology h = fibre_cohomology(fc);
    SpectralSequence ss = spectral_sequence(fc, fc.filt.pmax + 1);
    std::vector<int> total(fc.filt.top + 2, 0);
    for (const auto& [key, d] : ss.total)
        total[key.second] += d;
    if (o.json) {
        ordered_json fibre = ordered_json::array();
        for (const auto& [key, d] : h.dims)
            fibre.push_back({{"n", key.first}, {"zdeg", key.second}, {"dim", d}});
        std::cout << ordered_json{{"schema", kReportSchema}, {"calculus", cfg.calculus}, {"N", fc.N}, {"fibre", fibre},
                                  {"total", total}, {"base", ss.base_cohomology}, {"report", report_json(h.report)}}
                         .dump(2)
                  << "\n";
    }
    else {
        std::cout << "fibre cohomology H^n(Xi_0) (" << cfg.calculus << ", N=" << fc.N << ")\n";
        for (const auto& [key, d] : h.dims)
            if (d)
                std::cout << "  H^" << key.first << " zdeg " << key.second << ": " << d << "\n";
        std::cout << "truncated H(X):";
        for (int d : total)
            std::cout << " " << d;
        std::cout << "\ntruncated H(B):";
        for (int d : ss.base_cohomology)
            std::cout << " " << d;
        std::cout << "\n";
        print_report(h.report);
    }
    return h.report.passed() ? 0 : 1;
}

int cmd_spectral(const Options& o, int page)
{
    SuiteConfig cfg = make_config(o);
    FilteredComplex fc = make_filtered_complex(configured_fibration(cfg), cfg.truncation(3));
    SpectralSequence ss = spectral_sequence(fc, fc.filt.pmax + 1);
    std::vector<int> pages;
    if (page >= 0) {
        if (page >= static_cast<int>(ss.pages.size()))
            throw std::invalid_argument("page beyond E_" + std::to_string(ss.pages.size() - 1));
        pages.push_back(page);
    }
    else
        for (std::size_t r = 0; r < ss.pages.size(); ++r)
            pages.push_back(static_cast<int>(r));
    if (o.json) {
        ordered_json out = ordered_json::array();
        for (int r : pages) {
            ordered_json blocks = ordered_json::array(), maps = ordered_json::array();
            for (const auto& [key, d] : ss.pages[r].dims) {
                auto [z, p, qd] = key;
                blocks.push_back({{"p", p}, {"q", qd}, {"zdeg", z}, {"dim", d}});
            }
            for (const auto& [key, m] : ss.pages[r].d) {
                auto [z, p, qd] = key;
                maps.push_back({{"p", p}, {"q", qd}, {"zdeg", z}, {"target", {p + r, qd - r + 1}}, {"rank", rank(m)}});
            }
            out.push_back({{"page", r}, {"blocks", blocks}, {"maps", maps}});
        }
        std::cout << ordered_json{{"schema", kReportSchema}, {"calculus", cfg.calculus}, {"N", fc.N}, {"pages", out},
                                  {"base", ss.base_cohomology}, {"report", report_json(ss.report)}}
                         .dump(2)
                  << "\n";
    }
    else {
        const int pmax = fc.filt.pmax, top = fc.filt.top;
        for (int r : pages) {
            std::cout << "E_" << r << " at zdeg 0 (rows q, columns p)\n";
            for (int qd = top; qd >= 0; --qd) {
                std::cout << "  q=" << qd << " |";
                for (int p = 0; p <= pmax; ++p) {
                    auto it = ss.pages[r].dims.find({0, p, qd});
                    std::cout << " " << (it == ss.pages[r].dims.end() ? std::string(".") : std::to_string(it->second));
                }
                std::cout << "\n";
            }
            for (const auto& [key, m] : ss.pages[r].d) {
                auto [z, p, qd] = key;
                if (z == 0)
                    std::cout << "  d_" << r << ": (" << p << "," << qd << ") -> (" << p + r << "," << qd - r + 1 << ") rank " << rank(m) << "\n";
            }
        }
        print_report(ss.report);
    }
    return ss.report.passed() ? 0 : 1;
}

int cmd_goldens(const Options& o, const std::string& suites, const std::string& dir)
{
    SuiteConfig cfg = make_config(o);
    std::filesystem::create_directories(dir);
    bool ok = true;
    for (const auto& n : expand_all(suites)) {
        SuiteResult r = run_suite(n, cfg);
        ok = ok && r.report.passed();
        std::filesystem::path path = std::filesystem::path(dir) / golden_name(n, cfg);
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << suite_json(r, cfg).dump(2) << "\n";
        std::cout << path.string() << "\n";
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symbolic de Rham cohomology and the Serre spectral sequence of the quantum Hopf fibration"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--calculus", o.calculus, "3d or 4d")->check(CLI::IsMember({"3d", "4d"}));
    app.add_option("-N", o.N, "truncation: coefficient words of length <= N")->check(CLI::NonNegativeNumber);
    app.add_option("--q", o.q, "symbolic or a rational value such as 3/2");
    app.add_flag("--json", o.json, "machine readable output");
    app.add_option("--seed", o.seed, "seed for sampled checks");

    std::string suites = "all", out_dir = "goldens";
    bool values = false, xi = false;
    int page = -1;
    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", suites, "comma separated suites or all");
    verify->add_flag("--values", values, "print the computed identities");
    auto* table = app.add_subcommand("table", "print the Xi table");
    table->add_flag("--xi", xi, "the Xi_m^n generators (default)");
    auto* cohomology = app.add_subcommand("cohomology", "fibre, total and base cohomology at the truncation");
    auto* spectral = app.add_subcommand("spectral", "pages of the spectral sequence");
    spectral->add_option("--page", page, "single page");
    auto* condk = app.add_subcommand("condition-k", "condition K identities for the 4d calculus");
    auto* goldens = app.add_subcommand("goldens", "write canonical JSON reports");
    goldens->add_option("--suite", suites, "comma separated suites, all, or empty for none");
    goldens->add_option("--out", out_dir, "output directory");
    for (auto* sub : {verify, table, cohomology, spectral, condk, goldens})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*verify)
            return cmd_verify(o, suites, values);
        if (*table)
            return cmd_table(o);
        if (*cohomology)
            return cmd_cohomology(o);
        if (*spectral)
            return cmd_spectral(o, page);
        if (*condk)
            return cmd_verify(o, "condition-k", true);
        if (*goldens)
            return cmd_goldens(o, suites, out_dir);
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
