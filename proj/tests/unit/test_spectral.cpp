#include <doctest.h>

#include "ncfib/spectral.hpp"

#include <set>

using namespace ncfib;

namespace {

std::string why(const Report& r)
{
    const CheckResult* f = r.first_failure();
    return f ? f->check + ": " + f->witness : std::string();
}

const FilteredComplex& complex3(int N)
{
    static std::map<int, FilteredComplex> cache;
    auto it = cache.find(N);
    if (it == cache.end())
        it = cache.emplace(N, make_filtered_complex(fibration_3d(), N)).first;
    return it->second;
}

std::multiset<int> generator_zdegs(const ExteriorFiltration& f, int m, int n)
{
    std::multiset<int> out;
    for (const auto& v : f.quotient[m][n])
        out.insert(f.zdeg(m + n, v));
    return out;
}

}  // namespace

TEST_CASE("3d filtration shape")
{
    const auto& fc = complex3(1);
    const auto& F = fc.filt;
    CHECK_MESSAGE(fc.report.passed(), why(fc.report));
    CHECK(F.top == 3);
    CHECK(F.pmax == 2);
    CHECK(F.V[1][1].dim() == 2);
    CHECK(F.V[1][2].dim() == 3);
    CHECK(F.V[2][2].dim() == 1);
    CHECK(F.V[2][3].dim() == 1);
    CHECK(F.V[1][3].dim() == 1);
}

TEST_CASE("3d Xi table")
{
    const auto& fc = complex3(2);
    const auto& F = fc.filt;
    CHECK(generator_zdegs(F, 0, 0) == std::multiset<int>{0});
    CHECK(generator_zdegs(F, 0, 1) == std::multiset<int>{0});
    CHECK(F.quotient[0][2].empty());
    CHECK(F.quotient[0][3].empty());
    CHECK(generator_zdegs(F, 1, 0) == std::multiset<int>{-2, 2});
    CHECK(generator_zdegs(F, 1, 1) == std::multiset<int>{-2, 2});
    CHECK(F.quotient[1][2].empty());
    CHECK(generator_zdegs(F, 2, 0) == std::multiset<int>{0});
    CHECK(generator_zdegs(F, 2, 1) == std::multiset<int>{0});

    auto table = xi_table(fc);
    CHECK(table.size() == 9);
    for (const auto& e : table)
        if (e.m == 0 && e.n == 0) {
            // words of length <= 2 with zero degree: 1, ab, bc, cd
            CHECK(e.dims.at(0) == 4);
            CHECK(e.dims.at(2) == 3);  // aa, ac, cc
        }
    Report xr = xi_check(fc);
    CHECK_MESSAGE(xr.passed(), why(xr));
}

TEST_CASE("Theta maps are invertible and the filtration is a fibration")
{
    Report r = fibration_test(complex3(3));
    CHECK_MESSAGE(r.passed(), why(r));
}

TEST_CASE("fibre differential on degree zero")
{
    const auto& F = complex3(1).filt;
    Report r = lemma_check(F, 4);
    CHECK_MESSAGE(r.passed(), why(r));
    CHECK(r.checks().front().detail == "1");
}

TEST_CASE("fibre cohomology is B and B.w with zero connection")
{
    auto h = fibre_cohomology(complex3(2));
    CHECK_MESSAGE(h.report.passed(), why(h.report));
    CHECK(h.dims.at({0, 0}) == 4);
    CHECK(h.dims.at({1, 0}) == 4);
    CHECK(h.dims.at({0, 2}) == 0);
    CHECK(h.dims.at({2, 0}) == 0);
    REQUIRE(h.generators.size() == 2);
    CHECK(h.generators[1].degree() == 1);
    for (const auto& n : h.nabla)
        CHECK(n.empty());
    for (const auto& c : h.curvature)
        CHECK(c.empty());
}

TEST_CASE("spectral sequence pages")
{
    const auto& fc = complex3(3);
    auto ss = spectral_sequence(fc, 3);
    CHECK_MESSAGE(ss.report.passed(), why(ss.report));
    REQUIRE(ss.pages.size() == 4);
    for (const auto& [key, m] : ss.pages[3].d)
        CHECK(m.is_zero());
    for (const auto& [key, dim] : ss.pages[2].dims) {
        auto [z, p, qd] = key;
        if (qd >= 2 || z != 0)
            CHECK(dim == 0);
    }
    CHECK(ss.base_cohomology == std::vector<int>{1, 0, 1});
    auto e = [&](int r, int p, int qd) { return ss.pages[r].dims.at({0, p, qd}); };
    CHECK(e(1, 1, 0) == 6);
    CHECK(e(2, 0, 0) == 1);
    CHECK(e(2, 0, 1) == 1);
    CHECK(e(2, 1, 0) == 0);
    CHECK(e(2, 2, 0) == 1);
    CHECK(e(2, 2, 1) == 1);
    CHECK(ss.pages[2].d.count({0, 0, 1}) == 1);
    CHECK(e(3, 0, 1) == 0);
    CHECK(e(3, 2, 0) == 0);
    // the total space has the cohomology of a 3-sphere
    for (const auto& [key, dim] : ss.total)
        CHECK(dim == (key.first == 0 && (key.second == 0 || key.second == 3) ? 1 : 0));
}

TEST_CASE("braiding inclusion and sigma-hat")
{
    const auto& fc = complex3(2);
    Report r = braiding_condition_check(fc);
    CHECK_MESSAGE(r.passed(), why(r));

    const Calculus& c = *fc.fib->x;
    ThetaMap t0(fc.filt, 1, 0);
    for (const auto& v : fc.blocks.at(0).F[1][1].basis()) {
        FormElement beta = fc.blocks.at(0).C[1].element(v);
        auto x = sigma_hat(t0, c.one(), beta);
        REQUIRE(x);
        CHECK(t0.lift(*x) == beta);
    }
}

TEST_CASE("fibration product structure")
{
    ProductStructure ps = fibration_product_structure(complex3(2));
    std::mt19937 rng(7);
    Report r = product_structure_check(ps, 50, rng);
    CHECK_MESSAGE(r.passed(), why(r));
}

TEST_CASE("4d filtered complex")
{
    auto fc = make_filtered_complex(fibration_4d_full(), 1);
    CHECK_MESSAGE(fc.report.passed(), why(fc.report));
    CHECK(fc.filt.top == 4);
    CHECK(fc.filt.pmax == 3);
    CHECK(fc.filt.quotient[0][1].size() == 1);
    CHECK(fc.filt.quotient[1][0].size() == 3);
    Report ft = fibration_test(fc);
    CHECK_MESSAGE(ft.passed(), why(ft));
    Report lq = lemma_check(fc.filt, 3, QBase::Q);
    CHECK_MESSAGE(lq.passed(), why(lq));
    CHECK_FALSE(lemma_check(fc.filt, 2).passed());
    auto h = fibre_cohomology(fc);
    CHECK_MESSAGE(h.report.passed(), why(h.report));
    auto ss = spectral_sequence(fc, 4);
    CHECK_MESSAGE(ss.report.passed(), why(ss.report));
}

TEST_CASE("negative controls")
{
    const auto& fc = complex3(2);
    // a non-fibre form is rejected by the coordinates
    XiCoordinates xi(fc.filt, 1, 0);
    const Calculus& c = *fc.fib->x;
    CHECK_THROWS(xi.coords(c.symbol_form(*c.find_symbol("w1"))));
    // dropping the fibre generator breaks the Xi count
    FilteredComplex broken = fc;
    broken.filt.quotient[0][1].clear();
    Report xr = xi_check(broken);
    CHECK_FALSE(xr.passed());
    // the lemma with the wrong base
    CHECK_FALSE(lemma_check(fc.filt, 2, QBase::QSquared).passed());
    // a rescaled fibre generator only changes the normalisation
    ExteriorFiltration scaled = fc.filt;
    scaled.quotient[0][1][0].scale(RatFunc(2));
    Report sr = lemma_check(scaled, 2);
    CHECK(sr.passed());
    CHECK(sr.checks().front().detail == "1/2");
    // Theta with a generator removed is no longer onto
    ExteriorFiltration thin = fc.filt;
    thin.quotient[0][1].clear();
    ThetaMap t(thin, 1, 1);
    auto b = t.block(0, 2);
    CHECK(rank(b.matrix) < b.matrix.rows);
}
