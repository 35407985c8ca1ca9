#include <doctest.h>

#include "ncfib/connection.hpp"

using namespace ncfib;

namespace {

const RatFunc q = RatFunc::q();

struct Fixture {
    std::shared_ptr<const FibrationData> f3 = fibration_3d();
    CalculusPtr x3 = f3->x;
    CalculusPtr h3 = f3->h;
};

std::string why(const Report& r)
{
    const CheckResult* f = r.first_failure();
    return f ? f->check + ": " + f->witness : std::string();
}

bool all_flat(const std::vector<std::vector<FormElement>>& r)
{
    for (const auto& row : r)
        for (const auto& f : row)
            if (!f.is_zero())
                return false;
    return true;
}

bool same_connection(const ConnectionData& a, const ConnectionData& b)
{
    if (a.rank != b.rank)
        return false;
    for (int i = 0; i < a.rank; ++i)
        for (int j = 0; j < a.rank; ++j)
            if (a.A[i][j] != b.A[i][j])
                return false;
    return true;
}

/// (q^{2k} - 1) / (q^2 - 1) style coefficient read off d(z^k) = c z^k zeta
RatFunc d_coefficient(const Calculus& h, int k)
{
    std::string w = k >= 0 ? "z" : "zi";
    std::string text = "1";
    for (int i = 0; i < std::abs(k); ++i)
        text += "*" + w;
    FormElement f = h.from_algebra(NcElement::parse(h.algebra(), text));
    FormElement df = h.d(f);
    const auto& [key, c] = *df.terms().begin();
    return c;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "nabla on degree zero")
{
    const Calculus& c = *x3;
    auto triv = ConnectionData::trivial(x3, 1);
    FormElement b = c.parse("b");
    CHECK(triv.nabla({b})[0] == c.d(b));
    auto one = ConnectionData::parse(x3, {{"w1"}});
    CHECK(one.nabla({b})[0] == c.d(b) + c.wedge(b, c.parse("w1")));
    CHECK(one.nabla({c.parse("a*w0")})[0] == c.d(c.parse("a*w0")) - c.parse("a*w0*w1"));
    CHECK(all_flat(triv.curvature()));
}

TEST_CASE_FIXTURE(Fixture, "curvature of a single invariant form")
{
    const Calculus& c = *x3;
    auto w0 = ConnectionData::parse(x3, {{"w0"}});
    auto r = w0.curvature();
    CHECK(r[0][0] == q * q * (q * q + RatFunc(1)) * c.parse("w0*w1"));
    CHECK_FALSE(w0.is_flat());
    CHECK_THROWS_AS(twisted_cohomology(w0, 1), std::invalid_argument);
}

TEST_CASE_FIXTURE(Fixture, "composite of nablas is the curvature")
{
    std::mt19937 rng(7);
    int passed = 0;
    for (int t = 0; t < 20; ++t) {
        auto conn = random_connection(x3, 1 + t % 2, 1, rng);
        std::vector<FormVec> sample;
        for (int deg = 0; deg <= 1; ++deg)
            for (int s = 0; s < 3; ++s)
                sample.push_back(random_vec(*x3, conn.rank, deg, 1, rng));
        auto rep = composite_check(conn, sample);
        passed += rep.passed();
        if (!rep.passed())
            MESSAGE(why(rep));
    }
    CHECK(passed == 20);
}

TEST_CASE_FIXTURE(Fixture, "Maurer-Cartan connection is flat")
{
    auto mc = maurer_cartan_connection(x3);
    CHECK(mc.length_preserving());
    CHECK(mc.is_flat());
    auto mc4 = maurer_cartan_connection(build_4d_full().calc);
    CHECK(mc4.is_flat());
}

TEST_CASE_FIXTURE(Fixture, "de Rham and twisted cohomology on the circle")
{
    const Calculus& h = *h3;
    auto dr = de_rham(h3, 3);
    CHECK(dr.complex.check().passed());
    CHECK(dr.cohomology.dims() == std::vector<int>{1, 1});
    CHECK(twisted_cohomology(ConnectionData::trivial(h3, 1), 3).cohomology.dims() == dr.cohomology.dims());

    // A = lambda zeta has a flat section z^k exactly when lambda = -c_k
    for (int k : {-2, 1, 2}) {
        RatFunc lambda = RatFunc(-1) * d_coefficient(h, k);
        ConnectionData a = ConnectionData::trivial(h3, 1);
        a.A[0][0] = lambda * h.parse("zeta");
        auto tc = twisted_cohomology(a, 2);
        CHECK(tc.cohomology.dims() == std::vector<int>{1, 1});
        FormVec section = tc.components[0].element(tc.cohomology.representatives(0)[0]);
        CHECK(section[0].max_word_length() == std::abs(k));
    }
    ConnectionData generic = ConnectionData::trivial(h3, 1);
    generic.A[0][0] = (q + RatFunc(5)) * h.parse("zeta");
    CHECK(twisted_cohomology(generic, 2).cohomology.dims() == std::vector<int>{0, 0});
}

TEST_CASE_FIXTURE(Fixture, "gauge equivalent connections")
{
    const Calculus& h = *h3;
    const auto& alg = h.algebra();
    auto triv = ConnectionData::trivial(h3, 1);
    auto g = gauge_transform(triv, {{NcElement::parse(alg, "z")}}, {{NcElement::parse(alg, "zi")}});
    CHECK(g.length_preserving());
    CHECK(g.is_flat());
    CHECK(g.A[0][0] == h.wedge(h.d(h.parse("z")), h.parse("zi")));
    CHECK(g.A[0][0] == q * q * h.parse("zeta"));
    CHECK(twisted_cohomology(g, 3).cohomology.dims() == de_rham(h3, 3).cohomology.dims());
    CHECK_THROWS(gauge_transform(triv, {{NcElement::parse(alg, "z")}}, {{NcElement::parse(alg, "z")}}));

    // scalar conjugation: twisted differentials are conjugate block matrices
    auto mc = maurer_cartan_connection(x3);
    std::vector<std::vector<RatFunc>> s = {{RatFunc(1), q}, {RatFunc(0), RatFunc(2)}};
    auto mc2 = gauge_transform(mc, s);
    CHECK(mc2.is_flat());
    auto t1 = twisted_cohomology(mc, 1), t2 = twisted_cohomology(mc2, 1);
    CHECK(t1.cohomology.dims() == t2.cohomology.dims());
    for (std::size_t n = 0; n < t1.complex.d.size(); ++n) {
        auto block = [&](int forms, bool inverse) {
            // f_j = sum_k s[k][j] e_k, so new coordinates are s^-1 applied to old ones
            std::vector<std::vector<RatFunc>> m = s;
            if (inverse) {
                RatFunc det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
                m = {{s[1][1] / det, RatFunc(-1) * s[0][1] / det}, {RatFunc(-1) * s[1][0] / det, s[0][0] / det}};
            }
            Matrix<RatFunc> out(2 * forms, 2 * forms);
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < forms; ++k) {
                    std::map<int, RatFunc> col;
                    for (int l = 0; l < 2; ++l)
                        if (!m[l][j].is_zero())
                            col.emplace(l * forms + k, m[l][j]);
                    out.cols[j * forms + k] = SparseVec<RatFunc>::from_map(col);
                }
            return out;
        };
        int fn = t1.components[n].forms.size(), fn1 = t1.components[n + 1].forms.size();
        CHECK(t2.complex.d[n] == compose(block(fn1, true), compose(t1.complex.d[n], block(fn, false))));
    }
}

TEST_CASE_FIXTURE(Fixture, "twisted cohomology of the Maurer-Cartan connection")
{
    auto dr = de_rham(x3, 1);
    auto tc = twisted_cohomology(maurer_cartan_connection(x3), 1);
    CHECK(tc.complex.check().passed());
    // flat sections are the rows of the defining matrix
    CHECK(tc.cohomology.dim(0) == 2);
    FormVec s = tc.components[0].element(tc.cohomology.representatives(0)[0]);
    CHECK(vec_is_zero(tc.conn.nabla(s)));
    std::mt19937 rng(3);
    auto rep = hdr_action_check(tc, dr, 12, rng);
    CHECK_MESSAGE(rep.passed(), why(rep));
}

TEST_CASE_FIXTURE(Fixture, "pushforward along maps")
{
    auto mc = maurer_cartan_connection(x3);
    auto id = make_identity_map(x3);
    CHECK(same_connection(pushforward(*id, x3, mc), mc));
    auto pushed = pushforward(*f3->pi, h3, mc);
    CHECK(pushed.is_flat());
    CHECK(same_connection(pushforward(*f3->pi, h3, ConnectionData::trivial(x3, 2)), ConnectionData::trivial(h3, 2)));
    CHECK(pushed.A[0][0] == RatFunc(-1) * varpi(*h3, NcElement::parse(h3->algebra(), "z")));
}

TEST_CASE_FIXTURE(Fixture, "differentiable bimodules")
{
    auto mc = maurer_cartan_connection(x3);
    auto bm = bimodule_from_map(*f3->pi, h3);
    auto rep = bm.check();
    CHECK_MESSAGE(rep.passed(), why(rep));
    auto via_bimodule = bimodule_pushforward(bm, mc);
    CHECK(same_connection(via_bimodule, pushforward(*f3->pi, h3, mc)));

    auto idh = identity_bimodule(h3);
    CHECK(idh.check().passed());
    auto comp = compose_bimodules(idh, bm);
    CHECK(comp.check().passed());
    CHECK(same_connection(bimodule_pushforward(comp, mc), via_bimodule));
    CHECK(bimodule_pushforward(comp, mc).is_flat());
    auto idx = identity_bimodule(x3);
    CHECK(same_connection(bimodule_pushforward(compose_bimodules(bm, idx), mc), via_bimodule));
    CHECK_THROWS(compose_bimodules(bm, bm));

    // a bimodule whose connection breaks the Leibniz law
    auto bad = bm;
    bad.nabla_m[0][0] = h3->parse("zeta");
    auto brep = bad.check();
    CHECK_FALSE(brep.passed());
}

TEST_CASE_FIXTURE(Fixture, "long exact sequence")
{
    const Calculus& h = *h3;
    auto split = long_exact_sequence(split_sequence(ConnectionData::trivial(h3, 1), ConnectionData::trivial(h3, 1)), 2);
    CHECK_MESSAGE(split.report.passed(), why(split.report));
    REQUIRE(split.delta.size() == 1);
    CHECK(split.delta[0].is_zero());
    CHECK(split.F.cohomology.dims() == std::vector<int>{2, 2});

    auto coupled = long_exact_sequence(coupled_sequence(h3, h.parse("zeta")), 2);
    CHECK_MESSAGE(coupled.report.passed(), why(coupled.report));
    CHECK(coupled.E.cohomology.dims() == std::vector<int>{1, 1});
    CHECK(coupled.F.cohomology.dims() == std::vector<int>{1, 1});
    CHECK(coupled.G.cohomology.dims() == std::vector<int>{1, 1});
    // delta(1) is the class of zeta
    auto zeta = coupled.E.components[1].coords({h.parse("zeta")});
    CHECK(coupled.delta[0].cols[0] == coupled.E.cohomology.class_of(1, zeta));
    CHECK(rank(coupled.phi_star[0]) == 1);
    CHECK(coupled.psi_star[0].is_zero());
    CHECK(coupled.phi_star[1].is_zero());
    CHECK(rank(coupled.psi_star[1]) == 1);

    auto bad = coupled_sequence(h3, h.parse("zeta"));
    bad.psi = {{RatFunc(1), RatFunc(0)}};
    CHECK_FALSE(long_exact_sequence(bad, 2).report.passed());
}

TEST_CASE("product structure on the torus")
{
    std::mt19937 rng(11);
    auto rep = product_structure_check(torus_product_structure(), 60, rng);
    CHECK_MESSAGE(rep.passed(), why(rep));
    CHECK(rep.checks().size() == 7);

    auto scaled = product_structure_check(torus_product_structure(q), 30, rng);
    CHECK(scaled.passed());

    auto bad = product_structure_check(torus_product_structure_corrupted(), 60, rng);
    CHECK_FALSE(bad.passed());
    bool d_failed = false;
    for (const auto& c : bad.checks())
        if (c.status == CheckStatus::Fail && c.check.rfind("(d)", 0) == 0)
            d_failed = true;
    CHECK(d_failed);
}
