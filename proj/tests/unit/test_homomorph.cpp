#include <doctest.h>

#include "ncfib/homomorph.hpp"

using namespace ncfib;

namespace {

const RatFunc q = RatFunc::q();

struct Fixture {
    std::shared_ptr<const FibrationData> f3 = fibration_3d();
    std::shared_ptr<const FibrationData> f4 = fibration_4d();
    const Calculus& c3 = *f3->x;
    const Calculus& h3 = *f3->h;
    const Calculus& c4 = *f4->x;
    const Calculus& h4 = *f4->h;
    FormElement fm(const char* s) const { return c3.parse(s); }
    FormElement hm(const char* s) const { return h3.parse(s); }
    TensorForm t3(const char* x, const char* h) const { return TensorForm::outer({fm(x), hm(h)}); }
};

/// keys of a basis whose form word is in `words`
Subspace<RatFunc> keys_with(const FormBasis& b, const std::vector<FormWord>& words)
{
    Subspace<RatFunc> s(b.size());
    for (int j = 0; j < b.size(); ++j)
        for (const auto& w : words)
            if (b.keys()[j].second == w)
                s.add(SparseVec<RatFunc>::unit(j));
    return s;
}

FormWord fw(const Calculus& c, std::initializer_list<const char*> names)
{
    FormWord w;
    for (const char* n : names)
        w.push_back(static_cast<char>(*c.find_symbol(n)));
    return w;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "pi_* on invariant forms")
{
    CHECK(f3->pi->well_defined());
    CHECK(f3->pi->apply_single(fm("w0")).is_zero());
    CHECK(f3->pi->apply_single(fm("w2")).is_zero());
    CHECK(f3->pi->apply_single(fm("w1")) == hm("zeta"));
    CHECK(f3->pi->apply_single(fm("a*w1")) == hm("z*zeta"));

    CHECK(f4->pi->well_defined());
    CHECK(f4->pi->apply_single(c4.parse("w2")) == q * (q + RatFunc(1)) * h4.parse("zeta"));
    for (const char* s : {"w1", "wp", "wm"})
        CHECK(f4->pi->apply_single(c4.parse(s)).is_zero());
    CHECK(f3->k.dim() == 2);
    CHECK(f4->k.dim() == 3);
}

TEST_CASE_FIXTURE(Fixture, "rho_* and bidegree projections")
{
    CHECK(f3->rho->well_defined());
    CHECK(f3->rho->apply(fm("w0")) == t3("w0", "zi*zi"));
    CHECK(f3->rho->apply(fm("w1")) == t3("1", "zeta") + t3("w1", "1"));
    CHECK(f3->rho->apply(fm("w0*w2")) == t3("w0*w2", "1"));
    CHECK(f3->rho->apply(fm("a")) == t3("a", "z"));

    TensorForm r1 = f3->rho->apply(fm("w1"));
    CHECK(pi_projection(r1, 0, 1) == t3("1", "zeta"));
    CHECK(pi_projection(f3->rho->apply(fm("w2")), 1, 0) == t3("w2", "z*z"));
    CHECK_THROWS_AS(pi_projection(r1, 2, 0), std::invalid_argument);

    CHECK(f4->rho->well_defined());
}

TEST_CASE_FIXTURE(Fixture, "tensor form algebra")
{
    TensorForm a = t3("w0", "1");
    TensorForm b = t3("1", "zeta");
    // (w0 (x) 1)(1 (x) zeta) = w0 (x) zeta, reversed order picks up a sign
    CHECK(a * b == t3("w0", "zeta"));
    CHECK(b * a == RatFunc(-1) * t3("w0", "zeta"));
    // d is a graded derivation on the tensor product
    TensorForm x = t3("a*w0", "z");
    TensorForm y = t3("b", "zi*zeta");
    CHECK((x * y).d() == x.d() * y + RatFunc(-1) * (x * y.d()));
    CHECK(x.d().d().is_zero());
}

TEST_CASE_FIXTURE(Fixture, "horizontal forms")
{
    FormBasis b0(c3, 0, 2);
    CHECK(horizontal_forms(*f3, b0).dim() == b0.size());

    FormBasis b1(c3, 1, 3);
    CHECK(horizontal_forms(*f3, b1) == keys_with(b1, {fw(c3, {"w0"}), fw(c3, {"w2"})}));

    FormBasis b2(c3, 2, 2);
    CHECK(horizontal_forms(*f3, b2) == keys_with(b2, {fw(c3, {"w0", "w2"})}));

    FormBasis b3(c3, 3, 2);
    CHECK(horizontal_forms(*f3, b3).dim() == 0);

    CHECK(horizontal_coaction_check(*f3, 1, 2).passed());
    CHECK(horizontal_coaction_check(*f3, 2, 2).passed());
}

TEST_CASE_FIXTURE(Fixture, "coinvariants")
{
    FormBasis b0(c3, 0, 2);
    Subspace<RatFunc> co = coinvariant_subspace(b0);
    // zero-degree normal words of length <= 2: 1, ab, bc, cd, da
    int expected = 0;
    for (const auto& w : c3.algebra().enumerate_basis(2))
        expected += c3.algebra().zdegree(w) == 0;
    CHECK(co.dim() == expected);
    CHECK(co == coinvariants_by_solve(*f3, b0));

    FormBasis b1(c3, 1, 1);
    auto w1 = b1.index({Word(), fw(c3, {"w1"})});
    auto a = b1.index({c3.algebra().parse_word("a"), FormWord()});
    REQUIRE(w1);
    CHECK(coinvariant_subspace(b1).contains(SparseVec<RatFunc>::unit(*w1)));
    CHECK_FALSE(a);
    FormBasis x0(c3, 0, 1);
    auto ai = x0.index({c3.algebra().parse_word("a"), FormWord()});
    REQUIRE(ai);
    CHECK_FALSE(coinvariant_subspace(x0).contains(SparseVec<RatFunc>::unit(*ai)));
}

TEST_CASE_FIXTURE(Fixture, "forms on the base")
{
    const auto& alg = c3.algebra();
    CHECK(NcElement::parse(alg, "a*a*d*d - (q + q^-1)*a*c*b*d + q^2*c*c*b*b") == NcElement::scalar(alg, RatFunc(1)));

    FormBasis t1(c3, 1, 2, 0);
    Subspace<RatFunc> hor = horizontal_forms(*f3, t1);
    CHECK(omega_B(*f3, t1, 2) == hor.intersect(coinvariant_subspace(t1)));
    CHECK(omega_B(*f3, t1, 2).dim() > 0);

    FormBasis t2(c3, 2, 2, 0);
    CHECK(omega_B(*f3, t2, 4) == keys_with(t2, {fw(c3, {"w0", "w2"})}));

    FormBasis t3b(c3, 3, 2, 0);
    CHECK(omega_B(*f3, t3b, 2).dim() == 0);
}

TEST_CASE_FIXTURE(Fixture, "base forms times X match powers of K")
{
    for (int n = 1; n <= 2; ++n) {
        FormBasis t(c3, n, 2);
        CHECK(omega_B_times_X(*f3, t, 4) == k_power_span(*f3, t, n));
    }
    CHECK(k_filtration_invariant(*f3, 2, 2).dim() == 1);
    CHECK(k_filtration_invariant(*f3, 1, 2).dim() == 3);
    CHECK(k_filtration_invariant(*f3, 3, 3).dim() == 0);
}

TEST_CASE_FIXTURE(Fixture, "integral on H")
{
    const auto& h = h3.algebra();
    CHECK(integral_H(NcElement::scalar(h, RatFunc(1))) == RatFunc(1));
    CHECK(integral_H(NcElement::parse(h, "z*z*z")).is_zero());
    CHECK(integral_H(NcElement::parse(h, "3*z*zi + zi")) == RatFunc(3));

    // (id (x) integral) rho is the Z-degree zero projection
    auto avg = [&](const char* s) {
        TensorForm r = f3->rho->apply(fm(s));
        FormElement out = c3.zero(0);
        for (const auto& [k, c] : r.terms())
            out.add(k[0], c * integral_H(NcElement::word(h, k[1].first)));
        return out;
    };
    CHECK(avg("a").is_zero());
    CHECK(avg("a*b") == fm("a*b"));
    CHECK(avg("a*b + c") == fm("a*b"));
}

TEST_CASE_FIXTURE(Fixture, "left action on invariant forms")
{
    const auto& alg = c3.algebra();
    CHECK(left_action(c3, NcElement::scalar(alg, RatFunc(1)), fm("w1")) == fm("w1"));
    CHECK(left_action(c3, NcElement::parse(alg, "a"), fm("w0")) == q * fm("w0"));
    for (int i = 0; i < f3->k.dim(); ++i)
        for (int g = 0; g < alg.generator_count(); ++g) {
            FormElement act = left_action(c3, NcElement::generator(alg, g), f3->k_form(i));
            CHECK(act.terms().size() <= 2);
        }
}

TEST_CASE_FIXTURE(Fixture, "condition K")
{
    const auto& alg = c4.algebra();
    CHECK(condition_K_form(c4, NcElement::parse(alg, "a*b")) == -q.inv() * c4.parse("wm"));
    CHECK(condition_K_form(c4, NcElement::parse(alg, "c*b")) == (q.pow(-2) - RatFunc(1)) * c4.parse("w1"));
    CHECK(condition_K_form(c4, NcElement::parse(alg, "d*c")) == -q.pow(-3) * c4.parse("wp"));

    Report r4 = condition_K_check(*f4, 4);
    CHECK_MESSAGE(r4.passed(), (r4.first_failure() ? r4.first_failure()->check : ""));
    Report r3 = condition_K_check(*f3, 4);
    CHECK_MESSAGE(r3.passed(), (r3.first_failure() ? r3.first_failure()->check : ""));
}

TEST_CASE_FIXTURE(Fixture, "braiding and the derived 4D calculus")
{
    Report r;
    auto b3 = braiding_sigma(build_3d(), &r);
    CHECK_FALSE(b3.has_value());
    CHECK_FALSE(r.checks().empty());

    auto b4 = braiding_sigma(build_4d());
    REQUIRE(b4.has_value());
    CHECK(b4->report.passed());
    auto rels = wedge_from_braiding(*b4);
    // kernel of sigma - id is what the quotient drops
    Matrix<RatFunc> id(16, 16);
    for (int i = 0; i < 16; ++i)
        id.cols[i] = SparseVec<RatFunc>::unit(i);
    CHECK(static_cast<int>(rels.size()) == 16 - rank(b4->sigma - id));

    const DerivedCalculus& d4 = build_4d_full();
    REQUIRE(d4.calc);
    CHECK_MESSAGE(d4.report.passed(), (d4.report.first_failure() ? d4.report.first_failure()->check : ""));
    CHECK(d4.calc->exterior().basis(2).size() == 16 - rels.size());
    FormElement w = d4.calc->parse("w1");
    CHECK(d4.calc->d(d4.calc->d(w)).is_zero());
}

TEST_CASE_FIXTURE(Fixture, "colinear projection")
{
    for (const auto& f : {f3, f4}) {
        ProjectionP p = projection_p(*f);
        CHECK_MESSAGE(p.report.passed(), (p.report.first_failure() ? p.report.first_failure()->check : ""));
    }
    ProjectionP p4 = projection_p(*f4);
    int w2 = *c4.find_symbol("w2");
    CHECK(p4.p0.cols[w2].is_zero());
    CHECK(p4.p.cols[w2].is_zero());
}

TEST_CASE_FIXTURE(Fixture, "coaction law")
{
    CHECK(coaction_law_check(*f3, 2).passed());
    CHECK(coaction_law_check(*f4, 2).passed());
}

TEST_CASE("maps that break relations are reported")
{
    auto c = build_3d();
    auto h = build_h3();
    const auto& x = c->algebra();
    const auto& ha = h->algebra();
    // a -> z^2 and d -> zi^2 respects the algebra but not the calculus
    std::vector<Tensor> img;
    for (int g = 0; g < x.generator_count(); ++g) {
        std::string n = x.generator(g).name;
        std::string t = n == "a" ? "z*z" : n == "d" ? "zi*zi" : "0";
        img.push_back(Tensor::from(NcElement::parse(ha, t)));
    }
    DgaMap bad("bad", c, {h}, AlgebraMap(x, {&ha}, img));
    CHECK_FALSE(bad.well_defined());
    REQUIRE(bad.report().first_failure());

    // grouplike images for every generator already fail the algebra relations
    std::vector<Tensor> all_z;
    for (int g = 0; g < x.generator_count(); ++g)
        all_z.push_back(Tensor::from(NcElement::parse(ha, "z")));
    DgaMap worse("worse", c, {h}, AlgebraMap(x, {&ha}, all_z));
    CHECK_FALSE(worse.well_defined());
}
