#include <doctest.h>

#include "ncfib/calculus.hpp"

#include <random>

using namespace ncfib;

namespace {

const RatFunc q = RatFunc::q();

struct Fixture {
    CalculusPtr c3 = build_3d();
    CalculusPtr c4 = build_4d();
    CalculusPtr h3 = build_h3();
    CalculusPtr h4 = build_h4();
    FormElement fm(const char* s) const { return c3->parse(s); }
    FormElement f4(const char* s) const { return c4->parse(s); }
};

FormElement random_form(const Calculus& c, int degree, int len, std::mt19937& rng)
{
    auto words = c.algebra().enumerate_basis(len);
    const auto& fw = c.exterior().basis(degree);
    FormElement e = c.zero(degree);
    for (int t = 0; t < 3; ++t)
        e += RatFunc(static_cast<long>(rng() % 7) - 3) * q.pow(static_cast<int>(rng() % 5) - 2)
             * c.term(words[rng() % words.size()], fw[rng() % fw.size()]);
    return e;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "bimodule relations")
{
    CHECK(fm("w0*a") == fm("q^-1*a*w0"));
    CHECK(fm("w0*a").str() == "q^-1*a*w0");
    CHECK(fm("w1*b*c") == fm("b*c*w1"));
    CHECK(f4("w2*a") == f4("q*a*w2 - (q - q^-1)*b*wp + q*(q - q^-1)^2*a*w1"));
    CHECK(f4("wm*a*b") == f4("a*b*wm - q*(q^2 - 1)*b*b*w1"));
}

TEST_CASE_FIXTURE(Fixture, "exterior algebra")
{
    CHECK(fm("w2*w0") == fm("-q^2*w0*w2"));
    CHECK(fm("w1*w1").is_zero());
    CHECK(fm("w1*w0*w2") == fm("-q^4*w0*w1*w2"));
    CHECK(c3->exterior().basis(2).size() == 3);
    CHECK(c3->exterior().basis(3).size() == 1);
    CHECK(c3->exterior().basis(4).empty());
    CHECK(c4->exterior().basis(1).size() == 4);
    CHECK_THROWS_AS(c4->wedge(c4->symbol_form(0), c4->symbol_form(1)), DegreeOverflow);

    FormElement x = c3->parse("a*w0");
    FormElement y = c3->parse("d*d*w2");
    CHECK(c3->wedge(x, y) == c3->parse("q^2*a*d*d*w0*w2"));
}

TEST_CASE_FIXTURE(Fixture, "exterior derivative on examples")
{
    CHECK(c3->d(fm("b")) == fm("a*w0 - q^2*b*w1"));
    CHECK(q * c3->d(fm("b*c")) == fm("a*c*w0 - q^2*b*d*w2"));
    CHECK(c3->d(fm("1")).is_zero());
    CHECK(c3->d(fm("w1")) == fm("q*w0*w2"));
    CHECK(c3->d(c3->d(fm("a*b*c"))).is_zero());
    CHECK(c3->d(c3->d(fm("w0"))).is_zero());
    CHECK_THROWS_AS(c4->d(c4->symbol_form(0)), DegreeOverflow);

    FormElement z = h3->parse("z");
    FormElement dz = h3->d(z);
    CHECK(dz == h3->parse("z*zeta"));
    CHECK(h3->wedge(dz, z) == q.pow(-2) * h3->wedge(z, dz));
    CHECK(h3->d(h3->parse("z*zi")).is_zero());
    CHECK(h4->d(h4->parse("z^-1*z^2")) == h4->parse("z*zeta"));
}

TEST_CASE_FIXTURE(Fixture, "truncations")
{
    CHECK(c3->truncate_component(1, 0).size() == 3);
    CHECK(c3->truncate_component(3, 1).size() == 5);
    CHECK(c3->truncate_component(0, 3).size() == 30);
    CHECK(c3->truncate_component(1, 2, 0).size() == 10);
    FormBasis b(*c3, 1, 2);
    FormElement e = fm("a*b*w1 - q*c*w2");
    CHECK(b.element(b.coords(e)) == e);
    CHECK_THROWS_AS(b.coords(fm("a*a*a*w1")), std::out_of_range);
}

TEST_CASE_FIXTURE(Fixture, "graded Leibniz, degree and length")
{
    std::mt19937 rng(11);
    for (int i = 0; i < 20; ++i) {
        int m = static_cast<int>(rng() % 2);
        int n = static_cast<int>(rng() % 2);
        FormElement x = random_form(*c3, m, 2, rng);
        FormElement y = random_form(*c3, n, 2, rng);
        RatFunc sign = m % 2 ? RatFunc(-1) : RatFunc(1);
        CHECK(c3->d(c3->wedge(x, y)) == c3->wedge(c3->d(x), y) + sign * c3->wedge(x, c3->d(y)));
    }
    for (const auto& w : c3->algebra().enumerate_basis(3)) {
        FormElement dx = c3->d(c3->term(w, FormWord()));
        if (dx.is_zero())
            continue;
        CHECK(dx.zdegree() == c3->algebra().zdegree(w));
        CHECK(dx.max_word_length() == static_cast<int>(w.size()));
    }
}

TEST_CASE_FIXTURE(Fixture, "structure checks")
{
    for (const auto& c : {c3, c4, h3, h4}) {
        Report r = verify_calculus(*c);
        INFO(c->name() << ": " << r.first_failure());
        CHECK(r.passed());
    }
    std::string bad = calculus_text_3d();
    auto p = bad.find("mc w1 = q*w0*w2");
    REQUIRE(p != std::string::npos);
    bad.replace(p, 15, "mc w1 = q^2*w0*w2");
    Report r = verify_calculus(*parse_calculus(bad));
    CHECK_FALSE(r.passed());

    std::string bad_d = calculus_text_3d();
    p = bad_d.find("d b = a*w0 - q^2*b*w1");
    bad_d.replace(p, 21, "d b = a*w0 - q*b*w1");
    CHECK_FALSE(verify_calculus(*parse_calculus(bad_d)).passed());
}

TEST_CASE_FIXTURE(Fixture, "serialization round trip")
{
    for (const auto& c : {c3, c4, h3, h4}) {
        std::string s = c->serialize();
        auto back = parse_calculus(s);
        CHECK(back->serialize() == s);
        for (int g = 0; g < c->algebra().generator_count(); ++g)
            CHECK(back->d_generator(g).str() == c->d_generator(g).str());
    }
}
