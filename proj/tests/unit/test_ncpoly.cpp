#include <doctest.h>

#include "ncfib/ncpoly.hpp"

#include <random>
#include <set>

using namespace ncfib;

namespace {

const RatFunc q = RatFunc::q();

struct Fixture {
    AlgebraPtr x = make_slq2();
    AlgebraPtr h = make_laurent();
    NcElement el(const char* s) const { return NcElement::parse(*x, s); }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "normal forms")
{
    CHECK(el("b*a") == q.inv() * el("a*b"));
    CHECK(el("a").str() == "a");
    // a d = d a + (q - q^-1) b c together with a d = 1 + q b c
    NcElement da = el("1") + (q - (q - q.inv())) * el("b*c");
    CHECK(el("d*a") == da);
    CHECK(el("d*a").str() == "1 + q^-1*b*c");
    CHECK(el("a") * el("d") == el("1 + q*b*c"));
    CHECK(el("1") * el("c*a") == el("c*a"));
    CHECK((el("b") * el("c")).str() == "b*c");
    // both defining forms of the determinant relation hold
    CHECK((el("a*d - d*a - (q - q^-1)*b*c")).is_zero());
    CHECK((el("a*d - q*b*c")).str() == "1");
}

TEST_CASE_FIXTURE(Fixture, "text round trip")
{
    std::mt19937 rng(3);
    auto words = x->enumerate_basis(3);
    for (int i = 0; i < 50; ++i) {
        NcElement e(*x);
        for (int t = 0; t < 3; ++t)
            e += RatFunc(static_cast<long>(rng() % 5) - 2) * q.pow(static_cast<int>(rng() % 5) - 2)
                 * NcElement::word(*x, words[rng() % words.size()]);
        CHECK(el(e.str().c_str()) == e);
    }
    CHECK(NcElement::parse(*h, "z^-2 * z^3") == NcElement::parse(*h, "z"));
    CHECK(NcElement::parse(*h, "z*zi").str() == "1");
}

TEST_CASE_FIXTURE(Fixture, "Hopf maps on examples")
{
    Tensor da = x->coproduct(el("a"));
    CHECK(da == Tensor::outer(el("a"), el("a")) + Tensor::outer(el("b"), el("c")));
    CHECK(x->coproduct(el("1")) == Tensor::outer(el("1"), el("1")));

    // brute force product of the generator coproducts, each leg normalized separately
    Tensor brute = Tensor::outer(el("a*a"), el("a*b")) + Tensor::outer(el("a*b"), el("a*d"))
                   + Tensor::outer(el("b*a"), el("c*b")) + Tensor::outer(el("b*b"), el("c*d"));
    CHECK(x->coproduct(el("a*b")) == brute);

    CHECK(x->counit(el("a*d")).is_one());
    CHECK(x->antipode(el("1")) == el("1"));
    CHECK(x->antipode(el("b*c")) == el("b*c"));
    CHECK(x->antipode(el("b"), true) == -q * el("b"));
    CHECK(h->antipode(NcElement::parse(*h, "z^2")) == NcElement::parse(*h, "zi^2"));
}

TEST_CASE_FIXTURE(Fixture, "Z-degree")
{
    CHECK(el("a*c").zdegree() == 2);
    CHECK(el("1").zdegree() == 0);
    CHECK(el("a*d").zdegree() == 0);
    CHECK(!el("a + b").zdegree().has_value());
    std::mt19937 rng(5);
    auto words = x->enumerate_basis(3);
    for (int i = 0; i < 100; ++i) {
        NcElement u = NcElement::word(*x, words[rng() % words.size()]);
        NcElement v = NcElement::word(*x, words[rng() % words.size()]);
        NcElement p = u * v;
        if (!p.is_zero())
            CHECK(p.zdegree() == *u.zdegree() + *v.zdegree());
    }
}

TEST_CASE_FIXTURE(Fixture, "basis enumeration")
{
    auto b1 = x->enumerate_basis(1);
    REQUIRE(b1.size() == 5);
    CHECK(x->word_str(b1[0]) == "1");
    CHECK(x->word_str(b1[1]) == "a");
    CHECK(x->word_str(b1[4]) == "d");
    CHECK(x->enumerate_basis(0).size() == 1);

    auto hb = h->enumerate_basis(2);
    REQUIRE(hb.size() == 5);
    CHECK(h->word_str(hb[0]) == "zi*zi");
    CHECK(h->word_str(hb[2]) == "1");
    CHECK(h->word_str(hb[4]) == "z*z");

    // PBW words a^i b^j c^k and d^l b^j c^k (l > 0)
    for (int n = 0; n <= 5; ++n) {
        std::set<Word> pbw;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j)
                for (int k = 0; i + j + k <= n; ++k) {
                    pbw.insert(Word(i, '\0') + Word(j, '\1') + Word(k, '\2'));
                    if (i > 0)
                        pbw.insert(Word(i, '\3') + Word(j, '\1') + Word(k, '\2'));
                }
        auto basis = x->enumerate_basis(n);
        CHECK(std::set<Word>(basis.begin(), basis.end()) == pbw);
    }
    // degree zero words of length <= 2: 1, ab, bc, dc
    auto z0 = x->enumerate_basis(2, 0);
    CHECK(z0 == std::vector<Word>{Word(), Word("\0\1", 2), Word("\1\2", 2), Word("\3\2", 2)});
}

TEST_CASE_FIXTURE(Fixture, "reduction never lengthens words")
{
    for (const auto& w : std::vector<Word>{Word("\3\3\0\0", 4), Word("\2\1\0\3", 4), Word("\3\0\3\0\2", 5)})
        for (const auto& [u, c] : x->normal_form(w))
            CHECK(u.size() <= w.size());
}

TEST_CASE("presentations verify")
{
    CHECK(verify_presentation(*make_slq2()).passed());
    CHECK(verify_presentation(*make_laurent(), {6, 4}).passed());
}

TEST_CASE("negative controls")
{
    auto grouplike = make_slq2([](HopfData& h) { h.coproduct[0] = {{{Word("\0", 1), Word("\0", 1)}, RatFunc(1)}}; });
    Report r1 = verify_presentation(*grouplike);
    CHECK_FALSE(r1.passed());
    REQUIRE(r1.first_failure());
    CHECK(!r1.first_failure()->witness.empty());

    auto bad = make_slq2([](HopfData& h) { h.coproduct[1] = {{{Word("\0", 1), Word("\1", 1)}, RatFunc(1)}}; });
    Report r2 = verify_presentation(*bad);
    bool coassoc_failed = false;
    for (const auto& c : r2.checks())
        if (c.check.rfind("coassociativity", 0) == 0 && c.status == CheckStatus::Fail)
            coassoc_failed = true;
    CHECK(coassoc_failed);

    // generator order a < b < c < d with both straightening rules is not confluent
    AlgebraPresentation naive("naive order");
    naive.add_generator({"a", {}, 1, 0, 1});
    naive.add_generator({"b", {}, -1, 1, 0});
    naive.add_generator({"c", {}, 1, 2, 0});
    naive.add_generator({"d", {}, -1, 3, 1});
    naive.add_rule("b*a", "q^-1*a*b");
    naive.add_rule("c*a", "q^-1*a*c");
    naive.add_rule("c*b", "b*c");
    naive.add_rule("d*b", "q^-1*b*d");
    naive.add_rule("d*c", "q^-1*c*d");
    naive.add_rule("a*d", "1 + q*b*c");
    naive.add_rule("d*a", "1 + q^-1*b*c");
    Report r3 = verify_presentation(naive, {4, 0});
    CHECK_FALSE(r3.passed());
}
