#include "ncfib/suites.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ncfib {

namespace {

const RatFunc q = RatFunc::q();

std::string join(const std::vector<std::string>& parts, const std::string& sep = ", ")
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i ? sep : "") + parts[i];
    return out;
}

/// records lhs == rhs and echoes the computed side
void identity(SuiteResult& r, const std::string& name, const std::string& computed, const std::string& expected)
{
    r.report.expect(computed == expected, name, computed + " != " + expected);
    r.values.emplace_back(name, computed);
}

void identity(SuiteResult& r, const std::string& name, const FormElement& computed, const FormElement& expected)
{
    r.report.expect(computed == expected, name, computed.str() + " != " + expected.str());
    r.values.emplace_back(name, computed.str());
}

void identity(SuiteResult& r, const std::string& name, const TensorForm& computed, const TensorForm& expected)
{
    r.report.expect(computed == expected, name, computed.str() + " != " + expected.str());
    r.values.emplace_back(name, computed.str());
}

std::string dims_str(const std::vector<int>& d)
{
    std::vector<std::string> s;
    for (int x : d)
        s.push_back(std::to_string(x));
    return "[" + join(s) + "]";
}

Subspace<RatFunc> keys_with(const FormBasis& b, const std::vector<FormWord>& words)
{
    Subspace<RatFunc> s(b.size());
    for (int j = 0; j < b.size(); ++j)
        if (std::find(words.begin(), words.end(), b.keys()[j].second) != words.end())
            s.add(SparseVec<RatFunc>::unit(j));
    return s;
}

FormWord symbols(const Calculus& c, std::initializer_list<const char*> names)
{
    FormWord w;
    for (const char* n : names)
        w.push_back(static_cast<char>(*c.find_symbol(n)));
    return w;
}

TensorForm outer(const Calculus& x, const char* a, const Calculus& h, const char* b)
{
    return TensorForm::outer({x.parse(a), h.parse(b)});
}

// ------------------------------------------------------------ suites

SuiteResult presentation_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"presentation", Report("presentation"), {}};
    AlgebraPtr slq2 = cfg.corrupt ? make_slq2([](HopfData& h) { h.coproduct[0] = {{{Word("\0", 1), Word("\0", 1)}, RatFunc(1)}}; })
                                  : make_slq2();
    Report a = verify_presentation(*slq2);
    Report b = verify_presentation(*make_laurent(), {6, 4});
    r.report.merge(a, slq2->name() + ": ");
    r.report.merge(b, make_laurent()->name() + ": ");
    const auto& alg = *slq2;
    for (const char* w : {"d*a", "a*d", "c*b*a", "d*d*a*a"})
        r.values.emplace_back(std::string("normal form ") + w, NcElement::parse(alg, w).str());
    r.values.emplace_back("checks", std::to_string(a.checks().size() + b.checks().size()));
    return r;
}

SuiteResult calculus_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"calculus", Report("calculus"), {}};
    CalculusPtr c3 = build_3d();
    if (cfg.corrupt) {
        std::string text = calculus_text_3d();
        text.replace(text.find("mc w1 = q*w0*w2"), 15, "mc w1 = q^2*w0*w2");
        c3 = parse_calculus(text);
    }
    CalculusCheckOptions opt;
    opt.word_length = cfg.truncation(3);
    for (const auto& c : {c3, build_4d(), build_h3(), build_h4()})
        r.report.merge(verify_calculus(*c, opt), c->name() + ": ");
    const Calculus& x = *c3;
    // first-order differentials
    identity(r, "d a", x.d(x.parse("a")), x.parse("a*w1 - q*b*w2"));
    identity(r, "d b", x.d(x.parse("b")), x.parse("a*w0 - q^2*b*w1"));
    identity(r, "d c", x.d(x.parse("c")), x.parse("c*w1 - q*d*w2"));
    identity(r, "d d", x.d(x.parse("d")), x.parse("c*w0 - q^2*d*w1"));
    // commutation with the generators
    const char* comm[][2] = {{"w0*a", "q^-1*a*w0"}, {"w0*b", "q*b*w0"}, {"w1*a", "q^-2*a*w1"}, {"w1*b", "q^2*b*w1"},
                             {"w2*a", "q^-1*a*w2"}, {"w2*b", "q*b*w2"},   {"w0*c", "q^-1*c*w0"}, {"w0*d", "q*d*w0"},
                             {"w1*c", "q^-2*c*w1"}, {"w1*d", "q^2*d*w1"}, {"w2*c", "q^-1*c*w2"}, {"w2*d", "q*d*w2"}};
    for (const auto& [l, rr] : comm)
        identity(r, l, x.parse(l), x.parse(rr));
    identity(r, "d w0", x.d(x.parse("w0")), x.parse("q^2*(q^2 + 1)*w0*w1"));
    identity(r, "d w1", x.d(x.parse("w1")), x.parse("q*w0*w2"));
    identity(r, "d w2", x.d(x.parse("w2")), x.parse("q^2*(q^2 + 1)*w1*w2"));
    for (const char* sq : {"w0*w0", "w1*w1", "w2*w2"})
        identity(r, sq, x.parse(sq), x.zero(2));
    identity(r, "w2*w0", x.parse("w2*w0"), x.parse("-q^2*w0*w2"));
    identity(r, "w1*w0", x.parse("w1*w0"), x.parse("-q^4*w0*w1"));
    identity(r, "w2*w1", x.parse("w2*w1"), x.parse("-q^4*w1*w2"));

    const Calculus& y = *build_4d();
    identity(r, "4d d a", y.d(y.parse("a")), y.parse("(q - q^-1 - q^-2)/(q + 1)*a*w1 - q^-2*b*wp + q^-1/(q + 1)*a*w2"));
    identity(r, "4d d b", y.d(y.parse("b")), y.parse("q/(q + 1)*b*w1 - q^-2*a*wm - q^-2/(q + 1)*b*w2"));
    identity(r, "4d d c", y.d(y.parse("c")), y.parse("(q - q^-1 - q^-2)/(q + 1)*c*w1 - q^-2*d*wp + q^-1/(q + 1)*c*w2"));
    identity(r, "4d d d", y.d(y.parse("d")), y.parse("q/(q + 1)*d*w1 - q^-2*c*wm - q^-2/(q + 1)*d*w2"));
    const char* comm4[][2] = {{"w2*a", "q*a*w2 - (q - q^-1)*b*wp + q*(q - q^-1)^2*a*w1"},
                              {"w2*b", "q^-1*b*w2 - (q - q^-1)*a*wm"},
                              {"wm*a", "a*wm - (q^2 - 1)*b*w1"},
                              {"wm*b", "b*wm"},
                              {"wp*a", "a*wp"},
                              {"wp*b", "b*wp - (q^2 - 1)*a*w1"},
                              {"w1*a", "q^-1*a*w1"},
                              {"w1*b", "q*b*w1"}};
    for (const auto& [l, rr] : comm4)
        identity(r, std::string("4d ") + l, y.parse(l), y.parse(rr));
    return r;
}

SuiteResult maps_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"maps", Report("maps"), {}};
    auto f3 = fibration_3d();
    auto f4 = fibration_4d();
    const Calculus& x = *f3->x;
    const Calculus& h = *f3->h;
    const Calculus& x4 = *f4->x;
    const Calculus& h4 = *f4->h;
    FormElement zidz = h.wedge(h.parse("zi"), h.d(h.parse("z")));
    FormElement zidz4 = h4.wedge(h4.parse("zi"), h4.d(h4.parse("z")));

    DgaMapPtr pi = f3->pi;
    if (cfg.corrupt) {
        // a -> z^2 and d -> zi^2 respects the algebra but not the calculus
        std::vector<Tensor> img;
        const auto& xa = x.algebra();
        for (int g = 0; g < xa.generator_count(); ++g) {
            std::string n = xa.generator(g).name;
            img.push_back(Tensor::from(NcElement::parse(h.algebra(), n == "a" ? "z*z" : n == "d" ? "zi*zi" : "0")));
        }
        pi = std::make_shared<DgaMap>("pi", f3->x, std::vector<CalculusPtr>{f3->h}, AlgebraMap(xa, {&h.algebra()}, img));
    }
    for (const auto& m : {pi, f3->rho, f4->pi, f4->rho})
        r.report.merge(m->report(), m->name() + " on " + m->source().name() + ": ");
    identity(r, "pi w0", pi->apply_single(x.parse("w0")), h.zero(1));
    identity(r, "pi w1", pi->apply_single(x.parse("w1")), zidz);
    identity(r, "pi w2", pi->apply_single(x.parse("w2")), h.zero(1));
    identity(r, "z.dz = q^2 dz.z", h.wedge(h.parse("z"), h.d(h.parse("z"))),
             RatFunc(q * q) * h.wedge(h.d(h.parse("z")), h.parse("z")));
    identity(r, "4d pi w2", f4->pi->apply_single(x4.parse("w2")), q * (q + RatFunc(1)) * zidz4);
    for (const char* s : {"w1", "wp", "wm"})
        identity(r, std::string("4d pi ") + s, f4->pi->apply_single(x4.parse(s)), h4.zero(1));
    identity(r, "4d dz.zi = q^-1 zi.dz", h4.wedge(h4.d(h4.parse("z")), h4.parse("zi")), q.inv() * zidz4);
    identity(r, "rho w0", f3->rho->apply(x.parse("w0")), outer(x, "w0", h, "zi*zi"));
    identity(r, "rho w1", f3->rho->apply(x.parse("w1")), TensorForm::outer({x.one(), zidz}) + outer(x, "w1", h, "1"));
    identity(r, "rho w2", f3->rho->apply(x.parse("w2")), outer(x, "w2", h, "z*z"));
    return r;
}

SuiteResult base_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"base", Report("base"), {}};
    const int N = cfg.truncation(3);
    r.report.truncation = N;
    if (cfg.calculus != "3d") {
        r.report.skip("horizontal and base forms", "the identities concern the 3d calculus");
        return r;
    }
    auto f = fibration_3d();
    const Calculus& c = *f->x;
    const auto& alg = c.algebra();
    const char* unit = cfg.corrupt ? "a*a*d*d - (q + q^-1)*a*c*b*d + q^3*c*c*b*b" : "a*a*d*d - (q + q^-1)*a*c*b*d + q^2*c*c*b*b";
    identity(r, "determinant identity", NcElement::parse(alg, unit).str(), NcElement::scalar(alg, RatFunc(1)).str());

    FormBasis b1(c, 1, N), b2(c, 2, N), b3(c, 3, N);
    r.report.expect(horizontal_forms(*f, b1) == keys_with(b1, {symbols(c, {"w0"}), symbols(c, {"w2"})}), "H^1 X = X.w0 + X.w2");
    r.report.expect(horizontal_forms(*f, b2) == keys_with(b2, {symbols(c, {"w0", "w2"})}), "H^2 X = X.w0^w2");
    r.report.expect(horizontal_forms(*f, b3).dim() == 0, "H^3 X = 0");
    FormBasis t1(c, 1, N, 0), t2(c, 2, N, 0), t3(c, 3, N, 0);
    Subspace<RatFunc> hor1 = horizontal_forms(*f, t1);
    Subspace<RatFunc> ob1 = omega_B(*f, t1, 4);
    r.report.expect(ob1 == hor1.intersect(coinvariant_subspace(t1)), "Omega^1 B = coinvariant horizontal 1-forms");
    Subspace<RatFunc> ob2 = omega_B(*f, t2, 4);
    if (N < 2)
        r.report.skip("Omega^2 B = B.w0^w2", "B.w0^w2 is generated by words of length 2, N = " + std::to_string(N));
    else
        r.report.expect(ob2 == keys_with(t2, {symbols(c, {"w0", "w2"})}), "Omega^2 B = B.w0^w2");
    r.report.expect(omega_B(*f, t3, 4).dim() == 0, "Omega^3 B = 0");
    r.values.emplace_back("dim Omega B", dims_str({static_cast<int>(alg.enumerate_basis(N, 0).size()), ob1.dim(), ob2.dim(), 0}));
    return r;
}

FilteredComplex configured_complex(const SuiteConfig& cfg, int fallback)
{
    FilteredComplex fc = make_filtered_complex(configured_fibration(cfg), cfg.truncation(fallback));
    if (cfg.corrupt)
        fc.filt.quotient[0][1].clear();
    return fc;
}

SuiteResult fibration_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"fibration", Report("fibration"), {}};
    FilteredComplex fc = configured_complex(cfg, 3);
    r.report.truncation = fc.N;
    r.report.scalar_mode = cfg.scalar.str();
    r.report.merge(fc.report);
    r.report.merge(xi_check(fc));
    r.report.merge(fibration_test(fc));
    const auto& F = fc.filt;
    if (cfg.calculus == "3d") {
        std::map<std::pair<int, int>, std::multiset<int>> expected = {
            {{0, 0}, {0}}, {{0, 1}, {0}}, {{0, 2}, {}}, {{0, 3}, {}}, {{1, 0}, {-2, 2}},
            {{1, 1}, {-2, 2}}, {{1, 2}, {}}, {{2, 0}, {0}}, {{2, 1}, {0}}};
        std::string bad;
        for (const auto& [mn, z] : expected) {
            std::multiset<int> got;
            if (mn.first <= F.pmax && mn.second < static_cast<int>(F.quotient[mn.first].size()))
                for (const auto& v : F.quotient[mn.first][mn.second])
                    got.insert(F.zdeg(mn.first + mn.second, v));
            if (got != z && bad.empty())
                bad = "Xi_" + std::to_string(mn.first) + "^" + std::to_string(mn.second);
        }
        r.report.expect(bad.empty(), "Xi table generators and degrees", bad);
    }
    if (!cfg.scalar.is_symbolic()) {
        std::string bad;
        int blocks = 0;
        for (int m = 0; m <= F.pmax; ++m)
            for (int n = 0; m + n <= F.top; ++n) {
                ThetaMap theta(F, m, n);
                for (const auto& [z, b] : fc.blocks) {
                    auto tb = theta.block(z, fc.N);
                    ++blocks;
                    if (rank(specialize(tb.matrix, cfg.scalar.value())) != tb.matrix.cols_count && bad.empty())
                        bad = "m " + std::to_string(m) + ", n " + std::to_string(n) + ", zdeg " + std::to_string(z);
                }
            }
        r.report.expect(bad.empty(), "Theta_m invertible at " + cfg.scalar.str() + " on " + std::to_string(blocks) + " blocks", bad);
    }
    for (const auto& e : xi_table(fc)) {
        std::vector<std::string> dims;
        for (const auto& [z, d] : e.dims)
            dims.push_back(std::to_string(z) + ":" + std::to_string(d));
        r.values.emplace_back("Xi_" + std::to_string(e.m) + "^" + std::to_string(e.n),
                              "<" + join(e.generators) + "> dims {" + join(dims) + "}");
    }
    return r;
}

SuiteResult lemma_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"lemma", Report("lemma"), {}};
    auto fib = configured_fibration(cfg);
    ExteriorFiltration f = make_filtration(fib);
    const bool three = cfg.calculus == "3d";
    QBase base = three ? QBase::QInvSquared : QBase::Q;
    if (cfg.corrupt)
        base = QBase::QSquared;
    Report lem = lemma_check(f, cfg.truncation(4), base);
    r.report.merge(lem);
    r.report.truncation = cfg.truncation(4);
    const std::string mu = lem.checks().front().detail;
    if (three)
        identity(r, "normalisation", mu, "1");
    else
        r.values.emplace_back("normalisation", mu);
    return r;
}

SuiteResult fibre_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"fibre", Report("fibre"), {}};
    FilteredComplex fc = configured_complex(cfg, 3);
    r.report.truncation = fc.N;
    FibreCohomology h = fibre_cohomology(fc);
    r.report.merge(h.report);
    for (const auto& [key, d] : h.dims)
        if (d)
            r.values.emplace_back("H^" + std::to_string(key.first) + " zdeg " + std::to_string(key.second), std::to_string(d));
    for (std::size_t i = 0; i < h.generators.size(); ++i)
        r.values.emplace_back("generator " + std::to_string(i), h.generators[i].str());
    return r;
}

SuiteResult spectral_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"spectral", Report("spectral"), {}};
    FilteredComplex fc = make_filtered_complex(configured_fibration(cfg), cfg.truncation(3));
    r.report.truncation = fc.N;
    if (cfg.corrupt) {
        // drop the filtration level F^1 in degree one of the zero block
        auto& b = fc.blocks.at(0);
        b.F[1][1] = b.F[2][1];
    }
    SpectralSequence ss = spectral_sequence(fc, fc.filt.pmax + 1);
    r.report.merge(ss.report);
    for (const auto& page : ss.pages) {
        std::vector<std::string> cells;
        for (const auto& [key, d] : page.dims) {
            auto [z, p, qd] = key;
            if (z == 0)
                cells.push_back("(" + std::to_string(p) + "," + std::to_string(qd) + ")=" + std::to_string(d));
        }
        r.values.emplace_back("E_" + std::to_string(page.r) + " zdeg 0", join(cells, " "));
    }
    r.values.emplace_back("H(B) truncated", dims_str(ss.base_cohomology));
    std::vector<int> total(fc.filt.top + 2, 0);
    for (const auto& [key, d] : ss.total)
        total[key.second] += d;
    r.values.emplace_back("H(X) truncated", dims_str(total));
    if (cfg.calculus == "3d" && ss.pages.size() > 2 && ss.base_cohomology.size() == 3) {
        // two fibre rows: the sequence is a Gysin type sequence through d_2 : E_2^{0,1} -> E_2^{2,0}
        const auto& hb = ss.base_cohomology;
        auto it = ss.pages[2].d.find({0, 0, 1});
        int d2 = it == ss.pages[2].d.end() ? 0 : rank(it->second);
        r.values.emplace_back("rank d_2 zdeg 0", std::to_string(d2));
        auto rel = [&](const std::string& name, int got, int want) {
            r.report.expect(got == want, name, std::to_string(got) + " vs " + std::to_string(want));
        };
        rel("H^0(X) = H^0(B)", total[0], hb[0]);
        rel("H^1(X) = H^1(B) + ker d_2", total[1], hb[1] + hb[0] - d2);
        rel("H^2(X) = H^1(B) + coker d_2", total[2], hb[1] + hb[2] - d2);
        rel("H^3(X) = H^2(B)", total[3], hb[2]);
        rel("H^4(X) = 0", total[4], 0);
    }
    return r;
}

SuiteResult connection_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"connection", Report("connection"), {}};
    const int N = cfg.truncation(2);
    r.report.truncation = N;
    auto f3 = fibration_3d();
    CalculusPtr x3 = f3->x, h3 = f3->h;
    std::mt19937 rng(cfg.seed);

    int composite = 0;
    std::string composite_fail;
    for (int t = 0; t < 20; ++t) {
        auto conn = random_connection(x3, 1 + t % 2, 2, rng);
        std::vector<FormVec> sample;
        for (int deg = 0; deg <= 1; ++deg)
            for (int s = 0; s < 2; ++s)
                sample.push_back(random_vec(*x3, conn.rank, deg, 1, rng));
        Report rep = composite_check(conn, sample);
        composite += rep.passed();
        if (!rep.passed() && composite_fail.empty())
            composite_fail = rep.first_failure()->check + ": " + rep.first_failure()->witness;
    }
    r.report.expect(composite == 20, "nabla nabla = id ^ R for 20 random connections", composite_fail);

    auto mc = maurer_cartan_connection(x3);
    r.report.expect(mc.is_flat(), "Maurer-Cartan connection is flat");
    r.report.expect(gauge_transform(mc, {{RatFunc(1), q}, {RatFunc(0), RatFunc(2)}}).is_flat(), "scalar gauge transform stays flat");
    auto zg = gauge_transform(ConnectionData::trivial(h3, 1), {{NcElement::parse(h3->algebra(), "z")}},
                              {{NcElement::parse(h3->algebra(), "zi")}});
    r.report.expect(zg.is_flat(), "z gauge transform stays flat", zg.str());
    r.report.expect(pushforward(*f3->pi, h3, mc).is_flat(), "pushforward along pi stays flat");
    auto bm = bimodule_from_map(*f3->pi, h3);
    r.report.merge(bm.check());
    r.report.expect(bimodule_pushforward(bm, mc).is_flat(), "bimodule pushforward stays flat");

    auto tc = twisted_cohomology(mc, 1);
    auto dr = de_rham(x3, 1);
    r.report.merge(hdr_action_check(tc, dr, 12, rng));
    r.values.emplace_back("H(A; MC) at N=1", dims_str(tc.cohomology.dims()));

    auto split = long_exact_sequence(split_sequence(ConnectionData::trivial(h3, 1), ConnectionData::trivial(h3, 1)), N);
    r.report.merge(split.report);
    auto ses = coupled_sequence(h3, h3->parse("zeta"));
    if (cfg.corrupt)
        ses.psi = {{RatFunc(1), RatFunc(0)}};
    auto coupled = long_exact_sequence(ses, N);
    r.report.merge(coupled.report);
    r.values.emplace_back("coupled H(E), H(F), H(G)", dims_str(coupled.E.cohomology.dims()) + " " + dims_str(coupled.F.cohomology.dims()) + " "
                                                          + dims_str(coupled.G.cohomology.dims()));
    return r;
}

SuiteResult product_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"product", Report("product"), {}};
    FilteredComplex fc = make_filtered_complex(configured_fibration(cfg), cfg.truncation(3));
    r.report.truncation = fc.N;
    r.report.merge(braiding_condition_check(fc));
    std::mt19937 rng(cfg.seed);
    ProductStructure hopf = fibration_product_structure(fc);
    if (cfg.corrupt)
        hopf = corrupt_sigma(std::move(hopf));
    r.report.merge(product_structure_check(hopf, 50, rng));
    r.report.merge(product_structure_check(torus_product_structure(), 50, rng));
    return r;
}

SuiteResult condition_k_suite(const SuiteConfig& cfg)
{
    SuiteResult r{"condition-k", Report("condition K"), {}};
    const int N = cfg.truncation(4);
    r.report.truncation = N;
    auto f4 = fibration_4d();
    const Calculus& c = *f4->x;
    const auto& alg = c.algebra();
    RatFunc first = cfg.corrupt ? RatFunc(-1) * q : RatFunc(-1) * q.inv();
    identity(r, "K form of ab", condition_K_form(c, NcElement::parse(alg, "a*b")), first * c.parse("wm"));
    identity(r, "K form of cb", condition_K_form(c, NcElement::parse(alg, "c*b")), (q.pow(-2) - RatFunc(1)) * c.parse("w1"));
    identity(r, "K form of dc", condition_K_form(c, NcElement::parse(alg, "d*c")), RatFunc(-1) * q.pow(-3) * c.parse("wp"));
    if (N < 4)
        r.report.skip("w1, wp, wm lie in dB.X", "needs coefficient words of length 4, N = " + std::to_string(N));
    else
        r.report.merge(condition_K_check(*f4, N));
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {"presentation", "calculus", "maps", "base", "fibration", "lemma",
                                                   "fibre", "spectral", "connection", "product", "condition-k"};
    return names;
}

std::vector<std::string> expand_suite(const std::string& name)
{
    if (name == "all")
        return suite_names();
    if (name == "fibration-all")
        return {"maps", "base", "fibration"};
    if (name == "spectral-all")
        return {"lemma", "fibre", "spectral"};
    const auto& n = suite_names();
    if (std::find(n.begin(), n.end(), name) == n.end())
        throw std::invalid_argument("unknown suite " + name);
    return {name};
}

std::shared_ptr<const FibrationData> configured_fibration(const SuiteConfig& cfg)
{
    if (cfg.calculus == "3d")
        return fibration_3d();
    if (cfg.calculus == "4d") {
        if (!build_4d_full().report.passed())
            throw std::invalid_argument("the 4d calculus has no derived higher degrees");
        return fibration_4d_full();
    }
    throw std::invalid_argument("unknown calculus " + cfg.calculus);
}

SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg)
{
    if (cfg.N && *cfg.N < 0)
        throw std::invalid_argument("truncation must be non-negative");
    configured_fibration(cfg);
    SuiteResult r;
    if (name == "presentation")
        r = presentation_suite(cfg);
    else if (name == "calculus")
        r = calculus_suite(cfg);
    else if (name == "maps")
        r = maps_suite(cfg);
    else if (name == "base")
        r = base_suite(cfg);
    else if (name == "fibration")
        r = fibration_suite(cfg);
    else if (name == "lemma")
        r = lemma_suite(cfg);
    else if (name == "fibre")
        r = fibre_suite(cfg);
    else if (name == "spectral")
        r = spectral_suite(cfg);
    else if (name == "connection")
        r = connection_suite(cfg);
    else if (name == "product")
        r = product_suite(cfg);
    else if (name == "condition-k")
        r = condition_k_suite(cfg);
    else
        throw std::invalid_argument("unknown suite " + name);
    if (r.report.scalar_mode == "symbolic")
        r.report.scalar_mode = cfg.scalar.str();
    return r;
}

ProductStructure corrupt_sigma(ProductStructure ps)
{
    auto inner = ps.sigma;
    ps.name += " (sigma negated)";
    ps.sigma = [inner](int m, int a, const FormElement& xi) {
        FormVec v = inner(m, a, xi);
        if (xi.degree() > 0)
            for (auto& f : v)
                f = RatFunc(-1) * f;
        return v;
    };
    return ps;
}

}  // namespace ncfib
