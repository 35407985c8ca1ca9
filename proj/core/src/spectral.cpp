#include "ncfib/spectral.hpp"

#include <mutex>
#include <set>
#include <sstream>

namespace ncfib {

namespace {

RatFunc sign(int e) { return e % 2 ? RatFunc(-1) : RatFunc(1); }

/// reusable elimination for repeated solves against one matrix
class Solver {
public:
    Solver() = default;
    explicit Solver(const Matrix<RatFunc>& a) : rows_(a.rows), cols_(a.cols_count)
    {
        for (int j = 0; j < a.cols_count; ++j)
            rs_.insert(a.cols[j] + SparseVec<RatFunc>::unit(a.rows + j));
    }
    std::optional<SparseVec<RatFunc>> solve(const SparseVec<RatFunc>& w) const
    {
        SparseVec<RatFunc> r = rs_.reduce(w);
        if (!r.slice(0, rows_).is_zero())
            return std::nullopt;
        SparseVec<RatFunc> x = r.slice(rows_, rows_ + cols_);
        x.scale(RatFunc(-1));
        return x;
    }

private:
    int rows_ = 0, cols_ = 0;
    RowSpace<RatFunc> rs_;
};

Matrix<RatFunc> columns(int rows, const std::vector<SparseVec<RatFunc>>& a, const std::vector<SparseVec<RatFunc>>& b = {})
{
    Matrix<RatFunc> m(rows, static_cast<int>(a.size() + b.size()));
    std::copy(a.begin(), a.end(), m.cols.begin());
    std::copy(b.begin(), b.end(), m.cols.begin() + static_cast<long>(a.size()));
    return m;
}

std::vector<SparseVec<RatFunc>> greedy_complement(const Subspace<RatFunc>& big, const Subspace<RatFunc>& small)
{
    Subspace<RatFunc> acc = small;
    std::vector<SparseVec<RatFunc>> out;
    for (const auto& v : big.basis())
        if (acc.add(v))
            out.push_back(v);
    return out;
}

std::string block_str(int zdeg, int p, int q) { return "(zdeg " + std::to_string(zdeg) + ", p " + std::to_string(p) + ", q " + std::to_string(q) + ")"; }

int count_words(const AlgebraPresentation& alg, int N, int zdeg)
{
    return N < 0 ? 0 : static_cast<int>(alg.enumerate_basis(N, zdeg).size());
}

}  // namespace

// ---------------------------------------------------------- filtration

const Subspace<RatFunc>& ExteriorFiltration::at(int p, int k) const
{
    p = std::max(p, 0);
    p = std::min(p, pmax + 1);
    return V[p][k];
}

bool ExteriorFiltration::contains(int p, const FormElement& f) const
{
    if (f.is_zero())
        return true;
    const Calculus& c = *fib->x;
    const int k = f.degree();
    if (k > top)
        return true;
    const auto& basis = c.exterior().basis(k);
    std::map<Word, std::map<int, RatFunc>> rows;
    for (const auto& [key, v] : f.terms()) {
        auto it = std::lower_bound(basis.begin(), basis.end(), key.second);
        rows[key.first].emplace(static_cast<int>(it - basis.begin()), v);
    }
    for (const auto& [w, m] : rows)
        if (!at(p, k).contains(SparseVec<RatFunc>::from_map(m)))
            return false;
    return true;
}

FormElement ExteriorFiltration::form(int k, const SparseVec<RatFunc>& v) const
{
    const Calculus& c = *fib->x;
    FormElement f = c.zero(k);
    const auto& basis = c.exterior().basis(k);
    for (const auto& [i, x] : v.entries())
        f.add({Word(), basis[i]}, x);
    return f;
}

int ExteriorFiltration::zdeg(int k, const SparseVec<RatFunc>& v) const
{
    return v.is_zero() ? 0 : fib->x->zdegree(fib->x->exterior().basis(k)[v.lead_index()]);
}

std::string ExteriorFiltration::generator_str(int k, const SparseVec<RatFunc>& v) const
{
    return k == 0 ? std::string("1") : form(k, v).str();
}

ExteriorFiltration make_filtration(std::shared_ptr<const FibrationData> fib)
{
    ExteriorFiltration f;
    f.fib = fib;
    f.report = Report("exterior filtration");
    const Calculus& c = *fib->x;
    f.top = 0;
    while (f.top + 1 <= c.max_degree() && !c.exterior().basis(f.top + 1).empty())
        ++f.top;
    f.pmax = 0;
    while (f.pmax + 1 <= f.top && k_filtration_invariant(*fib, f.pmax + 1, f.pmax + 1).dim() > 0)
        ++f.pmax;
    f.V.assign(f.pmax + 2, {});
    for (int p = 0; p <= f.pmax + 1; ++p)
        for (int k = 0; k <= f.top; ++k) {
            int dim = static_cast<int>(c.exterior().basis(k).size());
            f.V[p].push_back(p <= k ? k_filtration_invariant(*fib, p, k) : Subspace<RatFunc>(dim));
        }
    f.quotient.assign(f.pmax + 1, {});
    for (int m = 0; m <= f.pmax; ++m)
        for (int n = 0; m + n <= f.top; ++n)
            f.quotient[m].push_back(greedy_complement(f.V[m][m + n], f.V[m + 1][m + n]));
    for (int m = 0; m <= f.pmax; ++m)
        f.k_power.push_back(f.V[m][m].basis());

    std::string nested, stable;
    for (int p = 0; p <= f.pmax; ++p)
        for (int k = 0; k <= f.top; ++k) {
            if (!f.V[p][k].contains(f.V[p + 1][k]) && nested.empty())
                nested = "V" + std::to_string(p + 1) + " in degree " + std::to_string(k);
            for (const auto& v : f.V[p][k].basis())
                for (int g = 0; g < c.algebra().generator_count(); ++g) {
                    FormElement moved = c.wedge(f.form(k, v), c.from_algebra(NcElement::generator(c.algebra(), g)));
                    if (!f.contains(p, moved) && stable.empty())
                        stable = f.form(k, v).str() + " * " + c.algebra().generator(g).name;
                }
        }
    f.report.expect(nested.empty(), "V^{p+1} inside V^p", nested);
    f.report.expect(stable.empty(), "X (x) V^p is closed under right multiplication", stable);
    f.report.pass("fibre and base degrees", "top " + std::to_string(f.top) + ", base " + std::to_string(f.pmax));
    return f;
}

XiCoordinates::XiCoordinates(const ExteriorFiltration& f, int m, int n) : filt_(&f), m_(m), n_(n)
{
    const int dim = static_cast<int>(f.fib->x->exterior().basis(m + n).size());
    if (m <= f.pmax && m + n <= f.top)
        gens_ = f.quotient[m][n];
    solver_ = columns(dim, gens_, f.at(m + 1, m + n).basis());
}

std::map<std::pair<Word, int>, RatFunc> XiCoordinates::coords(const FormElement& f) const
{
    std::map<std::pair<Word, int>, RatFunc> out;
    if (f.is_zero())
        return out;
    const Calculus& c = *filt_->fib->x;
    const auto& basis = c.exterior().basis(m_ + n_);
    std::map<Word, std::map<int, RatFunc>> rows;
    for (const auto& [key, v] : f.terms()) {
        auto it = std::lower_bound(basis.begin(), basis.end(), key.second);
        rows[key.first].emplace(static_cast<int>(it - basis.begin()), v);
    }
    for (const auto& [w, m] : rows) {
        auto x = solve(solver_, SparseVec<RatFunc>::from_map(m));
        if (!x)
            throw std::invalid_argument("form " + f.str() + " is not in F^" + std::to_string(m_));
        for (const auto& [i, v] : x->entries())
            if (i < generators())
                out.emplace(std::make_pair(w, i), v);
    }
    return out;
}

// ------------------------------------------------------ filtered complex

FilteredComplex make_filtered_complex(std::shared_ptr<const FibrationData> fib, int N)
{
    FilteredComplex fc;
    fc.fib = fib;
    fc.N = N;
    fc.filt = make_filtration(fib);
    fc.report = Report("filtered complex");
    fc.report.truncation = N;
    fc.report.merge(fc.filt.report);
    const Calculus& c = *fib->x;
    const auto& F = fc.filt;

    std::set<int> zdegs;
    for (int k = 0; k <= F.top; ++k)
        for (const auto& key : c.truncate_component(k, N))
            zdegs.insert(c.algebra().zdegree(key.first) + c.zdegree(key.second));

    std::string d2, law_d, law_nested, law_top;
    for (int z : zdegs) {
        FilteredBlock b;
        b.zdeg = z;
        for (int k = 0; k <= F.top; ++k)
            b.C.emplace_back(c, k, N, z);
        for (int k = 0; k < F.top; ++k) {
            Matrix<RatFunc> m(b.C[k + 1].size(), b.C[k].size());
            for (int j = 0; j < b.C[k].size(); ++j)
                m.cols[j] = b.C[k + 1].coords(c.d(b.C[k].element(SparseVec<RatFunc>::unit(j))));
            b.d.push_back(std::move(m));
        }
        for (int p = 0; p <= F.pmax + 1; ++p) {
            std::vector<Subspace<RatFunc>> row;
            for (int k = 0; k <= F.top; ++k) {
                Subspace<RatFunc> s(b.C[k].size());
                std::set<Word> words;
                for (const auto& key : b.C[k].keys())
                    words.insert(key.first);
                for (const auto& v : F.at(p, k).basis()) {
                    int zv = F.zdeg(k, v);
                    FormElement fv = F.form(k, v);
                    for (const auto& w : words)
                        if (c.algebra().zdegree(w) + zv == z)
                            s.add(b.C[k].coords(c.wedge(c.term(w, FormWord()), fv)));
                }
                row.push_back(std::move(s));
            }
            b.F.push_back(std::move(row));
        }
        for (int k = 0; k + 1 < F.top; ++k)
            if (!compose(b.d[k + 1], b.d[k]).is_zero() && d2.empty())
                d2 = "zdeg " + std::to_string(z) + " degree " + std::to_string(k);
        for (int p = 0; p <= F.pmax + 1; ++p)
            for (int k = 0; k <= F.top; ++k) {
                if (k < F.top && !b.F[p][k + 1].contains(image(b.d[k], b.F[p][k])) && law_d.empty())
                    law_d = block_str(z, p, k - p);
                if (p > 0 && !b.F[p - 1][k].contains(b.F[p][k]) && law_nested.empty())
                    law_nested = block_str(z, p, k - p);
                if (p > k && b.F[p][k].dim() > 0 && law_top.empty())
                    law_top = block_str(z, p, k - p);
                if (p == 0 && b.F[0][k].dim() != b.C[k].size() && law_top.empty())
                    law_top = "F^0 is not everything at " + block_str(z, 0, k);
            }
        fc.blocks.emplace(z, std::move(b));
    }
    fc.report.expect(d2.empty(), "d^2 = 0 on the truncated total complex", d2);
    fc.report.expect(law_d.empty(), "d F^p inside F^p", law_d);
    fc.report.expect(law_nested.empty(), "F^{p+1} inside F^p", law_nested);
    fc.report.expect(law_top.empty(), "F^0 = C and F^p C^k = 0 for p > k", law_top);

    std::string density;
    auto mc = maurer_cartan(c);
    for (int s = 0; s < c.symbol_count(); ++s) {
        FormElement sum = c.zero(1);
        for (const auto& [w, v] : mc.expression[s])
            sum += v * varpi(c, w);
        if (sum != c.symbol_form(s) && density.empty())
            density = c.symbol(s).name;
    }
    fc.report.expect(density.empty(), "every invariant 1-form lies in X.dX", density);
    return fc;
}

// ------------------------------------------------------------------- Xi

namespace {

/// Xi_m^* on one block: quotient representatives and the induced differential
struct QuotientComplex {
    std::vector<std::vector<SparseVec<RatFunc>>> reps;  // in C^{m+n} coordinates
    std::vector<Solver> solvers;
    CochainComplex cx;
};

QuotientComplex quotient_complex(const FilteredBlock& b, int m, int top)
{
    QuotientComplex qc;
    for (int n = 0; m + n <= top; ++n) {
        const int k = m + n;
        qc.reps.push_back(greedy_complement(b.F[m][k], b.F[m + 1][k]));
        qc.solvers.emplace_back(columns(b.C[k].size(), qc.reps.back(), b.F[m + 1][k].basis()));
        qc.cx.dims.push_back(static_cast<int>(qc.reps.back().size()));
    }
    for (int n = 0; n + 1 < static_cast<int>(qc.reps.size()); ++n) {
        Matrix<RatFunc> mat(qc.cx.dims[n + 1], qc.cx.dims[n]);
        for (int j = 0; j < qc.cx.dims[n]; ++j) {
            auto x = qc.solvers[n + 1].solve(b.d[m + n].apply(qc.reps[n][j]));
            if (!x)
                throw std::logic_error("quotient differential leaves F^m");
            mat.cols[j] = x->slice(0, qc.cx.dims[n + 1]);
        }
        qc.cx.d.push_back(std::move(mat));
    }
    return qc;
}

}  // namespace

std::vector<XiTableEntry> xi_table(const FilteredComplex& fc)
{
    std::vector<XiTableEntry> out;
    const auto& F = fc.filt;
    for (int m = 0; m <= F.pmax; ++m)
        for (int n = 0; m + n <= F.top; ++n) {
            XiTableEntry e;
            e.m = m;
            e.n = n;
            for (const auto& v : F.quotient[m][n])
                e.generators.push_back(F.generator_str(m + n, v));
            for (const auto& [z, b] : fc.blocks) {
                int dim = b.F[m][m + n].dim() - b.F[m + 1][m + n].dim();
                if (dim)
                    e.dims[z] = dim;
            }
            out.push_back(std::move(e));
        }
    return out;
}

Report xi_check(const FilteredComplex& fc)
{
    Report rep("Xi complexes");
    rep.truncation = fc.N;
    const auto& F = fc.filt;
    const auto& alg = fc.fib->x->algebra();
    std::string count, welldef;
    for (int m = 0; m <= F.pmax; ++m)
        for (int n = 0; m + n <= F.top; ++n)
            for (const auto& [z, b] : fc.blocks) {
                int dim = b.F[m][m + n].dim() - b.F[m + 1][m + n].dim();
                int predicted = 0;
                for (const auto& v : F.quotient[m][n])
                    predicted += count_words(alg, fc.N, z - F.zdeg(m + n, v));
                if (dim != predicted && count.empty())
                    count = block_str(z, m, n) + ": " + std::to_string(dim) + " vs " + std::to_string(predicted);
                if (m + n < F.top && !b.F[m + 1][m + n + 1].contains(image(b.d[m + n], b.F[m + 1][m + n])) && welldef.empty())
                    welldef = block_str(z, m, n);
            }
    rep.expect(count.empty(), "quotient dimensions equal X-rank times word counts", count);
    rep.expect(welldef.empty(), "quotient differential is well defined", welldef);
    return rep;
}

// ---------------------------------------------------------------- Theta

ThetaMap::ThetaMap(const ExteriorFiltration& f, int m, int n) : filt_(&f), m_(m), n_(n), xi_(f, m, n)
{
    if (n <= f.top)
        w_ = f.quotient[0][n];
}

FormElement ThetaMap::lift(const DomainKey& k) const
{
    const Calculus& c = *filt_->fib->x;
    return c.wedge(c.wedge(filt_->form(m_, filt_->k_power[m_][k.kappa]), c.term(k.y, FormWord())), filt_->form(n_, w_[k.w]));
}

FormElement ThetaMap::lift(const Domain& x) const
{
    FormElement f = filt_->fib->x->zero(m_ + n_);
    for (const auto& [k, v] : x)
        f += v * lift(k);
    return f;
}

ThetaMap::Block ThetaMap::block(int zdeg, int L) const
{
    Block b;
    const auto& alg = filt_->fib->x->algebra();
    const auto& gens = filt_->quotient.size() > static_cast<std::size_t>(m_) && static_cast<int>(filt_->quotient[m_].size()) > n_
                           ? filt_->quotient[m_][n_]
                           : std::vector<SparseVec<RatFunc>>{};
    for (int j = 0; j < static_cast<int>(gens.size()); ++j)
        for (const auto& w : alg.enumerate_basis(L, zdeg - filt_->zdeg(m_ + n_, gens[j])))
            b.target.id({w, j});
    for (int i = 0; i < static_cast<int>(filt_->k_power[m_].size()); ++i)
        for (int j = 0; j < static_cast<int>(w_.size()); ++j) {
            int zw = filt_->zdeg(m_, filt_->k_power[m_][i]) + filt_->zdeg(n_, w_[j]);
            for (const auto& y : alg.enumerate_basis(L, zdeg - zw))
                b.domain.push_back({i, y, j});
        }
    std::vector<SparseVec<RatFunc>> cols;
    for (const auto& k : b.domain) {
        std::map<int, RatFunc> col;
        for (const auto& [key, v] : xi_.coords(lift(k)))
            col.emplace(b.target.id(key), v);
        cols.push_back(SparseVec<RatFunc>::from_map(col));
    }
    b.matrix = columns(b.target.size(), cols);
    return b;
}

std::optional<ThetaMap::Domain> ThetaMap::solve(const FormElement& f) const
{
    Domain out;
    if (f.is_zero())
        return out;
    auto z = f.zdegree();
    if (!z)
        throw std::invalid_argument("Theta inverse needs a homogeneous form: " + f.str());
    auto coords = xi_.coords(f);
    if (coords.empty())
        return out;
    Block b = block(*z, f.max_word_length());
    std::map<int, RatFunc> target;
    for (const auto& [key, v] : coords) {
        auto idx = b.target.find(key);
        if (!idx)
            return std::nullopt;
        target.emplace(*idx, v);
    }
    auto x = ncfib::solve(b.matrix, SparseVec<RatFunc>::from_map(target));
    if (!x)
        return std::nullopt;
    for (const auto& [i, v] : x->entries())
        out.emplace(b.domain[i], v);
    return out;
}

Report fibration_test(const FilteredComplex& fc)
{
    Report rep("differential fibration");
    rep.truncation = fc.N;
    const auto& F = fc.filt;
    const Calculus& c = *fc.fib->x;
    std::string square, singular, identity, predim;
    int blocks = 0;
    for (int m = 0; m <= F.pmax; ++m)
        for (int n = 0; m + n <= F.top; ++n) {
            ThetaMap theta(F, m, n);
            for (const auto& [z, b] : fc.blocks) {
                auto tb = theta.block(z, fc.N);
                int xi_dim = b.F[m][m + n].dim() - b.F[m + 1][m + n].dim();
                ++blocks;
                if (static_cast<int>(tb.domain.size()) != xi_dim && predim.empty())
                    predim = block_str(z, m, n) + ": " + std::to_string(tb.domain.size()) + " vs " + std::to_string(xi_dim);
                if (tb.matrix.rows != tb.matrix.cols_count && square.empty())
                    square = block_str(z, m, n);
                else if (rank(tb.matrix) != tb.matrix.cols_count && singular.empty())
                    singular = block_str(z, m, n);
                if (m == 0)
                    for (int j = 0; j < tb.matrix.cols_count; ++j) {
                        const auto& col = tb.matrix.cols[j];
                        bool unit = col.size() == 1 && col.lead() == RatFunc(1)
                                    && tb.target.keys()[col.lead_index()].first == tb.domain[j].y;
                        if (!unit && identity.empty())
                            identity = block_str(z, 0, n);
                    }
            }
        }
    rep.expect(predim.empty(), "dim K^m (x) X (x) W^n = dim Xi_m^n per block", predim);
    rep.expect(square.empty() && singular.empty(), "Theta_m invertible on " + std::to_string(blocks) + " blocks",
               square.empty() ? singular : square + " not square");
    rep.expect(identity.empty(), "Theta_0 is the identity", identity);

    // cochain map: d(b ^ xi) - (-1)^m b ^ d xi lies in F^{m+1}
    std::string chain;
    auto bit = fc.blocks.find(0);
    int samples = 0;
    if (bit != fc.blocks.end()) {
        const auto& b0 = bit->second;
        const auto short_words = c.algebra().enumerate_basis(1);
        for (int m = 1; m <= F.pmax; ++m)
            for (const auto& bv : b0.F[m][m].basis()) {
                FormElement base = b0.C[m].element(bv);
                if (base.max_word_length() > 2)
                    continue;
                for (int n = 0; m + n < F.top; ++n)
                    for (const auto& fw : c.exterior().basis(n))
                        for (const auto& w : short_words) {
                            FormElement xi = c.term(w, fw);
                            FormElement diff = c.d(c.wedge(base, xi)) - sign(m) * c.wedge(base, c.d(xi));
                            ++samples;
                            if (!F.contains(m + 1, diff) && chain.empty())
                                chain = base.str() + " with " + xi.str();
                        }
            }
    }
    rep.expect(chain.empty(), "Theta_m is a cochain map (" + std::to_string(samples) + " samples)", chain);
    return rep;
}

// ------------------------------------------------------ fibre cohomology

Report lemma_check(const ExteriorFiltration& f, int N, QBase base)
{
    Report rep("fibre differential on degree zero");
    rep.truncation = N;
    const Calculus& c = *f.fib->x;
    const auto& alg = c.algebra();
    if (f.quotient.empty() || f.quotient[0].size() < 2 || f.quotient[0][1].size() != 1) {
        rep.fail("one fibre 1-form generator", "Xi_0^1 is not of rank one");
        return rep;
    }
    XiCoordinates xi(f, 0, 1);
    auto a = alg.find_generator("a");
    RatFunc mu = xi.coords(c.d(c.from_algebra(NcElement::generator(alg, *a))))[{Word(1, static_cast<char>(*a)), 0}];
    std::string witness;
    int words = 0;
    for (const auto& w : alg.enumerate_basis(N)) {
        ++words;
        auto got = xi.coords(c.d(c.term(w, FormWord())));
        std::map<std::pair<Word, int>, RatFunc> want;
        RatFunc coeff = q_integer(alg.zdegree(w), base) * mu;
        if (!coeff.is_zero())
            want.emplace(std::make_pair(w, 0), coeff);
        if (got != want && witness.empty())
            witness = alg.word_str(w);
    }
    rep.pass("normalisation at a", mu.str());
    rep.expect(witness.empty(), std::string(base == QBase::Q ? "d x = [deg x; q]" : base == QBase::QSquared ? "d x = [deg x; q^2]" : "d x = [deg x; q^-2]") + " mu x w mod F^1 on " + std::to_string(words) + " words", witness);
    return rep;
}

FibreCohomology fibre_cohomology(const FilteredComplex& fc)
{
    FibreCohomology out;
    out.report = Report("fibre cohomology");
    out.report.truncation = fc.N;
    const auto& F = fc.filt;
    const Calculus& c = *fc.fib->x;
    const auto& alg = c.algebra();
    const int fibre_top = static_cast<int>(F.quotient[0].size()) - 1;

    // generators 1 and the fibre forms
    for (int n = 0; n <= fibre_top; ++n)
        for (const auto& v : F.quotient[0][n])
            if (n <= 1)
                out.generators.push_back(n == 0 ? c.one() : F.form(n, v));
    std::string shape, spans;
    const int base_words = count_words(alg, fc.N, 0);
    for (const auto& [z, b] : fc.blocks) {
        auto qc = quotient_complex(b, 0, F.top);
        Cohomology h(qc.cx);
        for (int n = 0; n < h.degrees(); ++n) {
            out.dims[{n, z}] = h.dim(n);
            int expected = 0;
            if (n < static_cast<int>(out.generators.size()) && z == *out.generators[n].zdegree())
                expected = base_words;
            if (h.dim(n) != expected && shape.empty())
                shape = "H^" + std::to_string(n) + " at zdeg " + std::to_string(z) + ": " + std::to_string(h.dim(n));
        }
        // b.g_n for b in B span H^n
        for (int n = 0; n < static_cast<int>(out.generators.size()) && n < h.degrees(); ++n) {
            if (z != *out.generators[n].zdegree())
                continue;
            Subspace<RatFunc> classes(h.dim(n));
            for (const auto& w : alg.enumerate_basis(fc.N, 0)) {
                FormElement bg = c.wedge(c.term(w, FormWord()), out.generators[n]);
                auto x = qc.solvers[n].solve(b.C[n].coords(bg));
                classes.add(h.class_of(n, x->slice(0, qc.cx.dims[n])));
            }
            if (classes.dim() != h.dim(n) && spans.empty())
                spans = "H^" + std::to_string(n);
        }
    }
    out.report.expect(shape.empty(), "H^0 = B, H^1 = B.w, higher groups zero", shape);
    out.report.expect(spans.empty(), "B times the generators spans each group", spans);

    std::string nabla, curv;
    if (F.pmax >= 1) {
        ThetaMap theta1(F, 1, 0), theta1b(F, 1, 1);
        for (std::size_t n = 0; n < out.generators.size(); ++n) {
            const ThetaMap& t = n == 0 ? theta1 : theta1b;
            FormElement dg = c.d(out.generators[n]);
            auto x = t.solve(dg);
            if (!x) {
                nabla = "Theta_1 cannot invert [d g" + std::to_string(n) + "]";
                out.nabla.emplace_back();
                continue;
            }
            out.nabla.push_back(*x);
            if (!x->empty() && nabla.empty())
                nabla = "nabla g" + std::to_string(n) + " = " + t.lift(*x).str();
            if (F.pmax >= 2) {
                ThetaMap theta2(F, 2, static_cast<int>(n));
                auto r = theta2.solve(c.d(t.lift(*x)));
                out.curvature.push_back(r ? *r : ThetaMap::Domain{});
                if ((!r || !r->empty()) && curv.empty())
                    curv = "g" + std::to_string(n);
            }
        }
    }
    out.report.expect(nabla.empty(), "nabla 1 = 0 and nabla w = 0", nabla);
    out.report.expect(curv.empty(), "curvature via Theta_2 vanishes", curv);
    return out;
}

// -------------------------------------------------------- spectral pages

namespace {

struct PageCell {
    Subspace<RatFunc> Z, den;
    std::vector<SparseVec<RatFunc>> reps;
    Solver solver;
};

}  // namespace

SpectralSequence spectral_sequence(const FilteredComplex& fc, int r_max)
{
    SpectralSequence ss;
    ss.report = Report("spectral sequence");
    ss.report.truncation = fc.N;
    const auto& F = fc.filt;
    const int top = F.top, pmax = F.pmax;
    std::string dd, homology, containment, bound, e1, e2zero, e2rows, d1, conv, base_err;

    std::vector<SpectralPage> pages(r_max + 1);
    for (int r = 0; r <= r_max; ++r)
        pages[r].r = r;

    for (const auto& [z, b] : fc.blocks) {
        auto Fs = [&](int p, int k) -> Subspace<RatFunc> {
            if (k < 0 || k > top)
                return Subspace<RatFunc>(0);
            return b.F[std::clamp(p, 0, pmax + 1)][k];
        };
        // Z_{r-1} per (p, k), starting from Z_{-1} = F^p
        std::map<std::pair<int, int>, Subspace<RatFunc>> prevZ;
        for (int p = -r_max - 1; p <= pmax + r_max + 1; ++p)
            for (int k = 0; k <= top; ++k)
                prevZ[{p, k}] = Fs(p, k);
        auto Zget = [&](const std::map<std::pair<int, int>, Subspace<RatFunc>>& m, int p, int k) {
            auto it = m.find({p, k});
            return it == m.end() ? Fs(p, k) : it->second;
        };
        std::map<std::pair<int, int>, int> next_dims;
        for (int r = 0; r <= r_max; ++r) {
            std::map<std::pair<int, int>, Subspace<RatFunc>> Z;
            for (const auto& [key, unused] : prevZ) {
                auto [p, k] = key;
                Subspace<RatFunc> s = Fs(p, k);
                if (k < top)
                    s = s.intersect(preimage(b.d[k], Fs(p + r, k + 1)));
                Z[key] = s;
            }
            std::map<std::pair<int, int>, PageCell> cells;
            for (int p = 0; p <= pmax; ++p)
                for (int k = p; k <= top; ++k) {
                    PageCell cell;
                    cell.Z = Z[{p, k}];
                    cell.den = Zget(prevZ, p + 1, k);
                    if (k > 0)
                        cell.den = cell.den.sum(image(b.d[k - 1], Zget(prevZ, p - r + 1, k - 1)));
                    if (!cell.Z.contains(cell.den) && containment.empty())
                        containment = block_str(z, p, k - p) + " page " + std::to_string(r);
                    cell.reps = greedy_complement(cell.Z, cell.den);
                    cell.solver = Solver(columns(b.C[k].size(), cell.reps, cell.den.basis()));
                    cells.emplace(std::make_pair(p, k), std::move(cell));
                }
            // d_r
            std::map<std::pair<int, int>, Matrix<RatFunc>> dr;
            for (auto& [key, cell] : cells) {
                auto [p, k] = key;
                auto tgt = cells.find({p + r, k + 1});
                int rows = tgt == cells.end() ? 0 : static_cast<int>(tgt->second.reps.size());
                Matrix<RatFunc> m(rows, static_cast<int>(cell.reps.size()));
                for (int j = 0; j < m.cols_count && k < top; ++j) {
                    SparseVec<RatFunc> y = b.d[k].apply(cell.reps[j]);
                    if (tgt == cells.end()) {
                        if (!Fs(p + r, k + 1).contains(y) || Fs(p + r, k + 1).dim() > 0)
                            if (!y.is_zero() && !Fs(pmax + 1, k + 1).contains(y) && bound.empty())
                                bound = block_str(z, p, k - p) + " page " + std::to_string(r);
                        continue;
                    }
                    auto x = tgt->second.solver.solve(y);
                    if (!x) {
                        if (homology.empty())
                            homology = "d_r leaves Z_r at " + block_str(z, p, k - p);
                        continue;
                    }
                    m.cols[j] = x->slice(0, rows);
                }
                dr.emplace(key, std::move(m));
            }
            for (const auto& [key, m] : dr) {
                auto [p, k] = key;
                auto nxt = dr.find({p + r, k + 1});
                if (nxt != dr.end() && m.rows > 0 && !compose(nxt->second, m).is_zero() && dd.empty())
                    dd = block_str(z, p, k - p) + " page " + std::to_string(r);
                if (r > 0 && next_dims.count(key) && next_dims[key] != static_cast<int>(cells[key].reps.size()) && homology.empty())
                    homology = "E_" + std::to_string(r) + " " + block_str(z, p, k - p) + " is not the homology of the previous page";
                if (r > pmax && !m.is_zero() && bound.empty())
                    bound = "d_" + std::to_string(r) + " nonzero at " + block_str(z, p, k - p);
            }
            next_dims.clear();
            for (const auto& [key, m] : dr) {
                auto [p, k] = key;
                int ker = m.cols_count - rank(m);
                int in = 0;
                auto src = dr.find({p - r, k - 1});
                if (src != dr.end())
                    in = rank(src->second);
                next_dims[key] = ker - in;
            }
            for (const auto& [key, cell] : cells) {
                auto [p, k] = key;
                pages[r].dims[{z, p, k - p}] = static_cast<int>(cell.reps.size());
                if (!dr.at(key).is_zero())
                    pages[r].d[{z, p, k - p}] = dr.at(key);
            }
            prevZ = std::move(Z);
        }

        // E_1 against the cohomology of the Xi complexes, d_1 against lifted representatives
        if (r_max >= 1) {
            std::vector<QuotientComplex> qcs;
            std::vector<Cohomology> hs;
            for (int p = 0; p <= pmax; ++p) {
                qcs.push_back(quotient_complex(b, p, top));
                hs.emplace_back(qcs.back().cx);
            }
            for (int p = 0; p <= pmax; ++p)
                for (int qd = 0; p + qd <= top; ++qd) {
                    if (hs[p].dim(qd) != pages[1].dims[{z, p, qd}] && e1.empty())
                        e1 = block_str(z, p, qd);
                    if (p + 1 > pmax || p + 1 + qd > top)
                        continue;
                    Matrix<RatFunc> m(hs[p + 1].dim(qd), hs[p].dim(qd));
                    for (int j = 0; j < hs[p].dim(qd); ++j) {
                        SparseVec<RatFunc> lift;
                        for (const auto& [i, v] : hs[p].representatives(qd)[j].entries())
                            lift.add_scaled(qcs[p].reps[qd][i], v);
                        auto x = qcs[p + 1].solvers[qd].solve(b.d[p + qd].apply(lift));
                        m.cols[j] = hs[p + 1].class_of(qd, x->slice(0, qcs[p + 1].cx.dims[qd]));
                    }
                    auto it = pages[1].d.find({z, p, qd});
                    int page_rank = it == pages[1].d.end() ? 0 : rank(it->second);
                    if (rank(m) != page_rank && d1.empty())
                        d1 = block_str(z, p, qd);
                }
        }

        // convergence
        CochainComplex total;
        for (int k = 0; k <= top; ++k)
            total.dims.push_back(b.C[k].size());
        total.d = b.d;
        Cohomology H(total);
        for (int k = 0; k <= top + 1; ++k) {
            int hk = k <= top ? H.dim(k) : 0;
            ss.total[{z, k}] = hk;
            int sum = 0;
            for (int p = 0; p <= pmax; ++p)
                if (k - p >= 0) {
                    auto it = pages[r_max].dims.find({z, p, k - p});
                    sum += it == pages[r_max].dims.end() ? 0 : it->second;
                }
            if (sum != hk && conv.empty())
                conv = "total degree " + std::to_string(k) + " at zdeg " + std::to_string(z) + ": " + std::to_string(sum) + " vs " + std::to_string(hk);
        }
    }

    // E_2 against the de Rham complex of the base
    if (r_max >= 2) {
        auto it = fc.blocks.find(0);
        if (it != fc.blocks.end()) {
            const auto& b = it->second;
            CochainComplex base;
            std::vector<Solver> solvers;
            for (int p = 0; p <= pmax; ++p) {
                base.dims.push_back(b.F[p][p].dim());
                solvers.emplace_back(columns(b.C[p].size(), b.F[p][p].basis()));
            }
            for (int p = 0; p < pmax && base_err.empty(); ++p) {
                Matrix<RatFunc> m(base.dims[p + 1], base.dims[p]);
                for (int j = 0; j < base.dims[p] && base_err.empty(); ++j) {
                    auto x = solvers[p + 1].solve(b.d[p].apply(b.F[p][p].basis()[j]));
                    if (!x)
                        base_err = "degree " + std::to_string(p) + " basis form " + std::to_string(j);
                    else
                        m.cols[j] = *x;
                }
                base.d.push_back(std::move(m));
            }
            if (base_err.empty())
                ss.base_cohomology = Cohomology(base).dims();
            else
                ss.base_cohomology.assign(pmax + 1, -1);
        }
        const int fibre_rows = static_cast<int>(F.quotient[0].size());
        for (const auto& [key, dim] : pages[2].dims) {
            auto [z, p, qd] = key;
            bool fibre_row = qd < fibre_rows && !F.quotient[0][qd].empty();
            if (!fibre_row && dim != 0 && e2zero.empty())
                e2zero = block_str(z, p, qd);
            if (fibre_row && qd > 0) {
                auto other = pages[2].dims.find({z, p, 0});
                int o = other == pages[2].dims.end() ? 0 : other->second;
                if (o != dim && e2rows.empty())
                    e2rows = block_str(z, p, qd);
            }
            if (fibre_row && (z == 0 ? dim != ss.base_cohomology[p] : dim != 0) && e2rows.empty())
                e2rows = block_str(z, p, qd) + " against the base complex";
        }
    }
    ss.report.expect(containment.empty(), "boundaries inside cycles on every page", containment);
    ss.report.expect(dd.empty(), "d_r d_r = 0", dd);
    ss.report.expect(homology.empty(), "E_{r+1} is the homology of (E_r, d_r)", homology);
    ss.report.expect(bound.empty(), "d_r = 0 for r > " + std::to_string(pmax), bound);
    if (r_max >= 1) {
        ss.report.expect(e1.empty(), "E_1 = H(Xi_p) per block", e1);
        ss.report.expect(d1.empty(), "d_1 equals d on lifted representatives", d1);
    }
    if (r_max >= 2) {
        ss.report.expect(base_err.empty(), "d keeps the base forms", base_err);
        ss.report.expect(e2zero.empty(), "E_2 vanishes outside the fibre rows", e2zero);
        ss.report.expect(e2rows.empty(), "E_2 rows equal the base de Rham cohomology", e2rows);
    }
    ss.report.expect(conv.empty(), "sum of E_infinity equals H of the total complex", conv);
    ss.pages = std::move(pages);
    return ss;
}

// --------------------------------------------------------------- products

Report braiding_condition_check(const FilteredComplex& fc)
{
    Report rep("differential braiding condition");
    rep.truncation = fc.N;
    const auto& F = fc.filt;
    const Calculus& c = *fc.fib->x;
    std::string witness;
    int samples = 0;
    auto it = fc.blocks.find(0);
    if (it != fc.blocks.end())
        for (int m = 1; m <= F.pmax; ++m)
            for (const auto& bv : it->second.F[m][m].basis()) {
                FormElement base = it->second.C[m].element(bv);
                for (int n = 1; n + m <= F.top; ++n)
                    for (const auto& fw : c.exterior().basis(n)) {
                        FormElement prod = c.wedge(c.term(Word(), fw), base);
                        ++samples;
                        if (!F.contains(m, prod) && witness.empty())
                            witness = c.form_word_str(fw) + " ^ " + base.str();
                    }
            }
    rep.expect(witness.empty(), "Omega^n X ^ Omega^m B inside Omega^m B ^ Omega^n X (" + std::to_string(samples) + " products)", witness);
    return rep;
}

std::optional<ThetaMap::Domain> sigma_hat(const ThetaMap& theta, const FormElement& xi, const FormElement& omega)
{
    const Calculus& c = *xi.calculus();
    return theta.solve(sign(theta.n() * theta.m()) * c.wedge(xi, omega));
}

namespace {

struct HopfProductData {
    ExteriorFiltration filt;
    std::vector<std::unique_ptr<ThetaMap>> theta;  // Theta_m for the fibre degree one
    FormElement fibre;
    std::vector<std::vector<FormElement>> base;  // base forms per degree
    std::mutex mu;
};

}  // namespace

ProductStructure fibration_product_structure(const FilteredComplex& fc)
{
    auto data = std::make_shared<HopfProductData>();
    data->filt = fc.filt;
    const auto& F = data->filt;
    const CalculusPtr calc = fc.fib->x;
    const Calculus& c = *calc;
    if (F.quotient[0].size() < 2 || F.quotient[0][1].size() != 1)
        throw std::invalid_argument("fibre is not generated by one 1-form");
    data->fibre = F.form(1, F.quotient[0][1][0]);
    if (data->fibre.zdegree() != 0)
        throw std::invalid_argument("fibre generator is not coinvariant");
    for (int m = 0; m <= F.pmax; ++m)
        data->theta.push_back(std::make_unique<ThetaMap>(F, m, 1));
    auto it = fc.blocks.find(0);
    if (it == fc.blocks.end())
        throw std::invalid_argument("empty base");
    const int Ns = std::min(fc.N, 2);
    for (int p = 0; p <= F.pmax; ++p) {
        std::vector<FormElement> forms;
        for (const auto& v : it->second.F[p][p].basis()) {
            FormElement f = it->second.C[p].element(v);
            if (f.max_word_length() <= Ns)
                forms.push_back(f);
        }
        data->base.push_back(std::move(forms));
    }

    ProductStructure ps;
    ps.name = "fibration " + c.name();
    ps.calc = calc;
    ps.modules = {ConnectionData::trivial(calc, 1), ConnectionData::trivial(calc, 1)};
    ps.max_form_degree = F.pmax;
    auto twist = [data, calc](const FormElement& xi) {
        // sigma-hat([w]_0 (x) xi) = beta (x) [w]_0, beta returned
        const int p = xi.degree();
        if (xi.is_zero() || p > data->filt.pmax)
            return calc->zero(p);
        std::optional<ThetaMap::Domain> x;
        {
            std::lock_guard<std::mutex> lock(data->mu);
            x = sigma_hat(*data->theta[p], data->fibre, xi);
        }
        if (!x)
            throw std::logic_error("sigma-hat congruence has no solution for " + xi.str());
        FormElement beta = calc->zero(p);
        for (const auto& [k, v] : *x) {
            const Calculus& cc = *calc;
            beta += v * cc.wedge(data->filt.form(p, data->filt.k_power[p][k.kappa]), cc.term(k.y, FormWord()));
        }
        return beta;
    };
    ps.right_action = [calc, twist](int m, int, const NcElement& x) {
        FormElement f = calc->from_algebra(x);
        return FormVec{m == 0 ? f : twist(f)};
    };
    ps.sigma = [twist](int m, int, const FormElement& xi) { return FormVec{m == 0 ? xi : twist(xi)}; };
    ps.product = [calc](int m, int, int m2, int) { return m + m2 <= 1 ? FormVec{calc->one()} : FormVec{}; };
    ps.sample_form = [data, calc](int degree, std::mt19937& rng) {
        const auto& pool = data->base[degree];
        FormElement f = calc->zero(degree);
        if (pool.empty())
            return f;
        int terms = 1 + static_cast<int>(rng() % 2);
        for (int t = 0; t < terms; ++t)
            f += RatFunc(1 + static_cast<long>(rng() % 3)) * pool[rng() % pool.size()];
        return f;
    };
    ps.sample_algebra = [data, calc](std::mt19937& rng) {
        const auto& pool = data->base[0];
        const auto& f = pool[rng() % pool.size()];
        NcElement x(calc->algebra());
        for (const auto& [k, v] : f.terms())
            x += NcElement::word(calc->algebra(), k.first, v);
        return x;
    };
    return ps;
}

}  // namespace ncfib
