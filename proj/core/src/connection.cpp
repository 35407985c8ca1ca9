#include "ncfib/connection.hpp"

#include <algorithm>
#include <sstream>

namespace ncfib {

namespace {

RatFunc sign(int e) { return e % 2 ? RatFunc(-1) : RatFunc(1); }

int vec_degree(const FormVec& v) { return v.empty() ? 0 : v[0].degree(); }

RatFunc small_coefficient(std::mt19937& rng)
{
    static const RatFunc q = RatFunc::q();
    long n = static_cast<long>(rng() % 5) - 2;
    if (n == 0)
        n = 1;
    return RatFunc(n) * q.pow(static_cast<int>(rng() % 3) - 1);
}

FormElement random_form(const Calculus& c, int degree, int max_len, std::mt19937& rng)
{
    const auto& fw = c.exterior().basis(degree);
    FormElement e = c.zero(degree);
    if (fw.empty())
        return e;
    auto words = c.algebra().enumerate_basis(max_len);
    int terms = 1 + static_cast<int>(rng() % 2);
    for (int t = 0; t < terms; ++t)
        e += small_coefficient(rng) * c.term(words[rng() % words.size()], fw[rng() % fw.size()]);
    return e;
}

std::vector<std::vector<RatFunc>> scalar_inverse(const std::vector<std::vector<RatFunc>>& g)
{
    const int n = static_cast<int>(g.size());
    Matrix<RatFunc> m(n, n);
    for (int j = 0; j < n; ++j) {
        std::map<int, RatFunc> col;
        for (int i = 0; i < n; ++i)
            if (!g[i][j].is_zero())
                col.emplace(i, g[i][j]);
        m.cols[j] = SparseVec<RatFunc>::from_map(col);
    }
    std::vector<std::vector<RatFunc>> inv(n, std::vector<RatFunc>(n));
    for (int j = 0; j < n; ++j) {
        auto x = solve(m, SparseVec<RatFunc>::unit(j));
        if (!x)
            throw std::invalid_argument("gauge matrix is not invertible");
        for (const auto& [i, c] : x->entries())
            inv[i][j] = c;
    }
    return inv;
}

Matrix<RatFunc> block_scalar(const std::vector<std::vector<RatFunc>>& phi, int forms)
{
    const int rows = static_cast<int>(phi.size());
    const int cols = rows ? static_cast<int>(phi[0].size()) : 0;
    Matrix<RatFunc> m(rows * forms, cols * forms);
    for (int j = 0; j < cols; ++j)
        for (int k = 0; k < forms; ++k) {
            std::map<int, RatFunc> col;
            for (int l = 0; l < rows; ++l)
                if (!phi[l][j].is_zero())
                    col.emplace(l * forms + k, phi[l][j]);
            m.cols[j * forms + k] = SparseVec<RatFunc>::from_map(col);
        }
    return m;
}

}  // namespace

// ------------------------------------------------------------- FormVec

FormVec zero_vec(const Calculus& c, int rank, int degree) { return FormVec(rank, c.zero(degree)); }

bool vec_is_zero(const FormVec& v)
{
    return std::all_of(v.begin(), v.end(), [](const FormElement& f) { return f.is_zero(); });
}

bool vec_equal(const FormVec& a, const FormVec& b)
{
    if (a.empty() || b.empty())
        return vec_is_zero(a) && vec_is_zero(b);
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i])
            return false;
    return true;
}

FormVec vec_add(FormVec a, const FormVec& b, const RatFunc& scale)
{
    if (a.empty())
        a = FormVec(b.size(), b.empty() ? FormElement() : b[0].calculus()->zero(vec_degree(b)));
    for (std::size_t i = 0; i < b.size(); ++i)
        a[i] += scale * b[i];
    return a;
}

std::string vec_str(const FormVec& v, const std::string& gen)
{
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero())
            continue;
        os << (first ? "" : " + ") << "(" << v[i].str() << ")" << gen << i;
        first = false;
    }
    return first ? "0" : os.str();
}

FormVec wedge_left(const Calculus& c, const FormElement& w, const FormVec& v)
{
    FormVec out;
    out.reserve(v.size());
    for (const auto& f : v)
        out.push_back(c.wedge(w, f));
    return out;
}

// ------------------------------------------------------ ConnectionData

ConnectionData ConnectionData::trivial(CalculusPtr c, int rank)
{
    ConnectionData out;
    out.rank = rank;
    out.A.assign(rank, std::vector<FormElement>(rank, c->zero(1)));
    out.calc = std::move(c);
    return out;
}

ConnectionData ConnectionData::parse(CalculusPtr c, const std::vector<std::vector<std::string>>& entries)
{
    ConnectionData out = trivial(c, static_cast<int>(entries.size()));
    for (int i = 0; i < out.rank; ++i) {
        if (static_cast<int>(entries[i].size()) != out.rank)
            throw std::invalid_argument("connection matrix must be square");
        for (int j = 0; j < out.rank; ++j) {
            FormElement f = c->parse(entries[i][j]);
            if (!f.is_zero() && f.degree() != 1)
                throw std::invalid_argument("connection entries must be 1-forms: " + entries[i][j]);
            out.A[i][j] = f.is_zero() ? c->zero(1) : f;
        }
    }
    return out;
}

FormVec ConnectionData::nabla(const FormVec& v) const
{
    const Calculus& c = *calc;
    const int n = vec_degree(v);
    FormVec out = zero_vec(c, rank, n + 1);
    for (int i = 0; i < rank; ++i) {
        out[i] += c.d(v[i]);
        for (int j = 0; j < rank; ++j)
            if (!v[j].is_zero() && !A[i][j].is_zero())
                out[i] += sign(n) * c.wedge(v[j], A[i][j]);
    }
    return out;
}

std::vector<std::vector<FormElement>> ConnectionData::curvature() const
{
    const Calculus& c = *calc;
    std::vector<std::vector<FormElement>> r(rank, std::vector<FormElement>(rank, c.zero(2)));
    for (int k = 0; k < rank; ++k)
        for (int j = 0; j < rank; ++j) {
            r[k][j] += c.d(A[k][j]);
            for (int i = 0; i < rank; ++i)
                if (!A[i][j].is_zero() && !A[k][i].is_zero())
                    r[k][j] -= c.wedge(A[i][j], A[k][i]);
        }
    return r;
}

bool ConnectionData::is_flat() const
{
    for (const auto& row : curvature())
        for (const auto& f : row)
            if (!f.is_zero())
                return false;
    return true;
}

bool ConnectionData::length_preserving() const
{
    for (const auto& row : A)
        for (const auto& f : row)
            for (const auto& [k, c] : f.terms())
                if (!k.first.empty())
                    return false;
    return true;
}

std::string ConnectionData::str() const
{
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rank; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < rank; ++j)
            os << (j ? ", " : "") << A[i][j].str();
    }
    os << "]";
    return os.str();
}

FormVec apply_curvature(const ConnectionData& c, const FormVec& v)
{
    const Calculus& cal = *c.calc;
    auto r = c.curvature();
    FormVec out = zero_vec(cal, c.rank, vec_degree(v) + 2);
    for (int j = 0; j < c.rank; ++j) {
        if (v[j].is_zero())
            continue;
        for (int k = 0; k < c.rank; ++k)
            out[k] += cal.wedge(v[j], r[k][j]);
    }
    return out;
}

Report composite_check(const ConnectionData& c, const std::vector<FormVec>& sample)
{
    Report rep("composite nabla");
    std::string witness;
    int checked = 0;
    for (const auto& v : sample) {
        try {
            FormVec lhs = c.nabla(c.nabla(v));
            FormVec rhs = apply_curvature(c, v);
            ++checked;
            if (!vec_equal(lhs, rhs) && witness.empty())
                witness = vec_str(v) + " gives " + vec_str(vec_add(lhs, rhs, RatFunc(-1)));
        }
        catch (const DegreeOverflow&) {
        }
    }
    rep.expect(witness.empty(), "nabla^[n+1] nabla^[n] = id ^ R on " + std::to_string(checked) + " elements", witness);
    return rep;
}

ConnectionData random_connection(CalculusPtr c, int rank, int max_len, std::mt19937& rng)
{
    ConnectionData out = ConnectionData::trivial(c, rank);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
            out.A[i][j] = random_form(*c, 1, max_len, rng);
    return out;
}

FormVec random_vec(const Calculus& c, int rank, int degree, int max_len, std::mt19937& rng)
{
    FormVec v;
    for (int i = 0; i < rank; ++i)
        v.push_back(random_form(c, degree, max_len, rng));
    return v;
}

ConnectionData gauge_transform(const ConnectionData& c, const std::vector<std::vector<RatFunc>>& g)
{
    auto ginv = scalar_inverse(g);
    ConnectionData out = ConnectionData::trivial(c.calc, c.rank);
    for (int l = 0; l < c.rank; ++l)
        for (int j = 0; j < c.rank; ++j)
            for (int i = 0; i < c.rank; ++i)
                for (int k = 0; k < c.rank; ++k)
                    if (!ginv[l][i].is_zero() && !g[k][j].is_zero())
                        out.A[l][j] += (ginv[l][i] * g[k][j]) * c.A[i][k];
    return out;
}

ConnectionData gauge_transform(const ConnectionData& c, const std::vector<std::vector<NcElement>>& g,
                               const std::vector<std::vector<NcElement>>& g_inverse)
{
    const Calculus& cal = *c.calc;
    const int n = c.rank;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            NcElement s(cal.algebra());
            for (int l = 0; l < n; ++l)
                s += g_inverse[l][i] * g[k][l];
            if (s != NcElement::scalar(cal.algebra(), RatFunc(i == k ? 1 : 0)))
                throw std::invalid_argument("supplied gauge inverse is wrong");
        }
    ConnectionData out = ConnectionData::trivial(c.calc, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            FormElement coeff = cal.d(cal.from_algebra(g[i][j]));
            for (int k = 0; k < n; ++k)
                if (!g[k][j].is_zero())
                    coeff += cal.wedge(cal.from_algebra(g[k][j]), c.A[i][k]);
            for (int l = 0; l < n; ++l)
                if (!g_inverse[l][i].is_zero())
                    out.A[l][j] += cal.wedge(coeff, cal.from_algebra(g_inverse[l][i]));
        }
    return out;
}

ConnectionData maurer_cartan_connection(CalculusPtr c)
{
    const auto& alg = c->algebra();
    const char* t[2][2] = {{"a", "b"}, {"c", "d"}};
    ConnectionData out = ConnectionData::trivial(c, 2);
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            out.A[k][j] = RatFunc(-1) * varpi(*c, NcElement::parse(alg, t[j][k]));
    return out;
}

// ---------------------------------------------------------- complexes

Report CochainComplex::check() const
{
    Report rep("cochain complex");
    for (std::size_t n = 0; n + 1 < d.size(); ++n)
        rep.expect(compose(d[n + 1], d[n]).is_zero(), "d^2 = 0 from degree " + std::to_string(n));
    return rep;
}

Cohomology::Cohomology(const CochainComplex& cx)
{
    const int top = static_cast<int>(cx.dims.size());
    for (int n = 0; n < top; ++n) {
        Subspace<RatFunc> z(cx.dims[n]);
        if (n < static_cast<int>(cx.d.size()))
            z = Subspace<RatFunc>(cx.dims[n], kernel_image(cx.d[n]).kernel);
        else
            z = full_space<RatFunc>(cx.dims[n]);
        Subspace<RatFunc> b(cx.dims[n]);
        if (n > 0)
            b = Subspace<RatFunc>(cx.dims[n], kernel_image(cx.d[n - 1]).image);
        auto reps = z.complement_of(b);
        Matrix<RatFunc> solver(cx.dims[n], 0);
        for (const auto& v : reps)
            solver.cols.push_back(v);
        for (const auto& v : b.basis())
            solver.cols.push_back(v);
        solver.cols_count = static_cast<int>(solver.cols.size());
        cocycles_.push_back(std::move(z));
        coboundaries_.push_back(std::move(b));
        reps_.push_back(std::move(reps));
        solvers_.push_back(std::move(solver));
    }
}

std::vector<int> Cohomology::dims() const
{
    std::vector<int> out;
    for (int n = 0; n < degrees(); ++n)
        out.push_back(dim(n));
    return out;
}

SparseVec<RatFunc> Cohomology::class_of(int n, const SparseVec<RatFunc>& cocycle) const
{
    auto x = solve(solvers_[n], cocycle);
    if (!x)
        throw std::invalid_argument("vector is not a cocycle in degree " + std::to_string(n));
    return x->slice(0, dim(n));
}

Matrix<RatFunc> Cohomology::induced(int n, const Matrix<RatFunc>& f, const Cohomology& target) const
{
    Matrix<RatFunc> m(target.dim(n), dim(n));
    for (int j = 0; j < dim(n); ++j)
        m.cols[j] = target.class_of(n, f.apply(reps_[n][j]));
    return m;
}

SparseVec<RatFunc> TwistedComponent::coords(const FormVec& v) const
{
    SparseVec<RatFunc> out;
    for (int j = 0; j < rank; ++j)
        out.add_scaled(forms.coords(v[j]).shifted(j * forms.size()), RatFunc(1));
    return out;
}

FormVec TwistedComponent::element(const SparseVec<RatFunc>& x) const
{
    const int s = forms.size();
    FormVec out;
    for (int j = 0; j < rank; ++j)
        out.push_back(forms.element(x.slice(j * s, (j + 1) * s)));
    return out;
}

TwistedComplex twisted_cohomology(const ConnectionData& c, int N)
{
    if (!c.length_preserving())
        throw std::invalid_argument("truncated twisted cohomology needs scalar connection coefficients");
    if (!c.is_flat())
        throw std::invalid_argument("connection is not flat: " + c.str());
    TwistedComplex tc;
    tc.conn = c;
    tc.N = N;
    const Calculus& cal = *c.calc;
    for (int n = 0; n <= cal.max_degree() && !cal.exterior().basis(n).empty(); ++n)
        tc.components.push_back(TwistedComponent{FormBasis(cal, n, N), c.rank});
    for (const auto& comp : tc.components)
        tc.complex.dims.push_back(comp.size());
    for (std::size_t n = 0; n + 1 < tc.components.size(); ++n) {
        const auto& src = tc.components[n];
        const auto& tgt = tc.components[n + 1];
        Matrix<RatFunc> m(tgt.size(), src.size());
        for (int j = 0; j < src.size(); ++j)
            m.cols[j] = tgt.coords(c.nabla(src.element(SparseVec<RatFunc>::unit(j))));
        tc.complex.d.push_back(std::move(m));
    }
    tc.cohomology = Cohomology(tc.complex);
    return tc;
}

TwistedComplex de_rham(CalculusPtr c, int N) { return twisted_cohomology(ConnectionData::trivial(std::move(c), 1), N); }

Report hdr_action_check(const TwistedComplex& tc, const TwistedComplex& dr, int samples, std::mt19937& rng)
{
    Report rep("de Rham action on twisted cohomology");
    rep.truncation = tc.N;
    const Calculus& cal = *tc.conn.calc;
    const int top = static_cast<int>(tc.components.size()) - 1;
    std::string w_cocycle, w_coboundary;
    int done = 0;
    auto random_in = [&](const Subspace<RatFunc>& s) {
        SparseVec<RatFunc> v;
        for (const auto& b : s.basis())
            if (rng() % 2)
                v.add_scaled(b, small_coefficient(rng));
        if (v.is_zero() && !s.basis().empty())
            v = s.basis()[rng() % s.basis().size()];
        return v;
    };
    for (int t = 0; t < samples; ++t) {
        int p = static_cast<int>(rng() % (top + 1));
        int n = static_cast<int>(rng() % (top + 1 - p));
        FormElement w = dr.components[p].element(random_in(dr.cohomology.cocycles(p)))[0];
        FormVec v = tc.components[n].element(random_in(tc.cohomology.cocycles(n)));
        FormVec wv = wedge_left(cal, w, v);
        if (!vec_is_zero(tc.conn.nabla(wv)) && w_cocycle.empty())
            w_cocycle = w.str() + " ^ " + vec_str(v);
        if (n > 0) {
            FormVec y = tc.components[n - 1].element(SparseVec<RatFunc>::unit(static_cast<int>(rng() % tc.components[n - 1].size())));
            FormVec lhs = wedge_left(cal, w, tc.conn.nabla(y));
            FormVec rhs = tc.conn.nabla(wedge_left(cal, w, y));
            if (!vec_equal(lhs, vec_add({}, rhs, sign(p))) && w_coboundary.empty())
                w_coboundary = w.str() + " ^ nabla(" + vec_str(y) + ")";
        }
        ++done;
    }
    rep.expect(w_cocycle.empty(), "closed form ^ cocycle is a cocycle (" + std::to_string(done) + " samples)", w_cocycle);
    rep.expect(w_coboundary.empty(), "closed form ^ coboundary is a coboundary", w_coboundary);
    return rep;
}

// --------------------------------------------------------- pushforward

ConnectionData pushforward(const DgaMap& theta, CalculusPtr target, const ConnectionData& c)
{
    ConnectionData out = ConnectionData::trivial(target, c.rank);
    for (int i = 0; i < c.rank; ++i)
        for (int j = 0; j < c.rank; ++j)
            out.A[i][j] = theta.apply_single(c.A[i][j]);
    return out;
}

std::vector<NcElement> BimoduleData::right_act(int a, const NcElement& x) const
{
    const auto& tb = target->algebra();
    std::vector<NcElement> out(rank, NcElement(tb));
    for (const auto& [w, c] : x.terms()) {
        std::vector<NcElement> v(rank, NcElement(tb));
        v[a] = NcElement::scalar(tb, c);
        for (char g : w) {
            std::vector<NcElement> next(rank, NcElement(tb));
            for (int b = 0; b < rank; ++b)
                if (!v[b].is_zero())
                    for (int e = 0; e < rank; ++e)
                        if (!mu[static_cast<unsigned char>(g)][b][e].is_zero())
                            next[e] += v[b] * mu[static_cast<unsigned char>(g)][b][e];
            v = std::move(next);
        }
        for (int b = 0; b < rank; ++b)
            out[b] += v[b];
    }
    return out;
}

FormVec BimoduleData::sigma_apply(int a, const FormElement& xi) const
{
    const Calculus& t = *target;
    FormVec out = zero_vec(t, rank, 1);
    for (const auto& [k, c] : xi.terms()) {
        if (k.second.size() != 1)
            throw std::invalid_argument("bimodule sigma is defined on 1-forms");
        int s = static_cast<unsigned char>(k.second[0]);
        auto v = right_act(a, NcElement::word(source->algebra(), k.first, c));
        for (int b = 0; b < rank; ++b) {
            if (v[b].is_zero())
                continue;
            FormElement vb = t.from_algebra(v[b]);
            for (int e = 0; e < rank; ++e)
                out[e] += t.wedge(vb, sigma[s][b][e]);
        }
    }
    return out;
}

Report BimoduleData::check() const
{
    Report rep("bimodule " + name);
    const Calculus& t = *target;
    const auto& sa = source->algebra();
    const int ng = sa.generator_count();
    std::string w_action, w_right, w_leibniz;
    for (int a = 0; a < rank; ++a) {
        for (int g = 0; g < ng; ++g)
            for (int h = 0; h < ng; ++h) {
                NcElement prod = NcElement::generator(sa, g) * NcElement::generator(sa, h);
                auto lhs = right_act(a, prod);
                std::vector<NcElement> rhs(rank, NcElement(t.algebra()));
                auto first = right_act(a, NcElement::generator(sa, g));
                for (int b = 0; b < rank; ++b)
                    for (int e = 0; e < rank; ++e)
                        rhs[e] += first[b] * mu[h][b][e];
                if (lhs != rhs && w_action.empty())
                    w_action = "m" + std::to_string(a) + "." + sa.generator(g).name + "." + sa.generator(h).name;
            }
        for (int s = 0; s < source->symbol_count(); ++s)
            for (int g = 0; g < ng; ++g) {
                FormVec lhs = sigma_apply(a, source->comm(s, g));
                FormVec rhs = zero_vec(t, rank, 1);
                for (int b = 0; b < rank; ++b)
                    for (int e = 0; e < rank; ++e)
                        if (!mu[g][b][e].is_zero())
                            rhs[e] += t.wedge(sigma[s][a][b], t.from_algebra(mu[g][b][e]));
                if (!vec_equal(lhs, rhs) && w_right.empty())
                    w_right = "sigma(m" + std::to_string(a) + " (x) " + source->symbol(s).name + sa.generator(g).name + ")";
            }
        for (int g = 0; g < ng; ++g) {
            FormVec lhs = zero_vec(t, rank, 1);
            for (int e = 0; e < rank; ++e) {
                lhs[e] += t.d(t.from_algebra(mu[g][a][e]));
                for (int b = 0; b < rank; ++b)
                    if (!mu[g][a][b].is_zero())
                        lhs[e] += t.wedge(t.from_algebra(mu[g][a][b]), nabla_m[e][b]);
            }
            FormVec rhs = sigma_apply(a, source->d_generator(g));
            for (int e = 0; e < rank; ++e)
                for (int b = 0; b < rank; ++b)
                    if (!mu[g][b][e].is_zero())
                        rhs[e] += t.wedge(nabla_m[b][a], t.from_algebra(mu[g][b][e]));
            if (!vec_equal(lhs, rhs) && w_leibniz.empty())
                w_leibniz = "m" + std::to_string(a) + "." + sa.generator(g).name + ": " + vec_str(vec_add(lhs, rhs, RatFunc(-1)), "m");
        }
    }
    rep.expect(w_action.empty(), "right action respects the relations", w_action);
    rep.expect(w_right.empty(), "sigma is right linear", w_right);
    rep.expect(w_leibniz.empty(), "nabla(m.a) = nabla(m).a + sigma(m (x) da)", w_leibniz);
    return rep;
}

BimoduleData bimodule_from_map(const DgaMap& theta, CalculusPtr target)
{
    const Calculus& src = theta.source();
    BimoduleData m;
    m.name = theta.name();
    m.target = target;
    m.rank = 1;
    const auto& sa = src.algebra();
    for (int g = 0; g < sa.generator_count(); ++g) {
        FormElement img = theta.apply_single(src.from_algebra(NcElement::generator(sa, g)));
        NcElement x(target->algebra());
        for (const auto& [k, c] : img.terms())
            x += NcElement::word(target->algebra(), k.first, c);
        m.mu.push_back({{x}});
    }
    m.nabla_m = {{target->zero(1)}};
    for (int s = 0; s < src.symbol_count(); ++s)
        m.sigma.push_back({{theta.apply_single(src.symbol_form(s))}});
    m.source = theta.source_ptr();
    return m;
}

BimoduleData identity_bimodule(CalculusPtr c)
{
    BimoduleData m;
    m.name = "id";
    m.source = c;
    m.target = c;
    m.rank = 1;
    const auto& alg = c->algebra();
    for (int g = 0; g < alg.generator_count(); ++g)
        m.mu.push_back({{NcElement::generator(alg, g)}});
    m.nabla_m = {{c->zero(1)}};
    for (int s = 0; s < c->symbol_count(); ++s)
        m.sigma.push_back({{c->symbol_form(s)}});
    return m;
}

BimoduleData compose_bimodules(const BimoduleData& n, const BimoduleData& m)
{
    if (m.target.get() != n.source.get())
        throw std::invalid_argument("bimodules do not compose: " + n.name + " after " + m.name);
    const Calculus& c = *n.target;
    const int kn = n.rank, km = m.rank;
    BimoduleData out;
    out.name = n.name + "*" + m.name;
    out.source = m.source;
    out.target = n.target;
    out.rank = kn * km;
    auto idx = [kn](int cc, int a) { return a * kn + cc; };
    const auto& sa = m.source->algebra();
    for (int g = 0; g < sa.generator_count(); ++g) {
        std::vector<std::vector<NcElement>> mu(out.rank, std::vector<NcElement>(out.rank, NcElement(c.algebra())));
        for (int a = 0; a < km; ++a)
            for (int b = 0; b < km; ++b) {
                if (m.mu[g][a][b].is_zero())
                    continue;
                for (int cc = 0; cc < kn; ++cc) {
                    auto v = n.right_act(cc, m.mu[g][a][b]);
                    for (int dd = 0; dd < kn; ++dd)
                        mu[idx(cc, a)][idx(dd, b)] += v[dd];
                }
            }
        out.mu.push_back(std::move(mu));
    }
    out.nabla_m.assign(out.rank, std::vector<FormElement>(out.rank, c.zero(1)));
    for (int a = 0; a < km; ++a)
        for (int cc = 0; cc < kn; ++cc) {
            for (int dd = 0; dd < kn; ++dd)
                out.nabla_m[idx(dd, a)][idx(cc, a)] += n.nabla_m[dd][cc];
            for (int b = 0; b < km; ++b) {
                if (m.nabla_m[b][a].is_zero())
                    continue;
                FormVec v = n.sigma_apply(cc, m.nabla_m[b][a]);
                for (int dd = 0; dd < kn; ++dd)
                    out.nabla_m[idx(dd, b)][idx(cc, a)] += v[dd];
            }
        }
    for (int s = 0; s < m.source->symbol_count(); ++s) {
        std::vector<std::vector<FormElement>> sg(out.rank, std::vector<FormElement>(out.rank, c.zero(1)));
        for (int a = 0; a < km; ++a)
            for (int b = 0; b < km; ++b) {
                if (m.sigma[s][a][b].is_zero())
                    continue;
                for (int cc = 0; cc < kn; ++cc) {
                    FormVec v = n.sigma_apply(cc, m.sigma[s][a][b]);
                    for (int dd = 0; dd < kn; ++dd)
                        sg[idx(cc, a)][idx(dd, b)] += v[dd];
                }
            }
        out.sigma.push_back(std::move(sg));
    }
    return out;
}

ConnectionData bimodule_pushforward(const BimoduleData& m, const ConnectionData& c)
{
    const int k = m.rank;
    ConnectionData out = ConnectionData::trivial(m.target, k * c.rank);
    for (int j = 0; j < c.rank; ++j)
        for (int a = 0; a < k; ++a) {
            for (int cc = 0; cc < k; ++cc)
                out.A[j * k + cc][j * k + a] += m.nabla_m[cc][a];
            for (int i = 0; i < c.rank; ++i) {
                if (c.A[i][j].is_zero())
                    continue;
                FormVec v = m.sigma_apply(a, c.A[i][j]);
                for (int cc = 0; cc < k; ++cc)
                    out.A[i * k + cc][j * k + a] += v[cc];
            }
        }
    return out;
}

// ------------------------------------------------ long exact sequence

ShortExactSequence split_sequence(const ConnectionData& e, const ConnectionData& g)
{
    ShortExactSequence s;
    s.E = e;
    s.G = g;
    const int re = e.rank, rg = g.rank;
    s.F = ConnectionData::trivial(e.calc, re + rg);
    for (int i = 0; i < re; ++i)
        for (int j = 0; j < re; ++j)
            s.F.A[i][j] = e.A[i][j];
    for (int i = 0; i < rg; ++i)
        for (int j = 0; j < rg; ++j)
            s.F.A[re + i][re + j] = g.A[i][j];
    s.phi.assign(re + rg, std::vector<RatFunc>(re));
    s.psi.assign(rg, std::vector<RatFunc>(re + rg));
    for (int i = 0; i < re; ++i)
        s.phi[i][i] = RatFunc(1);
    for (int i = 0; i < rg; ++i)
        s.psi[i][re + i] = RatFunc(1);
    return s;
}

ShortExactSequence coupled_sequence(CalculusPtr c, const FormElement& tau)
{
    ShortExactSequence s = split_sequence(ConnectionData::trivial(c, 1), ConnectionData::trivial(c, 1));
    s.F.A[0][1] = tau;
    return s;
}

LongExactSequence long_exact_sequence(const ShortExactSequence& ses, int N)
{
    LongExactSequence les;
    les.report = Report("long exact sequence");
    les.report.truncation = N;
    Report& rep = les.report;
    const int re = ses.E.rank, rf = ses.F.rank, rg = ses.G.rank;

    bool morphisms = true;
    for (int l = 0; l < rf; ++l)
        for (int j = 0; j < re; ++j) {
            FormElement lhs = ses.F.calc->zero(1), rhs = ses.F.calc->zero(1);
            for (int i = 0; i < rf; ++i)
                lhs += ses.phi[i][j] * ses.F.A[l][i];
            for (int m = 0; m < re; ++m)
                rhs += ses.phi[l][m] * ses.E.A[m][j];
            morphisms = morphisms && lhs == rhs;
        }
    for (int l = 0; l < rg; ++l)
        for (int j = 0; j < rf; ++j) {
            FormElement lhs = ses.F.calc->zero(1), rhs = ses.F.calc->zero(1);
            for (int i = 0; i < rg; ++i)
                lhs += ses.psi[i][j] * ses.G.A[l][i];
            for (int m = 0; m < rf; ++m)
                rhs += ses.psi[l][m] * ses.F.A[m][j];
            morphisms = morphisms && lhs == rhs;
        }
    rep.expect(morphisms, "phi and psi commute with the connections");

    Matrix<RatFunc> phi0 = block_scalar(ses.phi, 1), psi0 = block_scalar(ses.psi, 1);
    bool exact_rows = compose(psi0, phi0).is_zero() && rank(phi0) == re && rank(psi0) == rg && rf == re + rg;
    rep.expect(exact_rows, "0 -> E -> F -> G -> 0 exact on generators");
    if (!morphisms || !exact_rows)
        return les;

    les.E = twisted_cohomology(ses.E, N);
    les.F = twisted_cohomology(ses.F, N);
    les.G = twisted_cohomology(ses.G, N);
    const int top = static_cast<int>(les.E.components.size()) - 1;

    // a section of psi on generators, and a second one differing by phi t
    std::vector<std::vector<RatFunc>> s1(rf, std::vector<RatFunc>(rg));
    for (int j = 0; j < rg; ++j) {
        auto x = solve(psi0, SparseVec<RatFunc>::unit(j));
        for (const auto& [i, c] : x->entries())
            s1[i][j] = c;
    }
    auto s2 = s1;
    for (int l = 0; l < rf; ++l)
        for (int j = 0; j < rg; ++j)
            for (int m = 0; m < re; ++m)
                s2[l][j] += ses.phi[l][m];

    bool chain = true, exact_forms = true;
    std::vector<Matrix<RatFunc>> Phi, Psi;
    for (int n = 0; n <= top; ++n) {
        int forms = les.E.components[n].forms.size();
        Phi.push_back(block_scalar(ses.phi, forms));
        Psi.push_back(block_scalar(ses.psi, forms));
    }
    for (int n = 0; n <= top; ++n) {
        exact_forms = exact_forms && compose(Psi[n], Phi[n]).is_zero() && rank(Phi[n]) == Phi[n].cols_count
                      && rank(Psi[n]) == Psi[n].rows;
        if (n < top)
            chain = chain && compose(les.F.complex.d[n], Phi[n]) == compose(Phi[n + 1], les.E.complex.d[n])
                    && compose(les.G.complex.d[n], Psi[n]) == compose(Psi[n + 1], les.F.complex.d[n]);
    }
    rep.expect(exact_forms, "rows stay exact after tensoring with forms");
    rep.expect(chain, "phi and psi are chain maps on the truncation");

    for (int n = 0; n <= top; ++n) {
        les.phi_star.push_back(les.E.cohomology.induced(n, Phi[n], les.F.cohomology));
        les.psi_star.push_back(les.F.cohomology.induced(n, Psi[n], les.G.cohomology));
    }
    bool independent = true;
    for (int n = 0; n < top; ++n) {
        int forms = les.G.components[n].forms.size();
        auto connecting = [&](const std::vector<std::vector<RatFunc>>& s) {
            Matrix<RatFunc> S = block_scalar(s, forms);
            Matrix<RatFunc> m(les.E.cohomology.dim(n + 1), les.G.cohomology.dim(n));
            for (int j = 0; j < les.G.cohomology.dim(n); ++j) {
                auto z = les.F.complex.d[n].apply(S.apply(les.G.cohomology.representatives(n)[j]));
                auto x = solve(Phi[n + 1], z);
                if (!x)
                    throw std::logic_error("connecting map: image not in E");
                m.cols[j] = les.E.cohomology.class_of(n + 1, *x);
            }
            return m;
        };
        Matrix<RatFunc> d1 = connecting(s1);
        independent = independent && d1 == connecting(s2);
        les.delta.push_back(std::move(d1));
    }
    rep.expect(independent, "connecting map independent of the chosen lift");

    // exactness at every node of H^0 E -> H^0 F -> H^0 G -> H^1 E -> ...
    std::vector<std::pair<std::string, const Matrix<RatFunc>*>> maps;
    for (int n = 0; n <= top; ++n) {
        maps.emplace_back("phi" + std::to_string(n), &les.phi_star[n]);
        maps.emplace_back("psi" + std::to_string(n), &les.psi_star[n]);
        if (n < top)
            maps.emplace_back("delta" + std::to_string(n), &les.delta[n]);
    }
    std::string witness;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const Matrix<RatFunc>& out = *maps[i].second;
        int in_rank = i ? rank(*maps[i - 1].second) : 0;
        int ker = out.cols_count - rank(out);
        bool composite = i == 0 || compose(out, *maps[i - 1].second).is_zero();
        if ((ker != in_rank || !composite) && witness.empty())
            witness = "at the source of " + maps[i].first;
    }
    const Matrix<RatFunc>& last = *maps.back().second;
    if (rank(last) != last.rows && witness.empty())
        witness = "last map is not onto";
    std::ostringstream dims;
    for (int n = 0; n <= top; ++n)
        dims << (n ? " " : "") << les.E.cohomology.dim(n) << "," << les.F.cohomology.dim(n) << "," << les.G.cohomology.dim(n);
    rep.expect(witness.empty(), "long sequence exact (dims E,F,G per degree: " + dims.str() + ")", witness);
    return les;
}

// -------------------------------------------------- product structures

FormVec ProductStructure::sigma_vec(int m, const FormVec& v, const FormElement& eta) const
{
    FormVec out;
    for (int a = 0; a < static_cast<int>(v.size()); ++a) {
        if (v[a].is_zero())
            continue;
        out = vec_add(std::move(out), wedge_left(*calc, v[a], sigma(m, a, eta)));
    }
    if (out.empty())
        out = zero_vec(*calc, modules[m].rank, vec_degree(v) + eta.degree());
    return out;
}

FormVec ProductStructure::multiply(int m, const FormVec& x, int m2, const FormVec& y) const
{
    if (m + m2 > top())
        return {};
    const Calculus& c = *calc;
    FormVec out = zero_vec(c, modules[m + m2].rank, vec_degree(x) + vec_degree(y));
    for (int b = 0; b < static_cast<int>(y.size()); ++b) {
        if (y[b].is_zero())
            continue;
        FormVec sx = sigma_vec(m, x, y[b]);
        RatFunc s = sign(m * y[b].degree());
        for (int cc = 0; cc < static_cast<int>(sx.size()); ++cc) {
            if (sx[cc].is_zero())
                continue;
            FormVec p = product(m, cc, m2, b);
            if (p.empty())
                continue;
            out = vec_add(std::move(out), wedge_left(c, sx[cc], p), s);
        }
    }
    return out;
}

namespace {

FormVec unit_vec(const Calculus& c, int rank, int a)
{
    FormVec v = zero_vec(c, rank, 0);
    v[a] = c.one();
    return v;
}

FormVec column(const ConnectionData& c, int a)
{
    FormVec v;
    for (int i = 0; i < c.rank; ++i)
        v.push_back(c.A[i][a]);
    return v;
}

}  // namespace

Report product_structure_check(const ProductStructure& ps, int triples, std::mt19937& rng)
{
    Report rep("product structure " + ps.name);
    const Calculus& c = *ps.calc;
    const int top = ps.top();
    const int maxd = ps.max_form_degree;
    const auto& alg = c.algebra();
    std::map<std::string, std::pair<int, std::string>> results;
    auto record = [&](const std::string& axiom, bool ok, const std::function<std::string()>& witness) {
        auto& r = results[axiom];
        ++r.first;
        if (!ok && r.second.empty())
            r.second = witness();
    };
    auto random_element = [&](int m, int deg) {
        FormVec v;
        for (int a = 0; a < ps.modules[m].rank; ++a)
            v.push_back(ps.sample_form(deg, rng));
        return v;
    };
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };

    for (int t = 0; t < triples; ++t) {
        int m1 = pick(top + 1), m2 = pick(top + 1), m3 = pick(top + 1);
        int p1 = pick(maxd + 1), p2 = pick(maxd + 1 - p1), p3 = pick(maxd + 1 - p1 - p2);
        int a = pick(ps.modules[m1].rank);
        FormElement xi = ps.sample_form(p2, rng), eta = ps.sample_form(p3, rng);
        try {
            FormVec X = random_element(m1, p1), Y = random_element(m2, p2), Z = random_element(m3, p3);
            FormVec l = ps.multiply(m1 + m2, ps.multiply(m1, X, m2, Y), m3, Z);
            FormVec r = ps.multiply(m1, X, m2 + m3, ps.multiply(m2, Y, m3, Z));
            record("(a) product is associative", vec_equal(l, r), [&] { return vec_str(X) + " | " + vec_str(Y) + " | " + vec_str(Z); });
        }
        catch (const DegreeOverflow&) {
        }
        try {
            FormVec sig = ps.sigma(m1, a, xi);
            FormVec lhs = vec_add(ps.sigma_vec(m1, column(ps.modules[m1], a), xi), ps.sigma(m1, a, c.d(xi)));
            FormVec rhs = ps.modules[m1].nabla(sig);
            record("(b) sigma intertwines the connections", vec_equal(lhs, rhs), [&] { return "e" + std::to_string(a) + " (x) " + xi.str(); });
        }
        catch (const DegreeOverflow&) {
        }
        if (m1 + m2 <= top) {
            int b = pick(ps.modules[m2].rank);
            FormVec lhs = ps.modules[m1 + m2].nabla(ps.product(m1, a, m2, b));
            FormVec rhs = zero_vec(c, ps.modules[m1 + m2].rank, 1);
            for (int i = 0; i < ps.modules[m1].rank; ++i)
                if (!ps.modules[m1].A[i][a].is_zero())
                    rhs = vec_add(std::move(rhs), wedge_left(c, ps.modules[m1].A[i][a], ps.product(m1, i, m2, b)));
            for (int j = 0; j < ps.modules[m2].rank; ++j) {
                if (ps.modules[m2].A[j][b].is_zero())
                    continue;
                FormVec s = ps.sigma(m1, a, ps.modules[m2].A[j][b]);
                for (int cc = 0; cc < ps.modules[m1].rank; ++cc)
                    if (!s[cc].is_zero())
                        rhs = vec_add(std::move(rhs), wedge_left(c, s[cc], ps.product(m1, cc, m2, j)));
            }
            record("(c) Leibniz rule for the product", vec_equal(lhs, rhs), [&] { return "e" + std::to_string(a) + " ^ f" + std::to_string(b); });
        }
        try {
            FormVec lhs = ps.sigma_vec(m1, ps.sigma(m1, a, xi), eta);
            FormVec rhs = ps.sigma(m1, a, c.wedge(xi, eta));
            record("(d) sigma is multiplicative", vec_equal(lhs, rhs), [&] { return "e" + std::to_string(a) + " (x) " + xi.str() + " (x) " + eta.str(); });
        }
        catch (const DegreeOverflow&) {
        }
        {
            NcElement x = ps.sample_algebra ? ps.sample_algebra(rng) : NcElement::generator(alg, pick(alg.generator_count()));
            FormVec lhs = ps.sigma_vec(m1, ps.right_action(m1, a, x), xi);
            FormVec rhs = ps.sigma(m1, a, c.wedge(c.from_algebra(x), xi));
            record("sigma is balanced over the algebra", vec_equal(lhs, rhs), [&] { return "e" + std::to_string(a) + "." + x.str() + " (x) " + xi.str(); });
            FormVec s = ps.sigma(m1, a, xi);
            FormVec l2 = ps.sigma(m1, a, c.wedge(xi, c.from_algebra(x)));
            FormVec r2 = zero_vec(c, ps.modules[m1].rank, xi.degree());
            for (int cc = 0; cc < ps.modules[m1].rank; ++cc)
                if (!s[cc].is_zero())
                    r2 = vec_add(std::move(r2), wedge_left(c, s[cc], ps.right_action(m1, cc, x)));
            record("sigma is right linear", vec_equal(l2, r2), [&] { return "e" + std::to_string(a) + " (x) " + xi.str() + "." + x.str(); });
        }
        if (p1 + p2 + 1 <= maxd) {
            try {
                FormVec X = random_element(m1, p1), Y = random_element(m2, p2);
                FormVec lhs = ps.multiply(m1, X, m2, Y);
                if (!lhs.empty()) {
                    lhs = ps.modules[m1 + m2].nabla(lhs);
                    FormVec rhs = vec_add(ps.multiply(m1, ps.modules[m1].nabla(X), m2, Y),
                                          ps.multiply(m1, X, m2, ps.modules[m2].nabla(Y)), sign(p1 + m1));
                    record("nabla is a graded derivation", vec_equal(lhs, rhs), [&] { return vec_str(X) + " | " + vec_str(Y); });
                }
            }
            catch (const DegreeOverflow&) {
            }
        }
    }
    for (const auto& [axiom, r] : results)
        rep.expect(r.second.empty(), axiom + " (" + std::to_string(r.first) + " samples)", r.second);
    return rep;
}

namespace {

ProductStructure torus_instance(const RatFunc& cval, bool corrupt)
{
    ProductStructure ps;
    ps.name = corrupt ? "torus (corrupted sigma)" : "torus";
    ps.calc = build_torus();
    const Calculus& c = *ps.calc;
    const int zeta = *c.find_symbol("zeta");
    for (int m = 0; m <= 2; ++m) {
        ConnectionData e = ConnectionData::trivial(ps.calc, 1);
        e.A[0][0] = RatFunc(m) * cval * c.symbol_form(zeta);
        ps.modules.push_back(e);
    }
    CalculusPtr calc = ps.calc;
    ps.right_action = [calc](int, int, const NcElement& x) { return FormVec{calc->from_algebra(x)}; };
    ps.sigma = [corrupt](int, int, const FormElement& xi) {
        return FormVec{corrupt && xi.degree() > 0 ? RatFunc(-1) * xi : xi};
    };
    ps.product = [calc](int m, int, int m2, int) { return m + m2 <= 2 ? FormVec{calc->one()} : FormVec{}; };
    ps.sample_form = [calc](int degree, std::mt19937& rng) { return random_form(*calc, degree, 1, rng); };
    ps.max_form_degree = 2;
    return ps;
}

}  // namespace

ProductStructure torus_product_structure(const RatFunc& c) { return torus_instance(c, false); }
ProductStructure torus_product_structure_corrupted() { return torus_instance(RatFunc(1), true); }

}  // namespace ncfib
