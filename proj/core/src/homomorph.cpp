#include "ncfib/homomorph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ncfib {

namespace {

int form_len(const FormKey& k) { return static_cast<int>(k.second.size()); }

RatFunc sign(int e) { return e % 2 ? RatFunc(-1) : RatFunc(1); }

FormElement key_term(const Calculus& c, const FormKey& k) { return c.term(k.first, k.second); }

std::string leg_body(const Calculus& c, const FormKey& k)
{
    std::string body = k.first.empty() ? std::string() : c.algebra().word_str(k.first);
    if (!k.second.empty())
        body += (body.empty() ? "" : "*") + c.form_word_str(k.second);
    return body.empty() ? "1" : body;
}

std::vector<const Calculus*> raw_legs(const std::vector<CalculusPtr>& v)
{
    std::vector<const Calculus*> out;
    for (const auto& c : v)
        out.push_back(c.get());
    return out;
}

/// coordinates of a form in the exterior basis of its degree (scalar coefficients only)
SparseVec<RatFunc> invariant_coords(const Calculus& c, const FormElement& f)
{
    const auto& basis = c.exterior().basis(f.degree());
    std::map<int, RatFunc> m;
    for (const auto& [k, v] : f.terms()) {
        if (!k.first.empty())
            throw InconsistencyError("form " + f.str() + " is not left invariant");
        auto it = std::lower_bound(basis.begin(), basis.end(), k.second);
        m.emplace(static_cast<int>(it - basis.begin()), v);
    }
    return SparseVec<RatFunc>::from_map(m);
}

FormElement invariant_form(const Calculus& c, int degree, const SparseVec<RatFunc>& v)
{
    FormElement f = c.zero(degree);
    const auto& basis = c.exterior().basis(degree);
    for (const auto& [i, x] : v.entries())
        f.add({Word(), basis[i]}, x);
    return f;
}

/// span of `gens` intersected with the span of target's keys, in target coordinates
Subspace<RatFunc> span_within(const std::vector<FormElement>& gens, const FormBasis& target)
{
    std::set<FormKey> outside;
    for (const auto& g : gens)
        for (const auto& [k, c] : g.terms())
            if (!target.index(k))
                outside.insert(k);
    std::map<FormKey, int> idx;
    int n = 0;
    for (const auto& k : outside)
        idx[k] = n++;
    int offset = n;
    RowSpace<RatFunc> rs;
    for (const auto& g : gens) {
        std::map<int, RatFunc> m;
        for (const auto& [k, c] : g.terms()) {
            auto t = target.index(k);
            m.emplace(t ? offset + *t : idx.at(k), c);
        }
        rs.insert(SparseVec<RatFunc>::from_map(m));
    }
    Subspace<RatFunc> out(target.size());
    for (const auto& [p, row] : rs.rows())
        if (p >= offset)
            out.add(row.slice(offset, offset + target.size()));
    return out;
}

int max_key_length(const FormBasis& b)
{
    int m = 0;
    for (const auto& k : b.keys())
        m = std::max(m, static_cast<int>(k.first.size()));
    return m;
}

std::set<int> key_zdegrees(const FormBasis& b, const Calculus& c)
{
    std::set<int> z;
    for (const auto& k : b.keys())
        z.insert(c.algebra().zdegree(k.first) + c.zdegree(k.second));
    return z;
}

}  // namespace

// ------------------------------------------------------------- TensorForm

TensorForm TensorForm::unit(std::vector<const Calculus*> legs)
{
    TensorForm t(legs, 0);
    t.terms_.emplace(TensorKey(legs.size(), FormKey()), RatFunc(1));
    return t;
}

TensorForm TensorForm::outer(const std::vector<FormElement>& factors)
{
    std::vector<const Calculus*> legs;
    int deg = 0;
    for (const auto& f : factors) {
        legs.push_back(f.calculus());
        deg += f.degree();
    }
    TensorForm t(legs, deg);
    std::vector<std::pair<TensorKey, RatFunc>> acc{{TensorKey(), RatFunc(1)}};
    for (const auto& f : factors) {
        std::vector<std::pair<TensorKey, RatFunc>> next;
        for (const auto& [k, c] : acc)
            for (const auto& [fk, e] : f.terms()) {
                TensorKey k2 = k;
                k2.push_back(fk);
                next.emplace_back(std::move(k2), c * e);
            }
        acc = std::move(next);
    }
    for (const auto& [k, c] : acc)
        t.add(k, c);
    return t;
}

TensorForm TensorForm::from_tensor(const Tensor& t, std::vector<const Calculus*> legs)
{
    TensorForm out(legs, 0);
    for (const auto& [k, c] : t.terms()) {
        TensorKey key;
        for (const auto& w : k)
            key.emplace_back(w, FormWord());
        out.add(key, c);
    }
    return out;
}

RatFunc TensorForm::coeff(const TensorKey& k) const
{
    auto it = terms_.find(k);
    return it == terms_.end() ? RatFunc() : it->second;
}

std::string TensorForm::str() const
{
    std::vector<std::pair<RatFunc, std::string>> parts;
    for (const auto& [k, c] : terms_) {
        std::string body;
        for (std::size_t i = 0; i < k.size(); ++i)
            body += (i ? "⊗" : "") + leg_body(*legs_[i], k[i]);
        parts.emplace_back(c, body);
    }
    return format_linear(parts);
}

void TensorForm::add(const TensorKey& k, const RatFunc& c)
{
    if (c.is_zero())
        return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero())
            terms_.erase(it);
    }
}

TensorForm& TensorForm::operator+=(const TensorForm& b)
{
    if (legs_.empty()) {
        legs_ = b.legs_;
        degree_ = b.degree_;
    }
    if (terms_.empty())
        degree_ = b.degree_;
    for (const auto& [k, c] : b.terms_)
        add(k, c);
    return *this;
}

TensorForm& TensorForm::operator-=(const TensorForm& b) { return *this += RatFunc(-1) * b; }

TensorForm operator*(const RatFunc& c, TensorForm a)
{
    if (c.is_zero()) {
        a.terms_.clear();
        return a;
    }
    for (auto& [k, v] : a.terms_)
        v *= c;
    return a;
}

TensorForm operator*(const TensorForm& a, const TensorForm& b)
{
    TensorForm out(a.legs_.empty() ? b.legs_ : a.legs_, a.degree_ + b.degree_);
    const std::size_t n = out.legs_.size();
    for (const auto& [ka, c] : a.terms_)
        for (const auto& [kb, e] : b.terms_) {
            int s = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    s += form_len(kb[i]) * form_len(ka[j]);
            std::vector<std::pair<TensorKey, RatFunc>> acc{{TensorKey(), sign(s) * c * e}};
            for (std::size_t i = 0; i < n && !acc.empty(); ++i) {
                const Calculus& cal = *out.legs_[i];
                FormElement p = cal.wedge(key_term(cal, ka[i]), key_term(cal, kb[i]));
                std::vector<std::pair<TensorKey, RatFunc>> next;
                for (const auto& [k, x] : acc)
                    for (const auto& [pk, y] : p.terms()) {
                        TensorKey k2 = k;
                        k2.push_back(pk);
                        next.emplace_back(std::move(k2), x * y);
                    }
                acc = std::move(next);
            }
            for (const auto& [k, x] : acc)
                out.add(k, x);
        }
    return out;
}

TensorForm TensorForm::d() const
{
    TensorForm out(legs_, degree_ + 1);
    for (const auto& [k, c] : terms_) {
        int before = 0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            const Calculus& cal = *legs_[i];
            FormElement dx = cal.d(key_term(cal, k[i]));
            RatFunc s = sign(before) * c;
            for (const auto& [dk, e] : dx.terms()) {
                TensorKey k2 = k;
                k2[i] = dk;
                out.add(k2, s * e);
            }
            before += form_len(k[i]);
        }
    }
    return out;
}

TensorForm TensorForm::project(const std::vector<int>& degrees) const
{
    if (degrees.size() != legs_.size())
        throw std::invalid_argument("projection needs one degree per leg");
    int total = 0;
    for (int x : degrees)
        total += x;
    if (total != degree_)
        throw std::invalid_argument("projection degrees add up to " + std::to_string(total) + " but the element has degree "
                                    + std::to_string(degree_));
    TensorForm out(legs_, degree_);
    for (const auto& [k, c] : terms_) {
        bool keep = true;
        for (std::size_t i = 0; i < k.size(); ++i)
            keep = keep && form_len(k[i]) == degrees[i];
        if (keep)
            out.terms_.emplace(k, c);
    }
    return out;
}

FormElement TensorForm::as_form() const
{
    if (legs_.size() != 1)
        throw std::invalid_argument("as_form needs a single leg");
    FormElement f(*legs_[0], degree_);
    for (const auto& [k, c] : terms_)
        f.add(k[0], c);
    return f;
}

// ---------------------------------------------------------- Maurer-Cartan

FormElement varpi(const Calculus& c, const Word& x)
{
    const auto& alg = c.algebra();
    FormElement out = c.zero(1);
    for (const auto tmp = alg.coproduct(x); const auto& [k, e] : tmp.terms())
        out += e * c.wedge(c.from_algebra(alg.antipode(k[0])), c.d_word(k[1]));
    return out;
}

FormElement varpi(const Calculus& c, const NcElement& x)
{
    FormElement out = c.zero(1);
    for (const auto& [w, e] : x.terms())
        out += e * varpi(c, w);
    return out;
}

MaurerCartanData maurer_cartan(const Calculus& c, int max_word_length)
{
    const int n = c.symbol_count();
    std::vector<Word> chosen;
    Matrix<RatFunc> m(n, 0);
    RowSpace<RatFunc> rs;
    for (const auto& w : c.algebra().enumerate_basis(max_word_length)) {
        if (w.empty())
            continue;
        SparseVec<RatFunc> v;
        try {
            v = invariant_coords(c, varpi(c, w));
        }
        catch (const InconsistencyError&) {
            continue;
        }
        if (rs.insert(v)) {
            chosen.push_back(w);
            m.cols.push_back(v);
            ++m.cols_count;
        }
        if (rs.rank() == n)
            break;
    }
    if (rs.rank() < n)
        throw InconsistencyError("invariant forms of " + c.name() + " are not reached by varpi on words of length <= "
                                 + std::to_string(max_word_length));
    MaurerCartanData out;
    for (int s = 0; s < n; ++s) {
        auto x = solve(m, SparseVec<RatFunc>::unit(s));
        LinComb e;
        for (const auto& [j, v] : x->entries())
            e.emplace(chosen[j], v);
        out.expression.push_back(std::move(e));
    }
    return out;
}

FormElement derived_mc(const Calculus& c, const MaurerCartanData& mc, int s)
{
    const auto& alg = c.algebra();
    FormElement out = c.zero(2);
    for (const auto& [x, cx] : mc.expression[s])
        for (const auto tmp = alg.coproduct(x); const auto& [k, e] : tmp.terms())
            out -= (cx * e) * c.wedge(varpi(c, k[0]), varpi(c, k[1]));
    return out;
}

// ----------------------------------------------------------------- DgaMap

DgaMap::DgaMap(std::string name, CalculusPtr source, std::vector<CalculusPtr> target, const AlgebraMap& degree0)
    : name_(std::move(name)), src_(std::move(source)), targets_(std::move(target)), legs_(raw_legs(targets_)),
      map0_(degree0), report_("map " + name_)
{
    report_.merge(map0_.check_relations());
    const auto& alg = src_->algebra();
    MaurerCartanData mc = maurer_cartan(*src_);
    for (int s = 0; s < src_->symbol_count(); ++s) {
        TensorForm img(legs_, 1);
        for (const auto& [x, cx] : mc.expression[s])
            for (const auto tmp = alg.coproduct(x); const auto& [k, e] : tmp.terms())
                img += (cx * e) * (apply(alg.antipode(k[0])) * apply_word(k[1]).d());
        symbol_images_.push_back(std::move(img));
    }

    for (int g = 0; g < alg.generator_count(); ++g) {
        TensorForm lhs = apply(src_->d_generator(g));
        TensorForm rhs = apply_word(Word(1, static_cast<char>(g))).d();
        report_.expect(lhs == rhs, "d commutes with the map on " + alg.generator(g).name, (lhs - rhs).str());
    }
    for (int s = 0; s < src_->symbol_count(); ++s)
        for (int g = 0; g < alg.generator_count(); ++g) {
            TensorForm lhs = symbol_images_[s] * apply_word(Word(1, static_cast<char>(g)));
            TensorForm rhs = apply(src_->comm(s, g));
            report_.expect(lhs == rhs,
                           "commutation " + src_->symbol(s).name + "*" + alg.generator(g).name + " respected",
                           (lhs - rhs).str());
        }
    if (src_->max_degree() < 2)
        return;
    try {
        for (const auto& rel : src_->wedge_relations()) {
            TensorForm img(legs_, 2);
            std::string name;
            for (const auto& [w, c] : rel) {
                img += c * symbol_word_image(w);
                name = src_->form_word_str(w);
            }
            report_.expect(img.is_zero(), "wedge relation " + name + " respected", img.str());
        }
        for (int s = 0; s < src_->symbol_count(); ++s) {
            if (!src_->has_mc(s))
                continue;
            TensorForm lhs = apply(*src_->mc(s));
            TensorForm rhs = symbol_images_[s].d();
            report_.expect(lhs == rhs, "d commutes with the map on " + src_->symbol(s).name, (lhs - rhs).str());
        }
    }
    catch (const DegreeOverflow& e) {
        report_.skip("degree two compatibility", e.what());
    }
}

TensorForm DgaMap::apply_word(const Word& w) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = word_memo_.find(w);
        if (it != word_memo_.end())
            return it->second;
    }
    TensorForm out = TensorForm::unit(legs_);
    if (!w.empty())
        out = apply_word(w.substr(0, w.size() - 1))
              * TensorForm::from_tensor(map0_.image(static_cast<unsigned char>(w.back())), legs_);
    std::lock_guard<std::mutex> lock(mu_);
    word_memo_.emplace(w, out);
    return out;
}

TensorForm DgaMap::apply(const NcElement& x) const
{
    TensorForm out(legs_, 0);
    for (const auto& [w, c] : x.terms())
        out += c * apply_word(w);
    return out;
}

TensorForm DgaMap::symbol_word_image(const FormWord& f) const
{
    TensorForm out = TensorForm::unit(legs_);
    for (char s : f)
        out = out * symbol_images_[static_cast<unsigned char>(s)];
    return out;
}

TensorForm DgaMap::apply(const FormElement& f) const
{
    TensorForm out(legs_, f.degree());
    std::map<FormWord, TensorForm> cache;
    for (const auto& [k, c] : f.terms()) {
        auto it = cache.find(k.second);
        if (it == cache.end())
            it = cache.emplace(k.second, symbol_word_image(k.second)).first;
        out += c * (apply_word(k.first) * it->second);
    }
    return out;
}

TensorForm apply_on_leg(const DgaMap& theta, const TensorForm& t, int leg)
{
    std::vector<const Calculus*> legs(t.legs().begin(), t.legs().begin() + leg);
    legs.insert(legs.end(), theta.target_legs().begin(), theta.target_legs().end());
    legs.insert(legs.end(), t.legs().begin() + leg + 1, t.legs().end());
    TensorForm out(legs, t.degree());
    for (const auto& [k, c] : t.terms()) {
        TensorForm img = theta.apply(theta.source().term(k[leg].first, k[leg].second));
        for (const auto& [ik, e] : img.terms()) {
            TensorKey k2(k.begin(), k.begin() + leg);
            k2.insert(k2.end(), ik.begin(), ik.end());
            k2.insert(k2.end(), k.begin() + leg + 1, k.end());
            out.add(k2, c * e);
        }
    }
    return out;
}

DgaMapPtr make_identity_map(const CalculusPtr& c)
{
    const auto& alg = c->algebra();
    std::vector<Tensor> images;
    for (int g = 0; g < alg.generator_count(); ++g)
        images.push_back(Tensor::from(NcElement::generator(alg, g)));
    return std::make_shared<DgaMap>("id", c, std::vector<CalculusPtr>{c}, AlgebraMap(alg, {&alg}, images));
}

DgaMapPtr make_coproduct_map(const CalculusPtr& c)
{
    const auto& alg = c->algebra();
    std::vector<Tensor> images;
    for (int g = 0; g < alg.generator_count(); ++g)
        images.push_back(alg.coproduct(Word(1, static_cast<char>(g))));
    return std::make_shared<DgaMap>("coproduct", c, std::vector<CalculusPtr>{c, c},
                                    AlgebraMap(alg, {&alg, &alg}, images));
}

// -------------------------------------------------------------- fibration

FormElement FibrationData::k_form(int i) const { return invariant_form(*x, 1, k.basis[i]); }

std::shared_ptr<const FibrationData> make_fibration(CalculusPtr x, CalculusPtr h)
{
    auto fib = std::make_shared<FibrationData>();
    fib->x = x;
    fib->h = h;
    fib->pi = std::make_shared<DgaMap>("pi", x, std::vector<CalculusPtr>{h}, make_pi(x->algebra(), h->algebra()));
    fib->rho = std::make_shared<DgaMap>("rho", x, std::vector<CalculusPtr>{x, h}, make_rho(x->algebra(), h->algebra()));
    fib->delta_h = make_coproduct_map(h);
    const int n = x->symbol_count();
    Matrix<RatFunc> m(h->symbol_count(), n);
    for (int s = 0; s < n; ++s)
        m.cols[s] = invariant_coords(*h, fib->pi->symbol_image(s).as_form());
    fib->k.basis = kernel_image(m).kernel;
    fib->k.space = Subspace<RatFunc>(n, fib->k.basis);
    return fib;
}

std::shared_ptr<const FibrationData> fibration_3d()
{
    static const auto f = make_fibration(build_3d(), build_h3());
    return f;
}

std::shared_ptr<const FibrationData> fibration_4d()
{
    static const auto f = make_fibration(build_4d(), build_h4());
    return f;
}

TensorForm pi_projection(const TensorForm& t, int m, int n) { return t.project({m, n}); }

Subspace<RatFunc> horizontal_forms(const FibrationData& fib, const FormBasis& basis)
{
    const int n = basis.degree();
    if (n == 0)
        return full_space<RatFunc>(basis.size());
    KeyIndex<std::pair<int, TensorKey>> rows;
    std::vector<std::map<int, RatFunc>> cols(basis.size());
    for (int j = 0; j < basis.size(); ++j) {
        TensorForm r = fib.rho->apply(basis.element(SparseVec<RatFunc>::unit(j)));
        for (int m = 0; m < n; ++m)
            for (const auto tmp = r.project({m, n - m}); const auto& [k, c] : tmp.terms())
                cols[j].emplace(rows.id({m, k}), c);
    }
    Matrix<RatFunc> a(rows.size(), basis.size());
    for (int j = 0; j < basis.size(); ++j)
        a.cols[j] = SparseVec<RatFunc>::from_map(cols[j]);
    return Subspace<RatFunc>(basis.size(), kernel_image(a).kernel);
}

Subspace<RatFunc> coinvariant_subspace(const FormBasis& basis)
{
    Subspace<RatFunc> out(basis.size());
    if (basis.size() == 0)
        return out;
    const Calculus& c = *basis.element(SparseVec<RatFunc>()).calculus();
    for (int j = 0; j < basis.size(); ++j) {
        const auto& k = basis.keys()[j];
        if (c.algebra().zdegree(k.first) + c.zdegree(k.second) == 0)
            out.add(SparseVec<RatFunc>::unit(j));
    }
    return out;
}

Subspace<RatFunc> coinvariants_by_solve(const FibrationData& fib, const FormBasis& degree0)
{
    KeyIndex<TensorKey> rows;
    std::vector<std::map<int, RatFunc>> cols(degree0.size());
    for (int j = 0; j < degree0.size(); ++j) {
        const auto& k = degree0.keys()[j];
        TensorForm r = fib.rho->apply_word(k.first);
        TensorKey one{k, FormKey()};
        r.add(one, RatFunc(-1));
        for (const auto& [tk, c] : r.terms())
            cols[j].emplace(rows.id(tk), c);
    }
    Matrix<RatFunc> a(rows.size(), degree0.size());
    for (int j = 0; j < degree0.size(); ++j)
        a.cols[j] = SparseVec<RatFunc>::from_map(cols[j]);
    return Subspace<RatFunc>(degree0.size(), kernel_image(a).kernel);
}

namespace {

std::vector<Word> nonconstant_b_words(const Calculus& c, int max_len)
{
    std::vector<Word> out;
    for (const auto& w : c.algebra().enumerate_basis(max_len, 0))
        if (!w.empty())
            out.push_back(w);
    return out;
}

/// b0 db1 ^ ... ^ dbn with total coefficient length <= M, tagged with that length
std::vector<std::pair<FormElement, int>> omega_B_generators(const Calculus& c, int n, int M)
{
    auto bwords = nonconstant_b_words(c, M);
    std::vector<std::pair<FormElement, int>> partial{{c.one(), 0}};
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<FormElement, int>> next;
        for (const auto& [f, len] : partial)
            for (const auto& b : bwords)
                if (len + static_cast<int>(b.size()) <= M)
                    next.emplace_back(c.wedge(f, c.d_word(b)), len + static_cast<int>(b.size()));
        partial = std::move(next);
    }
    std::vector<std::pair<FormElement, int>> out;
    for (const auto& b0 : c.algebra().enumerate_basis(M, 0))
        for (const auto& [f, len] : partial)
            if (len + static_cast<int>(b0.size()) <= M)
                out.emplace_back(c.wedge(c.term(b0, FormWord()), f), len + static_cast<int>(b0.size()));
    return out;
}

}  // namespace

Subspace<RatFunc> omega_B(const FibrationData& fib, const FormBasis& target, int slack)
{
    const Calculus& c = *fib.x;
    int M = max_key_length(target) + slack;
    std::vector<FormElement> gens;
    for (auto& [f, len] : omega_B_generators(c, target.degree(), M))
        if (!f.is_zero())
            gens.push_back(std::move(f));
    return span_within(gens, target);
}

Subspace<RatFunc> omega_B_times_X(const FibrationData& fib, const FormBasis& target, int slack)
{
    const Calculus& c = *fib.x;
    int M = max_key_length(target) + slack;
    auto zdegs = key_zdegrees(target, c);
    auto words = c.algebra().enumerate_basis(M);
    std::vector<FormElement> gens;
    for (const auto& [f, len] : omega_B_generators(c, target.degree(), M)) {
        if (f.is_zero())
            continue;
        for (const auto& x : words)
            if (len + static_cast<int>(x.size()) <= M && zdegs.count(c.algebra().zdegree(x)))
                gens.push_back(c.wedge(f, c.term(x, FormWord())));
    }
    return span_within(gens, target);
}

Subspace<RatFunc> k_power_span(const FibrationData& fib, const FormBasis& target, int n)
{
    const Calculus& c = *fib.x;
    std::vector<FormElement> kpow{c.one()};
    for (int i = 0; i < n; ++i) {
        std::vector<FormElement> next;
        for (const auto& f : kpow)
            for (int j = 0; j < fib.k.dim(); ++j)
                next.push_back(c.wedge(f, fib.k_form(j)));
        kpow = std::move(next);
    }
    std::set<Word> words;
    for (const auto& k : target.keys())
        words.insert(k.first);
    std::vector<FormElement> gens;
    for (const auto& w : words)
        for (const auto& f : kpow)
            gens.push_back(c.wedge(c.term(w, FormWord()), f));
    return span_within(gens, target);
}

Subspace<RatFunc> k_filtration_invariant(const FibrationData& fib, int k_count, int total)
{
    const Calculus& c = *fib.x;
    std::vector<FormElement> prods{c.one()};
    for (int i = 0; i < total; ++i) {
        std::vector<FormElement> next;
        for (const auto& f : prods) {
            if (i < k_count) {
                for (int j = 0; j < fib.k.dim(); ++j)
                    next.push_back(c.wedge(f, fib.k_form(j)));
            }
            else {
                for (int s = 0; s < c.symbol_count(); ++s)
                    next.push_back(c.wedge(f, c.symbol_form(s)));
            }
        }
        prods = std::move(next);
    }
    Subspace<RatFunc> out(static_cast<int>(c.exterior().basis(total).size()));
    for (const auto& f : prods)
        out.add(invariant_coords(c, f));
    return out;
}

RatFunc integral_H(const NcElement& h) { return h.coeff(Word()); }

FormElement left_action(const Calculus& c, const NcElement& x, const FormElement& eta)
{
    const auto& alg = c.algebra();
    FormElement out = c.zero(eta.degree());
    for (const auto tmp = alg.coproduct(x); const auto& [k, e] : tmp.terms())
        out += e * c.wedge(c.wedge(c.term(k[1], FormWord()), eta), c.from_algebra(alg.antipode(k[0], true)));
    for (const auto& [k, e] : out.terms())
        if (!k.first.empty())
            throw InconsistencyError("left action output " + out.str() + " is not invariant");
    return out;
}

FormElement condition_K_form(const Calculus& c, const NcElement& b)
{
    const auto& alg = c.algebra();
    FormElement out = c.zero(1);
    for (const auto tmp = alg.coproduct(b); const auto& [k, e] : tmp.terms())
        out += e * c.wedge(c.d_word(k[1]), c.from_algebra(alg.antipode(k[0], true)));
    return out;
}

Report condition_K_check(const FibrationData& fib, int N)
{
    Report rep("condition K " + fib.x->name());
    rep.truncation = N;
    const Calculus& c = *fib.x;
    const auto& alg = c.algebra();
    rep.expect(fib.pi->well_defined(), "pi_* well defined",
               fib.pi->report().first_failure() ? fib.pi->report().first_failure()->check : "");

    auto w1 = c.find_symbol("w1");
    auto wp = c.find_symbol("wp");
    auto wm = c.find_symbol("wm");
    if (w1 && wp && wm) {
        const RatFunc q = RatFunc::q();
        struct Case {
            const char* b;
            FormElement expected;
        };
        std::vector<Case> cases{
            {"a*b", -q.inv() * c.symbol_form(*wm)},
            {"c*b", (q.pow(-2) - RatFunc(1)) * c.symbol_form(*w1)},
            {"d*c", -q.pow(-3) * c.symbol_form(*wp)},
        };
        for (const auto& cs : cases) {
            FormElement got = condition_K_form(c, NcElement::parse(alg, cs.b));
            rep.expect(got == cs.expected, std::string("closed form for ") + cs.b + ": " + got.str(),
                       "expected " + cs.expected.str() + ", got " + got.str());
        }
    }

    auto bwords = nonconstant_b_words(c, N);
    for (int i = 0; i < fib.k.dim(); ++i) {
        FormElement kappa = fib.k_form(i);
        auto z = kappa.zdegree();
        if (!z) {
            rep.fail("K element " + kappa.str() + " is Z-homogeneous", kappa.str());
            continue;
        }
        KeyIndex<FormKey> rows;
        std::vector<std::map<int, RatFunc>> cols;
        for (const auto& b : bwords)
            for (const auto& x : alg.enumerate_basis(N - static_cast<int>(b.size()), *z)) {
                FormElement g = c.wedge(c.d_word(b), c.term(x, FormWord()));
                std::map<int, RatFunc> col;
                for (const auto& [k, v] : g.terms())
                    col.emplace(rows.id(k), v);
                cols.push_back(std::move(col));
            }
        std::map<int, RatFunc> target;
        for (const auto& [k, v] : kappa.terms())
            target.emplace(rows.id(k), v);
        Matrix<RatFunc> a(rows.size(), static_cast<int>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j)
            a.cols[j] = SparseVec<RatFunc>::from_map(cols[j]);
        bool ok = solve(a, SparseVec<RatFunc>::from_map(target)).has_value();
        rep.expect(ok, kappa.str() + " lies in dB.X at N = " + std::to_string(N), "no solution within the truncation");
    }

    for (int i = 0; i < fib.k.dim(); ++i)
        for (int g = 0; g < alg.generator_count(); ++g) {
            FormElement act = left_action(c, NcElement::generator(alg, g), fib.k_form(i));
            bool in_k = fib.k.space.contains(invariant_coords(c, act));
            rep.expect(in_k, alg.generator(g).name + " |> " + fib.k_form(i).str() + " stays in K", act.str());
        }
    return rep;
}

// --------------------------------------------------------------- braiding

std::optional<std::vector<std::vector<NcElement>>> right_coaction(const DgaMap& delta, Report* report)
{
    const Calculus& c = delta.source();
    if (!delta.well_defined()) {
        if (report) {
            const auto* f = delta.report().first_failure();
            report->skip("right coaction on invariant forms",
                         "coproduct does not extend to forms of " + c.name() + (f ? ": " + f->check : ""));
        }
        return std::nullopt;
    }
    const int n = c.symbol_count();
    std::vector<std::vector<NcElement>> r(n, std::vector<NcElement>(n, NcElement(c.algebra())));
    for (int s = 0; s < n; ++s) {
        TensorForm t = delta.symbol_image(s).project({1, 0});
        for (const auto& [k, v] : t.terms()) {
            if (!k[0].first.empty()) {
                if (report)
                    report->fail("right coaction on invariant forms", "non-invariant leg in " + t.str());
                return std::nullopt;
            }
            r[static_cast<unsigned char>(k[0].second[0])][s] += NcElement::word(c.algebra(), k[1].first, v);
        }
    }
    if (report)
        report->pass("right coaction on invariant forms");
    return r;
}

namespace {

Matrix<RatFunc> kron_id_left(const Matrix<RatFunc>& s, int n)
{
    // id (x) s on n * s.rows
    Matrix<RatFunc> out(n * s.rows, n * s.cols_count);
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < s.cols_count; ++j)
            out.cols[a * s.cols_count + j] = s.cols[j].shifted(a * s.rows);
    return out;
}

Matrix<RatFunc> kron_id_right(const Matrix<RatFunc>& s, int n)
{
    // s (x) id
    Matrix<RatFunc> out(s.rows * n, s.cols_count * n);
    for (int j = 0; j < s.cols_count; ++j)
        for (int b = 0; b < n; ++b) {
            std::map<int, RatFunc> m;
            for (const auto& [i, c] : s.cols[j].entries())
                m.emplace(i * n + b, c);
            out.cols[j * n + b] = SparseVec<RatFunc>::from_map(m);
        }
    return out;
}

Matrix<RatFunc> identity(int n)
{
    Matrix<RatFunc> m(n, n);
    for (int i = 0; i < n; ++i)
        m.cols[i] = SparseVec<RatFunc>::unit(i);
    return m;
}

}  // namespace

std::optional<Braiding> braiding_sigma(const CalculusPtr& c, Report* report)
{
    auto delta = make_coproduct_map(c);
    Report local("braiding " + c->name());
    auto r = right_coaction(*delta, &local);
    if (report)
        report->merge(local);
    if (!r)
        return std::nullopt;
    const int n = c->symbol_count();
    const auto& alg = c->algebra();
    Braiding b;
    b.n = n;
    b.report = local;
    b.sigma = Matrix<RatFunc>(n * n, n * n);
    b.sigma_inverse = Matrix<RatFunc>(n * n, n * n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            std::map<int, RatFunc> col, icol;
            for (int u = 0; u < n; ++u) {
                if (!(*r)[u][t].is_zero()) {
                    FormElement a = left_action(*c, alg.antipode((*r)[u][t]), c->symbol_form(s));
                    for (const auto tmp = invariant_coords(*c, a); const auto& [i, v] : tmp.entries())
                        col[u * n + i] += v;
                }
                if ((*r)[u][s].is_zero())
                    continue;
                FormElement ai = left_action(*c, (*r)[u][s], c->symbol_form(t));
                for (const auto tmp = invariant_coords(*c, ai); const auto& [i, v] : tmp.entries())
                    icol[i * n + u] += v;
            }
            b.sigma.cols[s * n + t] = SparseVec<RatFunc>::from_map(col);
            b.sigma_inverse.cols[s * n + t] = SparseVec<RatFunc>::from_map(icol);
        }
    Matrix<RatFunc> id = identity(n * n);
    b.report.expect(compose(b.sigma_inverse, b.sigma) == id && compose(b.sigma, b.sigma_inverse) == id,
                    "sigma inverse formula");
    Matrix<RatFunc> s12 = kron_id_right(b.sigma, n);
    Matrix<RatFunc> s23 = kron_id_left(b.sigma, n);
    b.report.expect(compose(s12, compose(s23, s12)) == compose(s23, compose(s12, s23)), "braid relation");
    if (report)
        report->merge(b.report);
    return b;
}

std::vector<std::map<FormWord, RatFunc>> wedge_from_braiding(const Braiding& b)
{
    const int n = b.n;
    auto ki = kernel_image(b.sigma - identity(n * n));
    std::vector<std::map<FormWord, RatFunc>> out;
    for (const auto& v : ki.kernel) {
        std::map<FormWord, RatFunc> rel;
        for (const auto& [i, c] : v.entries()) {
            FormWord w{static_cast<char>(i / n), static_cast<char>(i % n)};
            rel.emplace(w, c);
        }
        out.push_back(std::move(rel));
    }
    return out;
}

namespace {

std::string relation_line(const Calculus& c, const std::map<FormWord, RatFunc>& rel)
{
    const auto& [lead, lc] = *rel.rbegin();
    std::vector<std::pair<RatFunc, std::string>> rhs;
    for (const auto& [w, v] : rel)
        if (w != lead)
            rhs.emplace_back(-v / lc, c.form_word_str(w));
    return "wedge " + c.form_word_str(lead) + " = " + format_linear(rhs) + "\n";
}

std::string with_max_degree(const std::string& text, int max_degree)
{
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("max_degree", 0) == 0)
            out << "max_degree " << max_degree << "\n";
        else if (line.rfind("wedge", 0) != 0 && line.rfind("mc", 0) != 0)
            out << line << "\n";
    }
    return out.str();
}

}  // namespace

DerivedCalculus derive_higher_degrees(const CalculusPtr& base, int max_degree)
{
    DerivedCalculus out;
    out.report = Report("derived calculus " + base->name());
    auto b = braiding_sigma(base, &out.report);
    if (!b)
        return out;
    auto rels = wedge_from_braiding(*b);
    std::string text = with_max_degree(base->serialize(), max_degree);
    for (const auto& r : rels)
        text += relation_line(*base, r);
    CalculusPtr stage = parse_calculus(text, base->algebra_ptr());
    std::ostringstream dims;
    for (int k = 0; k <= max_degree; ++k)
        dims << (k ? "," : "") << stage->exterior().basis(k).size();
    out.report.pass("exterior algebra dimensions " + dims.str());
    MaurerCartanData mc = maurer_cartan(*stage);
    for (int s = 0; s < stage->symbol_count(); ++s)
        text += "mc " + stage->symbol(s).name + " = " + derived_mc(*stage, mc, s).str() + "\n";
    out.calc = parse_calculus(text, base->algebra_ptr());
    out.report.merge(verify_calculus(*out.calc));
    return out;
}

const DerivedCalculus& build_4d_full()
{
    static const DerivedCalculus d = derive_higher_degrees(build_4d(), 4);
    return d;
}

// ------------------------------------------------------------- projection

std::vector<std::vector<NcElement>> h_coaction(const FibrationData& fib)
{
    const int n = fib.x->symbol_count();
    const auto& h = fib.h->algebra();
    std::vector<std::vector<NcElement>> out(n, std::vector<NcElement>(n, NcElement(h)));
    for (int s = 0; s < n; ++s) {
        TensorForm t = fib.rho->symbol_image(s).project({1, 0});
        for (const auto& [k, v] : t.terms()) {
            if (!k[0].first.empty())
                throw InconsistencyError("H-coaction of " + fib.x->symbol(s).name + " leaves the invariant forms");
            out[static_cast<unsigned char>(k[0].second[0])][s] += NcElement::word(h, k[1].first, v);
        }
    }
    return out;
}

ProjectionP projection_p(const FibrationData& fib)
{
    ProjectionP out;
    out.report = Report("projection p " + fib.x->name());
    const int n = fib.x->symbol_count();
    const auto& h = fib.h->algebra();
    auto co = h_coaction(fib);

    auto comp = full_space<RatFunc>(n).complement_of(fib.k.space);
    Matrix<RatFunc> kc(n, 0);
    for (const auto& v : fib.k.basis) {
        kc.cols.push_back(v);
        ++kc.cols_count;
    }
    for (const auto& v : comp) {
        kc.cols.push_back(v);
        ++kc.cols_count;
    }
    const int kd = fib.k.dim();
    out.p0 = Matrix<RatFunc>(n, n);
    for (int s = 0; s < n; ++s) {
        auto x = solve(kc, SparseVec<RatFunc>::unit(s));
        SparseVec<RatFunc> v;
        for (const auto& [j, c] : x->entries())
            if (j < kd)
                v.add_scaled(fib.k.basis[j], c);
        out.p0.cols[s] = v;
    }

    out.p = Matrix<RatFunc>(n, n);
    for (int s = 0; s < n; ++s) {
        std::map<int, RatFunc> col;
        for (int t = 0; t < n; ++t) {
            if (co[t][s].is_zero())
                continue;
            NcElement st = h.antipode(co[t][s]);
            for (const auto& [u, a] : out.p0.cols[t].entries())
                for (int v = 0; v < n; ++v)
                    if (!co[v][u].is_zero())
                        col[v] += a * integral_H(co[v][u] * st);
        }
        out.p.cols[s] = SparseVec<RatFunc>::from_map(col);
    }

    out.report.expect(compose(out.p, out.p) == out.p, "p is idempotent");
    Subspace<RatFunc> img(n, out.p.cols);
    out.report.expect(img == fib.k.space, "image of p is K");
    bool fixes = true;
    for (const auto& v : fib.k.basis)
        fixes = fixes && out.p.apply(v) == v;
    out.report.expect(fixes, "p fixes K");
    bool colinear = true;
    for (int s = 0; s < n && colinear; ++s)
        for (int w = 0; w < n; ++w) {
            NcElement lhs(h), rhs(h);
            for (const auto& [v, c] : out.p.cols[s].entries())
                lhs += c * co[w][v];
            for (int t = 0; t < n; ++t)
                rhs += out.p.cols[t].get(w) * co[t][s];
            if (lhs != rhs) {
                colinear = false;
                break;
            }
        }
    out.report.expect(colinear, "p is H-colinear");
    return out;
}

Report coaction_law_check(const FibrationData& fib, int max_len)
{
    Report rep("coaction law " + fib.x->name());
    rep.truncation = max_len;
    std::string witness;
    for (int deg = 0; deg <= 1; ++deg) {
        FormBasis basis(*fib.x, deg, max_len);
        for (int j = 0; j < basis.size(); ++j) {
            FormElement e = basis.element(SparseVec<RatFunc>::unit(j));
            TensorForm r = fib.rho->apply(e);
            TensorForm lhs = apply_on_leg(*fib.rho, r, 0);
            TensorForm rhs = apply_on_leg(*fib.delta_h, r, 1);
            if (lhs != rhs && witness.empty())
                witness = e.str() + ": " + (lhs - rhs).str();
        }
    }
    rep.expect(witness.empty(), "(rho (x) id) rho = (id (x) Delta) rho on degrees <= 1", witness);
    return rep;
}

Report horizontal_coaction_check(const FibrationData& fib, int n, int N)
{
    Report rep("horizontal forms preserved by coaction");
    rep.truncation = N;
    FormBasis basis(*fib.x, n, N);
    Subspace<RatFunc> hor = horizontal_forms(fib, basis);
    std::string witness;
    for (const auto& v : hor.basis()) {
        TensorForm t = fib.rho->apply(basis.element(v)).project({n, 0});
        std::map<FormKey, FormElement> by_h;
        for (const auto& [k, c] : t.terms()) {
            auto it = by_h.try_emplace(k[1], fib.x->zero(n)).first;
            it->second.add(k[0], c);
        }
        for (const auto& [hk, f] : by_h)
            if (!hor.contains(basis.coords(f)) && witness.empty())
                witness = f.str();
    }
    rep.expect(witness.empty(), "Pi_{" + std::to_string(n) + ",0} rho_* maps horizontal forms into horizontal (x) H",
               witness);
    return rep;
}

}  // namespace ncfib

namespace ncfib {

std::shared_ptr<const FibrationData> fibration_4d_full()
{
    static const auto f = make_fibration(build_4d_full().calc, fibration_4d()->h);
    return f;
}

}  // namespace ncfib
