#include "ncfib/ncpoly.hpp"

#include "ncfib/expr.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ncfib {

void accumulate(LinComb& into, const Word& w, const RatFunc& c)
{
    if (c.is_zero())
        return;
    auto [it, inserted] = into.try_emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero())
            into.erase(it);
    }
}

void accumulate(LinComb& into, const LinComb& from, const RatFunc& c)
{
    for (const auto& [w, v] : from)
        accumulate(into, w, c * v);
}

namespace {

// Free algebra values used while parsing text.
struct FreeComb {
    LinComb terms;
    FreeComb& operator+=(const FreeComb& b)
    {
        accumulate(terms, b.terms);
        return *this;
    }
    friend FreeComb operator+(FreeComb a, const FreeComb& b) { return a += b; }
    friend FreeComb operator-(FreeComb a, const FreeComb& b)
    {
        accumulate(a.terms, b.terms, RatFunc(-1));
        return a;
    }
    FreeComb operator-() const
    {
        FreeComb r;
        accumulate(r.terms, terms, RatFunc(-1));
        return r;
    }
    friend FreeComb operator*(const FreeComb& a, const FreeComb& b)
    {
        FreeComb r;
        for (const auto& [u, c] : a.terms)
            for (const auto& [v, d] : b.terms)
                accumulate(r.terms, u + v, c * d);
        return r;
    }
    std::optional<RatFunc> as_scalar() const
    {
        if (terms.empty())
            return RatFunc();
        if (terms.size() == 1 && terms.begin()->first.empty())
            return terms.begin()->second;
        return std::nullopt;
    }
};

FreeComb free_scalar(const RatFunc& c)
{
    FreeComb f;
    accumulate(f.terms, Word(), c);
    return f;
}

}  // namespace

// ------------------------------------------------------------ NcElement

NcElement NcElement::scalar(const AlgebraPresentation& a, const RatFunc& c)
{
    NcElement x(a);
    accumulate(x.terms_, Word(), c);
    return x;
}

NcElement NcElement::word(const AlgebraPresentation& a, const Word& w, const RatFunc& c)
{
    LinComb l;
    accumulate(l, w, c);
    return a.reduce(l);
}

NcElement NcElement::generator(const AlgebraPresentation& a, int g) { return word(a, Word(1, static_cast<char>(g))); }

NcElement NcElement::parse(const AlgebraPresentation& a, std::string_view text) { return a.reduce(a.parse_free(text)); }

RatFunc NcElement::coeff(const Word& w) const
{
    auto it = terms_.find(w);
    return it == terms_.end() ? RatFunc() : it->second;
}

std::optional<int> NcElement::zdegree() const
{
    std::optional<int> deg;
    for (const auto& [w, c] : terms_) {
        int d = alg_->zdegree(w);
        if (deg && *deg != d)
            return std::nullopt;
        deg = d;
    }
    return deg.value_or(0);
}

std::string NcElement::str() const
{
    std::vector<Word> words;
    for (const auto& [w, c] : terms_)
        words.push_back(w);
    if (alg_)
        std::sort(words.begin(), words.end(), [this](const Word& a, const Word& b) { return alg_->basis_less(a, b); });
    std::vector<std::pair<RatFunc, std::string>> parts;
    for (const auto& w : words)
        parts.emplace_back(terms_.at(w), w.empty() ? std::string() : alg_->word_str(w));
    return format_linear(parts);
}

NcElement& NcElement::operator+=(const NcElement& b)
{
    if (!alg_)
        alg_ = b.alg_;
    accumulate(terms_, b.terms_);
    return *this;
}

NcElement& NcElement::operator-=(const NcElement& b)
{
    if (!alg_)
        alg_ = b.alg_;
    accumulate(terms_, b.terms_, RatFunc(-1));
    return *this;
}

NcElement NcElement::operator-() const { return RatFunc(-1) * *this; }

NcElement operator*(const RatFunc& c, NcElement a)
{
    if (c.is_zero()) {
        a.terms_.clear();
        return a;
    }
    for (auto& [w, v] : a.terms_)
        v *= c;
    return a;
}

NcElement operator*(const NcElement& a, const NcElement& b)
{
    const AlgebraPresentation* alg = a.alg_ ? a.alg_ : b.alg_;
    if (a.alg_ && b.alg_ && a.alg_ != b.alg_)
        throw std::invalid_argument("product of elements of different algebras");
    NcElement r;
    r.alg_ = alg;
    for (const auto& [u, c] : a.terms_)
        for (const auto& [v, d] : b.terms_) {
            if (u.empty() || v.empty())
                accumulate(r.terms_, u + v, c * d);
            else
                accumulate(r.terms_, alg->normal_form(u + v), c * d);
        }
    return r;
}

// --------------------------------------------------------------- Tensor

Tensor Tensor::pure(Legs legs, Key key, const RatFunc& c)
{
    Tensor t(std::move(legs));
    t.add(key, c);
    return t;
}

Tensor Tensor::from(const NcElement& x)
{
    Tensor t({x.algebra()});
    for (const auto& [w, c] : x.terms())
        t.add({w}, c);
    return t;
}

Tensor Tensor::outer(const NcElement& x, const NcElement& y)
{
    Tensor t({x.algebra(), y.algebra()});
    for (const auto& [u, c] : x.terms())
        for (const auto& [v, d] : y.terms())
            t.add({u, v}, c * d);
    return t;
}

void Tensor::add(const Key& k, const RatFunc& c)
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

NcElement Tensor::as_element() const
{
    if (legs_.size() != 1)
        throw std::invalid_argument("tensor with several legs is not an algebra element");
    NcElement x = NcElement::scalar(*legs_[0], RatFunc());
    for (const auto& [k, c] : terms_)
        x += NcElement::word(*legs_[0], k[0], c);
    return x;
}

std::string Tensor::str() const
{
    std::vector<std::pair<RatFunc, std::string>> parts;
    for (const auto& [k, c] : terms_) {
        std::string body;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i)
                body += " ⊗ ";
            body += k[i].empty() ? "1" : legs_[i]->word_str(k[i]);
        }
        parts.emplace_back(c, k.size() > 1 ? "(" + body + ")" : body);
    }
    return format_linear(parts);
}

Tensor& Tensor::operator+=(const Tensor& b)
{
    if (legs_.empty())
        legs_ = b.legs_;
    for (const auto& [k, c] : b.terms_)
        add(k, c);
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& b)
{
    if (legs_.empty())
        legs_ = b.legs_;
    for (const auto& [k, c] : b.terms_)
        add(k, -c);
    return *this;
}

Tensor operator*(const RatFunc& c, Tensor a)
{
    if (c.is_zero()) {
        a.terms_.clear();
        return a;
    }
    for (auto& [k, v] : a.terms_)
        v *= c;
    return a;
}

Tensor operator*(const Tensor& a, const Tensor& b)
{
    if (a.legs_.size() != b.legs_.size())
        throw std::invalid_argument("tensor leg count mismatch");
    Tensor r(a.legs_);
    for (const auto& [u, c] : a.terms_)
        for (const auto& [v, d] : b.terms_) {
            // expand the legwise product of normal forms
            std::vector<std::pair<Tensor::Key, RatFunc>> acc{{Tensor::Key(), c * d}};
            for (std::size_t i = 0; i < u.size(); ++i) {
                LinComb leg = a.legs_[i]->normal_form(u[i] + v[i]);
                std::vector<std::pair<Tensor::Key, RatFunc>> next;
                for (const auto& [k, e] : acc)
                    for (const auto& [w, f] : leg) {
                        Tensor::Key nk = k;
                        nk.push_back(w);
                        next.emplace_back(std::move(nk), e * f);
                    }
                acc = std::move(next);
            }
            for (const auto& [k, e] : acc)
                r.add(k, e);
        }
    return r;
}

Tensor Tensor::map_leg(int i, const Legs& new_legs, const std::function<Tensor(const Word&)>& f) const
{
    Legs legs(legs_.begin(), legs_.begin() + i);
    legs.insert(legs.end(), new_legs.begin(), new_legs.end());
    legs.insert(legs.end(), legs_.begin() + i + 1, legs_.end());
    Tensor r(legs);
    for (const auto& [k, c] : terms_) {
        Tensor img = f(k[i]);
        for (const auto& [ik, d] : img.terms_) {
            Key nk(k.begin(), k.begin() + i);
            nk.insert(nk.end(), ik.begin(), ik.end());
            nk.insert(nk.end(), k.begin() + i + 1, k.end());
            r.add(nk, c * d);
        }
    }
    return r;
}

Tensor Tensor::multiply_legs(int i) const
{
    if (legs_[i] != legs_[i + 1])
        throw std::invalid_argument("multiplying legs of different algebras");
    Legs legs = legs_;
    legs.erase(legs.begin() + i + 1);
    Tensor r(legs);
    for (const auto& [k, c] : terms_) {
        for (const auto& [w, d] : legs_[i]->normal_form(k[i] + k[i + 1])) {
            Key nk = k;
            nk[i] = w;
            nk.erase(nk.begin() + i + 1);
            r.add(nk, c * d);
        }
    }
    return r;
}

// -------------------------------------------------- AlgebraPresentation

int AlgebraPresentation::add_generator(Generator g)
{
    gens_.push_back(std::move(g));
    inverse_.push_back(-1);
    return static_cast<int>(gens_.size()) - 1;
}

void AlgebraPresentation::set_inverse(int g, int inverse)
{
    inverse_[g] = inverse;
    inverse_[inverse] = g;
}

void AlgebraPresentation::add_rule(const Word& lhs, LinComb rhs)
{
    if (lhs.size() != 2)
        throw std::invalid_argument("rewrite rules must have two-letter left-hand sides");
    auto key = std::make_pair(lhs[0], lhs[1]);
    if (rule_index_.count(key))
        throw std::invalid_argument("duplicate rewrite rule for " + word_str(lhs));
    rule_index_[key] = rules_.size();
    rules_.push_back({lhs, std::move(rhs)});
}

void AlgebraPresentation::add_rule(std::string_view lhs, std::string_view rhs) { add_rule(parse_word(lhs), parse_free(rhs)); }

std::optional<int> AlgebraPresentation::find_generator(std::string_view name) const
{
    for (int i = 0; i < generator_count(); ++i) {
        if (gens_[i].name == name)
            return i;
        for (const auto& al : gens_[i].aliases)
            if (al == name)
                return i;
    }
    return std::nullopt;
}

const RewriteRule* AlgebraPresentation::rule_for(char a, char b) const
{
    auto it = rule_index_.find({a, b});
    return it == rule_index_.end() ? nullptr : &rules_[it->second];
}

const HopfData& AlgebraPresentation::hopf() const
{
    if (!hopf_)
        throw std::logic_error("algebra " + name_ + " has no Hopf structure");
    return *hopf_;
}

bool AlgebraPresentation::is_normal(const Word& w) const
{
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (rule_for(w[i], w[i + 1]))
            return false;
    return true;
}

int AlgebraPresentation::zdegree(const Word& w) const
{
    int d = 0;
    for (char c : w)
        d += gens_[static_cast<unsigned char>(c)].zdeg;
    return d;
}

std::string AlgebraPresentation::word_str(const Word& w) const
{
    if (w.empty())
        return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            s += "*";
        s += gens_[static_cast<unsigned char>(w[i])].name;
    }
    return s;
}

Word AlgebraPresentation::parse_word(std::string_view text) const
{
    Word w;
    std::string cur;
    auto flush = [&] {
        if (cur.empty())
            return;
        auto g = find_generator(cur);
        if (!g)
            throw ParseError("unknown generator '" + cur + "' in " + name_);
        w.push_back(static_cast<char>(*g));
        cur.clear();
    };
    for (char ch : text) {
        if (ch == '*' || ch == ' ')
            flush();
        else
            cur.push_back(ch);
    }
    flush();
    return w;
}

LinComb AlgebraPresentation::parse_free(std::string_view text) const
{
    ExprOps<FreeComb> ops;
    ops.integer = [](const std::string& s) { return free_scalar(RatFunc(Rational(mpz_class(s)))); };
    ops.symbol = [this](const std::string& s) {
        if (s == "q")
            return free_scalar(RatFunc::q());
        auto g = find_generator(s);
        if (!g)
            throw ParseError("unknown symbol '" + s + "' in " + name_);
        FreeComb f;
        accumulate(f.terms, Word(1, static_cast<char>(*g)), RatFunc(1));
        return f;
    };
    ops.divide = [](const FreeComb& a, const FreeComb& b) {
        auto s = b.as_scalar();
        if (!s)
            throw ParseError("division by a non-scalar");
        return a * free_scalar(s->inv());
    };
    ops.power = [this](const FreeComb& a, int k) {
        FreeComb base = a;
        if (k < 0) {
            if (auto s = a.as_scalar()) {
                base = free_scalar(s->inv());
            }
            else if (a.terms.size() == 1 && a.terms.begin()->first.size() == 1 && a.terms.begin()->second.is_one()
                     && inverse_[static_cast<unsigned char>(a.terms.begin()->first[0])] >= 0) {
                base = FreeComb();
                char inv = static_cast<char>(inverse_[static_cast<unsigned char>(a.terms.begin()->first[0])]);
                accumulate(base.terms, Word(1, inv), RatFunc(1));
            }
            else {
                throw ParseError("negative power of a non-invertible element");
            }
            k = -k;
        }
        FreeComb r = free_scalar(RatFunc(1));
        for (int i = 0; i < k; ++i)
            r = r * base;
        return r;
    };
    return evaluate(text, ops).terms;
}

LinComb AlgebraPresentation::normal_form(const Word& w, Strategy s) const
{
    int slot = s == Strategy::Leftmost ? 0 : 1;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = nf_memo_[slot].find(w);
        if (it != nf_memo_[slot].end())
            return it->second;
    }
    int pos = -1;
    if (s == Strategy::Leftmost) {
        for (std::size_t i = 0; i + 1 < w.size() && pos < 0; ++i)
            if (rule_for(w[i], w[i + 1]))
                pos = static_cast<int>(i);
    }
    else {
        for (std::size_t i = w.size(); i-- > 1 && pos < 0;)
            if (rule_for(w[i - 1], w[i]))
                pos = static_cast<int>(i) - 1;
    }
    LinComb out;
    if (pos < 0) {
        out.emplace(w, RatFunc(1));
    }
    else {
        const RewriteRule* r = rule_for(w[pos], w[pos + 1]);
        for (const auto& [u, c] : r->rhs) {
            Word next = w.substr(0, pos) + u + w.substr(pos + 2);
            accumulate(out, normal_form(next, s), c);
        }
    }
    std::lock_guard<std::mutex> lock(mu_);
    nf_memo_[slot].emplace(w, out);
    return out;
}

NcElement AlgebraPresentation::reduce(const LinComb& c) const
{
    NcElement x(*this);
    for (const auto& [w, v] : c)
        accumulate(x.terms_, normal_form(w), v);
    return x;
}

bool AlgebraPresentation::basis_less(const Word& a, const Word& b) const
{
    if (basis_less_)
        return basis_less_(a, b);
    if (a.size() != b.size())
        return a.size() < b.size();
    return a < b;
}

std::vector<Word> AlgebraPresentation::enumerate_basis(int maxdeg, std::optional<int> zdeg) const
{
    std::vector<Word> all{Word()};
    std::vector<Word> layer{Word()};
    for (int len = 1; len <= maxdeg; ++len) {
        std::vector<Word> next;
        for (const auto& w : layer)
            for (int g = 0; g < generator_count(); ++g) {
                char c = static_cast<char>(g);
                if (!w.empty() && rule_for(w.back(), c))
                    continue;
                next.push_back(w + c);
            }
        all.insert(all.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    std::vector<Word> out;
    for (auto& w : all)
        if (!zdeg || zdegree(w) == *zdeg)
            out.push_back(std::move(w));
    std::sort(out.begin(), out.end(), [this](const Word& a, const Word& b) { return basis_less(a, b); });
    return out;
}

Tensor AlgebraPresentation::coproduct(const Word& w) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = delta_memo_.find(w);
        if (it != delta_memo_.end())
            return it->second;
    }
    const HopfData& h = hopf();
    Tensor::Legs legs{this, this};
    Tensor t = Tensor::pure(legs, {Word(), Word()});
    for (char c : w) {
        Tensor g(legs);
        for (const auto& [k, v] : h.coproduct[static_cast<unsigned char>(c)])
            g.add({k.first, k.second}, v);
        t = t * g;
    }
    std::lock_guard<std::mutex> lock(mu_);
    delta_memo_.emplace(w, t);
    return t;
}

Tensor AlgebraPresentation::coproduct(const NcElement& x) const
{
    Tensor t({this, this});
    for (const auto& [w, c] : x.terms())
        t += c * coproduct(w);
    return t;
}

Tensor AlgebraPresentation::coproduct_free(const LinComb& l) const
{
    Tensor t({this, this});
    for (const auto& [w, c] : l)
        t += c * coproduct(w);
    return t;
}

RatFunc AlgebraPresentation::counit(const Word& w) const
{
    RatFunc r(1);
    for (char c : w)
        r *= hopf().counit[static_cast<unsigned char>(c)];
    return r;
}

RatFunc AlgebraPresentation::counit(const NcElement& x) const
{
    RatFunc r;
    for (const auto& [w, c] : x.terms())
        r += c * counit(w);
    return r;
}

NcElement AlgebraPresentation::antipode(const Word& w, bool inverse) const
{
    int slot = inverse ? 1 : 0;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = s_memo_[slot].find(w);
        if (it != s_memo_[slot].end())
            return it->second;
    }
    const auto& table = inverse ? hopf().antipode_inverse : hopf().antipode;
    NcElement r = NcElement::scalar(*this, RatFunc(1));
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        r = r * reduce(table[static_cast<unsigned char>(*it)]);
    std::lock_guard<std::mutex> lock(mu_);
    s_memo_[slot].emplace(w, r);
    return r;
}

NcElement AlgebraPresentation::antipode(const NcElement& x, bool inverse) const
{
    NcElement r(*this);
    for (const auto& [w, c] : x.terms())
        r += c * antipode(w, inverse);
    return r;
}

std::pair<int, int> rewrite_order_key(const AlgebraPresentation& a, const Word& w)
{
    int weight = 0;
    int inversions = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        weight += a.generator(static_cast<unsigned char>(w[i])).weight;
        for (std::size_t j = i + 1; j < w.size(); ++j)
            inversions += a.generator(static_cast<unsigned char>(w[i])).rank > a.generator(static_cast<unsigned char>(w[j])).rank;
    }
    return {weight, inversions};
}

// ------------------------------------------------------------ checks

namespace {

LinComb relation_of(const RewriteRule& r)
{
    LinComb l;
    accumulate(l, r.lhs, RatFunc(1));
    accumulate(l, r.rhs, RatFunc(-1));
    return l;
}

}  // namespace

Report verify_presentation(const AlgebraPresentation& a, const PresentationCheckOptions& opt)
{
    Report rep("presentation " + a.name());

    for (const auto& r : a.rules()) {
        auto lk = rewrite_order_key(a, r.lhs);
        bool ok = true;
        for (const auto& [w, c] : r.rhs)
            ok = ok && rewrite_order_key(a, w) < lk;
        rep.expect(ok, "termination order decreases for " + a.word_str(r.lhs), a.word_str(r.lhs));
    }

    // overlaps xyz with xy and yz both left-hand sides
    int overlaps = 0;
    std::string overlap_witness;
    for (const auto& r1 : a.rules())
        for (const auto& r2 : a.rules()) {
            if (r1.lhs[1] != r2.lhs[0])
                continue;
            ++overlaps;
            Word w = r1.lhs + r2.lhs.substr(1);
            LinComb left, right;
            for (const auto& [u, c] : r1.rhs)
                accumulate(left, a.normal_form(u + w.substr(2)), c);
            for (const auto& [u, c] : r2.rhs)
                accumulate(right, a.normal_form(w.substr(0, 1) + u), c);
            if (left != right && overlap_witness.empty())
                overlap_witness = a.word_str(w) + ": " + a.reduce(left).str() + " vs " + a.reduce(right).str();
        }
    rep.expect(overlap_witness.empty(), "overlap ambiguities resolve (" + std::to_string(overlaps) + " overlaps)",
               overlap_witness);

    std::string strategy_witness;
    std::vector<Word> layer{Word()};
    for (int len = 1; len <= opt.strategy_word_length && strategy_witness.empty(); ++len) {
        std::vector<Word> next;
        for (const auto& w : layer)
            for (int g = 0; g < a.generator_count(); ++g)
                next.push_back(w + static_cast<char>(g));
        for (const auto& w : next)
            if (a.normal_form(w, Strategy::Leftmost) != a.normal_form(w, Strategy::Rightmost)) {
                strategy_witness = a.word_str(w);
                break;
            }
        layer = std::move(next);
    }
    rep.expect(strategy_witness.empty(),
               "leftmost and rightmost reduction agree on words of length <= " + std::to_string(opt.strategy_word_length),
               strategy_witness);

    if (!a.has_hopf())
        return rep;

    // Hopf maps kill every relation
    for (const auto& r : a.rules()) {
        LinComb rel = relation_of(r);
        std::string name = a.word_str(r.lhs);
        Tensor dr = a.coproduct_free(rel);
        rep.expect(dr.is_zero(), "coproduct respects relation " + name, dr.str());
        RatFunc er;
        for (const auto& [w, c] : rel)
            er += c * a.counit(w);
        rep.expect(er.is_zero(), "counit respects relation " + name, er.str());
        for (bool inv : {false, true}) {
            NcElement sr(a);
            for (const auto& [w, c] : rel)
                sr += c * a.antipode(w, inv);
            rep.expect(sr.is_zero(), std::string(inv ? "inverse antipode" : "antipode") + " respects relation " + name,
                       sr.str());
        }
    }

    const AlgebraPresentation* A = &a;
    Tensor::Legs two{A, A};
    Tensor::Legs three{A, A, A};
    auto delta = [A](const Word& w) { return A->coproduct(w); };
    auto eps = [A](const Word& w) { return Tensor::pure({}, {}, A->counit(w)); };
    auto s_leg = [A](const Word& w) { return Tensor::from(A->antipode(w)); };

    std::string coassoc_w, counit_w, antipode_w, inverse_w;
    for (const auto& w : a.enumerate_basis(opt.hopf_word_length)) {
        Tensor d = a.coproduct(w);
        std::string ws = a.word_str(w);
        if (coassoc_w.empty() && d.map_leg(0, two, delta) != d.map_leg(1, two, delta))
            coassoc_w = ws;
        Tensor x = Tensor::pure({A}, {w});
        if (counit_w.empty() && (d.map_leg(0, {}, eps) != x || d.map_leg(1, {}, eps) != x))
            counit_w = ws;
        Tensor unit = Tensor::pure({A}, {Word()}, a.counit(w));
        if (antipode_w.empty()
            && (d.map_leg(0, {A}, s_leg).multiply_legs(0) != unit || d.map_leg(1, {A}, s_leg).multiply_legs(0) != unit))
            antipode_w = ws;
        NcElement xe = NcElement::word(a, w);
        if (inverse_w.empty()
            && (a.antipode(a.antipode(xe), true) != xe || a.antipode(a.antipode(xe, true)) != xe))
            inverse_w = ws;
    }
    std::string range = " on basis words of length <= " + std::to_string(opt.hopf_word_length);
    rep.expect(coassoc_w.empty(), "coassociativity" + range, coassoc_w);
    rep.expect(counit_w.empty(), "counit law" + range, counit_w);
    rep.expect(antipode_w.empty(), "antipode law" + range, antipode_w);
    rep.expect(inverse_w.empty(), "inverse antipode" + range, inverse_w);
    return rep;
}

// ------------------------------------------------------------ builders

namespace {

using TensorTable = std::map<std::pair<Word, Word>, RatFunc>;

}  // namespace

AlgebraPtr make_slq2(const std::function<void(HopfData&)>& tweak)
{
    auto a = std::make_shared<AlgebraPresentation>("A(SL_q(2))");
    // ranks put a < d < b < c so that normal words are a^i b^j c^k or d^l b^j c^k
    a->add_generator({"a", {"alpha"}, 1, 0, 1});
    a->add_generator({"b", {"beta"}, -1, 2, 0});
    a->add_generator({"c", {"gamma"}, 1, 3, 0});
    a->add_generator({"d", {"delta"}, -1, 1, 1});
    a->add_rule("b*a", "q^-1*a*b");
    a->add_rule("c*a", "q^-1*a*c");
    a->add_rule("c*b", "b*c");
    a->add_rule("b*d", "q*d*b");
    a->add_rule("c*d", "q*d*c");
    a->add_rule("a*d", "1 + q*b*c");
    a->add_rule("d*a", "1 + q^-1*b*c");

    const Word A("\0", 1), B("\1", 1), C("\2", 1), D("\3", 1);
    HopfData h;
    h.coproduct = {
        TensorTable{{{A, A}, 1}, {{B, C}, 1}},
        TensorTable{{{A, B}, 1}, {{B, D}, 1}},
        TensorTable{{{C, A}, 1}, {{D, C}, 1}},
        TensorTable{{{D, D}, 1}, {{C, B}, 1}},
    };
    h.counit = {1, 0, 0, 1};
    h.antipode = {a->parse_free("d"), a->parse_free("-q^-1*b"), a->parse_free("-q*c"), a->parse_free("a")};
    h.antipode_inverse = {a->parse_free("d"), a->parse_free("-q*b"), a->parse_free("-q^-1*c"), a->parse_free("a")};
    if (tweak)
        tweak(h);
    a->set_hopf(std::move(h));
    return a;
}

AlgebraPtr make_laurent()
{
    auto h = std::make_shared<AlgebraPresentation>("k[z,z^-1]");
    h->add_generator({"z", {}, 1, 0, 1});
    h->add_generator({"zi", {}, -1, 1, 1});
    h->set_inverse(0, 1);
    h->add_rule("z*zi", "1");
    h->add_rule("zi*z", "1");
    const Word Z("\0", 1), ZI("\1", 1);
    HopfData d;
    d.coproduct = {TensorTable{{{Z, Z}, 1}}, TensorTable{{{ZI, ZI}, 1}}};
    d.counit = {1, 1};
    d.antipode = {h->parse_free("zi"), h->parse_free("z")};
    d.antipode_inverse = d.antipode;
    h->set_hopf(std::move(d));
    const AlgebraPresentation* hp = h.get();
    h->set_basis_order([hp](const Word& x, const Word& y) { return hp->zdegree(x) < hp->zdegree(y); });
    return h;
}

AlgebraPtr make_torus()
{
    auto h = std::make_shared<AlgebraPresentation>("k[z,z^-1,w,w^-1]");
    h->add_generator({"z", {}, 1, 0, 1});
    h->add_generator({"zi", {}, -1, 1, 1});
    h->add_generator({"w", {}, 0, 2, 1});
    h->add_generator({"wi", {}, 0, 3, 1});
    h->set_inverse(0, 1);
    h->set_inverse(2, 3);
    h->add_rule("z*zi", "1");
    h->add_rule("zi*z", "1");
    h->add_rule("w*wi", "1");
    h->add_rule("wi*w", "1");
    h->add_rule("w*z", "z*w");
    h->add_rule("w*zi", "zi*w");
    h->add_rule("wi*z", "z*wi");
    h->add_rule("wi*zi", "zi*wi");
    HopfData d;
    for (int g = 0; g < 4; ++g) {
        const Word x(1, static_cast<char>(g));
        d.coproduct.push_back(TensorTable{{{x, x}, 1}});
        d.counit.push_back(1);
    }
    d.antipode = {h->parse_free("zi"), h->parse_free("z"), h->parse_free("wi"), h->parse_free("w")};
    d.antipode_inverse = d.antipode;
    h->set_hopf(std::move(d));
    return h;
}

// ----------------------------------------------------------- AlgebraMap

AlgebraMap::AlgebraMap(const AlgebraPresentation& src, Tensor::Legs target, std::vector<Tensor> images)
    : src_(&src), target_(std::move(target)), images_(std::move(images))
{
    if (static_cast<int>(images_.size()) != src.generator_count())
        throw std::invalid_argument("algebra map needs one image per generator");
}

Tensor AlgebraMap::apply(const Word& w) const
{
    Tensor t = Tensor::pure(target_, Tensor::Key(target_.size()));
    for (char c : w)
        t = t * images_[static_cast<unsigned char>(c)];
    return t;
}

Tensor AlgebraMap::apply(const NcElement& x) const
{
    Tensor t(target_);
    for (const auto& [w, c] : x.terms())
        t += c * apply(w);
    return t;
}

Tensor AlgebraMap::apply_free(const LinComb& l) const
{
    Tensor t(target_);
    for (const auto& [w, c] : l)
        t += c * apply(w);
    return t;
}

Report AlgebraMap::check_relations() const
{
    Report rep("algebra map relations");
    for (const auto& r : src_->rules()) {
        Tensor img = apply_free(relation_of(r));
        rep.expect(img.is_zero(), "relation " + src_->word_str(r.lhs) + " maps to zero", img.str());
    }
    return rep;
}

AlgebraMap make_pi(const AlgebraPresentation& x, const AlgebraPresentation& h)
{
    Tensor::Legs legs{&h};
    std::vector<Tensor> img = {
        Tensor::from(NcElement::parse(h, "z")),
        Tensor(legs),
        Tensor(legs),
        Tensor::from(NcElement::parse(h, "zi")),
    };
    return AlgebraMap(x, legs, img);
}

AlgebraMap make_rho(const AlgebraPresentation& x, const AlgebraPresentation& h)
{
    AlgebraMap pi = make_pi(x, h);
    Tensor::Legs legs{&x, &h};
    std::vector<Tensor> img;
    for (int g = 0; g < x.generator_count(); ++g) {
        Tensor d = x.coproduct(Word(1, static_cast<char>(g)));
        img.push_back(d.map_leg(1, {&h}, [&pi](const Word& w) { return pi.apply(w); }));
    }
    return AlgebraMap(x, legs, img);
}

}  // namespace ncfib
