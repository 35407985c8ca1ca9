#include "ncfib/calculus.hpp"

#include "ncfib/expr.hpp"

#include <algorithm>
#include <sstream>

namespace ncfib {

namespace {

void add_to(std::map<FormWord, RatFunc>& m, const FormWord& w, const RatFunc& c)
{
    if (c.is_zero())
        return;
    auto [it, inserted] = m.try_emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero())
            m.erase(it);
    }
}

void add_to(FormComb& m, const FormKey& k, const RatFunc& c)
{
    if (c.is_zero())
        return;
    auto [it, inserted] = m.try_emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero())
            m.erase(it);
    }
}

std::vector<FormWord> all_words(int n, int k)
{
    std::vector<FormWord> out{FormWord()};
    for (int i = 0; i < k; ++i) {
        std::vector<FormWord> next;
        for (const auto& w : out)
            for (int s = 0; s < n; ++s)
                next.push_back(w + static_cast<char>(s));
        out = std::move(next);
    }
    return out;
}

// Mixed words: generators as g, symbols as kSymbolBase + s.
constexpr int kSymbolBase = 64;

struct MixedComb {
    std::map<std::string, RatFunc> terms;
    MixedComb& operator+=(const MixedComb& b)
    {
        for (const auto& [w, c] : b.terms)
            add_to(terms, w, c);
        return *this;
    }
    friend MixedComb operator+(MixedComb a, const MixedComb& b) { return a += b; }
    friend MixedComb operator-(MixedComb a, const MixedComb& b) { return a + (-b); }
    MixedComb operator-() const
    {
        MixedComb r;
        for (const auto& [w, c] : terms)
            r.terms.emplace(w, -c);
        return r;
    }
    friend MixedComb operator*(const MixedComb& a, const MixedComb& b)
    {
        MixedComb r;
        for (const auto& [u, c] : a.terms)
            for (const auto& [v, d] : b.terms)
                add_to(r.terms, u + v, c * d);
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

MixedComb mixed_scalar(const RatFunc& c)
{
    MixedComb m;
    add_to(m.terms, std::string(), c);
    return m;
}

MixedComb mixed_token(char t)
{
    MixedComb m;
    m.terms.emplace(std::string(1, t), RatFunc(1));
    return m;
}

MixedComb parse_mixed(std::string_view text, const AlgebraPresentation& alg, const Calculus* calc,
                      const std::vector<FormSymbol>* symbols)
{
    ExprOps<MixedComb> ops;
    ops.integer = [](const std::string& s) { return mixed_scalar(RatFunc(Rational(mpz_class(s)))); };
    ops.symbol = [&](const std::string& s) {
        if (s == "q")
            return mixed_scalar(RatFunc::q());
        if (auto g = alg.find_generator(s))
            return mixed_token(static_cast<char>(*g));
        const auto& syms = calc ? std::vector<FormSymbol>() : *symbols;
        if (calc) {
            if (auto k = calc->find_symbol(s))
                return mixed_token(static_cast<char>(kSymbolBase + *k));
        }
        else {
            for (std::size_t i = 0; i < syms.size(); ++i)
                if (syms[i].name == s)
                    return mixed_token(static_cast<char>(kSymbolBase + i));
        }
        throw ParseError("unknown symbol '" + s + "'");
    };
    ops.divide = [](const MixedComb& a, const MixedComb& b) {
        auto s = b.as_scalar();
        if (!s)
            throw ParseError("division by a non-scalar");
        return a * mixed_scalar(s->inv());
    };
    ops.power = [&alg](const MixedComb& a, int k) {
        MixedComb base = a;
        if (k < 0) {
            auto s = a.as_scalar();
            if (s)
                base = mixed_scalar(s->inv());
            else if (a.terms.size() == 1 && a.terms.begin()->first.size() == 1
                     && static_cast<unsigned char>(a.terms.begin()->first[0]) < kSymbolBase
                     && a.terms.begin()->second == RatFunc(1)
                     && alg.inverse_of(static_cast<unsigned char>(a.terms.begin()->first[0])) >= 0)
                base = mixed_token(static_cast<char>(alg.inverse_of(static_cast<unsigned char>(a.terms.begin()->first[0]))));
            else
                throw ParseError("negative power of a non-invertible element");
            k = -k;
        }
        MixedComb r = mixed_scalar(RatFunc(1));
        for (int i = 0; i < k; ++i)
            r = r * base;
        return r;
    };
    return evaluate(text, ops);
}

std::map<FormWord, RatFunc> symbols_only(const MixedComb& m)
{
    std::map<FormWord, RatFunc> out;
    for (const auto& [w, c] : m.terms) {
        FormWord f;
        for (char t : w) {
            if (static_cast<unsigned char>(t) < kSymbolBase)
                throw ParseError("wedge relations may only involve form symbols");
            f.push_back(static_cast<char>(t - kSymbolBase));
        }
        add_to(out, f, c);
    }
    return out;
}

}  // namespace

// -------------------------------------------------------- ExteriorAlgebra

ExteriorAlgebra::ExteriorAlgebra(int symbols, std::vector<std::map<FormWord, RatFunc>> relations, int max_degree)
    : n_(symbols), max_degree_(max_degree), relations_(std::move(relations))
{
    for (int k = 0; k <= max_degree_; ++k) {
        std::vector<FormWord> words = all_words(n_, k);
        // index 0 is the lex-largest word, so the largest word of each relation is eliminated
        std::vector<FormWord> by_index(words.rbegin(), words.rend());
        std::unordered_map<FormWord, int> idx;
        for (int i = 0; i < static_cast<int>(by_index.size()); ++i)
            idx[by_index[i]] = i;
        RowSpace<RatFunc> rs;
        if (k >= 2) {
            for (const auto& rel : relations_)
                for (int a = 0; a <= k - 2; ++a)
                    for (const auto& u : all_words(n_, a))
                        for (const auto& v : all_words(n_, k - 2 - a)) {
                            std::map<int, RatFunc> row;
                            for (const auto& [w, c] : rel)
                                row[idx.at(u + w + v)] += c;
                            rs.insert(SparseVec<RatFunc>::from_map(row));
                        }
        }
        std::vector<FormWord> basis;
        for (const auto& w : words)
            if (!rs.rows().count(idx.at(w)))
                basis.push_back(w);
        basis_.push_back(basis);
        for (const auto& w : words) {
            SparseVec<RatFunc> r = rs.reduce(SparseVec<RatFunc>::unit(idx.at(w)));
            std::map<FormWord, RatFunc> red;
            for (const auto& [i, c] : r.entries())
                red.emplace(by_index[i], c);
            reduction_.emplace(w, std::move(red));
        }
    }
}

const std::vector<FormWord>& ExteriorAlgebra::basis(int degree) const
{
    if (degree < 0 || degree > max_degree_)
        throw DegreeOverflow("form degree " + std::to_string(degree) + " is beyond the implemented degree "
                             + std::to_string(max_degree_));
    return basis_[degree];
}

const std::map<FormWord, RatFunc>& ExteriorAlgebra::reduce(const FormWord& w) const
{
    auto it = reduction_.find(w);
    if (it == reduction_.end())
        throw DegreeOverflow("form degree " + std::to_string(w.size()) + " is beyond the implemented degree "
                             + std::to_string(max_degree_));
    return it->second;
}

bool ExteriorAlgebra::is_basis_word(const FormWord& w) const
{
    const auto& r = reduce(w);
    return r.size() == 1 && r.begin()->first == w;
}

// ------------------------------------------------------------ FormElement

RatFunc FormElement::coeff(const Word& w, const FormWord& f) const
{
    auto it = terms_.find({w, f});
    return it == terms_.end() ? RatFunc() : it->second;
}

std::optional<int> FormElement::zdegree() const
{
    std::optional<int> deg;
    for (const auto& [k, c] : terms_) {
        int z = calc_->algebra().zdegree(k.first) + calc_->zdegree(k.second);
        if (deg && *deg != z)
            return std::nullopt;
        deg = z;
    }
    return deg.value_or(0);
}

int FormElement::max_word_length() const
{
    int m = -1;
    for (const auto& [k, c] : terms_)
        m = std::max(m, static_cast<int>(k.first.size()));
    return m;
}

std::string FormElement::str() const
{
    if (!calc_)
        return "0";
    std::vector<FormKey> keys;
    for (const auto& [k, c] : terms_)
        keys.push_back(k);
    const auto& alg = calc_->algebra();
    std::sort(keys.begin(), keys.end(), [&alg](const FormKey& a, const FormKey& b) {
        if (a.second != b.second)
            return a.second < b.second;
        return alg.basis_less(a.first, b.first);
    });
    std::vector<std::pair<RatFunc, std::string>> parts;
    for (const auto& k : keys) {
        std::string body = k.first.empty() ? std::string() : alg.word_str(k.first);
        if (!k.second.empty())
            body += (body.empty() ? "" : "*") + calc_->form_word_str(k.second);
        parts.emplace_back(terms_.at(k), body);
    }
    return format_linear(parts);
}

void FormElement::add(const FormKey& k, const RatFunc& c) { add_to(terms_, k, c); }

FormElement& FormElement::operator+=(const FormElement& b)
{
    if (!calc_) {
        calc_ = b.calc_;
        degree_ = b.degree_;
    }
    if (!b.terms_.empty() && !terms_.empty() && b.degree_ != degree_)
        throw std::invalid_argument("adding forms of different degrees");
    if (terms_.empty())
        degree_ = b.degree_;
    for (const auto& [k, c] : b.terms_)
        add_to(terms_, k, c);
    return *this;
}

FormElement& FormElement::operator-=(const FormElement& b) { return *this += -b; }

FormElement FormElement::operator-() const { return RatFunc(-1) * *this; }

FormElement operator*(const RatFunc& c, FormElement a)
{
    if (c.is_zero()) {
        a.terms_.clear();
        return a;
    }
    for (auto& [k, v] : a.terms_)
        v *= c;
    return a;
}

// --------------------------------------------------------------- Calculus

Calculus::Calculus(std::string name, AlgebraPtr algebra, std::vector<FormSymbol> symbols)
    : name_(std::move(name)), alg_(std::move(algebra)), symbols_(std::move(symbols))
{
    int g = alg_->generator_count();
    int n = symbol_count();
    d_gen_.assign(g, FormElement(*this, 1));
    comm_.assign(n, std::vector<FormElement>(g, FormElement(*this, 1)));
    mc_.assign(n, std::nullopt);
    ext_ = ExteriorAlgebra(n, {}, 1);
}

void Calculus::clear_caches()
{
    std::lock_guard<std::mutex> lock(mu_);
    move_memo_.clear();
    d_word_memo_.clear();
    d_form_memo_.clear();
}

void Calculus::set_d(int generator, std::string_view text)
{
    d_gen_[generator] = parse(text);
    if (d_gen_[generator].degree() != 1 && !d_gen_[generator].is_zero())
        throw ParseError("d of a generator must be a 1-form");
    d_gen_[generator] = FormElement(*this, 1) + d_gen_[generator];
    clear_caches();
}

void Calculus::set_comm(int symbol, int generator, std::string_view text)
{
    comm_[symbol][generator] = FormElement(*this, 1) + parse(text);
    clear_caches();
}

void Calculus::add_wedge_relation(std::string_view lhs, std::string_view rhs)
{
    auto l = symbols_only(parse_mixed(lhs, *alg_, nullptr, &symbols_));
    auto r = symbols_only(parse_mixed(rhs, *alg_, nullptr, &symbols_));
    for (const auto& [w, c] : r)
        add_to(l, w, -c);
    add_wedge_relation(std::move(l));
}

void Calculus::add_wedge_relation(std::map<FormWord, RatFunc> relation)
{
    for (const auto& [w, c] : relation)
        if (w.size() != 2)
            throw std::invalid_argument("wedge relations must be quadratic");
    wedge_rel_.push_back(std::move(relation));
}

void Calculus::finalize(int max_degree)
{
    ext_ = ExteriorAlgebra(symbol_count(), wedge_rel_, max_degree);
    clear_caches();
}

void Calculus::set_mc(int symbol, std::string_view text) { set_mc(symbol, parse(text)); }

void Calculus::set_mc(int symbol, const FormElement& value)
{
    mc_[symbol] = FormElement(*this, 2) + value;
    clear_caches();
}

std::optional<int> Calculus::find_symbol(std::string_view name) const
{
    for (int i = 0; i < symbol_count(); ++i)
        if (symbols_[i].name == name)
            return i;
    return std::nullopt;
}

std::string Calculus::form_word_str(const FormWord& f) const
{
    std::string s;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i)
            s += "*";
        s += symbols_[static_cast<unsigned char>(f[i])].name;
    }
    return s;
}

int Calculus::zdegree(const FormWord& f) const
{
    int z = 0;
    for (char c : f)
        z += symbols_[static_cast<unsigned char>(c)].zdeg;
    return z;
}

FormElement Calculus::one() const { return term(Word(), FormWord()); }

FormElement Calculus::from_algebra(const NcElement& x) const
{
    FormElement f(*this, 0);
    for (const auto& [w, c] : x.terms())
        f.add({w, FormWord()}, c);
    return f;
}

FormElement Calculus::term(const Word& w, const FormWord& f, const RatFunc& c) const
{
    FormElement out(*this, static_cast<int>(f.size()));
    LinComb nf = w.size() > 1 ? alg_->normal_form(w) : LinComb{{w, RatFunc(1)}};
    const auto& red = ext_.reduce(f);
    for (const auto& [u, a] : nf)
        for (const auto& [v, b] : red)
            out.add({u, v}, c * a * b);
    return out;
}

FormElement Calculus::symbol_form(int s) const { return term(Word(), FormWord(1, static_cast<char>(s))); }

FormElement Calculus::parse(std::string_view text) const
{
    MixedComb m = parse_mixed(text, *alg_, this, nullptr);
    std::optional<FormElement> out;
    for (const auto& [w, c] : m.terms) {
        FormElement acc = one();
        for (char t : w) {
            auto u = static_cast<unsigned char>(t);
            acc = wedge(acc, u >= kSymbolBase ? symbol_form(u - kSymbolBase) : term(Word(1, t), FormWord()));
        }
        acc = c * acc;
        if (!out)
            out = acc;
        else
            *out += acc;
    }
    return out.value_or(zero(0));
}

FormComb Calculus::move(const FormWord& f, const Word& y) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = move_memo_.find({f, y});
        if (it != move_memo_.end())
            return it->second;
    }
    FormComb out;
    if (y.empty()) {
        for (const auto& [v, c] : ext_.reduce(f))
            add_to(out, {Word(), v}, c);
    }
    else if (f.empty()) {
        for (const auto& [u, c] : alg_->normal_form(y))
            add_to(out, {u, FormWord()}, c);
    }
    else if (y.size() == 1) {
        auto s = static_cast<unsigned char>(f.back());
        auto g = static_cast<unsigned char>(y[0]);
        FormWord head = f.substr(0, f.size() - 1);
        const FormElement& rule = comm_[s][g];
        for (const auto& [k, c] : rule.terms()) {
            for (const auto& [k2, e] : move(head, k.first))
                for (const auto& [v, r] : ext_.reduce(k2.second + k.second))
                    add_to(out, {k2.first, v}, c * e * r);
        }
    }
    else {
        for (const auto& [k, c] : move(f, y.substr(0, 1)))
            for (const auto& [k2, e] : move(k.second, y.substr(1))) {
                for (const auto& [u, a] : alg_->normal_form(k.first + k2.first))
                    add_to(out, {u, k2.second}, c * e * a);
            }
    }
    std::lock_guard<std::mutex> lock(mu_);
    move_memo_.emplace(std::make_pair(f, y), out);
    return out;
}

FormElement Calculus::wedge(const FormElement& a, const FormElement& b) const
{
    int deg = a.degree() + b.degree();
    if (deg > max_degree())
        throw DegreeOverflow("wedge product of degree " + std::to_string(deg) + " exceeds the implemented degree "
                             + std::to_string(max_degree()) + " of " + name_);
    FormElement out(*this, deg);
    for (const auto& [ka, c] : a.terms())
        for (const auto& [kb, e] : b.terms()) {
            for (const auto& [km, f] : move(ka.second, kb.first)) {
                LinComb xy = ka.first.empty() || km.first.empty() ? LinComb{{ka.first + km.first, RatFunc(1)}}
                                                                  : alg_->normal_form(ka.first + km.first);
                const auto& red = ext_.reduce(km.second + kb.second);
                for (const auto& [u, g] : xy)
                    for (const auto& [v, h] : red)
                        out.add({u, v}, c * e * f * g * h);
            }
        }
    return out;
}

FormElement Calculus::d_word(const Word& w) const
{
    if (w.empty())
        return zero(1);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = d_word_memo_.find(w);
        if (it != d_word_memo_.end())
            return it->second;
    }
    auto g = static_cast<unsigned char>(w[0]);
    Word rest = w.substr(1);
    FormElement out = wedge(d_gen_[g], term(rest, FormWord()));
    if (!rest.empty())
        out += wedge(term(w.substr(0, 1), FormWord()), d_word(rest));
    std::lock_guard<std::mutex> lock(mu_);
    d_word_memo_.emplace(w, out);
    return out;
}

FormElement Calculus::d_form_word(const FormWord& f) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = d_form_memo_.find(f);
        if (it != d_form_memo_.end())
            return it->second;
    }
    auto s = static_cast<unsigned char>(f[0]);
    if (!mc_[s])
        throw DegreeOverflow("no exterior derivative recorded for symbol " + symbols_[s].name + " in " + name_);
    FormElement out(*this, static_cast<int>(f.size()) + 1);
    if (f.size() == 1) {
        out = *mc_[s];
    }
    else {
        FormWord rest = f.substr(1);
        out = wedge(*mc_[s], term(Word(), rest)) - wedge(symbol_form(s), d_form_word(rest));
    }
    std::lock_guard<std::mutex> lock(mu_);
    d_form_memo_.emplace(f, out);
    return out;
}

FormElement Calculus::d(const FormElement& a) const
{
    if (a.degree() + 1 > max_degree())
        throw DegreeOverflow("exterior derivative of a " + std::to_string(a.degree())
                             + "-form exceeds the implemented degree of " + name_);
    FormElement out(*this, a.degree() + 1);
    for (const auto& [k, c] : a.terms()) {
        if (k.second.empty()) {
            out += c * d_word(k.first);
            continue;
        }
        FormElement t = wedge(d_word(k.first), term(Word(), k.second));
        t += wedge(term(k.first, FormWord()), d_form_word(k.second));
        out += c * t;
    }
    return out;
}

std::vector<FormKey> Calculus::truncate_component(int n, int N, std::optional<int> zdeg) const
{
    std::vector<FormKey> out;
    auto words = alg_->enumerate_basis(N);
    for (const auto& f : ext_.basis(n))
        for (const auto& w : words)
            if (!zdeg || alg_->zdegree(w) + zdegree(f) == *zdeg)
                out.emplace_back(w, f);
    return out;
}

namespace {

std::string algebra_id(const AlgebraPresentation& a)
{
    if (&a == shared_algebra("slq2").get())
        return "slq2";
    if (&a == shared_algebra("laurent").get())
        return "laurent";
    if (&a == shared_algebra("torus").get())
        return "torus";
    return a.name();
}

}  // namespace

std::string Calculus::serialize() const
{
    std::ostringstream os;
    os << "calculus " << name_ << "\n";
    os << "algebra " << algebra_id(*alg_) << "\n";
    os << "max_degree " << max_degree() << "\n";
    for (const auto& s : symbols_)
        os << "symbol " << s.name << " " << s.zdeg << "\n";
    for (int g = 0; g < alg_->generator_count(); ++g)
        os << "d " << alg_->generator(g).name << " = " << d_gen_[g].str() << "\n";
    for (int s = 0; s < symbol_count(); ++s)
        for (int g = 0; g < alg_->generator_count(); ++g)
            os << "comm " << symbols_[s].name << "*" << alg_->generator(g).name << " = " << comm_[s][g].str() << "\n";
    for (const auto& rel : wedge_rel_) {
        // largest word on the left with unit coefficient
        const auto& [lead, lc] = *rel.rbegin();
        std::vector<std::pair<RatFunc, std::string>> rhs;
        for (const auto& [w, c] : rel)
            if (w != lead)
                rhs.emplace_back(-c / lc, form_word_str(w));
        os << "wedge " << form_word_str(lead) << " = " << format_linear(rhs) << "\n";
    }
    for (int s = 0; s < symbol_count(); ++s)
        if (mc_[s])
            os << "mc " << symbols_[s].name << " = " << mc_[s]->str() << "\n";
    return os.str();
}

// ---------------------------------------------------------------- parsing

AlgebraPtr shared_algebra(std::string_view id)
{
    static const AlgebraPtr slq2 = make_slq2();
    static const AlgebraPtr laurent = make_laurent();
    static const AlgebraPtr torus = make_torus();
    if (id == "slq2")
        return slq2;
    if (id == "laurent")
        return laurent;
    if (id == "torus")
        return torus;
    throw std::invalid_argument("unknown algebra id '" + std::string(id) + "'");
}

namespace {

std::string trim(std::string_view s)
{
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos)
        return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

std::pair<std::string, std::string> split_eq(const std::string& s)
{
    auto p = s.find('=');
    if (p == std::string::npos)
        throw ParseError("expected '=' in: " + s);
    return {trim(s.substr(0, p)), trim(s.substr(p + 1))};
}

}  // namespace

CalculusPtr parse_calculus(std::string_view text, AlgebraPtr algebra)
{
    std::string name;
    std::string alg_id;
    int max_degree = 1;
    std::vector<FormSymbol> symbols;
    std::vector<std::string> d_lines, comm_lines, wedge_lines, mc_lines;

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty())
            continue;
        auto sp = line.find(' ');
        std::string key = line.substr(0, sp);
        std::string rest = sp == std::string::npos ? std::string() : trim(line.substr(sp + 1));
        if (key == "calculus")
            name = rest;
        else if (key == "algebra")
            alg_id = rest;
        else if (key == "max_degree")
            max_degree = std::stoi(rest);
        else if (key == "symbol") {
            std::istringstream ss(rest);
            FormSymbol s;
            ss >> s.name >> s.zdeg;
            symbols.push_back(s);
        }
        else if (key == "d")
            d_lines.push_back(rest);
        else if (key == "comm")
            comm_lines.push_back(rest);
        else if (key == "wedge")
            wedge_lines.push_back(rest);
        else if (key == "mc")
            mc_lines.push_back(rest);
        else
            throw ParseError("unknown calculus directive '" + key + "'");
    }
    if (!algebra)
        algebra = shared_algebra(alg_id);
    auto calc = std::make_shared<Calculus>(name, algebra, symbols);
    const auto& alg = *algebra;
    for (const auto& l : d_lines) {
        auto [lhs, rhs] = split_eq(l);
        auto g = alg.find_generator(lhs);
        if (!g)
            throw ParseError("unknown generator in d line: " + l);
        calc->set_d(*g, rhs);
    }
    for (const auto& l : comm_lines) {
        auto [lhs, rhs] = split_eq(l);
        auto star = lhs.find('*');
        if (star == std::string::npos)
            throw ParseError("comm lines need symbol*generator: " + l);
        auto s = calc->find_symbol(trim(lhs.substr(0, star)));
        auto g = alg.find_generator(trim(lhs.substr(star + 1)));
        if (!s || !g)
            throw ParseError("bad comm line: " + l);
        calc->set_comm(*s, *g, rhs);
    }
    for (const auto& l : wedge_lines) {
        auto [lhs, rhs] = split_eq(l);
        calc->add_wedge_relation(lhs, rhs);
    }
    calc->finalize(max_degree);
    for (const auto& l : mc_lines) {
        auto [lhs, rhs] = split_eq(l);
        auto s = calc->find_symbol(lhs);
        if (!s)
            throw ParseError("unknown symbol in mc line: " + l);
        calc->set_mc(*s, rhs);
    }
    return calc;
}

std::string calculus_text_3d()
{
    return R"(calculus 3d
algebra slq2
max_degree 4
symbol w0 -2
symbol w1 0
symbol w2 2
d a = a*w1 - q*b*w2
d b = a*w0 - q^2*b*w1
d c = c*w1 - q*d*w2
d d = c*w0 - q^2*d*w1
comm w0*a = q^-1*a*w0
comm w0*b = q*b*w0
comm w0*c = q^-1*c*w0
comm w0*d = q*d*w0
comm w1*a = q^-2*a*w1
comm w1*b = q^2*b*w1
comm w1*c = q^-2*c*w1
comm w1*d = q^2*d*w1
comm w2*a = q^-1*a*w2
comm w2*b = q*b*w2
comm w2*c = q^-1*c*w2
comm w2*d = q*d*w2
wedge w0*w0 = 0
wedge w1*w1 = 0
wedge w2*w2 = 0
wedge w2*w0 = -q^2*w0*w2
wedge w1*w0 = -q^4*w0*w1
wedge w2*w1 = -q^4*w1*w2
mc w0 = q^2*(q^2 + 1)*w0*w1
mc w1 = q*w0*w2
mc w2 = q^2*(q^2 + 1)*w1*w2
)";
}

std::string calculus_text_4d()
{
    return R"(calculus 4d
algebra slq2
max_degree 1
symbol w1 0
symbol w2 0
symbol wp 2
symbol wm -2
d a = (q - q^-1 - q^-2)/(q + 1)*a*w1 - q^-2*b*wp + q^-1/(q + 1)*a*w2
d b = q/(q + 1)*b*w1 - q^-2*a*wm - q^-2/(q + 1)*b*w2
d c = (q - q^-1 - q^-2)/(q + 1)*c*w1 - q^-2*d*wp + q^-1/(q + 1)*c*w2
d d = q/(q + 1)*d*w1 - q^-2*c*wm - q^-2/(q + 1)*d*w2
comm w2*a = q*a*w2 - (q - q^-1)*b*wp + q*(q - q^-1)^2*a*w1
comm w2*b = q^-1*b*w2 - (q - q^-1)*a*wm
comm w2*c = q*c*w2 - (q - q^-1)*d*wp + q*(q - q^-1)^2*c*w1
comm w2*d = q^-1*d*w2 - (q - q^-1)*c*wm
comm wm*a = a*wm - (q^2 - 1)*b*w1
comm wm*b = b*wm
comm wm*c = c*wm - (q^2 - 1)*d*w1
comm wm*d = d*wm
comm wp*a = a*wp
comm wp*b = b*wp - (q^2 - 1)*a*w1
comm wp*c = c*wp
comm wp*d = d*wp - (q^2 - 1)*c*w1
comm w1*a = q^-1*a*w1
comm w1*b = q*b*w1
comm w1*c = q^-1*c*w1
comm w1*d = q*d*w1
)";
}

std::string calculus_text_h3()
{
    return R"(calculus h3
algebra laurent
max_degree 2
symbol zeta 0
d z = z*zeta
d zi = -q^2*zi*zeta
comm zeta*z = q^-2*z*zeta
comm zeta*zi = q^2*zi*zeta
wedge zeta*zeta = 0
mc zeta = 0
)";
}

std::string calculus_text_torus()
{
    return R"(calculus torus
algebra torus
max_degree 2
symbol zeta 0
symbol eta 0
d z = z*zeta
d zi = -zi*zeta
d w = w*eta
d wi = -wi*eta
comm zeta*z = z*zeta
comm zeta*zi = zi*zeta
comm zeta*w = w*zeta
comm zeta*wi = wi*zeta
comm eta*z = z*eta
comm eta*zi = zi*eta
comm eta*w = w*eta
comm eta*wi = wi*eta
wedge zeta*zeta = 0
wedge eta*eta = 0
wedge eta*zeta = -zeta*eta
mc zeta = 0
mc eta = 0
)";
}

std::string calculus_text_h4()
{
    return R"(calculus h4
algebra laurent
max_degree 2
symbol zeta 0
d z = z*zeta
d zi = -q^-1*zi*zeta
comm zeta*z = q*z*zeta
comm zeta*zi = q^-1*zi*zeta
wedge zeta*zeta = 0
mc zeta = 0
)";
}

CalculusPtr build_3d()
{
    static const CalculusPtr c = parse_calculus(calculus_text_3d());
    return c;
}

CalculusPtr build_4d()
{
    static const CalculusPtr c = parse_calculus(calculus_text_4d());
    return c;
}

CalculusPtr build_h3()
{
    static const CalculusPtr c = parse_calculus(calculus_text_h3());
    return c;
}

CalculusPtr build_torus()
{
    static const CalculusPtr c = parse_calculus(calculus_text_torus());
    return c;
}

CalculusPtr build_h4()
{
    static const CalculusPtr c = parse_calculus(calculus_text_h4());
    return c;
}

// ----------------------------------------------------------------- checks

Report verify_calculus(const Calculus& c, const CalculusCheckOptions& opt)
{
    Report rep("calculus " + c.name());
    const auto& alg = c.algebra();
    auto rel_terms = [](const RewriteRule& r) {
        LinComb l;
        accumulate(l, r.lhs, RatFunc(1));
        accumulate(l, r.rhs, RatFunc(-1));
        return l;
    };

    for (const auto& r : alg.rules()) {
        FormElement dr = c.zero(1);
        for (const auto& [w, k] : rel_terms(r))
            dr += k * c.d_word(w);
        rep.expect(dr.is_zero(), "d respects relation " + alg.word_str(r.lhs), dr.str());
    }
    for (int s = 0; s < c.symbol_count(); ++s)
        for (const auto& r : alg.rules()) {
            FormElement m = c.zero(1);
            for (const auto& [w, k] : rel_terms(r))
                for (const auto& [key, e] : c.move(FormWord(1, static_cast<char>(s)), w))
                    m.add(key, k * e);
            rep.expect(m.is_zero(),
                       "commutation of " + c.symbol(s).name + " respects relation " + alg.word_str(r.lhs), m.str());
        }

    bool have_mc = c.max_degree() >= 2;
    for (int s = 0; s < c.symbol_count(); ++s)
        have_mc = have_mc && c.has_mc(s);
    if (!have_mc) {
        rep.skip("degree two checks", "no degree two data for " + c.name());
        return rep;
    }

    for (const auto& rel : c.wedge_relations()) {
        std::string name;
        for (const auto& [w, k] : rel)
            name = c.form_word_str(w);
        for (int g = 0; g < alg.generator_count(); ++g) {
            FormElement m = c.zero(2);
            for (const auto& [w, k] : rel)
                for (const auto& [key, e] : c.move(w, Word(1, static_cast<char>(g))))
                    m.add(key, k * e);
            rep.expect(m.is_zero(), "wedge relation " + name + " commutes past " + alg.generator(g).name, m.str());
        }
        if (c.max_degree() >= 3) {
            FormElement dr = c.zero(3);
            for (const auto& [w, k] : rel) {
                FormElement a = c.symbol_form(static_cast<unsigned char>(w[0]));
                FormElement b = c.symbol_form(static_cast<unsigned char>(w[1]));
                dr += k * (c.wedge(*c.mc(static_cast<unsigned char>(w[0])), b) - c.wedge(a, *c.mc(static_cast<unsigned char>(w[1]))));
            }
            rep.expect(dr.is_zero(), "d of wedge relation " + name + " vanishes", dr.str());
        }
    }

    for (int s = 0; s < c.symbol_count(); ++s)
        for (int g = 0; g < alg.generator_count(); ++g) {
            FormElement gen = c.term(Word(1, static_cast<char>(g)), FormWord());
            FormElement lhs = c.wedge(*c.mc(s), gen) - c.wedge(c.symbol_form(s), c.d_generator(g));
            FormElement rhs = c.d(c.comm(s, g));
            rep.expect(lhs == rhs, "d compatible with commutation " + c.symbol(s).name + "*" + alg.generator(g).name,
                       (lhs - rhs).str());
        }

    std::string witness;
    for (const auto& w : alg.enumerate_basis(opt.word_length)) {
        FormElement dd = c.d(c.d(c.term(w, FormWord())));
        if (!dd.is_zero() && witness.empty())
            witness = alg.word_str(w) + " -> " + dd.str();
    }
    rep.expect(witness.empty(), "d^2 = 0 on words of length <= " + std::to_string(opt.word_length), witness);
    witness.clear();
    for (int n = 1; n + 2 <= c.max_degree(); ++n)
        for (const auto& f : c.exterior().basis(n)) {
            FormElement dd = c.d(c.d(c.term(Word(), f)));
            if (!dd.is_zero() && witness.empty())
                witness = c.form_word_str(f) + " -> " + dd.str();
        }
    rep.expect(witness.empty(), "d^2 = 0 on invariant form words", witness);
    return rep;
}

// -------------------------------------------------------------- FormBasis

FormBasis::FormBasis(const Calculus& c, int degree, std::vector<FormKey> keys)
    : calc_(&c), degree_(degree), keys_(std::move(keys))
{
    for (int i = 0; i < size(); ++i)
        index_.emplace(keys_[i], i);
}

FormBasis::FormBasis(const Calculus& c, int degree, int N, std::optional<int> zdeg)
    : FormBasis(c, degree, c.truncate_component(degree, N, zdeg))
{
}

std::optional<int> FormBasis::index(const FormKey& k) const
{
    auto it = index_.find(k);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

SparseVec<RatFunc> FormBasis::coords(const FormElement& f) const
{
    std::map<int, RatFunc> m;
    for (const auto& [k, c] : f.terms()) {
        auto it = index_.find(k);
        if (it == index_.end())
            throw std::out_of_range("form term " + calc_->term(k.first, k.second).str() + " outside the truncated basis");
        m.emplace(it->second, c);
    }
    return SparseVec<RatFunc>::from_map(m);
}

FormElement FormBasis::element(const SparseVec<RatFunc>& v) const
{
    FormElement f(*calc_, degree_);
    for (const auto& [i, c] : v.entries())
        f.add(keys_[i], c);
    return f;
}

Matrix<RatFunc> matrix_of(const FormBasis& src, const FormBasis& tgt,
                          const std::function<FormElement(const FormElement&)>& f)
{
    Matrix<RatFunc> m(tgt.size(), src.size());
    for (int j = 0; j < src.size(); ++j)
        m.cols[j] = tgt.coords(f(src.element(SparseVec<RatFunc>::unit(j))));
    return m;
}

}  // namespace ncfib
