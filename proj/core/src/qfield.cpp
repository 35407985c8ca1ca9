#include "ncfib/qfield.hpp"

#include "ncfib/expr.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <utility>

namespace ncfib {

// ---------------------------------------------------------------- Poly

Poly::Poly(mpz_class c)
{
    if (c != 0)
        coeffs_.push_back(std::move(c));
}

Poly::Poly(std::vector<mpz_class> c) : coeffs_(std::move(c)) { trim(); }

Poly Poly::monomial(mpz_class c, int degree)
{
    if (c == 0)
        return Poly();
    std::vector<mpz_class> v(static_cast<std::size_t>(degree) + 1);
    v.back() = std::move(c);
    return Poly(std::move(v));
}

void Poly::trim()
{
    while (!coeffs_.empty() && coeffs_.back() == 0)
        coeffs_.pop_back();
}

mpz_class Poly::content() const
{
    mpz_class g = 0;
    for (const auto& c : coeffs_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g == 1)
            break;
    }
    return g;
}

int Poly::low_order() const
{
    int k = 0;
    while (k < static_cast<int>(coeffs_.size()) && coeffs_[k] == 0)
        ++k;
    return is_zero() ? 0 : k;
}

Poly Poly::shifted_down(int k) const
{
    if (k == 0 || is_zero())
        return *this;
    return Poly(std::vector<mpz_class>(coeffs_.begin() + k, coeffs_.end()));
}

Poly Poly::shifted_up(int k) const
{
    if (k == 0 || is_zero())
        return *this;
    std::vector<mpz_class> v(static_cast<std::size_t>(k));
    v.insert(v.end(), coeffs_.begin(), coeffs_.end());
    return Poly(std::move(v));
}

Poly Poly::primitive_part() const
{
    if (is_zero())
        return *this;
    Poly p = exact_div(*this, content());
    if (p.lead() < 0)
        p = -p;
    return p;
}

Rational Poly::eval(const Rational& x) const
{
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * x + Rational(*it);
    acc.canonicalize();
    return acc;
}

Poly operator+(const Poly& a, const Poly& b)
{
    std::vector<mpz_class> v(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        v[i] = a.coeffs_[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        v[i] += b.coeffs_[i];
    return Poly(std::move(v));
}

Poly Poly::operator-() const
{
    Poly r = *this;
    for (auto& c : r.coeffs_)
        c = -c;
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b)
{
    if (a.is_zero() || b.is_zero())
        return Poly();
    std::vector<mpz_class> v(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.coeffs_[i] == 0)
            continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return Poly(std::move(v));
}

Poly operator*(const mpz_class& c, const Poly& a)
{
    if (c == 0)
        return Poly();
    Poly r = a;
    for (auto& x : r.coeffs_)
        x *= c;
    return r;
}

Poly Poly::exact_div(const Poly& a, const mpz_class& c)
{
    if (c == 1)
        return a;
    Poly r = a;
    for (auto& x : r.coeffs_) {
        if (!mpz_divisible_p(x.get_mpz_t(), c.get_mpz_t()))
            throw ArithmeticError("inexact integer division of polynomial");
        mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
    }
    return r;
}

Poly Poly::exact_div(const Poly& a, const Poly& b)
{
    if (b.is_zero())
        throw ArithmeticError("polynomial division by zero");
    if (b.degree() == 0)
        return exact_div(a, b.lead());
    std::vector<mpz_class> rem = a.coeffs_;
    int db = b.degree();
    int da = a.degree();
    if (da < db) {
        if (a.is_zero())
            return Poly();
        throw ArithmeticError("inexact polynomial division");
    }
    std::vector<mpz_class> quot(static_cast<std::size_t>(da - db) + 1);
    for (int i = da; i >= db; --i) {
        if (rem[i] == 0)
            continue;
        if (!mpz_divisible_p(rem[i].get_mpz_t(), b.lead().get_mpz_t()))
            throw ArithmeticError("inexact polynomial division");
        mpz_class f;
        mpz_divexact(f.get_mpz_t(), rem[i].get_mpz_t(), b.lead().get_mpz_t());
        quot[i - db] = f;
        for (int j = 0; j <= db; ++j)
            rem[i - db + j] -= f * b.coeffs_[j];
    }
    for (const auto& c : rem)
        if (c != 0)
            throw ArithmeticError("inexact polynomial division");
    return Poly(std::move(quot));
}

namespace {

// lc(b)^(deg a - deg b + 1) * a mod b
Poly pseudo_remainder(const Poly& a, const Poly& b)
{
    std::vector<mpz_class> r = a.coeffs();
    int db = b.degree();
    const mpz_class& lb = b.lead();
    for (int i = static_cast<int>(r.size()) - 1; i >= db; --i) {
        mpz_class top = r[i];
        for (auto& c : r)
            c *= lb;
        if (top != 0)
            for (int j = 0; j <= db; ++j)
                r[i - db + j] -= top * b[j];
        r.pop_back();
    }
    Poly out;
    for (int i = static_cast<int>(r.size()) - 1; i >= 0; --i)
        out = out + Poly::monomial(r[i], i);
    return out;
}

}  // namespace

Poly Poly::gcd(const Poly& a, const Poly& b)
{
    if (a.is_zero())
        return b.primitive_part();
    if (b.is_zero())
        return a.primitive_part();
    Poly x = a.primitive_part();
    Poly y = b.primitive_part();
    if (x.degree() < y.degree())
        std::swap(x, y);
    while (!y.is_zero()) {
        if (y.degree() == 0)
            return Poly(mpz_class(1));
        Poly r = pseudo_remainder(x, y);
        x = std::move(y);
        y = r.is_zero() ? Poly() : r.primitive_part();
    }
    return x.primitive_part();
}

// ------------------------------------------------------------- RatFunc

RatFunc::RatFunc() : den_(mpz_class(1)) {}

RatFunc::RatFunc(long n) : num_(mpz_class(n)), den_(mpz_class(1)) {}

RatFunc::RatFunc(const Rational& r) : num_(r.get_num()), den_(r.get_den()) { normalize(); }

RatFunc::RatFunc(Poly num, Poly den, int shift) : num_(std::move(num)), den_(std::move(den)), shift_(shift)
{
    if (den_.is_zero())
        throw ArithmeticError("rational function with zero denominator");
    normalize();
}

RatFunc RatFunc::q() { return q_pow(1); }

RatFunc RatFunc::q_pow(int k)
{
    RatFunc r(1);
    r.shift_ = k;
    return r;
}

bool RatFunc::is_one() const { return shift_ == 0 && num_.degree() == 0 && num_.lead() == 1 && den_.degree() == 0; }

bool RatFunc::is_constant() const { return is_zero() || (shift_ == 0 && num_.degree() == 0 && den_.degree() == 0); }

bool RatFunc::is_monomial() const { return is_zero() || (num_.degree() == 0 && den_.degree() == 0); }

void RatFunc::normalize()
{
    if (num_.is_zero()) {
        den_ = Poly(mpz_class(1));
        shift_ = 0;
        return;
    }
    int k = num_.low_order();
    if (k) {
        num_ = num_.shifted_down(k);
        shift_ += k;
    }
    int kd = den_.low_order();
    if (kd) {
        den_ = den_.shifted_down(kd);
        shift_ -= kd;
    }
    if (den_.degree() > 0 && num_.degree() > 0) {
        Poly g = Poly::gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = Poly::exact_div(num_, g);
            den_ = Poly::exact_div(den_, g);
        }
    }
    mpz_class cn = num_.content();
    mpz_class cd = den_.content();
    mpz_class c;
    mpz_gcd(c.get_mpz_t(), cn.get_mpz_t(), cd.get_mpz_t());
    if (c != 1) {
        num_ = Poly::exact_div(num_, c);
        den_ = Poly::exact_div(den_, c);
    }
    if (den_.lead() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
}

RatFunc& RatFunc::operator+=(const RatFunc& b)
{
    if (b.is_zero())
        return *this;
    if (is_zero())
        return *this = b;
    int s = std::min(shift_, b.shift_);
    Poly n1 = num_.shifted_up(shift_ - s);
    Poly n2 = b.num_.shifted_up(b.shift_ - s);
    if (den_ == b.den_) {
        num_ = n1 + n2;
    }
    else {
        num_ = n1 * b.den_ + n2 * den_;
        den_ = den_ * b.den_;
    }
    shift_ = s;
    normalize();
    return *this;
}

RatFunc& RatFunc::operator-=(const RatFunc& b) { return *this += -b; }

RatFunc& RatFunc::operator*=(const RatFunc& b)
{
    if (is_zero() || b.is_zero()) {
        *this = RatFunc();
        return *this;
    }
    bool trivial_den = den_.degree() == 0 && b.den_.degree() == 0;
    num_ = num_ * b.num_;
    den_ = den_ * b.den_;
    shift_ += b.shift_;
    if (trivial_den && num_.degree() == 0) {
        // monomial fast path: only integer content to fix
        mpz_class c;
        mpz_gcd(c.get_mpz_t(), num_.lead().get_mpz_t(), den_.lead().get_mpz_t());
        if (c != 1) {
            num_ = Poly::exact_div(num_, c);
            den_ = Poly::exact_div(den_, c);
        }
        return *this;
    }
    normalize();
    return *this;
}

RatFunc RatFunc::inv() const
{
    if (is_zero())
        throw ArithmeticError("division by zero in Q(q)");
    return RatFunc(den_, num_, -shift_);
}

RatFunc& RatFunc::operator/=(const RatFunc& b) { return *this *= b.inv(); }

RatFunc RatFunc::operator-() const
{
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFunc RatFunc::pow(int k) const
{
    if (k < 0)
        return inv().pow(-k);
    RatFunc result(1);
    RatFunc base = *this;
    while (k) {
        if (k & 1)
            result *= base;
        k >>= 1;
        if (k)
            base *= base;
    }
    return result;
}

std::size_t RatFunc::hash() const
{
    std::size_t h = std::hash<int>()(shift_);
    auto mix = [&h](const Poly& p) {
        for (const auto& c : p.coeffs())
            h = h * 1000003u ^ std::hash<long>()(mpz_get_si(c.get_mpz_t()));
        h = h * 31u + p.size();
    };
    mix(num_);
    mix(den_);
    return h;
}

namespace {

std::string poly_str(const Poly& p, int shift)
{
    if (p.is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
        mpz_class c = p[static_cast<std::size_t>(i)];
        if (c == 0)
            continue;
        int e = i + shift;
        bool neg = c < 0;
        mpz_class a = neg ? mpz_class(-c) : c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        if (e == 0) {
            os << a;
            continue;
        }
        if (a != 1)
            os << a << "*";
        os << "q";
        if (e != 1)
            os << "^" << e;
    }
    return os.str();
}

int term_count(const Poly& p)
{
    int n = 0;
    for (const auto& c : p.coeffs())
        n += c != 0;
    return n;
}

}  // namespace

std::string RatFunc::str() const
{
    std::string n = poly_str(num_, shift_);
    if (den_.degree() == 0 && den_.lead() == 1)
        return n;
    if (term_count(num_) > 1)
        n = "(" + n + ")";
    std::string d = poly_str(den_, 0);
    if (term_count(den_) > 1)
        d = "(" + d + ")";
    return n + "/" + d;
}

std::ostream& operator<<(std::ostream& os, const RatFunc& a) { return os << a.str(); }

RatFunc RatFunc::parse(std::string_view text)
{
    ExprOps<RatFunc> ops;
    ops.integer = [](const std::string& s) { return RatFunc(Rational(mpz_class(s))); };
    ops.symbol = [](const std::string& s) {
        if (s != "q")
            throw ParseError("unknown symbol '" + s + "' in scalar");
        return RatFunc::q();
    };
    ops.divide = [](const RatFunc& a, const RatFunc& b) { return a / b; };
    ops.power = [](const RatFunc& a, int k) { return a.pow(k); };
    return evaluate(text, ops);
}

// --------------------------------------------------------------- misc

RatFunc q_integer(int n, QBase base)
{
    RatFunc b = RatFunc::q_pow(base == QBase::QSquared ? 2 : base == QBase::Q ? 1 : -2);
    return (b.pow(n) - RatFunc(1)) / (b - RatFunc(1));
}

Rational specialize(const RatFunc& a, const Rational& r)
{
    if (a.is_zero())
        return 0;
    Rational d = a.den().eval(r);
    if (d == 0)
        throw ArithmeticError("pole at specialization q = " + r.get_str());
    if (a.shift() != 0 && r == 0)
        throw ArithmeticError("pole at specialization q = 0");
    Rational v = a.num().eval(r) / d;
    Rational rp = 1;
    Rational base = a.shift() >= 0 ? r : Rational(1) / r;
    for (int i = 0; i < std::abs(a.shift()); ++i)
        rp *= base;
    v *= rp;
    v.canonicalize();
    return v;
}

Rational parse_rational(std::string_view text)
{
    try {
        Rational r{std::string(text)};
        r.canonicalize();
        return r;
    }
    catch (const std::invalid_argument&) {
        throw ParseError("bad rational '" + std::string(text) + "'");
    }
}

ScalarMode ScalarMode::specialized(const Rational& r)
{
    if (r == 0 || r == 1 || r == -1)
        throw std::invalid_argument("specialization point must avoid 0, 1 and -1");
    ScalarMode m;
    m.symbolic_ = false;
    m.value_ = r;
    return m;
}

ScalarMode ScalarMode::parse(std::string_view text)
{
    if (text == "symbolic")
        return symbolic();
    return specialized(parse_rational(text));
}

std::string ScalarMode::str() const { return symbolic_ ? "symbolic" : "q=" + value_.get_str(); }

}  // namespace ncfib

namespace ncfib {

std::string format_linear(const std::vector<std::pair<RatFunc, std::string>>& terms)
{
    std::string out;
    for (const auto& [c, body] : terms) {
        if (c.is_zero())
            continue;
        bool neg = c.is_monomial() && c.num().lead() < 0;
        RatFunc mag = neg ? -c : c;
        std::string t;
        if (body.empty())
            t = mag.is_monomial() || terms.size() == 1 ? mag.str() : "(" + mag.str() + ")";
        else if (mag.is_one())
            t = body;
        else if (mag.is_monomial())
            t = mag.str() + "*" + body;
        else
            t = "(" + mag.str() + ")*" + body;
        if (out.empty())
            out = neg ? "-" + t : t;
        else
            out += (neg ? " - " : " + ") + t;
    }
    return out.empty() ? "0" : out;
}

}  // namespace ncfib
