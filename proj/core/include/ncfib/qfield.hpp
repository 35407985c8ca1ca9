#pragma once

// Exact arithmetic in Q(q), the field of rational functions in the
// deformation parameter q, plus q-integers and rational specialization.

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ncfib {

class ArithmeticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Rational = mpq_class;

/// Dense integer polynomial in q; coeffs_[i] multiplies q^i. Always trimmed.
class Poly {
public:
    Poly() = default;
    explicit Poly(mpz_class c);
    static Poly monomial(mpz_class c, int degree);

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const mpz_class& lead() const { return coeffs_.back(); }
    const mpz_class& operator[](std::size_t i) const { return coeffs_[i]; }
    std::size_t size() const { return coeffs_.size(); }
    const std::vector<mpz_class>& coeffs() const { return coeffs_; }

    mpz_class content() const;
    /// Number of factors of q dividing this polynomial (0 for zero).
    int low_order() const;
    Poly shifted_down(int k) const;
    Poly shifted_up(int k) const;
    Poly primitive_part() const;
    Rational eval(const Rational& x) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(const mpz_class& c, const Poly& a);
    Poly operator-() const;
    friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }

    /// Exact division; throws if b does not divide a over Z.
    static Poly exact_div(const Poly& a, const Poly& b);
    static Poly exact_div(const Poly& a, const mpz_class& c);
    /// Primitive gcd (content 1, positive leading coefficient).
    static Poly gcd(const Poly& a, const Poly& b);

private:
    explicit Poly(std::vector<mpz_class> c);
    void trim();
    std::vector<mpz_class> coeffs_;
};

/// An element of Q(q) in canonical form
///   q^shift * num(q) / den(q)
/// with num, den in Z[q], q not dividing num or den, gcd(num, den) = 1,
/// coprime integer contents and lc(den) > 0. Zero is (0, 1, 0).
class RatFunc {
public:
    RatFunc();
    RatFunc(long n);  // NOLINT(google-explicit-constructor)
    explicit RatFunc(const Rational& r);
    RatFunc(Poly num, Poly den, int shift = 0);

    static RatFunc q();
    static RatFunc q_pow(int k);

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const;
    /// True if the value is a rational constant.
    bool is_constant() const;
    /// True if the value is c*q^k for a rational c.
    bool is_monomial() const;

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    int shift() const { return shift_; }

    RatFunc inv() const;
    RatFunc pow(int k) const;

    RatFunc& operator+=(const RatFunc& b);
    RatFunc& operator-=(const RatFunc& b);
    RatFunc& operator*=(const RatFunc& b);
    RatFunc& operator/=(const RatFunc& b);
    friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
    friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
    friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
    friend RatFunc operator/(RatFunc a, const RatFunc& b) { return a /= b; }
    RatFunc operator-() const;

    friend bool operator==(const RatFunc& a, const RatFunc& b)
    {
        return a.shift_ == b.shift_ && a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    std::size_t hash() const;
    std::string str() const;
    static RatFunc parse(std::string_view text);

private:
    void normalize();

    Poly num_;
    Poly den_;
    int shift_ = 0;
};

std::ostream& operator<<(std::ostream& os, const RatFunc& a);

/// Base of a q-integer: [n; q^2], [n; q^-2] or [n; q].
enum class QBase { QSquared, QInvSquared, Q };

/// [n; b] = (b^n - 1) / (b - 1); n may be negative.
RatFunc q_integer(int n, QBase base = QBase::QInvSquared);

/// Evaluate a at q = r; throws ArithmeticError at a pole.
Rational specialize(const RatFunc& a, const Rational& r);

/// Symbolic evaluation, or specialization at a rational point away from
/// 0 and +-1 (the only rational roots of unity).
class ScalarMode {
public:
    static ScalarMode symbolic() { return ScalarMode(); }
    static ScalarMode specialized(const Rational& r);
    static ScalarMode parse(std::string_view text);

    bool is_symbolic() const { return symbolic_; }
    const Rational& value() const { return value_; }
    std::string str() const;

private:
    ScalarMode() = default;
    bool symbolic_ = true;
    Rational value_;
};

Rational parse_rational(std::string_view text);

/// Renders sum of c_i * body_i as e.g. "a*b - q^-1*c + (q + 1)*d"; an
/// empty body stands for the unit.
std::string format_linear(const std::vector<std::pair<RatFunc, std::string>>& terms);

}  // namespace ncfib

template <>
struct std::hash<ncfib::RatFunc> {
    std::size_t operator()(const ncfib::RatFunc& a) const { return a.hash(); }
};
