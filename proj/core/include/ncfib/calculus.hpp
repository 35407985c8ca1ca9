#pragma once

// Differential graded algebras over a presented algebra. Forms are kept in
// left-coefficient canonical form sum c * x * w_I with x a normal algebra
// word and I a basis word of the exterior algebra on the invariant symbols.

#include "ncfib/linalg.hpp"
#include "ncfib/ncpoly.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ncfib {

class DegreeOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Word over form symbols (symbol indices).
using FormWord = std::string;
using FormKey = std::pair<Word, FormWord>;
using FormComb = std::map<FormKey, RatFunc>;

struct FormSymbol {
    std::string name;
    int zdeg = 0;
};

/// Quadratic algebra on n symbols: tensor algebra modulo the two-sided
/// ideal generated by degree-2 relations. Per degree it fixes a basis of
/// words (the lex-smallest ones) and a reduction of every word onto it.
class ExteriorAlgebra {
public:
    ExteriorAlgebra() = default;
    ExteriorAlgebra(int symbols, std::vector<std::map<FormWord, RatFunc>> relations, int max_degree);

    int symbols() const { return n_; }
    int max_degree() const { return max_degree_; }
    const std::vector<std::map<FormWord, RatFunc>>& relations() const { return relations_; }
    const std::vector<FormWord>& basis(int degree) const;
    /// Reduction of an arbitrary word of length <= max_degree.
    const std::map<FormWord, RatFunc>& reduce(const FormWord& w) const;
    bool is_basis_word(const FormWord& w) const;

private:
    int n_ = 0;
    int max_degree_ = 1;
    std::vector<std::map<FormWord, RatFunc>> relations_;
    std::vector<std::vector<FormWord>> basis_;
    std::unordered_map<FormWord, std::map<FormWord, RatFunc>> reduction_;
};

class Calculus;

class FormElement {
public:
    FormElement() = default;
    FormElement(const Calculus& c, int degree) : calc_(&c), degree_(degree) {}

    const Calculus* calculus() const { return calc_; }
    int degree() const { return degree_; }
    const FormComb& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    RatFunc coeff(const Word& w, const FormWord& f) const;
    /// Common total Z-degree, nullopt if mixed.
    std::optional<int> zdegree() const;
    /// Maximal coefficient word length (-1 for zero).
    int max_word_length() const;
    std::string str() const;

    void add(const FormKey& k, const RatFunc& c);
    FormElement& operator+=(const FormElement& b);
    FormElement& operator-=(const FormElement& b);
    friend FormElement operator+(FormElement a, const FormElement& b) { return a += b; }
    friend FormElement operator-(FormElement a, const FormElement& b) { return a -= b; }
    FormElement operator-() const;
    friend FormElement operator*(const RatFunc& c, FormElement a);
    friend bool operator==(const FormElement& a, const FormElement& b)
    {
        return a.terms_ == b.terms_ && (a.degree_ == b.degree_ || a.terms_.empty());
    }
    friend bool operator!=(const FormElement& a, const FormElement& b) { return !(a == b); }

private:
    const Calculus* calc_ = nullptr;
    int degree_ = 0;
    FormComb terms_;
};

/// Term list c * w * s with w an algebra word and s a symbol.
using DegreeOneTable = std::vector<std::pair<std::pair<Word, char>, RatFunc>>;

class Calculus {
public:
    Calculus(std::string name, AlgebraPtr algebra, std::vector<FormSymbol> symbols);
    Calculus(const Calculus&) = delete;
    Calculus& operator=(const Calculus&) = delete;

    // construction, in this order: d / comm, wedge relations + finalize, mc
    void set_d(int generator, std::string_view text);
    void set_comm(int symbol, int generator, std::string_view text);
    void add_wedge_relation(std::string_view lhs, std::string_view rhs);
    void add_wedge_relation(std::map<FormWord, RatFunc> relation);
    void finalize(int max_degree);
    void set_mc(int symbol, std::string_view text);
    void set_mc(int symbol, const FormElement& value);

    const std::string& name() const { return name_; }
    const AlgebraPresentation& algebra() const { return *alg_; }
    const AlgebraPtr& algebra_ptr() const { return alg_; }
    int symbol_count() const { return static_cast<int>(symbols_.size()); }
    const FormSymbol& symbol(int i) const { return symbols_[i]; }
    std::optional<int> find_symbol(std::string_view name) const;
    const ExteriorAlgebra& exterior() const { return ext_; }
    int max_degree() const { return ext_.max_degree(); }
    bool has_mc(int s) const { return mc_[s].has_value(); }
    const FormElement& d_generator(int g) const { return d_gen_[g]; }
    const FormElement& comm(int s, int g) const { return comm_[s][g]; }
    const std::optional<FormElement>& mc(int s) const { return mc_[s]; }
    const std::vector<std::map<FormWord, RatFunc>>& wedge_relations() const { return wedge_rel_; }

    std::string form_word_str(const FormWord& f) const;
    int zdegree(const FormWord& f) const;

    FormElement zero(int degree) const { return FormElement(*this, degree); }
    FormElement one() const;
    FormElement from_algebra(const NcElement& x) const;
    FormElement term(const Word& w, const FormWord& f, const RatFunc& c = RatFunc(1)) const;
    FormElement symbol_form(int s) const;
    /// Canonical form of a product expression in generators and symbols.
    FormElement parse(std::string_view text) const;

    FormElement wedge(const FormElement& a, const FormElement& b) const;
    FormElement d(const FormElement& a) const;
    /// Canonical form of w_I * y with y any (possibly non-normal) word.
    FormComb move(const FormWord& f, const Word& y) const;
    /// d on an arbitrary (possibly non-normal) word by the Leibniz rule.
    FormElement d_word(const Word& w) const;

    /// Left X-module basis of degree n forms, coefficient length <= N.
    std::vector<FormKey> truncate_component(int n, int N, std::optional<int> zdeg = std::nullopt) const;

    std::string serialize() const;

private:
    FormElement d_form_word(const FormWord& f) const;
    FormComb reduce_terms(const std::map<std::pair<Word, FormWord>, RatFunc>& raw) const;
    void clear_caches();

    std::string name_;
    AlgebraPtr alg_;
    std::vector<FormSymbol> symbols_;
    std::vector<FormElement> d_gen_;
    std::vector<std::vector<FormElement>> comm_;
    std::vector<std::map<FormWord, RatFunc>> wedge_rel_;
    ExteriorAlgebra ext_;
    std::vector<std::optional<FormElement>> mc_;

    mutable std::mutex mu_;
    mutable std::map<std::pair<FormWord, Word>, FormComb> move_memo_;
    mutable std::unordered_map<Word, FormElement> d_word_memo_;
    mutable std::unordered_map<FormWord, FormElement> d_form_memo_;
};

using CalculusPtr = std::shared_ptr<const Calculus>;

/// Shared algebra instances by id ("slq2", "laurent").
AlgebraPtr shared_algebra(std::string_view id);

/// Declarative text: calculus/algebra/max_degree/symbol/d/comm/wedge/mc lines.
CalculusPtr parse_calculus(std::string_view text, AlgebraPtr algebra = nullptr);

std::string calculus_text_3d();
std::string calculus_text_4d();
std::string calculus_text_h3();
std::string calculus_text_h4();
/// graded-commutative calculus on k[z,z^-1,w,w^-1]
std::string calculus_text_torus();

CalculusPtr build_3d();
/// Degrees 0 and 1 only; higher degrees come from the braiding.
CalculusPtr build_4d();
CalculusPtr build_h3();
CalculusPtr build_h4();
CalculusPtr build_torus();

struct CalculusCheckOptions {
    int word_length = 3;  // algebra words tested for d^2 = 0
};

/// d^2 = 0, d and comm compatible with the algebra relations, d compatible
/// with the commutation rules, wedge relations stable and closed.
Report verify_calculus(const Calculus& c, const CalculusCheckOptions& opt = {});

/// Coordinates of forms against an enumerated basis of a truncated component.
class FormBasis {
public:
    FormBasis() = default;
    FormBasis(const Calculus& c, int degree, std::vector<FormKey> keys);
    FormBasis(const Calculus& c, int degree, int N, std::optional<int> zdeg = std::nullopt);

    int size() const { return static_cast<int>(keys_.size()); }
    int degree() const { return degree_; }
    const std::vector<FormKey>& keys() const { return keys_; }
    std::optional<int> index(const FormKey& k) const;
    /// Throws std::out_of_range if a term lies outside the basis.
    SparseVec<RatFunc> coords(const FormElement& f) const;
    FormElement element(const SparseVec<RatFunc>& v) const;
    const Calculus& calculus() const { return *calc_; }

private:
    const Calculus* calc_ = nullptr;
    int degree_ = 0;
    std::vector<FormKey> keys_;
    std::map<FormKey, int> index_;
};

/// Matrix of a linear map given on basis elements.
Matrix<RatFunc> matrix_of(const FormBasis& src, const FormBasis& tgt,
                          const std::function<FormElement(const FormElement&)>& f);

}  // namespace ncfib
