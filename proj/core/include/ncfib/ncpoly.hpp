#pragma once

// Presented noncommutative algebras over Q(q): two-letter rewriting to a
// PBW normal form, tensor powers, and Hopf structure maps extended from
// generators.

#include "ncfib/qfield.hpp"
#include "ncfib/report.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ncfib {

/// A word is a string of generator indices.
using Word = std::string;
/// Free linear combination of words (no rewriting implied).
using LinComb = std::map<Word, RatFunc>;

void accumulate(LinComb& into, const Word& w, const RatFunc& c);
void accumulate(LinComb& into, const LinComb& from, const RatFunc& c = RatFunc(1));

class AlgebraPresentation;

class NcElement {
public:
    NcElement() = default;
    explicit NcElement(const AlgebraPresentation& a) : alg_(&a) {}
    static NcElement scalar(const AlgebraPresentation& a, const RatFunc& c);
    static NcElement word(const AlgebraPresentation& a, const Word& w, const RatFunc& c = RatFunc(1));
    static NcElement generator(const AlgebraPresentation& a, int g);
    static NcElement parse(const AlgebraPresentation& a, std::string_view text);

    const AlgebraPresentation* algebra() const { return alg_; }
    const LinComb& terms() const { return terms_; }
    RatFunc coeff(const Word& w) const;
    bool is_zero() const { return terms_.empty(); }
    /// Common Z-degree of all words, nullopt if mixed; zero has degree 0.
    std::optional<int> zdegree() const;
    std::string str() const;

    NcElement& operator+=(const NcElement& b);
    NcElement& operator-=(const NcElement& b);
    friend NcElement operator+(NcElement a, const NcElement& b) { return a += b; }
    friend NcElement operator-(NcElement a, const NcElement& b) { return a -= b; }
    NcElement operator-() const;
    friend NcElement operator*(const NcElement& a, const NcElement& b);
    friend NcElement operator*(const RatFunc& c, NcElement a);
    friend bool operator==(const NcElement& a, const NcElement& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const NcElement& a, const NcElement& b) { return !(a == b); }

private:
    friend class AlgebraPresentation;
    const AlgebraPresentation* alg_ = nullptr;
    LinComb terms_;  // normal words only
};

/// Element of a tensor product of presented algebras A_1 (x) ... (x) A_k.
class Tensor {
public:
    using Key = std::vector<Word>;
    using Legs = std::vector<const AlgebraPresentation*>;

    Tensor() = default;
    explicit Tensor(Legs legs) : legs_(std::move(legs)) {}
    static Tensor pure(Legs legs, Key key, const RatFunc& c = RatFunc(1));
    static Tensor from(const NcElement& x);
    static Tensor outer(const NcElement& x, const NcElement& y);

    const Legs& legs() const { return legs_; }
    const std::map<Key, RatFunc>& terms() const { return terms_; }
    void add(const Key& k, const RatFunc& c);
    bool is_zero() const { return terms_.empty(); }
    /// Back to an algebra element; requires exactly one leg.
    NcElement as_element() const;
    std::string str() const;

    Tensor& operator+=(const Tensor& b);
    Tensor& operator-=(const Tensor& b);
    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(const RatFunc& c, Tensor a);
    /// Legwise product (all legs in degree 0, so no signs).
    friend Tensor operator*(const Tensor& a, const Tensor& b);
    friend bool operator==(const Tensor& a, const Tensor& b) { return a.terms_ == b.terms_; }

    /// Replace leg i by f(word); f's outputs all have legs new_legs.
    Tensor map_leg(int i, const Legs& new_legs, const std::function<Tensor(const Word&)>& f) const;
    /// Multiply legs i and i+1 together.
    Tensor multiply_legs(int i) const;

private:
    Legs legs_;
    std::map<Key, RatFunc> terms_;
};

struct Generator {
    std::string name;
    std::vector<std::string> aliases;
    int zdeg = 0;
    int rank = 0;    // rewriting order; rules remove inversions w.r.t. rank
    int weight = 1;  // weighted length, compared before inversions
};

struct RewriteRule {
    Word lhs;  // exactly two letters
    LinComb rhs;
};

struct HopfData {
    std::vector<std::map<std::pair<Word, Word>, RatFunc>> coproduct;
    std::vector<RatFunc> counit;
    std::vector<LinComb> antipode;
    std::vector<LinComb> antipode_inverse;
};

enum class Strategy { Leftmost, Rightmost };

class AlgebraPresentation {
public:
    explicit AlgebraPresentation(std::string name) : name_(std::move(name)) {}
    AlgebraPresentation(const AlgebraPresentation&) = delete;
    AlgebraPresentation& operator=(const AlgebraPresentation&) = delete;

    int add_generator(Generator g);
    /// Declares x^-1 notation for parsing (x * y is rewritten to 1 by rules).
    void set_inverse(int g, int inverse);
    int inverse_of(int g) const { return inverse_[g]; }
    void add_rule(const Word& lhs, LinComb rhs);
    void add_rule(std::string_view lhs, std::string_view rhs);
    void set_hopf(HopfData h) { hopf_ = std::move(h); }
    void set_basis_order(std::function<bool(const Word&, const Word&)> less) { basis_less_ = std::move(less); }

    const std::string& name() const { return name_; }
    int generator_count() const { return static_cast<int>(gens_.size()); }
    const Generator& generator(int i) const { return gens_[i]; }
    std::optional<int> find_generator(std::string_view name) const;
    const std::vector<RewriteRule>& rules() const { return rules_; }
    const RewriteRule* rule_for(char a, char b) const;
    bool has_hopf() const { return hopf_.has_value(); }
    const HopfData& hopf() const;

    bool is_normal(const Word& w) const;
    int zdegree(const Word& w) const;
    std::string word_str(const Word& w) const;
    Word parse_word(std::string_view text) const;  // names separated by '*'
    /// Free (unreduced) linear combination from text.
    LinComb parse_free(std::string_view text) const;

    LinComb normal_form(const Word& w, Strategy s = Strategy::Leftmost) const;
    NcElement reduce(const LinComb& c) const;
    std::vector<Word> enumerate_basis(int maxdeg, std::optional<int> zdeg = std::nullopt) const;
    bool basis_less(const Word& a, const Word& b) const;

    /// Hopf maps; on words they are computed letterwise, so they are also
    /// meaningful on non-normal words (used to test relation preservation).
    Tensor coproduct(const Word& w) const;
    Tensor coproduct(const NcElement& x) const;
    Tensor coproduct_free(const LinComb& c) const;
    RatFunc counit(const Word& w) const;
    RatFunc counit(const NcElement& x) const;
    NcElement antipode(const Word& w, bool inverse = false) const;
    NcElement antipode(const NcElement& x, bool inverse = false) const;

private:
    std::string name_;
    std::vector<Generator> gens_;
    std::vector<int> inverse_;
    std::vector<RewriteRule> rules_;
    std::map<std::pair<char, char>, std::size_t> rule_index_;
    std::optional<HopfData> hopf_;
    std::function<bool(const Word&, const Word&)> basis_less_;

    mutable std::mutex mu_;
    mutable std::unordered_map<Word, LinComb> nf_memo_[2];
    mutable std::unordered_map<Word, Tensor> delta_memo_;
    mutable std::unordered_map<Word, NcElement> s_memo_[2];
};

using AlgebraPtr = std::shared_ptr<const AlgebraPresentation>;

/// Order used to show rules terminate: weighted length, then inversions.
std::pair<int, int> rewrite_order_key(const AlgebraPresentation& a, const Word& w);

struct PresentationCheckOptions {
    int strategy_word_length = 6;
    int hopf_word_length = 3;
};

/// Termination order, overlap confluence, strategy independence,
/// relation preservation by the Hopf maps and the Hopf axioms.
Report verify_presentation(const AlgebraPresentation& a, const PresentationCheckOptions& opt = {});

/// A(SL_q(2)) with generators a, b, c, d; tweak may alter the Hopf data
/// before it is installed (used for negative controls).
AlgebraPtr make_slq2(const std::function<void(HopfData&)>& tweak = {});
/// k[z, z^-1] with generators z, zi.
AlgebraPtr make_laurent();
/// commutative Laurent polynomials in z and w, both grouplike
AlgebraPtr make_torus();

/// Algebra map defined on generators, with images in a tensor product
/// (one leg for an ordinary algebra map).
class AlgebraMap {
public:
    AlgebraMap(const AlgebraPresentation& src, Tensor::Legs target, std::vector<Tensor> images);
    Tensor apply(const Word& w) const;
    Tensor apply(const NcElement& x) const;
    Tensor apply_free(const LinComb& c) const;
    const AlgebraPresentation& source() const { return *src_; }
    const Tensor::Legs& target() const { return target_; }
    const Tensor& image(int g) const { return images_[g]; }
    /// Every rewrite rule maps to zero.
    Report check_relations() const;

private:
    const AlgebraPresentation* src_;
    Tensor::Legs target_;
    std::vector<Tensor> images_;
};

/// pi: a -> z, d -> z^-1, b, c -> 0.
AlgebraMap make_pi(const AlgebraPresentation& x, const AlgebraPresentation& h);
/// rho = (id (x) pi) Delta.
AlgebraMap make_rho(const AlgebraPresentation& x, const AlgebraPresentation& h);

}  // namespace ncfib
