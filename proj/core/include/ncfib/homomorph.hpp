#pragma once

#include "ncfib/calculus.hpp"

#include <memory>
#include <optional>

namespace ncfib {

class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using TensorKey = std::vector<FormKey>;

/// Element of Omega(A_1) (x) ... (x) Omega(A_k) with the Koszul sign
/// (a (x) h)(a' (x) h') = (-1)^{|h||a'|} aa' (x) hh'.
class TensorForm {
public:
    TensorForm() = default;
    TensorForm(std::vector<const Calculus*> legs, int degree) : legs_(std::move(legs)), degree_(degree) {}

    static TensorForm unit(std::vector<const Calculus*> legs);
    static TensorForm outer(const std::vector<FormElement>& factors);
    static TensorForm from_tensor(const Tensor& t, std::vector<const Calculus*> legs);

    const std::vector<const Calculus*>& legs() const { return legs_; }
    const std::map<TensorKey, RatFunc>& terms() const { return terms_; }
    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    RatFunc coeff(const TensorKey& k) const;
    std::string str() const;

    void add(const TensorKey& k, const RatFunc& c);
    TensorForm& operator+=(const TensorForm& b);
    TensorForm& operator-=(const TensorForm& b);
    friend TensorForm operator+(TensorForm a, const TensorForm& b) { return a += b; }
    friend TensorForm operator-(TensorForm a, const TensorForm& b) { return a -= b; }
    friend TensorForm operator*(const RatFunc& c, TensorForm a);
    friend TensorForm operator*(const TensorForm& a, const TensorForm& b);
    friend bool operator==(const TensorForm& a, const TensorForm& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const TensorForm& a, const TensorForm& b) { return !(a == b); }

    TensorForm d() const;
    /// Bidegree component; throws when the degrees do not add up to the total degree.
    TensorForm project(const std::vector<int>& degrees) const;
    /// The single leg as a form (one-leg targets only).
    FormElement as_form() const;

private:
    std::vector<const Calculus*> legs_;
    int degree_ = 0;
    std::map<TensorKey, RatFunc> terms_;
};

/// Maurer-Cartan form S(x_(1)) dx_(2).
FormElement varpi(const Calculus& c, const Word& x);
FormElement varpi(const Calculus& c, const NcElement& x);

/// Each invariant symbol written as a combination of varpi(x) for short normal words x.
struct MaurerCartanData {
    std::vector<LinComb> expression;
};

MaurerCartanData maurer_cartan(const Calculus& c, int max_word_length = 2);

/// d omega_s = -sum c_x varpi(x_(1)) ^ varpi(x_(2)).
FormElement derived_mc(const Calculus& c, const MaurerCartanData& mc, int s);

/// Degree-zero algebra map extended to forms.
class DgaMap {
public:
    DgaMap(std::string name, CalculusPtr source, std::vector<CalculusPtr> target, const AlgebraMap& degree0);

    const std::string& name() const { return name_; }
    const Calculus& source() const { return *src_; }
    const CalculusPtr& source_ptr() const { return src_; }
    const std::vector<const Calculus*>& target_legs() const { return legs_; }

    TensorForm apply_word(const Word& w) const;
    TensorForm apply(const NcElement& x) const;
    TensorForm apply(const FormElement& f) const;
    const TensorForm& symbol_image(int s) const { return symbol_images_[s]; }
    FormElement apply_single(const FormElement& f) const { return apply(f).as_form(); }

    const Report& report() const { return report_; }
    bool well_defined() const { return report_.passed(); }

private:
    TensorForm symbol_word_image(const FormWord& f) const;

    std::string name_;
    CalculusPtr src_;
    std::vector<CalculusPtr> targets_;
    std::vector<const Calculus*> legs_;
    AlgebraMap map0_;
    std::vector<TensorForm> symbol_images_;
    Report report_;
    mutable std::mutex mu_;
    mutable std::map<Word, TensorForm> word_memo_;
};

using DgaMapPtr = std::shared_ptr<const DgaMap>;

/// (id (x) ... theta ... (x) id) applied to leg i of t.
TensorForm apply_on_leg(const DgaMap& theta, const TensorForm& t, int leg);

DgaMapPtr make_identity_map(const CalculusPtr& c);
/// Coproduct of the Hopf algebra of c as a map into c (x) c.
DgaMapPtr make_coproduct_map(const CalculusPtr& c);

/// kernel of pi_* on the invariant 1-forms, in symbol coordinates
struct KSpace {
    std::vector<SparseVec<RatFunc>> basis;
    Subspace<RatFunc> space;
    int dim() const { return space.dim(); }
};

struct FibrationData {
    CalculusPtr x;
    CalculusPtr h;
    DgaMapPtr pi;
    DgaMapPtr rho;
    DgaMapPtr delta_h;
    KSpace k;
    /// invariant forms built from a K basis vector
    FormElement k_form(int i) const;
};

std::shared_ptr<const FibrationData> make_fibration(CalculusPtr x, CalculusPtr h);
std::shared_ptr<const FibrationData> fibration_3d();
std::shared_ptr<const FibrationData> fibration_4d();

/// Pi_{m,n} on a two-leg element.
TensorForm pi_projection(const TensorForm& t, int m, int n);

/// Intersection of the kernels of Pi_{m,n-m} rho_* (m < n) on the span of `basis`.
Subspace<RatFunc> horizontal_forms(const FibrationData& fib, const FormBasis& basis);
/// Coordinate span of the total Z-degree zero keys.
Subspace<RatFunc> coinvariant_subspace(const FormBasis& basis);
/// Direct kernel of x -> rho(x) - x (x) 1 on X_{<=N}.
Subspace<RatFunc> coinvariants_by_solve(const FibrationData& fib, const FormBasis& degree0);

/// Omega^n B inside `target` (a zdeg 0 basis): span of b0 db1 ^ ... ^ dbn with coefficient
/// length <= N + slack, intersected with `target`.
Subspace<RatFunc> omega_B(const FibrationData& fib, const FormBasis& target, int slack);
/// Span of (Omega^n B).X inside `target`.
Subspace<RatFunc> omega_B_times_X(const FibrationData& fib, const FormBasis& target, int slack);
/// Span of X.K^{^n} (left coefficients) inside `target`.
Subspace<RatFunc> k_power_span(const FibrationData& fib, const FormBasis& target, int n);
/// Words of the exterior basis spanned by K^{^n} ^ Lambda^m, as a subspace of Lambda^{n+m}.
Subspace<RatFunc> k_filtration_invariant(const FibrationData& fib, int k_count, int total);

/// Normalized left integral on k[z, z^-1].
RatFunc integral_H(const NcElement& h);

/// x |> eta = x_(2) eta S^{-1}(x_(1)); throws when the result is not invariant.
FormElement left_action(const Calculus& c, const NcElement& x, const FormElement& eta);
/// sum d(b_(2)) S^{-1}(b_(1))
FormElement condition_K_form(const Calculus& c, const NcElement& b);
Report condition_K_check(const FibrationData& fib, int N);

/// Right X-coaction on invariant 1-forms: Pi_{1,0} Delta_*(omega_s) = sum_t omega_t (x) R[t][s].
std::optional<std::vector<std::vector<NcElement>>> right_coaction(const DgaMap& delta, Report* report = nullptr);

struct Braiding {
    int n = 0;
    /// on Lambda^1 (x) Lambda^1, index s*n + t for omega_s (x) omega_t
    Matrix<RatFunc> sigma;
    Matrix<RatFunc> sigma_inverse;
    Report report;
};

/// Yetter-Drinfeld braiding; nullopt (with the reason in *report) when Delta_* does not extend.
std::optional<Braiding> braiding_sigma(const CalculusPtr& c, Report* report = nullptr);
/// Quadratic relations spanning ker(sigma - id).
std::vector<std::map<FormWord, RatFunc>> wedge_from_braiding(const Braiding& b);

struct DerivedCalculus {
    CalculusPtr calc;
    Report report;
};

/// Copy of a degree-one calculus with wedge relations from sigma and derived Maurer-Cartan data.
DerivedCalculus derive_higher_degrees(const CalculusPtr& base, int max_degree);
/// 4D calculus completed to all degrees.
const DerivedCalculus& build_4d_full();
/// 4d fibration over the calculus completed to all degrees.
std::shared_ptr<const FibrationData> fibration_4d_full();

/// Right H-coaction on invariant 1-forms: Pi_{1,0} rho_*(omega_s) = sum_t omega_t (x) h[t][s].
std::vector<std::vector<NcElement>> h_coaction(const FibrationData& fib);

struct ProjectionP {
    Matrix<RatFunc> p0;
    Matrix<RatFunc> p;
    Report report;
};

ProjectionP projection_p(const FibrationData& fib);

Report coaction_law_check(const FibrationData& fib, int max_len);
Report horizontal_coaction_check(const FibrationData& fib, int n, int N);

}  // namespace ncfib
