#pragma once

#include "ncfib/homomorph.hpp"

#include <functional>
#include <random>

namespace ncfib {

/// Element of Omega^n (x) E for a free module E: entry i is the form multiplying e_i.
using FormVec = std::vector<FormElement>;

FormVec zero_vec(const Calculus& c, int rank, int degree);
bool vec_is_zero(const FormVec& v);
bool vec_equal(const FormVec& a, const FormVec& b);
FormVec vec_add(FormVec a, const FormVec& b, const RatFunc& scale = RatFunc(1));
std::string vec_str(const FormVec& v, const std::string& gen = "e");
/// w ^ v, the form acting on the left of every entry
FormVec wedge_left(const Calculus& c, const FormElement& w, const FormVec& v);

/// Free left module with connection: nabla e_j = sum_i A[i][j] (x) e_i.
struct ConnectionData {
    CalculusPtr calc;
    int rank = 0;
    std::vector<std::vector<FormElement>> A;

    static ConnectionData trivial(CalculusPtr c, int rank);
    /// A parsed from form expressions, rows then columns
    static ConnectionData parse(CalculusPtr c, const std::vector<std::vector<std::string>>& entries);

    /// nabla^[n] on a vector of n-forms
    FormVec nabla(const FormVec& v) const;
    /// R[k][j] with nabla^[1] nabla e_j = sum_k R[k][j] (x) e_k
    std::vector<std::vector<FormElement>> curvature() const;
    bool is_flat() const;
    /// true when every entry of A has scalar coefficients, so nabla keeps coefficient length
    bool length_preserving() const;
    std::string str() const;
};

/// (id ^ R)(v)
FormVec apply_curvature(const ConnectionData& c, const FormVec& v);
/// nabla^[n+1] nabla^[n] = id ^ R on the given vectors
Report composite_check(const ConnectionData& c, const std::vector<FormVec>& sample);

/// Random connection of the given rank with coefficient words of length <= max_len.
ConnectionData random_connection(CalculusPtr c, int rank, int max_len, std::mt19937& rng);
FormVec random_vec(const Calculus& c, int rank, int degree, int max_len, std::mt19937& rng);

/// A' = g^-1 A g for an invertible scalar matrix g (rows of g given).
ConnectionData gauge_transform(const ConnectionData& c, const std::vector<std::vector<RatFunc>>& g);
/// A' = g^-1 A g + g^-1 dg for g with entries in the algebra and a supplied inverse.
ConnectionData gauge_transform(const ConnectionData& c, const std::vector<std::vector<NcElement>>& g,
                               const std::vector<std::vector<NcElement>>& g_inverse);

/// Rank two connection A = -M^T from the Maurer-Cartan matrix M = S(t) dt of the
/// defining corepresentation; flat, with scalar coefficients.
ConnectionData maurer_cartan_connection(CalculusPtr c);

// ------------------------------------------------------ truncated complexes

struct CochainComplex {
    std::vector<int> dims;
    /// d[n] : C^n -> C^{n+1}
    std::vector<Matrix<RatFunc>> d;
    Report check() const;
};

class Cohomology {
public:
    Cohomology() = default;
    explicit Cohomology(const CochainComplex& cx);

    int degrees() const { return static_cast<int>(cocycles_.size()); }
    int dim(int n) const { return static_cast<int>(reps_[n].size()); }
    std::vector<int> dims() const;
    const Subspace<RatFunc>& cocycles(int n) const { return cocycles_[n]; }
    const Subspace<RatFunc>& coboundaries(int n) const { return coboundaries_[n]; }
    /// cocycles completing the coboundaries
    const std::vector<SparseVec<RatFunc>>& representatives(int n) const { return reps_[n]; }
    /// coordinates of a cocycle's class in the representative basis
    SparseVec<RatFunc> class_of(int n, const SparseVec<RatFunc>& cocycle) const;
    /// matrix of the map induced by a chain map component f_n
    Matrix<RatFunc> induced(int n, const Matrix<RatFunc>& f, const Cohomology& target) const;

private:
    std::vector<Subspace<RatFunc>> cocycles_;
    std::vector<Subspace<RatFunc>> coboundaries_;
    std::vector<std::vector<SparseVec<RatFunc>>> reps_;
    std::vector<Matrix<RatFunc>> solvers_;
};

/// Omega^n (x) E at coefficient length <= N, coordinates index = j * forms.size() + k.
struct TwistedComponent {
    FormBasis forms;
    int rank = 0;
    int size() const { return forms.size() * rank; }
    SparseVec<RatFunc> coords(const FormVec& v) const;
    FormVec element(const SparseVec<RatFunc>& x) const;
};

struct TwistedComplex {
    ConnectionData conn;
    int N = 0;
    std::vector<TwistedComponent> components;
    CochainComplex complex;
    Cohomology cohomology;
};

/// Truncated twisted de Rham complex; throws unless the connection is flat and length preserving.
TwistedComplex twisted_cohomology(const ConnectionData& c, int N);
/// de Rham complex of the calculus itself
TwistedComplex de_rham(CalculusPtr c, int N);

/// H_dR-module action: closed forms times twisted cocycles are cocycles and times
/// coboundaries are coboundaries, on sampled elements.
Report hdr_action_check(const TwistedComplex& tc, const TwistedComplex& dr, int samples, std::mt19937& rng);

// ----------------------------------------------------------- pushforward

/// connection over the target of a single-leg map: A'_ij = theta_*(A_ij)
ConnectionData pushforward(const DgaMap& theta, CalculusPtr target, const ConnectionData& c);

/// Free left B-module M = B^k with a right A-action, a left connection and the
/// bimodule map sigma : M (x)_A Omega^1 A -> Omega^1 B (x)_B M.
struct BimoduleData {
    std::string name;
    CalculusPtr source;
    CalculusPtr target;
    int rank = 0;
    /// m_a . x_g = sum_b mu[g][a][b] m_b
    std::vector<std::vector<std::vector<NcElement>>> mu;
    /// nabla m_a = sum_b nabla_m[b][a] (x) m_b
    std::vector<std::vector<FormElement>> nabla_m;
    /// sigma(m_a (x) omega_s) = sum_b sigma[s][a][b] (x) m_b
    std::vector<std::vector<std::vector<FormElement>>> sigma;

    /// m_a . x as a row of target elements
    std::vector<NcElement> right_act(int a, const NcElement& x) const;
    /// sigma(m_a (x) xi) for a source 1-form
    FormVec sigma_apply(int a, const FormElement& xi) const;
    /// right action law, sigma balanced and right linear, bimodule Leibniz law
    Report check() const;
};

BimoduleData bimodule_from_map(const DgaMap& theta, CalculusPtr target);
BimoduleData identity_bimodule(CalculusPtr c);
/// N (x)_B M for M : A -> B and N : B -> C, basis n_c (x) m_a at index a * N.rank + c
BimoduleData compose_bimodules(const BimoduleData& n, const BimoduleData& m);
ConnectionData bimodule_pushforward(const BimoduleData& m, const ConnectionData& c);

// --------------------------------------------------- long exact sequence

/// 0 -> E -> F -> G -> 0 with scalar module maps phi (F x E) and psi (G x F).
struct ShortExactSequence {
    ConnectionData E, F, G;
    std::vector<std::vector<RatFunc>> phi, psi;
};

ShortExactSequence split_sequence(const ConnectionData& e, const ConnectionData& g);
/// F = E + G with nabla_F(e + g) = (nabla e + tau g) + nabla g, E and G trivial of rank one.
ShortExactSequence coupled_sequence(CalculusPtr c, const FormElement& tau);

struct LongExactSequence {
    TwistedComplex E, F, G;
    /// delta[n] : H^n G -> H^{n+1} E
    std::vector<Matrix<RatFunc>> delta;
    /// phi_*, psi_* on cohomology per degree
    std::vector<Matrix<RatFunc>> phi_star, psi_star;
    Report report;
};

LongExactSequence long_exact_sequence(const ShortExactSequence& ses, int N);

// ---------------------------------------------------- product structures

/// Family E^m of free modules with connection, bimodule maps sigma and a product,
/// given by their values on module generators.
struct ProductStructure {
    std::string name;
    CalculusPtr calc;
    std::vector<ConnectionData> modules;
    /// e^m_a . x as a degree-zero vector of E^m
    std::function<FormVec(int m, int a, const NcElement& x)> right_action;
    /// sigma(e^m_a (x) xi) in Omega^{|xi|} (x) E^m
    std::function<FormVec(int m, int a, const FormElement& xi)> sigma;
    /// e^m_a ^ e^m2_b as a degree-zero vector of E^{m+m2} (empty when m + m2 is out of range)
    std::function<FormVec(int m, int a, int m2, int b)> product;
    /// random forms of the given degree used for sampling
    std::function<FormElement(int degree, std::mt19937& rng)> sample_form;
    /// random algebra elements for the balance checks; generators when unset
    std::function<NcElement(std::mt19937& rng)> sample_algebra;
    int max_form_degree = 0;

    int top() const { return static_cast<int>(modules.size()) - 1; }
    /// sigma extended to (Omega (x) E^m) (x) Omega: zeta (x) e (x) eta -> zeta ^ sigma(e (x) eta)
    FormVec sigma_vec(int m, const FormVec& v, const FormElement& eta) const;
    /// (xi (x) e) ^ (eta (x) f) = (-1)^{|e||eta|} xi ^ sigma(e (x) eta) ^ f
    FormVec multiply(int m, const FormVec& x, int m2, const FormVec& y) const;
};

struct GradedVec {
    int m = 0;
    FormVec v;
};

/// axioms (a)-(d), sigma bimodule laws and the graded derivation property on `triples` samples
Report product_structure_check(const ProductStructure& ps, int triples, std::mt19937& rng);

/// Toy instance on the graded-commutative torus calculus: E^m = A e_m for m = 0..2,
/// nabla e_m = m c zeta (x) e_m, sigma the flip, e_m ^ e_m' = e_{m+m'}.
ProductStructure torus_product_structure(const RatFunc& c = RatFunc(1));
/// Same data with sigma negated on forms of positive degree.
ProductStructure torus_product_structure_corrupted();

}  // namespace ncfib
