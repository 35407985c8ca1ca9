#pragma once

#include "ncfib/connection.hpp"

#include <tuple>

namespace ncfib {

/// Filtration of the exterior algebra: V[p][k] = span of K^{^p} ^ Lambda^{k-p} inside Lambda^k.
/// F^p Omega^k X = X (x) V[p][k] once V is checked to be stable under right multiplication.
struct ExteriorFiltration {
    std::shared_ptr<const FibrationData> fib;
    int top = 0;   // largest k with Lambda^k nonzero
    int pmax = 0;  // largest p with V[p][p] nonzero
    std::vector<std::vector<Subspace<RatFunc>>> V;
    /// complement of V[m+1][m+n] in V[m][m+n]: generators of Xi_m^n over X
    std::vector<std::vector<std::vector<SparseVec<RatFunc>>>> quotient;
    /// basis of V[m][m] (products of m K-forms)
    std::vector<std::vector<SparseVec<RatFunc>>> k_power;
    Report report;

    const Subspace<RatFunc>& at(int p, int k) const;
    /// true when every coefficient word of f carries a Lambda-vector in V[p][deg f]
    bool contains(int p, const FormElement& f) const;
    FormElement form(int k, const SparseVec<RatFunc>& v) const;
    int zdeg(int k, const SparseVec<RatFunc>& v) const;
    std::string generator_str(int k, const SparseVec<RatFunc>& v) const;
};

ExteriorFiltration make_filtration(std::shared_ptr<const FibrationData> fib);

/// Coordinates of Xi_m^n = F^m / F^{m+1} keyed by (coefficient word, quotient generator).
class XiCoordinates {
public:
    XiCoordinates(const ExteriorFiltration& f, int m, int n);
    /// throws std::invalid_argument when f is not in F^m
    std::map<std::pair<Word, int>, RatFunc> coords(const FormElement& f) const;
    int generators() const { return static_cast<int>(gens_.size()); }

private:
    const ExteriorFiltration* filt_;
    int m_, n_;
    std::vector<SparseVec<RatFunc>> gens_;
    Matrix<RatFunc> solver_;
};

/// One Z-degree block of the truncated total complex with its filtration.
struct FilteredBlock {
    int zdeg = 0;
    std::vector<FormBasis> C;
    std::vector<Matrix<RatFunc>> d;
    /// F[p][k] inside C^k
    std::vector<std::vector<Subspace<RatFunc>>> F;
};

struct FilteredComplex {
    std::shared_ptr<const FibrationData> fib;
    ExteriorFiltration filt;
    int N = 0;
    std::map<int, FilteredBlock> blocks;
    /// filtration laws, d^2 = 0, stability of F under right multiplication
    Report report;
};

FilteredComplex make_filtered_complex(std::shared_ptr<const FibrationData> fib, int N);

// ------------------------------------------------------------------ Xi

struct XiTableEntry {
    int m = 0, n = 0;
    std::vector<std::string> generators;
    /// dimension of Xi_m^n per Z-degree block at the truncation
    std::map<int, int> dims;
};

std::vector<XiTableEntry> xi_table(const FilteredComplex& fc);
/// quotient dims against generator-count predictions and well-defined quotient differential
Report xi_check(const FilteredComplex& fc);

// --------------------------------------------------------------- Theta

/// Theta_m : K^{^m} (x) X (x) W^n -> Xi_m^n, (kappa, y, w) -> [kappa y w]_m, solved on demand.
class ThetaMap {
public:
    ThetaMap(const ExteriorFiltration& f, int m, int n);

    struct DomainKey {
        int kappa;
        Word y;
        int w;
        auto operator<=>(const DomainKey&) const = default;
    };
    using Domain = std::map<DomainKey, RatFunc>;

    FormElement lift(const DomainKey& k) const;
    FormElement lift(const Domain& x) const;
    /// matrix on one block: domain keys with |y| <= L and total Z-degree zdeg
    struct Block {
        std::vector<DomainKey> domain;
        KeyIndex<std::pair<Word, int>> target;
        Matrix<RatFunc> matrix;
    };
    Block block(int zdeg, int L) const;
    /// Theta^-1 of the class of f in F^m; nullopt when not in the image
    std::optional<Domain> solve(const FormElement& f) const;
    int m() const { return m_; }
    int n() const { return n_; }
    const XiCoordinates& xi() const { return xi_; }

private:
    const ExteriorFiltration* filt_;
    int m_, n_;
    XiCoordinates xi_;
    std::vector<SparseVec<RatFunc>> w_;
};

/// Theta_m invertible on every block of the truncation, plus the cochain-map property
/// d(b ^ xi) = (-1)^m b ^ d xi mod F^{m+1} on base forms b.
Report fibration_test(const FilteredComplex& fc);

// ------------------------------------------------------ fibre cohomology

/// d x = [deg x; b] mu x w mod F^1 for every basis word of length <= N, mu read off at a.
/// b = q^-2 for the 3d calculus, b = q for the 4d one.
Report lemma_check(const ExteriorFiltration& f, int N, QBase base = QBase::QInvSquared);

struct FibreCohomology {
    /// dims of H^n(Xi_0^*) per (n, zdeg)
    std::map<std::pair<int, int>, int> dims;
    /// generators of H^n over B and nabla of each, as Theta_1 preimages
    std::vector<FormElement> generators;
    std::vector<ThetaMap::Domain> nabla;
    std::vector<ThetaMap::Domain> curvature;
    Report report;
};

FibreCohomology fibre_cohomology(const FilteredComplex& fc);

// -------------------------------------------------------- spectral pages

struct SpectralPage {
    int r = 0;
    /// dims keyed by (zdeg, p, q)
    std::map<std::tuple<int, int, int>, int> dims;
    /// d_r from (zdeg, p, q), in representative coordinates
    std::map<std::tuple<int, int, int>, Matrix<RatFunc>> d;
};

struct SpectralSequence {
    std::vector<SpectralPage> pages;
    /// dims of H^k of the truncated total complex per (zdeg, k)
    std::map<std::pair<int, int>, int> total;
    /// dims of the truncated de Rham cohomology of the base, per degree
    std::vector<int> base_cohomology;
    Report report;
};

/// pages E_0 .. E_{r_max}, page identities, E_1 / E_2 identifications and convergence
SpectralSequence spectral_sequence(const FilteredComplex& fc, int r_max);

// --------------------------------------------------------------- products

/// Omega^n X ^ Omega^m B inside Omega^m B ^ Omega^n X on the truncation.
Report braiding_condition_check(const FilteredComplex& fc);

/// sigma-hat([xi]_0 (x) omega) = Theta_m^-1((-1)^{nm} [xi ^ omega]_m) for a fibre form xi
std::optional<ThetaMap::Domain> sigma_hat(const ThetaMap& theta, const FormElement& xi, const FormElement& omega);

/// E^0 = B.1 and E^1 = B.[w] with zero connection; base forms represented inside X.
ProductStructure fibration_product_structure(const FilteredComplex& fc);

}  // namespace ncfib
