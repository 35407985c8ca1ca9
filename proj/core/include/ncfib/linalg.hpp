#pragma once

// Sparse exact linear algebra over Q(q) or Q: vectors, column matrices,
// incremental reduced row echelon spaces, kernels, solving and subspaces.

#include "ncfib/qfield.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ncfib {

template <class F>
struct FieldOps;

template <>
struct FieldOps<RatFunc> {
    static bool is_zero(const RatFunc& a) { return a.is_zero(); }
    static RatFunc inv(const RatFunc& a) { return a.inv(); }
};

template <>
struct FieldOps<Rational> {
    static bool is_zero(const Rational& a) { return sgn(a) == 0; }
    static Rational inv(const Rational& a)
    {
        if (sgn(a) == 0)
            throw ArithmeticError("division by zero in Q");
        Rational r = 1 / a;
        r.canonicalize();
        return r;
    }
};

/// Sparse vector: entries sorted by index, no zeros.
template <class F>
class SparseVec {
public:
    using Entry = std::pair<int, F>;

    SparseVec() = default;
    static SparseVec unit(int i)
    {
        SparseVec v;
        v.e_.emplace_back(i, F(1));
        return v;
    }
    static SparseVec from_map(const std::map<int, F>& m)
    {
        SparseVec v;
        for (const auto& [i, c] : m)
            if (!FieldOps<F>::is_zero(c))
                v.e_.emplace_back(i, c);
        return v;
    }

    bool is_zero() const { return e_.empty(); }
    std::size_t size() const { return e_.size(); }
    const std::vector<Entry>& entries() const { return e_; }
    int lead_index() const { return e_.front().first; }
    const F& lead() const { return e_.front().second; }

    F get(int i) const
    {
        auto it = std::lower_bound(e_.begin(), e_.end(), i, [](const Entry& a, int k) { return a.first < k; });
        return it != e_.end() && it->first == i ? it->second : F(0);
    }

    /// this += c * w
    void add_scaled(const SparseVec& w, const F& c)
    {
        if (FieldOps<F>::is_zero(c) || w.is_zero())
            return;
        std::vector<Entry> out;
        out.reserve(e_.size() + w.e_.size());
        auto a = e_.begin();
        auto b = w.e_.begin();
        while (a != e_.end() || b != w.e_.end()) {
            if (b == w.e_.end() || (a != e_.end() && a->first < b->first)) {
                out.push_back(std::move(*a++));
            }
            else if (a == e_.end() || b->first < a->first) {
                out.emplace_back(b->first, c * b->second);
                ++b;
            }
            else {
                F s = a->second + c * b->second;
                if (!FieldOps<F>::is_zero(s))
                    out.emplace_back(a->first, std::move(s));
                ++a;
                ++b;
            }
        }
        e_ = std::move(out);
    }

    void scale(const F& c)
    {
        if (FieldOps<F>::is_zero(c)) {
            e_.clear();
            return;
        }
        for (auto& [i, v] : e_)
            v = v * c;
    }

    /// Entries with lo <= index < hi, re-indexed by subtracting lo.
    SparseVec slice(int lo, int hi) const
    {
        SparseVec v;
        for (const auto& [i, c] : e_)
            if (i >= lo && i < hi)
                v.e_.emplace_back(i - lo, c);
        return v;
    }

    SparseVec shifted(int offset) const
    {
        SparseVec v = *this;
        for (auto& entry : v.e_)
            entry.first += offset;
        return v;
    }

    /// Relabel indices through perm (perm[i] is the new index of i).
    SparseVec permuted(const std::vector<int>& perm) const
    {
        std::map<int, F> m;
        for (const auto& [i, c] : e_)
            m.emplace(perm[i], c);
        return from_map(m);
    }

    friend SparseVec operator+(SparseVec a, const SparseVec& b)
    {
        a.add_scaled(b, F(1));
        return a;
    }
    friend SparseVec operator-(SparseVec a, const SparseVec& b)
    {
        a.add_scaled(b, F(-1));
        return a;
    }
    friend SparseVec operator*(const F& c, SparseVec a)
    {
        a.scale(c);
        return a;
    }
    friend bool operator==(const SparseVec& a, const SparseVec& b) { return a.e_ == b.e_; }

private:
    std::vector<Entry> e_;
};

/// Linear map stored by columns: cols[j] is the image of source basis vector j.
template <class F>
struct Matrix {
    int rows = 0;
    int cols_count = 0;
    std::vector<SparseVec<F>> cols;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols_count(c), cols(static_cast<std::size_t>(c)) {}

    SparseVec<F> apply(const SparseVec<F>& v) const
    {
        SparseVec<F> out;
        for (const auto& [j, c] : v.entries())
            out.add_scaled(cols[j], c);
        return out;
    }

    bool is_zero() const
    {
        return std::all_of(cols.begin(), cols.end(), [](const SparseVec<F>& c) { return c.is_zero(); });
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows == b.rows && a.cols_count == b.cols_count && a.cols == b.cols;
    }
};

/// b after a.
template <class F>
Matrix<F> compose(const Matrix<F>& b, const Matrix<F>& a)
{
    if (a.rows != b.cols_count)
        throw std::invalid_argument("compose: dimension mismatch " + std::to_string(b.rows) + "x" + std::to_string(b.cols_count) + " after " + std::to_string(a.rows) + "x" + std::to_string(a.cols_count));
    Matrix<F> m(b.rows, a.cols_count);
    for (int j = 0; j < a.cols_count; ++j)
        m.cols[j] = b.apply(a.cols[j]);
    return m;
}

template <class F>
Matrix<F> operator-(Matrix<F> a, const Matrix<F>& b)
{
    for (int j = 0; j < a.cols_count; ++j)
        a.cols[j] = a.cols[j] - b.cols[j];
    return a;
}

inline Matrix<Rational> specialize(const Matrix<RatFunc>& m, const Rational& r)
{
    Matrix<Rational> out(m.rows, m.cols_count);
    for (int j = 0; j < m.cols_count; ++j) {
        std::map<int, Rational> col;
        for (const auto& [i, c] : m.cols[j].entries())
            col.emplace(i, specialize(c, r));
        out.cols[j] = SparseVec<Rational>::from_map(col);
    }
    return out;
}

/// Fully reduced row echelon form built incrementally. The pivot of a row
/// is its smallest index, so low indices are eliminated first.
template <class F>
class RowSpace {
public:
    SparseVec<F> reduce(SparseVec<F> v) const
    {
        // rows carry no foreign pivots, so one pass over v's pivot entries suffices
        std::vector<std::pair<int, F>> hits;
        for (const auto& [i, c] : v.entries())
            if (rows_.count(i))
                hits.emplace_back(i, c);
        for (const auto& [i, c] : hits)
            v.add_scaled(rows_.at(i), -c);
        return v;
    }

    bool contains(const SparseVec<F>& v) const { return reduce(v).is_zero(); }

    /// Returns true if v was independent of the current rows.
    bool insert(const SparseVec<F>& v)
    {
        SparseVec<F> r = reduce(v);
        if (r.is_zero())
            return false;
        int p = r.lead_index();
        r.scale(FieldOps<F>::inv(r.lead()));
        for (auto& [pivot, row] : rows_) {
            F c = row.get(p);
            if (!FieldOps<F>::is_zero(c))
                row.add_scaled(r, -c);
        }
        rows_.emplace(p, std::move(r));
        return true;
    }

    int rank() const { return static_cast<int>(rows_.size()); }
    const std::map<int, SparseVec<F>>& rows() const { return rows_; }

private:
    std::map<int, SparseVec<F>> rows_;
};

template <class F>
struct KernelImage {
    int rank = 0;
    std::vector<SparseVec<F>> kernel;  // in source coordinates
    std::vector<SparseVec<F>> image;   // in target coordinates
};

template <class F>
KernelImage<F> kernel_image(const Matrix<F>& a)
{
    RowSpace<F> rs;
    for (int j = 0; j < a.cols_count; ++j)
        rs.insert(a.cols[j] + SparseVec<F>::unit(a.rows + j));
    KernelImage<F> out;
    for (const auto& [p, row] : rs.rows()) {
        if (p < a.rows) {
            out.image.push_back(row.slice(0, a.rows));
            ++out.rank;
        }
        else {
            out.kernel.push_back(row.slice(a.rows, a.rows + a.cols_count));
        }
    }
    return out;
}

template <class F>
int rank(const Matrix<F>& a)
{
    RowSpace<F> rs;
    for (const auto& c : a.cols)
        rs.insert(c);
    return rs.rank();
}

/// Some x with a x = w, if one exists.
template <class F>
std::optional<SparseVec<F>> solve(const Matrix<F>& a, const SparseVec<F>& w)
{
    RowSpace<F> rs;
    for (int j = 0; j < a.cols_count; ++j)
        rs.insert(a.cols[j] + SparseVec<F>::unit(a.rows + j));
    SparseVec<F> r = rs.reduce(w);
    if (!r.slice(0, a.rows).is_zero())
        return std::nullopt;
    SparseVec<F> x = r.slice(a.rows, a.rows + a.cols_count);
    x.scale(F(-1));
    return x;
}

/// Subspace of F^dim given by a basis (kept linearly independent).
template <class F>
class Subspace {
public:
    explicit Subspace(int dim = 0) : dim_(dim) {}
    Subspace(int dim, const std::vector<SparseVec<F>>& spanning) : dim_(dim)
    {
        for (const auto& v : spanning)
            add(v);
    }

    bool add(const SparseVec<F>& v)
    {
        if (!rs_.insert(v))
            return false;
        basis_.push_back(v);
        return true;
    }

    int dim() const { return rank(); }
    int ambient() const { return dim_; }
    int rank() const { return rs_.rank(); }
    bool contains(const SparseVec<F>& v) const { return rs_.contains(v); }
    const std::vector<SparseVec<F>>& basis() const { return basis_; }
    const RowSpace<F>& echelon() const { return rs_; }

    bool contains(const Subspace& other) const
    {
        return std::all_of(other.basis_.begin(), other.basis_.end(), [this](const auto& v) { return contains(v); });
    }
    friend bool operator==(const Subspace& a, const Subspace& b)
    {
        return a.rank() == b.rank() && a.contains(b);
    }

    Subspace sum(const Subspace& other) const
    {
        Subspace s = *this;
        for (const auto& v : other.basis_)
            s.add(v);
        return s;
    }

    Subspace intersect(const Subspace& other) const
    {
        int k = static_cast<int>(basis_.size());
        int l = static_cast<int>(other.basis_.size());
        Matrix<F> m(dim_, k + l);
        for (int i = 0; i < k; ++i)
            m.cols[i] = basis_[i];
        for (int j = 0; j < l; ++j)
            m.cols[k + j] = F(-1) * other.basis_[j];
        Subspace out(dim_);
        for (const auto& x : kernel_image(m).kernel) {
            SparseVec<F> v;
            for (const auto& [i, c] : x.entries())
                if (i < k)
                    v.add_scaled(basis_[i], c);
            out.add(v);
        }
        return out;
    }

    /// Vectors of this space completing sub (assumed contained) to a basis.
    std::vector<SparseVec<F>> complement_of(const Subspace& sub) const
    {
        RowSpace<F> rs = sub.rs_;
        std::vector<SparseVec<F>> out;
        for (const auto& v : basis_)
            if (rs.insert(v))
                out.push_back(v);
        return out;
    }

private:
    int dim_;
    RowSpace<F> rs_;
    std::vector<SparseVec<F>> basis_;
};

/// Preimage a^{-1}(S) of a subspace S of the target.
template <class F>
Subspace<F> preimage(const Matrix<F>& a, const Subspace<F>& s)
{
    // kernel of the composite source -> target / S
    int k = static_cast<int>(s.basis().size());
    Matrix<F> m(a.rows, a.cols_count + k);
    for (int j = 0; j < a.cols_count; ++j)
        m.cols[j] = a.cols[j];
    for (int i = 0; i < k; ++i)
        m.cols[a.cols_count + i] = s.basis()[i];
    Subspace<F> out(a.cols_count);
    for (const auto& x : kernel_image(m).kernel)
        out.add(x.slice(0, a.cols_count));
    return out;
}

template <class F>
Subspace<F> image(const Matrix<F>& a, const Subspace<F>& s)
{
    Subspace<F> out(a.rows);
    for (const auto& v : s.basis())
        out.add(a.apply(v));
    return out;
}

template <class F>
Subspace<F> full_space(int dim)
{
    Subspace<F> s(dim);
    for (int i = 0; i < dim; ++i)
        s.add(SparseVec<F>::unit(i));
    return s;
}

/// Assigns consecutive indices to keys on first sight.
template <class K>
class KeyIndex {
public:
    int id(const K& k)
    {
        auto [it, inserted] = idx_.try_emplace(k, static_cast<int>(keys_.size()));
        if (inserted)
            keys_.push_back(k);
        return it->second;
    }
    std::optional<int> find(const K& k) const
    {
        auto it = idx_.find(k);
        if (it == idx_.end())
            return std::nullopt;
        return it->second;
    }
    int size() const { return static_cast<int>(keys_.size()); }
    const std::vector<K>& keys() const { return keys_; }

private:
    std::map<K, int> idx_;
    std::vector<K> keys_;
};

}  // namespace ncfib
