#pragma once

// Exact linear algebra over prime fields F_p (p <= 13) and enumeration of
// subspaces in canonical reduced-row-echelon order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "locmodel/errors.hpp"

namespace locmodel::linalg {

using elem = std::uint8_t;

class Field {
public:
    static constexpr int max_prime = 13;

    explicit Field(int p = 2);

    int p() const noexcept { return p_; }
    elem add(elem a, elem b) const noexcept { return static_cast<elem>((a + b) % p_); }
    elem sub(elem a, elem b) const noexcept { return static_cast<elem>((a + p_ - b) % p_); }
    elem mul(elem a, elem b) const noexcept { return static_cast<elem>((a * b) % p_); }
    elem neg(elem a) const noexcept { return static_cast<elem>((p_ - a) % p_); }
    elem inv(elem a) const;
    elem reduce(long long x) const noexcept {
        long long r = x % p_;
        return static_cast<elem>(r < 0 ? r + p_ : r);
    }

    bool operator==(const Field& o) const noexcept { return p_ == o.p_; }

private:
    int p_;
    std::array<elem, 16> inv_{};
};

bool is_prime(int p);

// Dense row-major matrix with entries reduced mod p.
class Matrix {
public:
    Matrix() = default;
    Matrix(Field f, int rows, int cols);

    static Matrix identity(Field f, int n);
    static Matrix from_rows(Field f, const std::vector<std::vector<long long>>& rows, int cols = -1);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    const Field& field() const noexcept { return f_; }

    elem operator()(int r, int c) const noexcept { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    void set(int r, int c, long long v) { a_[static_cast<std::size_t>(r) * cols_ + c] = f_.reduce(v); }
    const elem* row(int r) const noexcept { return a_.data() + static_cast<std::size_t>(r) * cols_; }
    elem* row(int r) noexcept { return a_.data() + static_cast<std::size_t>(r) * cols_; }

    Matrix operator*(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix transpose() const;
    Matrix power(int k) const;
    void append_row(const elem* v);
    Matrix select_rows(const std::vector<int>& idx) const;

    // y = M x for a column vector x of length cols().
    std::vector<elem> apply(const elem* x) const;

    bool is_zero() const noexcept;
    bool operator==(const Matrix& o) const noexcept {
        return f_ == o.f_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    std::string str() const;

private:
    Field f_{};
    int rows_ = 0;
    int cols_ = 0;
    std::vector<elem> a_;
};

// Row rank over F_p.
int rank(const Matrix& m);

// Reduced row echelon form with zero rows removed.
Matrix rref(const Matrix& m);

// Basis (RREF rows) of {x : m x = 0}.
Matrix null_space(const Matrix& m);

class Subspace {
public:
    Subspace() = default;
    // The zero subspace of F_p^n.
    Subspace(Field f, int n);

    static Subspace span(const Matrix& generators);
    static Subspace span(Field f, int n, const std::vector<std::vector<long long>>& rows);
    static Subspace full(Field f, int n);
    // Wraps a matrix already known to be in RREF without zero rows.
    static Subspace from_rref(Matrix basis);

    const Field& field() const noexcept { return basis_.field(); }
    int ambient_dim() const noexcept { return n_; }
    int dim() const noexcept { return basis_.rows(); }
    const Matrix& basis() const noexcept { return basis_; }
    std::vector<int> pivots() const;

    bool contains(const elem* v) const;
    bool contains(const Subspace& other) const;

    bool operator==(const Subspace& o) const noexcept { return n_ == o.n_ && basis_ == o.basis_; }
    bool operator<(const Subspace& o) const;
    std::size_t hash() const noexcept;

private:
    int n_ = 0;
    Matrix basis_;
};

struct SubspaceHash {
    std::size_t operator()(const Subspace& s) const noexcept { return s.hash(); }
};

enum class SubspaceOp { meet, join };

Subspace subspace_ops(const Subspace& a, const Subspace& b, SubspaceOp op);
Subspace meet(const Subspace& a, const Subspace& b);
Subspace join(const Subspace& a, const Subspace& b);
// f is an m x n matrix acting on column vectors, a lives in F_p^n.
Subspace image(const Matrix& f, const Subspace& a);
// f is m x n, b lives in F_p^m; returns {v in F_p^n : f v in b}.
Subspace preimage(const Matrix& f, const Subspace& b);
// Annihilator under the standard dot product.
Subspace annihilator(const Subspace& a);
// {w : v^T gram w = 0 for all v in a}; gram must be square and invertible.
Subspace perp(const Subspace& a, const Matrix& gram);
bool stable_under(const Subspace& a, const Matrix& f);

// Gaussian binomial [n choose k]_p, saturating at UINT64_MAX.
std::uint64_t gaussian_binomial(int n, int k, int p);

// Pivot-column sets of k-dimensional subspaces of F_p^n in lexicographic
// order; each set indexes one partition of the enumeration.
std::vector<std::vector<int>> pivot_sets(int n, int k);

// Callbacks return false to stop the stream early. Both functions return
// false iff they were stopped.
using SubspaceVisitor = std::function<bool(const Subspace&)>;

bool enumerate_partition(Field f, int n, const std::vector<int>& pivots, const SubspaceVisitor& visit);

// All k-dimensional subspaces of F_p^n, each exactly once, ordered by pivot set
// and then by free entries. Throws budget_exceeded when the Gaussian binomial
// exceeds the guard.
bool enumerate_subspaces(int n, int k, Field f, const SubspaceVisitor& visit);

std::vector<Subspace> all_subspaces(int n, int k, Field f);

// All k-dimensional V with lo ⊆ V ⊆ hi.
bool enumerate_between(const Subspace& lo, const Subspace& hi, int k, const SubspaceVisitor& visit);

}  // namespace locmodel::linalg
