#include "locmodel/linalg.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace locmodel::linalg {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

Field::Field(int p) : p_(p) {
    if (!is_prime(p) || p > max_prime)
        throw Error(Errc::invalid_argument, "field: p must be a prime <= 13, got " + std::to_string(p));
    for (int a = 1; a < p; ++a)
        for (int b = 1; b < p; ++b)
            if ((a * b) % p == 1) inv_[a] = static_cast<elem>(b);
}

elem Field::inv(elem a) const {
    if (a % p_ == 0) throw Error(Errc::invalid_argument, "field: inverse of zero");
    return inv_[a];
}

Matrix::Matrix(Field f, int rows, int cols)
    : f_(f), rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0) {}

Matrix Matrix::identity(Field f, int n) {
    Matrix m(f, n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

Matrix Matrix::from_rows(Field f, const std::vector<std::vector<long long>>& rows, int cols) {
    int c = cols >= 0 ? cols : (rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    Matrix m(f, static_cast<int>(rows.size()), c);
    for (int r = 0; r < m.rows_; ++r) {
        if (static_cast<int>(rows[r].size()) != c)
            throw Error(Errc::dimension_mismatch, "from_rows: ragged rows");
        for (int j = 0; j < c; ++j) m.set(r, j, rows[r][j]);
    }
    return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_ || !(f_ == o.f_)) throw Error(Errc::dimension_mismatch, "matrix product: shape mismatch");
    Matrix out(f_, rows_, o.cols_);
    const int p = f_.p();
    std::vector<int> acc(static_cast<std::size_t>(o.cols_));
    for (int i = 0; i < rows_; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (int k = 0; k < cols_; ++k) {
            int a = (*this)(i, k);
            if (a == 0) continue;
            const elem* orow = o.row(k);
            for (int j = 0; j < o.cols_; ++j) acc[j] += a * orow[j];
        }
        elem* dst = out.row(i);
        for (int j = 0; j < o.cols_; ++j) dst[j] = static_cast<elem>(acc[j] % p);
    }
    return out;
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (cols_ != o.cols_ || rows_ != o.rows_) throw Error(Errc::dimension_mismatch, "matrix sum: shape mismatch");
    Matrix out = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = f_.add(a_[i], o.a_[i]);
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(f_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t.a_[static_cast<std::size_t>(j) * rows_ + i] = (*this)(i, j);
    return t;
}

Matrix Matrix::power(int k) const {
    if (rows_ != cols_) throw Error(Errc::dimension_mismatch, "matrix power: not square");
    Matrix out = identity(f_, rows_);
    for (int i = 0; i < k; ++i) out = out * *this;
    return out;
}

void Matrix::append_row(const elem* v) {
    a_.insert(a_.end(), v, v + cols_);
    ++rows_;
}

Matrix Matrix::select_rows(const std::vector<int>& idx) const {
    Matrix out(f_, static_cast<int>(idx.size()), cols_);
    for (std::size_t r = 0; r < idx.size(); ++r) std::copy(row(idx[r]), row(idx[r]) + cols_, out.row(static_cast<int>(r)));
    return out;
}

std::vector<elem> Matrix::apply(const elem* x) const {
    std::vector<elem> y(static_cast<std::size_t>(rows_), 0);
    for (int i = 0; i < rows_; ++i) {
        int acc = 0;
        const elem* r = row(i);
        for (int j = 0; j < cols_; ++j) acc += r[j] * x[j];
        y[i] = static_cast<elem>(acc % f_.p());
    }
    return y;
}

bool Matrix::is_zero() const noexcept {
    return std::all_of(a_.begin(), a_.end(), [](elem v) { return v == 0; });
}

std::string Matrix::str() const {
    std::ostringstream os;
    os << '[';
    for (int i = 0; i < rows_; ++i) {
        if (i) os << ',';
        os << '[';
        for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << int((*this)(i, j));
        os << ']';
    }
    os << ']';
    return os.str();
}

namespace {

// In-place Gauss-Jordan elimination; returns the pivot columns.
std::vector<int> eliminate(Matrix& m) {
    const Field& f = m.field();
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int sel = -1;
        for (int i = r; i < m.rows(); ++i)
            if (m(i, c) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != r) std::swap_ranges(m.row(sel), m.row(sel) + m.cols(), m.row(r));
        elem s = f.inv(m(r, c));
        elem* pr = m.row(r);
        for (int j = c; j < m.cols(); ++j) pr[j] = f.mul(pr[j], s);
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0) continue;
            elem k = m(i, c);
            elem* ri = m.row(i);
            for (int j = c; j < m.cols(); ++j) ri[j] = f.sub(ri[j], f.mul(k, pr[j]));
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

}  // namespace

int rank(const Matrix& m) {
    Matrix w = m;
    return static_cast<int>(eliminate(w).size());
}

Matrix rref(const Matrix& m) {
    Matrix w = m;
    auto piv = eliminate(w);
    std::vector<int> keep(piv.size());
    for (std::size_t i = 0; i < piv.size(); ++i) keep[i] = static_cast<int>(i);
    return w.select_rows(keep);
}

Matrix null_space(const Matrix& m) {
    Matrix w = m;
    auto piv = eliminate(w);
    const Field& f = m.field();
    std::vector<char> is_piv(static_cast<std::size_t>(m.cols()), 0);
    for (int c : piv) is_piv[c] = 1;
    Matrix out(f, 0, m.cols());
    std::vector<elem> v(static_cast<std::size_t>(m.cols()));
    for (int fc = 0; fc < m.cols(); ++fc) {
        if (is_piv[fc]) continue;
        std::fill(v.begin(), v.end(), 0);
        v[fc] = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = f.neg(w(static_cast<int>(r), fc));
        out.append_row(v.data());
    }
    return rref(out);
}

Subspace::Subspace(Field f, int n) : n_(n), basis_(f, 0, n) {}

Subspace Subspace::span(const Matrix& generators) {
    Subspace s;
    s.n_ = generators.cols();
    s.basis_ = rref(generators);
    return s;
}

Subspace Subspace::span(Field f, int n, const std::vector<std::vector<long long>>& rows) {
    if (rows.empty()) return Subspace(f, n);
    return span(Matrix::from_rows(f, rows, n));
}

Subspace Subspace::full(Field f, int n) { return from_rref(Matrix::identity(f, n)); }

Subspace Subspace::from_rref(Matrix basis) {
    Subspace s;
    s.n_ = basis.cols();
    s.basis_ = std::move(basis);
    return s;
}

std::vector<int> Subspace::pivots() const {
    std::vector<int> piv;
    for (int r = 0; r < dim(); ++r) {
        const elem* row = basis_.row(r);
        for (int c = 0; c < n_; ++c)
            if (row[c] != 0) {
                piv.push_back(c);
                break;
            }
    }
    return piv;
}

bool Subspace::contains(const elem* v) const {
    const Field& f = field();
    std::vector<elem> w(v, v + n_);
    for (int r = 0; r < dim(); ++r) {
        const elem* row = basis_.row(r);
        int c = 0;
        while (row[c] == 0) ++c;
        elem k = w[c];
        if (k == 0) continue;
        for (int j = c; j < n_; ++j) w[j] = f.sub(w[j], f.mul(k, row[j]));
    }
    return std::all_of(w.begin(), w.end(), [](elem x) { return x == 0; });
}

bool Subspace::contains(const Subspace& other) const {
    if (other.n_ != n_) throw Error(Errc::dimension_mismatch, "contains: ambient mismatch");
    if (other.dim() > dim()) return false;
    for (int r = 0; r < other.dim(); ++r)
        if (!contains(other.basis_.row(r))) return false;
    return true;
}

bool Subspace::operator<(const Subspace& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    if (dim() != o.dim()) return dim() < o.dim();
    // Same order as enumerate_subspaces: pivot set first, then free entries.
    auto pa = pivots(), pb = o.pivots();
    if (pa != pb) return pa < pb;
    const elem* a = basis_.row(0);
    const elem* b = o.basis_.row(0);
    return std::lexicographical_compare(a, a + static_cast<std::size_t>(dim()) * n_, b,
                                        b + static_cast<std::size_t>(dim()) * n_);
}

std::size_t Subspace::hash() const noexcept {
    std::size_t h = static_cast<std::size_t>(n_) * 1315423911u + static_cast<std::size_t>(dim());
    for (int r = 0; r < dim(); ++r) {
        const elem* row = basis_.row(r);
        for (int c = 0; c < n_; ++c) h = h * 31 + row[c];
    }
    return h;
}

static void require_same(const Subspace& a, const Subspace& b, const char* op) {
    if (a.ambient_dim() != b.ambient_dim() || !(a.field() == b.field()))
        throw Error(Errc::dimension_mismatch, std::string(op) + ": ambient mismatch");
}

Subspace join(const Subspace& a, const Subspace& b) {
    require_same(a, b, "join");
    Matrix g = a.basis();
    for (int r = 0; r < b.dim(); ++r) g.append_row(b.basis().row(r));
    return Subspace::span(g);
}

Subspace annihilator(const Subspace& a) { return Subspace::span(null_space(a.basis())); }

Subspace meet(const Subspace& a, const Subspace& b) {
    require_same(a, b, "meet");
    return annihilator(join(annihilator(a), annihilator(b)));
}

Subspace subspace_ops(const Subspace& a, const Subspace& b, SubspaceOp op) {
    return op == SubspaceOp::meet ? meet(a, b) : join(a, b);
}

Subspace image(const Matrix& f, const Subspace& a) {
    if (f.cols() != a.ambient_dim()) throw Error(Errc::dimension_mismatch, "image: shape mismatch");
    if (a.dim() == 0) return Subspace(f.field(), f.rows());
    return Subspace::span(a.basis() * f.transpose());
}

Subspace preimage(const Matrix& f, const Subspace& b) {
    if (f.rows() != b.ambient_dim()) throw Error(Errc::dimension_mismatch, "preimage: shape mismatch");
    Subspace ann = annihilator(b);
    if (ann.dim() == 0) return Subspace::full(f.field(), f.cols());
    return Subspace::span(null_space(ann.basis() * f));
}

Subspace perp(const Subspace& a, const Matrix& gram) {
    if (gram.rows() != gram.cols() || gram.rows() != a.ambient_dim())
        throw Error(Errc::dimension_mismatch, "perp: gram shape mismatch");
    if (rank(gram) != gram.rows()) throw Error(Errc::singular_gram, "perp: gram matrix is not invertible");
    if (a.dim() == 0) return Subspace::full(gram.field(), gram.cols());
    return Subspace::span(null_space(a.basis() * gram));
}

bool stable_under(const Subspace& a, const Matrix& f) {
    if (f.rows() != a.ambient_dim() || f.cols() != a.ambient_dim())
        throw Error(Errc::dimension_mismatch, "stable_under: operator shape mismatch");
    for (int r = 0; r < a.dim(); ++r) {
        auto y = f.apply(a.basis().row(r));
        if (!a.contains(y.data())) return false;
    }
    return true;
}

std::uint64_t gaussian_binomial(int n, int k, int p) {
    if (k < 0 || k > n) return 0;
    // Pascal-type recurrence [m,j] = [m-1,j-1] + p^j [m-1,j], saturating.
    using u128 = unsigned __int128;
    const u128 cap = std::numeric_limits<std::uint64_t>::max();
    auto sat = [&](u128 v) { return v > cap ? cap + 1 : v; };
    std::vector<u128> row(static_cast<std::size_t>(k) + 1, 0);
    row[0] = 1;
    for (int m = 1; m <= n; ++m) {
        for (int j = std::min(m, k); j >= 1; --j) {
            u128 pj = 1;
            for (int t = 0; t < j; ++t) pj = sat(pj * static_cast<unsigned>(p));
            row[j] = sat(row[j - 1] + sat(pj * row[j]));
        }
    }
    return row[k] > cap ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(row[k]);
}

std::vector<std::vector<int>> pivot_sets(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> c(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) c[i] = i;
    while (true) {
        out.push_back(c);
        int i = k - 1;
        while (i >= 0 && c[i] == n - k + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
}

bool enumerate_partition(Field f, int n, const std::vector<int>& pivots, const SubspaceVisitor& visit) {
    const int k = static_cast<int>(pivots.size());
    std::vector<char> is_piv(static_cast<std::size_t>(n), 0);
    for (int c : pivots) is_piv[c] = 1;
    std::vector<std::pair<int, int>> free_pos;
    for (int r = 0; r < k; ++r)
        for (int c = pivots[r] + 1; c < n; ++c)
            if (!is_piv[c]) free_pos.emplace_back(r, c);
    Matrix m(f, k, n);
    for (int r = 0; r < k; ++r) m.set(r, pivots[r], 1);
    std::vector<int> digits(free_pos.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < free_pos.size(); ++i) m.set(free_pos[i].first, free_pos[i].second, digits[i]);
        if (!visit(Subspace::from_rref(m))) return false;
        int i = static_cast<int>(free_pos.size()) - 1;
        while (i >= 0 && digits[i] == f.p() - 1) digits[i--] = 0;
        if (i < 0) break;
        ++digits[i];
    }
    return true;
}

bool enumerate_subspaces(int n, int k, Field f, const SubspaceVisitor& visit) {
    if (k < 0 || k > n) throw Error(Errc::invalid_argument, "enumerate_subspaces: need 0 <= k <= n");
    check_budget(gaussian_binomial(n, k, f.p()), "enumerate_subspaces");
    for (const auto& piv : pivot_sets(n, k))
        if (!enumerate_partition(f, n, piv, visit)) return false;
    return true;
}

std::vector<Subspace> all_subspaces(int n, int k, Field f) {
    std::vector<Subspace> out;
    enumerate_subspaces(n, k, f, [&](const Subspace& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

bool enumerate_between(const Subspace& lo, const Subspace& hi, int k, const SubspaceVisitor& visit) {
    require_same(lo, hi, "enumerate_between");
    if (!hi.contains(lo)) throw Error(Errc::invalid_argument, "enumerate_between: lo is not contained in hi");
    if (k < lo.dim() || k > hi.dim()) return true;
    const Field& f = lo.field();
    const int n = lo.ambient_dim();
    // Complement of lo inside hi, taken from the basis of hi.
    Matrix acc = lo.basis();
    Matrix comp(f, 0, n);
    for (int r = 0; r < hi.dim() && comp.rows() < hi.dim() - lo.dim(); ++r) {
        Matrix trial = acc;
        trial.append_row(hi.basis().row(r));
        if (rank(trial) > acc.rows()) {
            acc = trial;
            comp.append_row(hi.basis().row(r));
        }
    }
    const int c = comp.rows();
    return enumerate_subspaces(c, k - lo.dim(), f, [&](const Subspace& q) {
        Matrix g = lo.basis();
        if (q.dim() > 0) {
            Matrix lifted = q.basis() * comp;
            for (int r = 0; r < lifted.rows(); ++r) g.append_row(lifted.row(r));
        }
        return visit(Subspace::span(g));
    });
}

}  // namespace locmodel::linalg
