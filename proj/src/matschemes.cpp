#include "locmodel/matschemes.hpp"

#include <algorithm>
#include <array>
#include <thread>

#include "locmodel/errors.hpp"

namespace locmodel::matschemes {

using linalg::elem;
using linalg::Field;
using linalg::Matrix;

namespace {

std::uint64_t ipow(std::uint64_t b, int k) {
    std::uint64_t r = 1;
    while (k-- > 0) r *= b;
    return r;
}

Field field_of(int p) {
    if (!linalg::is_prime(p) || p > Field::max_prime)
        throw Error(Errc::invalid_argument, "p must be a prime <= 13");
    return Field(p);
}

constexpr int kMaxN = 6;
using Small = std::array<std::array<int, kMaxN>, kMaxN>;

int small_rank(Small a, int n, int p) {
    int rk = 0;
    for (int c = 0; c < n && rk < n; ++c) {
        int piv = -1;
        for (int r = rk; r < n; ++r)
            if (a[r][c]) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[piv], a[rk]);
        int inv = 1;
        while (a[rk][c] * inv % p != 1) ++inv;
        for (int r = 0; r < n; ++r) {
            if (r == rk || !a[r][c]) continue;
            int f = a[r][c] * inv % p;
            for (int k = 0; k < n; ++k) a[r][k] = ((a[r][k] - f * a[rk][k]) % p + p) % p;
        }
        ++rk;
    }
    return rk;
}

bool square_zero(const Small& a, int n, int p) {
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            int s = 0;
            for (int k = 0; k < n; ++k) s += a[i][k] * a[k][j];
            if (s % p) return false;
        }
    return true;
}

Matrix to_matrix(const Small& a, int n, const Field& f) {
    Matrix m(f, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.set(i, j, a[i][j]);
    return m;
}

// All symmetric n×n matrices with A(0,0) = first, in odometer order.
template <class Fn>
void for_symmetric(int n, int p, int first, Fn fn) {
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) slots.push_back({i, j});
    Small a{};
    a[0][0] = first;
    const std::size_t m = slots.size();
    std::vector<int> v(m, 0);
    v[0] = first;
    while (true) {
        fn(a);
        std::size_t k = m;
        bool done = true;
        while (k > 1) {
            --k;
            auto [i, j] = slots[k];
            if (++v[k] < p) {
                a[i][j] = a[j][i] = v[k];
                done = false;
                break;
            }
            v[k] = 0;
            a[i][j] = a[j][i] = 0;
        }
        if (done) return;
    }
}

}  // namespace

void validate(const UnitarySchemeSpec& s) {
    field_of(s.p);
    if (s.n < 1 || s.n > kMaxN) throw Error(Errc::invalid_argument, "unitary: need 1 <= n <= 6");
    if (s.r + s.s != s.n || s.r < 0 || s.s < 0)
        throw Error(Errc::invalid_argument, "unitary: need r, s >= 0 with r + s = n");
}

UnitaryCount unitary_points_direct(const UnitarySchemeSpec& spec, int jobs) {
    validate(spec);
    const int n = spec.n, p = spec.p;
    const int bound = std::min(spec.r, spec.s);
    check_budget(ipow(static_cast<std::uint64_t>(p), n * (n + 1) / 2), "unitary_points_direct");
    const Field f(p);
    std::vector<UnitaryCount> part(static_cast<std::size_t>(p));
    auto work = [&](int first) {
        UnitaryCount& c = part[static_cast<std::size_t>(first)];
        c.by_rank.assign(static_cast<std::size_t>(n) + 1, 0);
        for_symmetric(n, p, first, [&](const Small& a) {
            if (!square_zero(a, n, p)) return;
            auto cp = charpoly(to_matrix(a, n, f));
            for (int k = 0; k < n; ++k) c.charpoly_ok = c.charpoly_ok && cp[k] == 0;
            int rk = small_rank(a, n, p);
            if (rk > bound) return;
            ++c.total;
            ++c.by_rank[rk];
        });
    };
    if (jobs <= 1) {
        for (int v = 0; v < p; ++v) work(v);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                for (int v = w; v < p; v += jobs) work(v);
            });
        for (auto& t : pool) t.join();
    }
    UnitaryCount out;
    out.by_rank.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& c : part) {
        out.total += c.total;
        out.charpoly_ok = out.charpoly_ok && c.charpoly_ok;
        for (int k = 0; k <= n; ++k) out.by_rank[k] += c.by_rank[k];
    }
    return out;
}

UnitaryCount unitary_points_stratified(const UnitarySchemeSpec& spec) {
    validate(spec);
    const int n = spec.n, p = spec.p;
    const int bound = std::min(spec.r, spec.s);
    const Field f(p);
    UnitaryCount out;
    out.by_rank.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int k = 0; k <= bound; ++k) {
        check_budget(linalg::gaussian_binomial(n, k, p), "unitary_points_stratified");
        std::uint64_t isotropic = 0;
        if (k == 0) {
            isotropic = 1;
        } else {
            linalg::enumerate_subspaces(n, k, f, [&](const linalg::Subspace& U) {
                const Matrix& C = U.basis();
                if ((C * C.transpose()).is_zero()) ++isotropic;
                return true;
            });
        }
        std::uint64_t invertible = 0;
        if (k == 0) {
            invertible = 1;
        } else {
            check_budget(ipow(static_cast<std::uint64_t>(p), k * (k + 1) / 2), "unitary_points_stratified");
            for (int v = 0; v < p; ++v)
                for_symmetric(k, p, v, [&](const Small& a) { invertible += small_rank(a, k, p) == k; });
        }
        out.by_rank[k] = isotropic * invertible;
        out.total += out.by_rank[k];
    }
    return out;
}

void validate(const SymplecticPSpec& s) {
    field_of(s.p);
    if (s.g < 1 || s.e < 1 || s.g * s.e > 3) throw Error(Errc::invalid_argument, "symplectic_P: need g, e >= 1 and ge <= 3");
}

namespace {

// Odometer over all n×n matrices (cells given explicitly).
template <class Fn>
void for_cells(Matrix& m, const std::vector<std::pair<int, int>>& cells, int p, Fn fn) {
    std::vector<int> v(cells.size(), 0);
    for (auto [i, j] : cells) m.set(i, j, 0);
    while (true) {
        fn();
        std::size_t k = cells.size();
        while (true) {
            if (k == 0) return;
            --k;
            auto [i, j] = cells[k];
            if (++v[k] < p) {
                m.set(i, j, v[k]);
                break;
            }
            v[k] = 0;
            m.set(i, j, 0);
        }
    }
}

std::vector<std::pair<int, int>> all_cells(int n) {
    std::vector<std::pair<int, int>> c;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c.push_back({i, j});
    return c;
}

std::vector<std::pair<int, int>> upper_cells(int n) {
    std::vector<std::pair<int, int>> c;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c.push_back({i, j});
    return c;
}

// b alternating from its strict upper triangle.
void fill_lower(Matrix& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < i; ++j) b.set(i, j, -static_cast<int>(b(j, i)));
}

}  // namespace

std::uint64_t symplectic_P_points(const SymplecticPSpec& spec) {
    validate(spec);
    const int n = spec.g * spec.e, p = spec.p;
    const Field f(p);
    check_budget(ipow(static_cast<std::uint64_t>(p), n * n + n * (n - 1) / 2), "symplectic_P_points");
    Matrix a(f, n, n), b(f, n, n);
    std::uint64_t count = 0;
    const auto ac = all_cells(n), bc = upper_cells(n);
    for_cells(a, ac, p, [&] {
        auto cp = charpoly(a);
        for (int k = 0; k < n; ++k)
            if (cp[k]) return;
        for_cells(b, bc, p, [&] {
            fill_lower(b);
            Matrix A(f, 2 * n, 2 * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    A.set(i, j, a(i, j));
                    A.set(i, n + j, b(i, j));
                    A.set(n + i, n + j, a(j, i));
                }
            if (A.power(spec.e).is_zero()) ++count;
        });
    });
    return count;
}

std::uint64_t symplectic_P_points_linear(const SymplecticPSpec& spec) {
    validate(spec);
    const int n = spec.g * spec.e, p = spec.p, e = spec.e;
    const Field f(p);
    check_budget(ipow(static_cast<std::uint64_t>(p), n * n), "symplectic_P_points_linear");
    const auto bc = upper_cells(n);
    const int nb = static_cast<int>(bc.size());
    Matrix a(f, n, n);
    std::uint64_t count = 0;
    for_cells(a, all_cells(n), p, [&] {
        if (!a.power(n).is_zero()) return;  // nilpotent ⟺ char_a = T^n
        if (!a.power(e).is_zero()) return;  // diagonal blocks of A^e
        // Upper-right block of A^e: Σ_{i+j=e-1} a^i b (aᵗ)^j, linear in b.
        const Matrix at = a.transpose();
        Matrix sys(f, n * n, nb);
        for (int v = 0; v < nb; ++v) {
            Matrix b(f, n, n);
            b.set(bc[v].first, bc[v].second, 1);
            fill_lower(b);
            Matrix acc(f, n, n);
            for (int i = 0; i < e; ++i) acc = acc + a.power(i) * b * at.power(e - 1 - i);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) sys.set(r * n + c, v, acc(r, c));
        }
        count += ipow(static_cast<std::uint64_t>(p), nb - linalg::rank(sys));
    });
    return count;
}

std::vector<elem> charpoly(const Matrix& M) {
    // Reduce to upper Hessenberg form by similarity, then expand.
    const Field& f = M.field();
    const int n = M.rows();
    Matrix H = M;
    auto addrow = [&](int dst, int src, elem c) {  // row dst += c row src
        for (int k = 0; k < n; ++k) H.set(dst, k, H(dst, k) + c * H(src, k));
    };
    auto addcol = [&](int dst, int src, elem c) {
        for (int k = 0; k < n; ++k) H.set(k, dst, H(k, dst) + c * H(k, src));
    };
    for (int c = 0; c + 2 < n; ++c) {
        int piv = -1;
        for (int r = c + 1; r < n; ++r)
            if (H(r, c)) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        if (piv != c + 1) {
            for (int k = 0; k < n; ++k) {
                elem t = H(piv, k);
                H.set(piv, k, H(c + 1, k));
                H.set(c + 1, k, t);
            }
            for (int k = 0; k < n; ++k) {
                elem t = H(k, piv);
                H.set(k, piv, H(k, c + 1));
                H.set(k, c + 1, t);
            }
        }
        const elem inv = f.inv(H(c + 1, c));
        for (int r = c + 2; r < n; ++r) {
            if (!H(r, c)) continue;
            elem m = f.mul(H(r, c), inv);
            addrow(r, c + 1, f.neg(m));
            addcol(c + 1, r, m);
        }
    }
    // p_k = det(T - H[0..k)) by the Hessenberg recurrence.
    std::vector<std::vector<elem>> P(static_cast<std::size_t>(n) + 1);
    P[0] = {1};
    for (int k = 1; k <= n; ++k) {
        std::vector<elem> pk(static_cast<std::size_t>(k) + 1, 0);
        // (T - h_kk) p_{k-1}
        for (int i = 0; i < k; ++i) {
            pk[i + 1] = f.add(pk[i + 1], P[k - 1][i]);
            pk[i] = f.sub(pk[i], f.mul(H(k - 1, k - 1), P[k - 1][i]));
        }
        elem prod = 1;
        for (int i = k - 1; i >= 1; --i) {
            prod = f.mul(prod, H(i, i - 1));
            elem c = f.mul(prod, H(i - 1, k - 1));
            for (std::size_t j = 0; j < P[i - 1].size(); ++j) pk[j] = f.sub(pk[j], f.mul(c, P[i - 1][j]));
        }
        P[k] = pk;
    }
    return P[n];
}

}  // namespace locmodel::matschemes
