#include "locmodel/admissible.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

namespace locmodel::admissible {

using weyl::Kind;
using weyl::Side;
using weyl::WeylSet;

std::uint64_t Poly::eval(std::uint64_t q) const {
    std::uint64_t s = 0, pw = 1;
    for (std::uint64_t c : coeff) {
        s += c * pw;
        pw *= q;
    }
    return s;
}

std::string Poly::str() const {
    std::ostringstream os;
    bool first = true;
    for (int k = static_cast<int>(coeff.size()) - 1; k >= 0; --k) {
        std::uint64_t c = coeff[k];
        if (c == 0) continue;
        if (!first) os << " + ";
        first = false;
        if (k == 0 || c != 1) os << c;
        if (k >= 1) os << "q";
        if (k >= 2) os << "^" << k;
    }
    if (first) os << "0";
    return os.str();
}

bool Poly::operator==(const Poly& o) const noexcept {
    std::size_t n = std::max(coeff.size(), o.coeff.size());
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t a = k < coeff.size() ? coeff[k] : 0;
        std::uint64_t b = k < o.coeff.size() ? o.coeff[k] : 0;
        if (a != b) return false;
    }
    return true;
}

Poly& Poly::operator+=(const Poly& o) {
    if (coeff.size() < o.coeff.size()) coeff.resize(o.coeff.size(), 0);
    for (std::size_t k = 0; k < o.coeff.size(); ++k) coeff[k] += o.coeff[k];
    return *this;
}

std::vector<int> minuscule_sum(const RootDatum& D, const std::vector<int>& r) {
    if (D.kind != Kind::GL) throw Error(Errc::kind_mismatch, "minuscule_sum: GL only");
    std::vector<int> mu(static_cast<std::size_t>(D.n), 0);
    for (int ri : r) {
        if (ri < 0 || ri > D.n) throw Error(Errc::bad_ranks, "minuscule_sum: rank " + std::to_string(ri) + " out of range");
        for (int k = 0; k < ri; ++k) ++mu[k];
    }
    return mu;
}

std::vector<int> symplectic_mu(const RootDatum& D, int e) {
    if (D.kind != Kind::GSp) throw Error(Errc::kind_mismatch, "symplectic_mu: GSp only");
    return std::vector<int>(static_cast<std::size_t>(D.n) + 1, e);
}

namespace {

const Rational kZero(0);

// Unique solution of A x = b over Q, if any.
std::optional<RVec> solve_unique(std::vector<RVec> A, RVec b, int n) {
    const int m = static_cast<int>(A.size());
    int row = 0;
    std::vector<int> pivcol;
    for (int c = 0; c < n && row < m; ++c) {
        int piv = -1;
        for (int r = row; r < m; ++r)
            if (A[r][c] != kZero) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[piv], A[row]);
        std::swap(b[piv], b[row]);
        Rational inv = Rational(1) / A[row][c];
        for (int k = 0; k < n; ++k) A[row][k] *= inv;
        b[row] *= inv;
        for (int r = 0; r < m; ++r) {
            if (r == row || A[r][c] == kZero) continue;
            Rational f = A[r][c];
            for (int k = 0; k < n; ++k) A[r][k] -= f * A[row][k];
            b[r] -= f * b[row];
        }
        pivcol.push_back(c);
        ++row;
    }
    for (int r = row; r < m; ++r)
        if (b[r] != kZero) return std::nullopt;
    if (row != n) return std::nullopt;
    RVec x(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) x[pivcol[r]] = b[r];
    return x;
}

std::vector<RVec> compute_vertices(const RootDatum& D) {
    const int n = D.coord_dim();
    const int m = D.num_vertices();
    std::vector<RVec> out;
    for (int i = 0; i < m; ++i) {
        std::vector<RVec> A;
        RVec b;
        for (int j = 0; j < D.num_simple(); ++j) {
            if (j == i) continue;
            const auto s = weyl::simple_reflection(D, j);
            RVec zero(static_cast<std::size_t>(n), Rational(0));
            RVec t = weyl::act_affine(s, zero);
            std::vector<RVec> cols;
            for (int k = 0; k < n; ++k) {
                RVec ek = zero;
                ek[k] = 1;
                cols.push_back(weyl::act_finite(s, ek));
            }
            for (int r = 0; r < n; ++r) {
                RVec row(static_cast<std::size_t>(n));
                for (int k = 0; k < n; ++k) row[k] = cols[k][r] - (r == k ? 1 : 0);
                A.push_back(row);
                b.push_back(-t[r]);
            }
        }
        RVec norm(static_cast<std::size_t>(n), Rational(0));
        norm[n - 1] = 1;  // x_d = 0, resp. c = 0
        A.push_back(norm);
        b.push_back(0);
        auto x = solve_unique(A, b, n);
        if (!x) throw Error(Errc::invalid_argument, "vertices: fixed point of " + D.name() + " not unique");
        out.push_back(*x);
    }
    return out;
}

std::vector<RVec> orbit_points(const RootDatum& D, const std::vector<int>& mu) {
    weyl::Coords c{};
    for (std::size_t k = 0; k < mu.size(); ++k) c[k] = mu[k];
    std::vector<RVec> pts;
    for (const auto& o : weyl::finite_orbit(D, c)) {
        RVec v(static_cast<std::size_t>(D.coord_dim()));
        for (int k = 0; k < D.coord_dim(); ++k) v[k] = o[k];
        pts.push_back(v);
    }
    return pts;
}

}  // namespace

const std::vector<RVec>& vertices(const RootDatum& D) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<RVec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(static_cast<int>(D.kind), D.n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, compute_vertices(D)).first;
    return it->second;
}

bool convex_feasible(const std::vector<RVec>& points, const RVec& y) {
    const int n = static_cast<int>(points.size());
    if (n == 0) return false;
    const int dim = static_cast<int>(y.size());
    const int m = dim + 1;
    const int cols = n + m;  // structural then artificial
    std::vector<RVec> T(static_cast<std::size_t>(m), RVec(static_cast<std::size_t>(cols) + 1, Rational(0)));
    for (int r = 0; r < m; ++r) {
        Rational rhs = r < dim ? y[r] : Rational(1);
        for (int k = 0; k < n; ++k) T[r][k] = r < dim ? points[k][r] : Rational(1);
        if (rhs < kZero) {
            for (int k = 0; k < n; ++k) T[r][k] = -T[r][k];
            rhs = -rhs;
        }
        T[r][n + r] = 1;
        T[r][cols] = rhs;
    }
    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) basis[r] = n + r;
    RVec obj(static_cast<std::size_t>(cols) + 1, Rational(0));
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= cols; ++k)
            if (k < n || k == cols) obj[k] -= T[r][k];
    while (true) {
        int enter = -1;
        for (int k = 0; k < cols; ++k)
            if (obj[k] < kZero) {
                enter = k;
                break;
            }
        if (enter < 0) break;
        int leave = -1;
        Rational best;
        for (int r = 0; r < m; ++r) {
            if (T[r][enter] <= kZero) continue;
            Rational ratio = T[r][cols] / T[r][enter];
            if (leave < 0 || ratio < best || (ratio == best && basis[r] < basis[leave])) {
                leave = r;
                best = ratio;
            }
        }
        if (leave < 0) break;  // unbounded cannot happen in phase I
        Rational pv = T[leave][enter];
        for (auto& v : T[leave]) v /= pv;
        for (int r = 0; r < m; ++r) {
            if (r == leave || T[r][enter] == kZero) continue;
            Rational f = T[r][enter];
            for (int k = 0; k <= cols; ++k) T[r][k] -= f * T[leave][k];
        }
        Rational f = obj[enter];
        for (int k = 0; k <= cols; ++k) obj[k] -= f * T[leave][k];
        basis[leave] = enter;
    }
    return obj[cols] == kZero;
}

bool conv_membership(const RootDatum& D, const RVec& y, const std::vector<int>& mu) {
    if (static_cast<int>(y.size()) != D.coord_dim() || static_cast<int>(mu.size()) != D.coord_dim())
        throw Error(Errc::kind_mismatch, "conv_membership: vector does not match " + D.name());
    if (D.kind == Kind::GL) {
        RVec a = y;
        std::vector<int> b = mu;
        std::sort(a.rbegin(), a.rend());
        std::sort(b.rbegin(), b.rend());
        Rational sa = 0, sb = 0;
        for (int k = 0; k < D.n; ++k) {
            sa += a[k];
            sb += b[k];
            if (sa > sb) return false;
        }
        return sa == sb;
    }
    return convex_feasible(orbit_points(D, mu), y);
}

bool is_permissible(const WeylElement& x, const ParahoricSpec& spec, const std::vector<int>& mu) {
    const RootDatum& D = spec.datum;
    if (x.datum() != D) throw Error(Errc::datum_mismatch, "is_permissible: datum mismatch");
    if (weyl::kappa(x) != weyl::kappa(weyl::translation(D, mu))) return false;
    const auto& verts = vertices(D);
    for (int i : spec.I) {
        RVec xa = weyl::act_affine(x, verts[i]);
        for (int k = 0; k < D.coord_dim(); ++k) xa[k] -= verts[i][k];
        if (!conv_membership(D, xa, mu)) return false;
    }
    return true;
}

DoubleCoset::DoubleCoset(const ParahoricSpec& spec, const WeylElement& x)
    : spec_(spec), min_(weyl::coset_min(x, spec, Side::both)) {
    const auto& WI = weyl::parahoric_elements(spec);
    WeylSet seen;
    for (const auto& a : WI) {
        WeylElement am = a * min_;
        for (const auto& b : WI) seen.insert(am * b);
    }
    members_.assign(seen.begin(), seen.end());
    std::sort(members_.begin(), members_.end());
    for (const auto& z : members_) {
        if (!weyl::is_coset_min(z, spec, Side::right)) continue;
        right_min_.push_back(z);
        auto l = static_cast<std::size_t>(weyl::length(z));
        if (poly_.coeff.size() <= l) poly_.coeff.resize(l + 1, 0);
        ++poly_.coeff[l];
    }
}

bool DoubleCoset::contains(const WeylElement& z) const {
    return std::binary_search(members_.begin(), members_.end(), z);
}

bool DoubleCoset::operator<(const DoubleCoset& o) const noexcept {
    int a = weyl::length(min_), b = weyl::length(o.min_);
    if (a != b) return a < b;
    return min_ < o.min_;
}

std::uint64_t stratum_count(const DoubleCoset& c, std::uint64_t q) { return c.polynomial().eval(q); }

bool double_coset_leq(const DoubleCoset& a, const DoubleCoset& b) {
    return weyl::bruhat_leq(a.min_rep(), b.min_rep());
}

bool AdmissibleSet::contains(const WeylElement& x) const { return find(x) >= 0; }

int AdmissibleSet::find(const WeylElement& x) const {
    WeylElement m = weyl::coset_min(x, spec, Side::both);
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].min_rep() == m) return static_cast<int>(i);
    return -1;
}

std::vector<WeylElement> AdmissibleSet::min_reps() const {
    std::vector<WeylElement> out;
    for (const auto& c : classes) out.push_back(c.min_rep());
    return out;
}

namespace {

AdmissibleSet from_reps(const ParahoricSpec& spec, const std::vector<int>& mu, const WeylSet& reps) {
    AdmissibleSet s{spec, mu, {}};
    for (const auto& r : reps) s.classes.emplace_back(spec, r);
    std::sort(s.classes.begin(), s.classes.end());
    return s;
}

void check_mu(const ParahoricSpec& spec, const std::vector<int>& mu) {
    if (static_cast<int>(mu.size()) != spec.datum.coord_dim())
        throw Error(Errc::dimension_mismatch, "mu has " + std::to_string(mu.size()) + " entries, " +
                                                  spec.datum.name() + " needs " +
                                                  std::to_string(spec.datum.coord_dim()));
}

}  // namespace

AdmissibleSet adm_set(const ParahoricSpec& spec, const std::vector<int>& mu) {
    check_mu(spec, mu);
    const RootDatum& D = spec.datum;
    WeylSet reps;
    for (const auto& lam : orbit_points(D, mu)) {
        std::vector<int> l;
        for (const auto& v : lam) l.push_back(static_cast<int>(v.numerator()));
        for (const auto& x : weyl::enumerate_below(weyl::translation(D, l)))
            reps.insert(weyl::coset_min(x, spec, Side::both));
    }
    return from_reps(spec, mu, reps);
}

namespace {

const std::vector<std::vector<WeylElement>>& pool(const RootDatum& D, int kappa_value, int max_len) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::vector<std::vector<WeylElement>>> cache;
    auto key = std::make_tuple(static_cast<int>(D.kind) * 100 + D.n, kappa_value, max_len);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto levels = weyl::elements_by_length(D, kappa_value, max_len);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(levels)).first->second;
}

}  // namespace

PermResult perm_set_detailed(const ParahoricSpec& spec, const std::vector<int>& mu) {
    check_mu(spec, mu);
    const RootDatum& D = spec.datum;
    int L = 0;
    for (const auto& lam : orbit_points(D, mu)) {
        std::vector<int> l;
        for (const auto& v : lam) l.push_back(static_cast<int>(v.numerator()));
        L = std::max(L, weyl::length(weyl::translation(D, l)));
    }
    const int k = weyl::kappa(weyl::translation(D, mu));
    const auto& levels = pool(D, k, L + 1);
    PermResult res;
    res.pool_length = L;
    WeylSet reps;
    for (int n = 0; n <= L + 1; ++n) {
        for (const auto& x : levels[n]) {
            if (n <= L) ++res.pool_size;
            if (!weyl::is_coset_min(x, spec, Side::both) || !is_permissible(x, spec, mu)) continue;
            if (n <= L)
                reps.insert(x);
            else
                res.boundary_clean = false;
        }
    }
    res.set = from_reps(spec, mu, reps);
    return res;
}

AdmissibleSet perm_set(const ParahoricSpec& spec, const std::vector<int>& mu) {
    return perm_set_detailed(spec, mu).set;
}

std::uint64_t total_count(const AdmissibleSet& s, std::uint64_t q) { return total_polynomial(s).eval(q); }

Poly total_polynomial(const AdmissibleSet& s) {
    Poly p;
    for (const auto& c : s.classes) p += c.polynomial();
    return p;
}

std::vector<ParahoricSpec> all_parahorics(const RootDatum& D) {
    std::vector<ParahoricSpec> out;
    for (int mask = 1; mask < (1 << D.num_vertices()); ++mask) {
        std::vector<int> I;
        for (int i = 0; i < D.num_vertices(); ++i)
            if (mask >> i & 1) I.push_back(i);
        out.emplace_back(D, I);
    }
    return out;
}

}  // namespace locmodel::admissible
