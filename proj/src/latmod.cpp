#include "locmodel/latmod.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace locmodel::latmod {

using linalg::image;
using linalg::join;
using linalg::perp;
using linalg::preimage;
using weyl::RootDatum;

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// Position 1..N of b_j and its Π-exponent: b_j = Π^{-n} b_pos.
std::pair<int, int> split_index(int j, int N) {
    int n = floor_div(j - 1, N);
    return {j - n * N, n};
}

Matrix zero_matrix(const Field& f, int r, int c) { return Matrix(f, r, c); }

std::vector<int> sorted_labels(std::vector<int> I, int max_label, const char* what) {
    std::sort(I.begin(), I.end());
    I.erase(std::unique(I.begin(), I.end()), I.end());
    if (I.empty()) throw Error(Errc::invalid_argument, std::string(what) + ": I must be nonempty");
    for (int i : I)
        if (i < 0 || i > max_label)
            throw Error(Errc::invalid_index, std::string(what) + ": label " + std::to_string(i) + " out of range");
    return I;
}

}  // namespace

weyl::RootDatum ChainModel::datum() const {
    return params.kind == Kind::GL ? RootDatum::gl(params.n) : RootDatum::gsp(params.n);
}

weyl::ParahoricSpec ChainModel::spec() const { return weyl::ParahoricSpec(datum(), params.I); }

std::vector<int> ChainModel::mu() const {
    if (params.kind == Kind::GL) return admissible::minuscule_sum(datum(), params.r);
    return admissible::symplectic_mu(datum(), params.e);
}

int ChainModel::position(int t, int j) const {
    const Slot& s = slots[t];
    if (j <= s.top - dim || j > s.top) return -1;
    for (int c = 0; c < dim; ++c)
        if (s.bidx[c] == j) return c;
    return -1;
}

std::string ChainModel::describe() const {
    std::ostringstream os;
    os << (params.kind == Kind::GL ? "GL(" : "GSp(") << params.n << ") e=" << params.e << " I={";
    for (std::size_t k = 0; k < params.I.size(); ++k) os << (k ? "," : "") << params.I[k];
    os << "} p=" << params.p << " r=(";
    for (std::size_t k = 0; k < params.r.size(); ++k) os << (k ? "," : "") << params.r[k];
    os << ")";
    return os.str();
}

ChainModel build_model(const ModelParams& in) {
    ChainModel m;
    m.params = in;
    if (in.e < 1) throw Error(Errc::invalid_argument, "build_model: e must be >= 1");
    if (!linalg::is_prime(in.p) || in.p > Field::max_prime)
        throw Error(Errc::invalid_argument, "build_model: p must be a prime <= 13");
    m.field = Field(in.p);
    const int e = in.e;
    if (in.kind == Kind::GL) {
        const int d = in.n;
        if (d < 1 || d > 8) throw Error(Errc::invalid_argument, "build_model: need 1 <= d <= 8");
        m.params.I = sorted_labels(in.I, d - 1, "build_model");
        if (static_cast<int>(in.r.size()) != e)
            throw Error(Errc::bad_ranks, "build_model: r must have e = " + std::to_string(e) + " entries");
        m.R.assign(1, 0);
        for (int rl : in.r) {
            if (rl < 0 || rl > d) throw Error(Errc::bad_ranks, "build_model: r_l must lie in [0, d]");
            m.R.push_back(m.R.back() + rl);
        }
        m.rank = m.R.back();
        m.N = d;
        m.dim = e * d;
        for (int i : m.params.I) {
            Slot s;
            s.label = i;
            s.top = d + i;
            s.bidx.resize(static_cast<std::size_t>(m.dim));
            for (int k = 1; k <= d; ++k)
                for (int a = 0; a < e; ++a) s.bidx[(k - 1) * e + a] = (k <= i ? d + k : k) - a * d;
            m.slots.push_back(s);
        }
    } else {
        const int g = in.n;
        if (g < 1 || g > 4) throw Error(Errc::invalid_argument, "build_model: need 1 <= g <= 4");
        if (e % in.p == 0 && !in.allow_wild)
            throw Error(Errc::wild_ramification, "build_model: p = " + std::to_string(in.p) + " divides e = " + std::to_string(e));
        m.params.I = sorted_labels(in.I, g, "build_model");
        if (in.r.empty()) m.params.r.assign(static_cast<std::size_t>(e), g);
        if (static_cast<int>(m.params.r.size()) != e ||
            std::any_of(m.params.r.begin(), m.params.r.end(), [&](int x) { return x != g; }))
            throw Error(Errc::bad_ranks, "build_model: GSp requires r_l = g for all l");
        m.R.resize(static_cast<std::size_t>(e) + 1);
        for (int j = 0; j <= e; ++j) m.R[j] = j * g;
        m.rank = e * g;
        m.N = 2 * g;
        m.dim = e * m.N;
        auto make = [&](int r, bool minus) {
            Slot s;
            s.label = r;
            s.minus = minus;
            s.top = minus ? 2 * g - r : 2 * g + r;
            s.bidx.resize(static_cast<std::size_t>(m.dim));
            for (int k = 1; k <= g; ++k)
                for (int a = 0; a < e; ++a) {
                    int eps = minus ? k : (k <= r ? 2 * g + k : k);
                    int phi = minus ? (k <= r ? 1 - k : 2 * g + 1 - k) : 2 * g + 1 - k;
                    s.bidx[(k - 1) * e + a] = eps - a * m.N;
                    s.bidx[(g + k - 1) * e + a] = phi - a * m.N;
                }
            return s;
        };
        for (auto it = m.params.I.rbegin(); it != m.params.I.rend(); ++it) m.slots.push_back(make(*it, true));
        for (int i : m.params.I) m.slots.push_back(make(i, false));
    }
    // Each slot must cover exactly the window (top - eN, top].
    for (const Slot& s : m.slots) {
        std::vector<int> b = s.bidx;
        std::sort(b.begin(), b.end());
        for (int c = 0; c < m.dim; ++c)
            if (b[c] != s.top - m.dim + 1 + c) throw Error(Errc::invalid_argument, "build_model: slot basis is not a window");
    }
    const int S = m.num_slots();
    for (int t = 0; t < S; ++t) {
        Matrix n = zero_matrix(m.field, m.dim, m.dim);
        for (int c = 0; c < m.dim; ++c) {
            int r = m.position(t, m.slots[t].bidx[c] - m.N);
            if (r >= 0) n.set(r, c, 1);
        }
        m.nilp.push_back(n);
    }
    for (int t = 0; t + 1 < S; ++t) {
        Matrix T = zero_matrix(m.field, m.dim, m.dim);
        for (int c = 0; c < m.dim; ++c) {
            int r = m.position(t + 1, m.slots[t].bidx[c]);
            if (r >= 0) T.set(r, c, 1);
        }
        m.trans.push_back(T);
    }
    m.wrap = zero_matrix(m.field, m.dim, m.dim);
    for (int c = 0; c < m.dim; ++c) {
        int r = m.position(0, m.slots[S - 1].bidx[c] - m.N);
        if (r >= 0) m.wrap.set(r, c, 1);
    }
    if (m.symplectic()) {
        const int g = in.n;
        const int unit = e % in.p == 0 ? 1 : e;
        m.dual.assign(static_cast<std::size_t>(S), -1);
        for (int t = 0; t < S; ++t)
            for (int u = 0; u < S; ++u)
                if (m.slots[u].label == m.slots[t].label && m.slots[u].minus != m.slots[t].minus) m.dual[t] = u;
        for (int t = 0; t < S; ++t) {
            const int u = m.dual[t];
            Matrix B = zero_matrix(m.field, m.dim, m.dim);
            for (int a = 0; a < m.dim; ++a)
                for (int b = 0; b < m.dim; ++b) {
                    auto [pa, na] = split_index(m.slots[t].bidx[a], m.N);
                    auto [pb, nb] = split_index(m.slots[u].bidx[b], m.N);
                    if (pb != 2 * g + 1 - pa || -na - nb != e - 1) continue;
                    B.set(a, b, (pa <= g ? 1 : -1) * unit);
                }
            if (linalg::rank(B) != m.dim) throw Error(Errc::singular_gram, "build_model: pairing is not perfect");
            m.gram.push_back(B);
        }
    }
    return m;
}

bool ChainPoint::operator<(const ChainPoint& o) const {
    return std::lexicographical_compare(F.begin(), F.end(), o.F.begin(), o.F.end());
}

namespace {

// Stable lists keyed by the operator so that identical slots share one list.
std::vector<Subspace> filter_stable(const Field& f, int dim, int k, const Matrix& op, int jobs) {
    check_budget(linalg::gaussian_binomial(dim, k, f.p()), "stable_subspaces");
    auto sets = linalg::pivot_sets(dim, k);
    std::vector<std::vector<Subspace>> parts(sets.size());
    auto work = [&](std::size_t w, std::size_t stride) {
        for (std::size_t i = w; i < sets.size(); i += stride)
            linalg::enumerate_partition(f, dim, sets[i], [&](const Subspace& s) {
                if (linalg::stable_under(s, op)) parts[i].push_back(s);
                return true;
            });
    };
    std::size_t nj = static_cast<std::size_t>(std::max(1, jobs));
    if (nj == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < nj; ++w) pool.emplace_back(work, w, nj);
        for (auto& th : pool) th.join();
    }
    std::vector<Subspace> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

bool contains_image(const Matrix& f, const Subspace& a, const Subspace& b) {
    return b.contains(image(f, a));
}

}  // namespace

namespace {

// F_j = F ∩ ker A^j satisfies F_{j-1} ⊆ F_j ⊆ A^{-1}(F_{j-1}) ∩ ker A^j and
// F_j ∩ ker A^{j-1} = F_{j-1}; every stable F arises from exactly one such chain.
std::vector<Subspace> socle_stable(const Field& f, int dim, int k, const Matrix& op, int depth) {
    std::vector<Subspace> kers{Subspace(f, dim)};
    for (int j = 1; j <= depth; ++j) kers.push_back(Subspace::span(linalg::null_space(op.power(j))));
    std::vector<Subspace> out;
    std::uint64_t visited = 0;
    std::function<void(int, const Subspace&)> rec = [&](int j, const Subspace& prev) {
        if (j > depth) {
            if (prev.dim() == k) out.push_back(prev);
            return;
        }
        Subspace hi = linalg::meet(preimage(op, prev), kers[j]);
        Subspace K = linalg::meet(hi, kers[j - 1]);
        for (int d = prev.dim(); d <= std::min(k, hi.dim()); ++d)
            linalg::enumerate_between(prev, hi, d, [&](const Subspace& V) {
                check_budget(++visited, "stable_subspaces");
                if (linalg::meet(V, K).dim() == prev.dim()) rec(j + 1, V);
                return true;
            });
    };
    rec(1, Subspace(f, dim));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<Subspace> stable_subspaces(const ChainModel& m, int slot, int jobs, StableStrategy strategy) {
    if (strategy == StableStrategy::filter) return filter_stable(m.field, m.dim, m.rank, m.nilp[slot], jobs);
    return socle_stable(m.field, m.dim, m.rank, m.nilp[slot], m.params.e);
}

bool is_naive_point(const ChainModel& m, const ChainPoint& pt) {
    const int S = m.num_slots();
    if (static_cast<int>(pt.F.size()) != S) return false;
    for (int t = 0; t < S; ++t) {
        if (pt.F[t].ambient_dim() != m.dim || pt.F[t].dim() != m.rank) return false;
        if (!linalg::stable_under(pt.F[t], m.nilp[t])) return false;
    }
    for (int t = 0; t + 1 < S; ++t)
        if (!contains_image(m.trans[t], pt.F[t], pt.F[t + 1])) return false;
    if (!contains_image(m.wrap, pt.F[S - 1], pt.F[0])) return false;
    if (m.symplectic())
        for (int t = 0; t < S; ++t)
            if (!(perp(pt.F[t], m.gram[t]) == pt.F[m.dual[t]])) return false;
    return true;
}

std::vector<ChainPoint> naive_points(const ChainModel& m, const EnumOptions& opt) {
    const int S = m.num_slots();
    // Every slot carries the same Π-matrix in the chosen bases.
    for (int t = 1; t < S; ++t)
        if (!(m.nilp[t] == m.nilp[0])) throw Error(Errc::invalid_argument, "naive_points: slot operators differ");
    const std::vector<Subspace> cand = stable_subspaces(m, 0, opt.jobs, opt.stable);
    std::vector<ChainPoint> out;
    ChainPoint cur;
    cur.F.resize(static_cast<std::size_t>(S));
    // GL: choose every slot. GSp: choose the + slots (indices S/2..S-1), derive the rest.
    const int first = m.symplectic() ? S / 2 : 0;
    std::function<void(int)> rec = [&](int t) {
        if (t == S) {
            if (m.symplectic()) {
                for (int u = 0; u < first; ++u) cur.F[u] = perp(cur.F[m.dual[u]], m.gram[m.dual[u]]);
                if (!is_naive_point(m, cur)) return;
            } else if (!contains_image(m.wrap, cur.F[S - 1], cur.F[0])) {
                return;
            }
            out.push_back(cur);
            check_budget(out.size(), "naive_points");
            return;
        }
        for (const auto& V : cand) {
            if (t > first && !contains_image(m.trans[t - 1], cur.F[t - 1], V)) continue;
            cur.F[t] = V;
            rec(t + 1);
        }
    };
    rec(first);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct FlagSearch {
    const ChainModel& m;
    std::vector<Matrix> op;       // flag operator per slot
    std::vector<std::vector<Matrix>> op_pow;  // op_pow[t][k] = op^k
    const std::function<bool(const FlagPoint&)>& visit;
    FlagPoint cur;
    std::uint64_t count = 0;
    bool stopped = false;

    FlagSearch(const ChainModel& model, FlagOperator kind, const std::function<bool(const FlagPoint&)>& v)
        : m(model), visit(v) {
        for (int t = 0; t < m.num_slots(); ++t) {
            Matrix a = m.nilp[t];
            if (kind == FlagOperator::pi_plus_pi2) a = a + a * a;
            op.push_back(a);
            std::vector<Matrix> pw{Matrix::identity(m.field, m.dim)};
            for (int k = 1; k <= m.params.e; ++k) pw.push_back(pw.back() * a);
            op_pow.push_back(pw);
        }
    }

    int S() const { return m.num_slots(); }

    void run(const ChainPoint& pt) {
        const int e = m.params.e;
        cur.levels.assign(static_cast<std::size_t>(e), std::vector<Subspace>(static_cast<std::size_t>(S())));
        cur.levels[e - 1] = pt.F;
        for (int t = 0; t < S(); ++t)
            if (image(op[t], pt.F[t]).dim() > m.R[e - 1]) return;
        level(e - 1, m.symplectic() ? S() / 2 : 0);
    }

    // Choose F^j for slots t.. at level j (1-based); j == 0 means a complete flag.
    void level(int j, int t) {
        if (stopped) return;
        if (j == 0) {
            ++count;
            if (!visit(cur)) stopped = true;
            return;
        }
        const int first = m.symplectic() ? S() / 2 : 0;
        if (t == S()) {
            auto& L = cur.levels[j - 1];
            if (m.symplectic() && !derive_minus(j)) return;
            for (int u = 0; u + 1 < S(); ++u)
                if (!contains_image(m.trans[u], L[u], L[u + 1])) return;
            if (!contains_image(m.wrap, L[S() - 1], L[0])) return;
            level(j - 1, first);
            return;
        }
        const Subspace& hi = cur.levels[j][t];
        Subspace lo = image(op[t], hi);
        if (t > first) lo = join(lo, image(m.trans[t - 1], cur.levels[j - 1][t - 1]));
        if (!hi.contains(lo)) return;
        linalg::enumerate_between(lo, hi, m.R[j], [&](const Subspace& V) {
            if (image(op[t], V).dim() > m.R[j - 1]) return true;
            cur.levels[j - 1][t] = V;
            level(j, t + 1);
            return !stopped;
        });
    }

    // F^j_{-i} = perp((A^{e-j})^{-1}(F^j_{+i})), then the remaining conditions.
    bool derive_minus(int j) {
        const int e = m.params.e;
        auto& L = cur.levels[j - 1];
        const auto& U = cur.levels[j];
        const int half = S() / 2;
        for (int u = 0; u < half; ++u) {
            int t = m.dual[u];
            Subspace pre = preimage(op_pow[t][e - j], L[t]);
            L[u] = perp(pre, m.gram[t]);
            if (L[u].dim() != m.R[j]) return false;
            if (!U[u].contains(L[u])) return false;
            if (!L[u].contains(image(op[u], U[u]))) return false;
            if (image(op[u], L[u]).dim() > m.R[j - 1]) return false;
        }
        // conditions b) and c) on every slot
        for (int t = 0; t < S(); ++t) {
            int u = m.dual[t];
            Subspace ann = perp(L[u], m.gram[u]);  // annihilator of F^j_u inside slot t
            if (!ann.contains(L[t])) return false;
            if (!L[t].contains(image(op_pow[t][e - j], ann))) return false;
        }
        return true;
    }
};

}  // namespace

std::uint64_t for_each_flag(const ChainModel& m, const ChainPoint& pt, const std::function<bool(const FlagPoint&)>& visit,
                            FlagOperator op) {
    FlagSearch s(m, op, visit);
    s.run(pt);
    return s.count;
}

bool has_splitting_flag(const ChainModel& m, const ChainPoint& pt, FlagOperator op) {
    return for_each_flag(m, pt, [](const FlagPoint&) { return false; }, op) > 0;
}

std::uint64_t count_flags(const ChainModel& m, const ChainPoint& pt, FlagOperator op) {
    return for_each_flag(m, pt, [](const FlagPoint&) { return true; }, op);
}

std::vector<FlagPoint> splitting_points(const ChainModel& m, const EnumOptions& opt) {
    std::vector<FlagPoint> out;
    for (const auto& pt : naive_points(m, opt))
        for_each_flag(m, pt, [&](const FlagPoint& f) {
            out.push_back(f);
            check_budget(out.size(), "splitting_points");
            return true;
        }, opt.op);
    return out;
}

namespace {

template <class Fn>
void parallel_over(std::size_t n, int jobs, Fn fn) {
    std::size_t nj = static_cast<std::size_t>(std::max(1, jobs));
    if (nj == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nj; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += nj) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

std::uint64_t count_splitting_points(const ChainModel& m, const EnumOptions& opt) {
    auto pts = naive_points(m, opt);
    std::vector<std::uint64_t> c(pts.size(), 0);
    parallel_over(pts.size(), opt.jobs, [&](std::size_t i) { c[i] = count_flags(m, pts[i], opt.op); });
    return std::accumulate(c.begin(), c.end(), std::uint64_t{0});
}

std::vector<ChainPoint> canonical_points(const ChainModel& m, const EnumOptions& opt) {
    auto pts = naive_points(m, opt);
    std::vector<char> keep(pts.size(), 0);
    parallel_over(pts.size(), opt.jobs, [&](std::size_t i) { keep[i] = has_splitting_flag(m, pts[i], opt.op); });
    std::vector<ChainPoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (keep[i]) out.push_back(pts[i]);
    return out;
}

ChainModel unramified_model(const ChainModel& m, int l) {
    if (l < 1 || l > m.params.e) throw Error(Errc::invalid_index, "unramified_model: l out of range");
    ModelParams p = m.params;
    p.e = 1;
    p.r = {m.params.r[l - 1]};
    return build_model(p);
}

std::vector<ChainPoint> unramified_points(const ChainModel& m, int l, const EnumOptions& opt) {
    return naive_points(unramified_model(m, l), opt);
}

namespace {

// Inverse of an affine permutation given in window notation.
int inverse_at(const weyl::AffinePerm& f, int j) {
    for (int k = 1; k <= f.N; ++k) {
        int d = j - f.window[k - 1];
        if (d % f.N == 0) return k + d;
    }
    throw Error(Errc::invalid_argument, "affine permutation is not a bijection");
}

// Standard point, or nullopt-like empty F when w is incompatible.
bool build_standard(const WeylElement& w, const ChainModel& m, ChainPoint& out) {
    if (w.datum() != m.datum()) throw Error(Errc::datum_mismatch, "standard_point: element and model differ");
    const auto f = weyl::affine_permutation(w);
    const int shift = m.params.e * m.N;
    out.F.clear();
    for (int t = 0; t < m.num_slots(); ++t) {
        const int c = m.slots[t].top;
        // L = {b_{f(k) - eN} : k <= c} must satisfy Λ(c - eN) ⊆ L ⊆ Λ(c).
        for (int k = c - m.N + 1; k <= c; ++k)
            if (f(k) - shift > c) return false;
        for (int j = c - shift - m.N + 1; j <= c - shift; ++j)
            if (inverse_at(f, j + shift) > c) return false;
        Matrix gens(m.field, 0, m.dim);
        std::vector<linalg::elem> row(static_cast<std::size_t>(m.dim));
        for (int j = c - shift + 1; j <= c; ++j) {
            if (inverse_at(f, j + shift) > c) continue;
            std::fill(row.begin(), row.end(), 0);
            row[m.position(t, j)] = 1;
            gens.append_row(row.data());
        }
        Subspace F = gens.rows() ? Subspace::span(gens) : Subspace(m.field, m.dim);
        if (F.dim() != m.rank) return false;
        out.F.push_back(F);
    }
    return true;
}

}  // namespace

bool is_compatible(const WeylElement& w, const ChainModel& m) {
    ChainPoint pt;
    return build_standard(w, m, pt);
}

ChainPoint standard_point(const WeylElement& w, const ChainModel& m) {
    ChainPoint pt;
    if (!build_standard(w, m, pt))
        throw Error(Errc::incompatible_element, "standard_point: element does not give a chain between Π^eΛ̃ and Λ̃");
    return pt;
}

Signature signature(const ChainModel& m, const ChainPoint& pt) {
    const int S = m.num_slots();
    const int e = m.params.e;
    const int lo = m.slots[0].top - e * m.N;    // exclusive
    const int hi = m.slots[S - 1].top + m.N;  // inclusive
    const int A = hi - lo;
    Signature sig;
    sig.reserve(static_cast<std::size_t>(S * S * (e + 2)));
    std::vector<linalg::elem> row(static_cast<std::size_t>(A));
    for (int t = 0; t < S; ++t) {
        const int c = m.slots[t].top;
        Matrix L(m.field, 0, A);
        for (int j = lo + 1; j <= c - e * m.N; ++j) {
            std::fill(row.begin(), row.end(), 0);
            row[j - lo - 1] = 1;
            L.append_row(row.data());
        }
        const Matrix& B = pt.F[t].basis();
        for (int r = 0; r < B.rows(); ++r) {
            std::fill(row.begin(), row.end(), 0);
            for (int cidx = 0; cidx < m.dim; ++cidx) row[m.slots[t].bidx[cidx] - lo - 1] = B(r, cidx);
            L.append_row(row.data());
        }
        const int dimL = L.rows();
        for (int u = 0; u < S; ++u)
            for (int n = -1; n <= e; ++n) {
                // dim(L ∩ Λ(cut)) = dim L - rank of the coordinates above cut
                int cut = m.slots[u].top - n * m.N;
                int from = std::clamp(cut - lo, 0, A);
                Matrix P(m.field, dimL, A - from);
                for (int r = 0; r < dimL; ++r)
                    for (int k = from; k < A; ++k) P.set(r, k - from, L(r, k));
                sig.push_back(dimL - linalg::rank(P));
            }
    }
    return sig;
}

ChainPoint apply(const ChainAutomorphism& g, const ChainPoint& pt) {
    ChainPoint out;
    for (std::size_t t = 0; t < pt.F.size(); ++t) out.F.push_back(image(g.per_slot[t], pt.F[t]));
    return out;
}

namespace {

// Per-slot matrices of a periodic Z-linear map on the b-basis, given by its
// action on b_1..b_N (images as sparse lists of (b-index, coefficient)).
bool periodic_matrices(const ChainModel& m, const std::vector<std::vector<std::pair<int, int>>>& img,
                       std::vector<Matrix>& out) {
    out.clear();
    for (int t = 0; t < m.num_slots(); ++t) {
        Matrix g(m.field, m.dim, m.dim);
        for (int c = 0; c < m.dim; ++c) {
            int j = m.slots[t].bidx[c];
            auto [pos, n] = split_index(j, m.N);
            for (auto [k, x] : img[pos - 1]) {
                int target = k + n * m.N;
                if (target > m.slots[t].top) return false;  // does not preserve Λ(c_t)
                int r = m.position(t, target);
                if (r >= 0) g.set(r, c, g(r, c) + x);
            }
        }
        out.push_back(g);
    }
    return true;
}

bool preserves_structure(const ChainModel& m, const std::vector<Matrix>& g) {
    const int S = m.num_slots();
    for (int t = 0; t < S; ++t) {
        if (linalg::rank(g[t]) != m.dim) return false;
        if (!(g[t] * m.nilp[t] == m.nilp[t] * g[t])) return false;
    }
    for (int t = 0; t + 1 < S; ++t)
        if (!(g[t + 1] * m.trans[t] == m.trans[t] * g[t])) return false;
    if (!(g[0] * m.wrap == m.wrap * g[S - 1])) return false;
    if (m.symplectic()) {
        // g^T B g' = λ B with one similitude factor λ for all pairs
        int lambda = -1;
        for (int t = 0; t < S; ++t) {
            Matrix lhs = g[t].transpose() * m.gram[t] * g[m.dual[t]];
            for (int l = 1; l < m.field.p(); ++l) {
                Matrix scaled(m.field, m.dim, m.dim);
                for (int a = 0; a < m.dim; ++a)
                    for (int b = 0; b < m.dim; ++b) scaled.set(a, b, l * m.gram[t](a, b));
                if (lhs == scaled) {
                    if (lambda >= 0 && lambda != l) return false;
                    lambda = l;
                    break;
                }
            }
            if (lambda < 0) return false;
        }
    }
    return true;
}

int primitive_root(int p) {
    for (int a = 1; a < p; ++a) {
        int x = 1, ord = 0;
        do {
            x = x * a % p;
            ++ord;
        } while (x != 1);
        if (ord == p - 1) return a;
    }
    return 1;
}

}  // namespace

std::vector<ChainAutomorphism> automorphism_generators(const ChainModel& m) {
    std::vector<ChainAutomorphism> gens;
    const int N = m.N;
    const int span = m.params.e * N;
    auto identity_img = [&] {
        std::vector<std::vector<std::pair<int, int>>> img(static_cast<std::size_t>(N));
        for (int k = 1; k <= N; ++k) img[k - 1].push_back({k, 1});
        return img;
    };
    auto try_add = [&](const std::vector<std::vector<std::pair<int, int>>>& img) {
        ChainAutomorphism g;
        if (!periodic_matrices(m, img, g.per_slot)) return false;
        if (!preserves_structure(m, g.per_slot)) return false;
        for (const auto& h : gens)
            if (h.per_slot == g.per_slot) return true;
        bool trivial = true;
        for (int t = 0; t < m.num_slots(); ++t) trivial = trivial && g.per_slot[t] == Matrix::identity(m.field, m.dim);
        if (!trivial) gens.push_back(std::move(g));
        return true;
    };
    // Dual index of b_j under the pairing, at Π-exponent zero.
    auto dual_pos = [&](int pos) { return 2 * (N / 2) + 1 - pos; };
    for (int k = 1; k <= N; ++k)
        for (int delta = -span; delta < N; ++delta) {
            if (delta == 0) continue;
            auto img = identity_img();
            img[k - 1].push_back({k + delta, 1});
            if (!m.symplectic()) {
                try_add(img);
                continue;
            }
            // b_k -> b_k + b_{k+δ}: compensate on the dual pair.
            if (try_add(img)) continue;
            auto [pj, nj] = split_index(k + delta, N);
            int ks = dual_pos(k), js = dual_pos(pj);
            // b_{j*} ↦ b_{j*} + s b_{k*} with the Π-shift opposite to δ
            for (int s = 1; s < m.field.p(); ++s) {
                auto img2 = img;
                img2[js - 1].push_back({ks - nj * N, s});
                if (try_add(img2)) break;
            }
        }
    const int a = primitive_root(m.field.p());
    if (a != 1) {
        if (!m.symplectic()) {
            for (int k = 1; k <= N; ++k) {
                auto img = identity_img();
                img[k - 1][0].second = a;
                try_add(img);
            }
        } else {
            int ainv = static_cast<int>(m.field.inv(static_cast<linalg::elem>(a)));
            for (int k = 1; k <= N / 2; ++k) {
                auto img = identity_img();
                img[k - 1][0].second = a;
                img[dual_pos(k) - 1][0].second = ainv;
                try_add(img);
            }
            auto img = identity_img();
            for (int k = 1; k <= N / 2; ++k) img[k - 1][0].second = a;
            try_add(img);
        }
    }
    return gens;
}

std::vector<Candidate> candidate_classes(const ChainModel& m) {
    const auto D = m.datum();
    const auto spec = m.spec();
    const int e = m.params.e;
    std::map<WeylElement, WeylElement> found;
    const int free = m.symplectic() ? D.n : D.n;
    std::vector<int> lam(static_cast<std::size_t>(D.coord_dim()), -1);
    if (m.symplectic()) lam[D.n] = e;
    std::function<void(int)> rec = [&](int k) {
        if (k == free) {
            int kap = 0;
            if (!m.symplectic()) {
                for (int v : lam) kap += v;
                if (kap != m.rank) return;
            }
            auto t = weyl::translation(D, lam);
            for (const auto& u : weyl::finite_group(D)) {
                WeylElement w = t * u;
                ChainPoint pt;
                if (!build_standard(w, m, pt)) continue;
                if (!is_naive_point(m, pt)) continue;
                WeylElement cls = weyl::coset_min(w, spec, weyl::Side::both);
                found.emplace(cls, w);
            }
            return;
        }
        for (int v = -1; v <= e + 1; ++v) {
            lam[k] = v;
            rec(k + 1);
        }
    };
    rec(0);
    std::vector<Candidate> out;
    for (const auto& [c, w] : found) out.push_back({c, w});
    return out;
}

StratumReport classify_strata(const ChainModel& m, const std::vector<ChainPoint>& points,
                              const admissible::AdmissibleSet& adm) {
    StratumReport rep;
    const auto cands = candidate_classes(m);
    const auto spec = m.spec();
    std::map<Signature, std::size_t> by_sig;
    std::vector<Signature> cand_sig;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        Signature s = signature(m, standard_point(cands[i].rep, m));
        cand_sig.push_back(s);
        auto [it, fresh] = by_sig.emplace(s, i);
        if (!fresh) rep.orbit_fallback = true;
    }
    std::vector<std::uint64_t> observed(cands.size(), 0);
    if (!rep.orbit_fallback) {
        for (const auto& pt : points) {
            auto it = by_sig.find(signature(m, pt));
            if (it == by_sig.end())
                ++rep.unmatched;
            else
                ++observed[it->second];
        }
    } else {
        // Orbits of the point set under the elementary chain automorphisms.
        std::map<ChainPoint, std::size_t> index;
        for (std::size_t i = 0; i < points.size(); ++i) index.emplace(points[i], i);
        std::vector<std::size_t> parent(points.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        const auto gens = automorphism_generators(m);
        for (std::size_t i = 0; i < points.size(); ++i)
            for (const auto& g : gens) {
                auto it = index.find(apply(g, points[i]));
                if (it == index.end()) continue;
                parent[root(i)] = root(it->second);
            }
        std::map<std::size_t, std::size_t> orbit_class;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            auto it = index.find(standard_point(cands[c].rep, m));
            if (it != index.end()) orbit_class.emplace(root(it->second), c);
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto it = orbit_class.find(root(i));
            if (it == orbit_class.end())
                ++rep.unmatched;
            else
                ++observed[it->second];
        }
    }
    std::set<WeylElement> listed;
    for (const auto& c : adm.classes) {
        StratumRow row;
        row.w = c.min_rep();
        row.length = weyl::length(row.w);
        row.admissible = true;
        row.poly = c.polynomial();
        row.predicted = admissible::stratum_count(c, static_cast<std::uint64_t>(m.params.p));
        for (std::size_t i = 0; i < cands.size(); ++i)
            if (cands[i].cls == row.w) row.observed = observed[i];
        listed.insert(row.w);
        rep.rows.push_back(row);
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (observed[i] == 0 || listed.count(cands[i].cls)) continue;
        StratumRow row;
        row.w = cands[i].cls;
        row.length = weyl::length(row.w);
        row.poly = admissible::DoubleCoset(spec, row.w).polynomial();
        row.observed = observed[i];
        rep.rows.push_back(row);
    }
    rep.pass = rep.unmatched == 0;
    for (const auto& r : rep.rows) {
        rep.total_predicted += r.predicted;
        rep.total_observed += r.observed;
        if (r.predicted != r.observed) rep.pass = false;
    }
    return rep;
}

TorsorReport torsor_check(const ChainModel& m, const EnumOptions& opt) {
    TorsorReport r;
    r.splitting = count_splitting_points(m, opt);
    for (int l = 1; l <= m.params.e; ++l) {
        r.factors.push_back(unramified_points(m, l, opt).size());
        r.product *= r.factors.back();
    }
    r.pass = r.splitting == r.product;
    return r;
}

}  // namespace locmodel::latmod
