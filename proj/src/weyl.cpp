#include "locmodel/weyl.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

namespace locmodel::weyl {

RootDatum RootDatum::gl(int d) {
    if (d < 1 || d > max_coords) throw Error(Errc::invalid_argument, "GL(d): need 1 <= d <= 8");
    return RootDatum{Kind::GL, d};
}

RootDatum RootDatum::gsp(int g) {
    if (g < 1 || g + 1 > max_coords) throw Error(Errc::invalid_argument, "GSp(g): need 1 <= g <= 7");
    return RootDatum{Kind::GSp, g};
}

std::string RootDatum::name() const {
    return (kind == Kind::GL ? "GL(" : "GSp(") + std::to_string(n) + ")";
}

int pairing(const Root& a, const Coords& lam, int dim) {
    int s = 0;
    for (int k = 0; k < dim; ++k) s += a.coeff[k] * lam[k];
    return s;
}

namespace {

// A regular point in the dominant chamber, used to read off root signs.
Coords regular_point(const RootDatum& D) {
    Coords x{};
    for (int k = 0; k < D.n; ++k) x[k] = D.n - k;
    return x;  // GSp: c = 0
}

struct Tables {
    std::vector<Root> roots;
    std::vector<WeylElement> finite;
    std::vector<WeylElement> simple;
};

std::vector<Root> build_roots(const RootDatum& D) {
    std::vector<Root> out;
    const int n = D.n;
    auto add = [&](Coords c) {
        Root r;
        r.coeff = c;
        Coords rp = regular_point(D);
        r.positive = pairing(r, rp, D.coord_dim()) > 0;
        out.push_back(r);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            Coords c{};
            c[i] = 1;
            c[j] = -1;
            add(c);
        }
    if (D.kind == Kind::GSp) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int sgn : {1, -1}) {
                    Coords c{};
                    c[i] = sgn;
                    c[j] = sgn;
                    c[n] = -sgn;
                    add(c);
                }
        for (int i = 0; i < n; ++i)
            for (int sgn : {1, -1}) {
                Coords c{};
                c[i] = 2 * sgn;
                c[n] = -sgn;
                add(c);
            }
    }
    return out;
}

std::vector<WeylElement> build_finite(const RootDatum& D) {
    std::vector<WeylElement> out;
    std::vector<int> p(static_cast<std::size_t>(D.n));
    std::iota(p.begin(), p.end(), 1);
    std::vector<int> zero(static_cast<std::size_t>(D.coord_dim()), 0);
    do {
        if (D.kind == Kind::GL) {
            out.push_back(WeylElement::make(D, zero, p));
        } else {
            for (int mask = 0; mask < (1 << D.n); ++mask) {
                std::vector<int> q = p;
                for (int i = 0; i < D.n; ++i)
                    if (mask >> i & 1) q[i] = -q[i];
                out.push_back(WeylElement::make(D, zero, q));
            }
        }
    } while (std::next_permutation(p.begin(), p.end()));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<WeylElement> build_simple(const RootDatum& D) {
    std::vector<WeylElement> out;
    const int n = D.n;
    std::vector<int> id(static_cast<std::size_t>(n));
    std::iota(id.begin(), id.end(), 1);
    std::vector<int> zero(static_cast<std::size_t>(D.coord_dim()), 0);
    if (D.kind == Kind::GL) {
        if (n < 2) return out;
        // s_0 = t_{θ∨} s_θ with θ = e_1 - e_d.
        std::vector<int> p = id;
        std::swap(p[0], p[n - 1]);
        std::vector<int> lam = zero;
        lam[0] = 1;
        lam[n - 1] = -1;
        out.push_back(WeylElement::make(D, lam, p));
        for (int i = 1; i < n; ++i) {
            std::vector<int> q = id;
            std::swap(q[i - 1], q[i]);
            out.push_back(WeylElement::make(D, zero, q));
        }
    } else {
        // s_0 = t_{θ∨} s_θ with θ = 2e_1 - c and θ∨ = (1,0,..,0;0).
        std::vector<int> p = id;
        p[0] = -1;
        std::vector<int> lam = zero;
        lam[0] = 1;
        out.push_back(WeylElement::make(D, lam, p));
        for (int i = 1; i < n; ++i) {
            std::vector<int> q = id;
            std::swap(q[i - 1], q[i]);
            out.push_back(WeylElement::make(D, zero, q));
        }
        std::vector<int> q = id;
        q[n - 1] = -n;
        out.push_back(WeylElement::make(D, zero, q));
    }
    return out;
}

const Tables& tables(const RootDatum& D) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<Tables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(static_cast<int>(D.kind), D.n);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto t = std::make_unique<Tables>();
    t->roots = build_roots(D);
    t->finite = build_finite(D);
    t->simple = build_simple(D);
    Tables* raw = t.get();
    cache.emplace(key, std::move(t));
    return *raw;
}

}  // namespace

const std::vector<Root>& roots(const RootDatum& D) { return tables(D).roots; }
const std::vector<WeylElement>& finite_group(const RootDatum& D) { return tables(D).finite; }

WeylElement::WeylElement(const RootDatum& D) : D_(D) {
    for (int i = 0; i < D.n; ++i) perm_[i] = static_cast<std::int8_t>(i + 1);
}

WeylElement WeylElement::make(const RootDatum& D, const std::vector<int>& lam, const std::vector<int>& perm) {
    if (static_cast<int>(lam.size()) != D.coord_dim() || static_cast<int>(perm.size()) != D.n)
        throw Error(Errc::invalid_argument, "WeylElement: wrong coordinate count for " + D.name());
    WeylElement w(D);
    std::vector<char> seen(static_cast<std::size_t>(D.n), 0);
    for (int i = 0; i < D.n; ++i) {
        int a = perm[i] > 0 ? perm[i] : -perm[i];
        if (a < 1 || a > D.n || seen[a - 1] || (D.kind == Kind::GL && perm[i] < 0))
            throw Error(Errc::invalid_argument, "WeylElement: not a (signed) permutation");
        seen[a - 1] = 1;
        w.perm_[i] = static_cast<std::int8_t>(perm[i]);
    }
    for (int k = 0; k < D.coord_dim(); ++k) w.lam_[k] = lam[k];
    return w;
}

std::vector<int> WeylElement::translation_vector() const {
    return std::vector<int>(lam_.begin(), lam_.begin() + D_.coord_dim());
}

std::vector<int> WeylElement::finite_vector() const {
    return std::vector<int>(perm_.begin(), perm_.begin() + D_.n);
}

bool WeylElement::is_identity() const noexcept { return *this == WeylElement(D_); }

bool WeylElement::operator<(const WeylElement& o) const noexcept {
    if (D_.kind != o.D_.kind) return D_.kind < o.D_.kind;
    if (D_.n != o.D_.n) return D_.n < o.D_.n;
    if (lam_ != o.lam_) return lam_ < o.lam_;
    return perm_ < o.perm_;
}

std::size_t WeylElement::hash() const noexcept {
    std::size_t h = static_cast<std::size_t>(D_.n) * 7 + static_cast<std::size_t>(D_.kind);
    for (int k = 0; k < D_.coord_dim(); ++k) h = h * 1000003u + static_cast<std::size_t>(lam_[k] + 4096);
    for (int i = 0; i < D_.n; ++i) h = h * 131u + static_cast<std::size_t>(perm_[i] + 16);
    return h;
}

Coords act(const WeylElement& u, const Coords& lam) {
    const RootDatum& D = u.datum();
    Coords out{};
    if (D.kind == Kind::GL) {
        for (int i = 0; i < D.n; ++i) out[u.finite_image(i) - 1] = lam[i];
    } else {
        const int c = lam[D.n];
        for (int i = 0; i < D.n; ++i) {
            int s = u.finite_image(i);
            int j = (s > 0 ? s : -s) - 1;
            out[j] = s > 0 ? lam[i] : c - lam[i];
        }
        out[D.n] = c;
    }
    return out;
}

WeylElement multiply(const WeylElement& x, const WeylElement& y) {
    if (x.D_ != y.D_) throw Error(Errc::datum_mismatch, "multiply: " + x.D_.name() + " vs " + y.D_.name());
    WeylElement z(x.D_);
    Coords uy = act(x, y.lam_);
    for (int k = 0; k < x.D_.coord_dim(); ++k) z.lam_[k] = x.lam_[k] + uy[k];
    for (int i = 0; i < x.D_.n; ++i) {
        int v = y.perm_[i];
        int a = v > 0 ? v : -v;
        int u = x.perm_[a - 1];
        z.perm_[i] = static_cast<std::int8_t>(v > 0 ? u : -u);
    }
    return z;
}

WeylElement invert(const WeylElement& x) {
    WeylElement u(x.D_);
    for (int i = 0; i < x.D_.n; ++i) {
        int s = x.perm_[i];
        int j = (s > 0 ? s : -s) - 1;
        u.perm_[j] = static_cast<std::int8_t>(s > 0 ? i + 1 : -(i + 1));
    }
    Coords v = act(u, x.lam_);
    for (int k = 0; k < x.D_.coord_dim(); ++k) u.lam_[k] = -v[k];
    return u;
}

WeylElement identity(const RootDatum& D) { return WeylElement(D); }

WeylElement translation(const RootDatum& D, const std::vector<int>& lam) {
    std::vector<int> id(static_cast<std::size_t>(D.n));
    std::iota(id.begin(), id.end(), 1);
    return WeylElement::make(D, lam, id);
}

WeylElement finite(const RootDatum& D, const std::vector<int>& signed_perm) {
    return WeylElement::make(D, std::vector<int>(static_cast<std::size_t>(D.coord_dim()), 0), signed_perm);
}

WeylElement simple_reflection(const RootDatum& D, int j) {
    const auto& s = tables(D).simple;
    if (j < 0 || j >= static_cast<int>(s.size()))
        throw Error(Errc::invalid_index, "simple_reflection: index " + std::to_string(j) + " invalid for " + D.name());
    return s[j];
}

int length(const WeylElement& x) {
    const RootDatum& D = x.datum();
    const int dim = D.coord_dim();
    const Coords rp = regular_point(D);
    // Sign of u^{-1}α is the sign of α at u(ρ).
    const Coords ua = act(x, rp);
    int count = 0;
    for (const Root& a : roots(D)) {
        bool pulled_positive = pairing(a, ua, dim) > 0;
        const int m = pairing(a, x.translation(), dim);
        // Positive affine roots α + k: k >= 0 for α > 0, k >= 1 for α < 0.
        // Their composite with x is u^{-1}α + (m + k); scan k until it turns positive.
        const int k0 = a.positive ? 0 : 1;
        for (int k = k0;; ++k) {
            int shift = m + k;
            bool negative = pulled_positive ? shift <= -1 : shift <= 0;
            if (!negative) break;
            ++count;
        }
    }
    return count;
}

int kappa(const WeylElement& x) {
    const RootDatum& D = x.datum();
    if (D.kind == Kind::GSp) return x.translation()[D.n];
    int s = 0;
    for (int k = 0; k < D.n; ++k) s += x.translation()[k];
    return s;
}

int translation_length_formula(const RootDatum& D, const Coords& lam) {
    int s = 0;
    for (const Root& a : roots(D))
        if (a.positive) s += std::abs(pairing(a, lam, D.coord_dim()));
    return s;
}

WeylElement omega_generator(const RootDatum& D) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, WeylElement> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({static_cast<int>(D.kind), D.n});
        if (it != cache.end()) return it->second;
    }
    // Search t_λ u with λ in the orbit of the minuscule coweight of κ = 1.
    Coords base{};
    if (D.kind == Kind::GL) {
        base[0] = 1;
    } else {
        for (int k = 0; k < D.n; ++k) base[k] = 1;
        base[D.n] = 1;
    }
    std::vector<WeylElement> found;
    for (const Coords& lam : finite_orbit(D, base)) {
        std::vector<int> lv(lam.begin(), lam.begin() + D.coord_dim());
        WeylElement t = translation(D, lv);
        for (const WeylElement& u : finite_group(D)) {
            WeylElement x = t * u;
            if (length(x) == 0) found.push_back(x);
        }
    }
    if (found.size() != 1) throw Error(Errc::invalid_argument, "omega_generator: no unique length-0 element");
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(std::make_pair(static_cast<int>(D.kind), D.n), found[0]);
    return found[0];
}

WeylElement omega_power(const RootDatum& D, int k) {
    WeylElement t = omega_generator(D);
    if (k < 0) {
        t = invert(t);
        k = -k;
    }
    WeylElement out = identity(D);
    for (int i = 0; i < k; ++i) out = out * t;
    return out;
}

bool bruhat_leq(const WeylElement& x0, const WeylElement& y0) {
    if (x0.datum() != y0.datum()) throw Error(Errc::datum_mismatch, "bruhat_leq: datum mismatch");
    if (kappa(x0) != kappa(y0)) return false;
    const RootDatum& D = x0.datum();
    WeylElement x = x0, y = y0;
    int lx = length(x), ly = length(y);
    while (true) {
        if (lx > ly) return false;
        if (ly == 0) return x == y;
        int j = 0;
        WeylElement ys;
        for (; j < D.num_simple(); ++j) {
            ys = y * simple_reflection(D, j);
            if (length(ys) < ly) break;
        }
        WeylElement xs = x * simple_reflection(D, j);
        int lxs = length(xs);
        if (lxs < lx) {
            x = xs;
            lx = lxs;
        }
        y = ys;
        --ly;
    }
}

ReducedWord reduced_word(const WeylElement& x) {
    const RootDatum& D = x.datum();
    ReducedWord rw;
    rw.omega = kappa(x);
    WeylElement w = x * invert(omega_power(D, rw.omega));
    int lw = length(w);
    while (lw > 0) {
        bool moved = false;
        for (int j = 0; j < D.num_simple(); ++j) {
            WeylElement sw = simple_reflection(D, j) * w;
            if (length(sw) < lw) {
                rw.letters.push_back(j);
                w = sw;
                --lw;
                moved = true;
                break;
            }
        }
        if (!moved) throw Error(Errc::invalid_argument, "reduced_word: no descent found");
    }
    return rw;
}

WeylElement from_word(const RootDatum& D, const ReducedWord& w) {
    WeylElement x = identity(D);
    for (int j : w.letters) x = x * simple_reflection(D, j);
    return x * omega_power(D, w.omega);
}

ParahoricSpec::ParahoricSpec(const RootDatum& D, std::vector<int> labels) : datum(D), I(std::move(labels)) {
    std::sort(I.begin(), I.end());
    I.erase(std::unique(I.begin(), I.end()), I.end());
    if (I.empty()) throw Error(Errc::invalid_argument, "ParahoricSpec: I must be nonempty");
    for (int i : I)
        if (i < 0 || i >= D.num_vertices())
            throw Error(Errc::invalid_index, "ParahoricSpec: label " + std::to_string(i) + " invalid for " + D.name());
}

ParahoricSpec ParahoricSpec::iwahori(const RootDatum& D) {
    std::vector<int> all(static_cast<std::size_t>(D.num_vertices()));
    std::iota(all.begin(), all.end(), 0);
    return ParahoricSpec(D, all);
}

std::vector<int> ParahoricSpec::generators() const {
    std::vector<int> g;
    for (int j = 0; j < datum.num_simple(); ++j)
        if (!contains_label(j)) g.push_back(j);
    return g;
}

bool ParahoricSpec::contains_label(int i) const { return std::binary_search(I.begin(), I.end(), i); }

std::string ParahoricSpec::label_string() const {
    std::string s;
    for (std::size_t k = 0; k < I.size(); ++k) s += (k ? "," : "") + std::to_string(I[k]);
    return s;
}

const std::vector<WeylElement>& parahoric_elements(const ParahoricSpec& spec) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, std::vector<int>>, std::vector<WeylElement>> cache;
    auto key = std::make_tuple(static_cast<int>(spec.datum.kind), spec.datum.n, spec.I);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const RootDatum& D = spec.datum;
    std::vector<WeylElement> gens;
    for (int j : spec.generators()) gens.push_back(simple_reflection(D, j));
    WeylSet seen{identity(D)};
    std::vector<WeylElement> frontier{identity(D)};
    while (!frontier.empty()) {
        std::vector<WeylElement> next;
        for (const auto& x : frontier)
            for (const auto& s : gens) {
                WeylElement y = x * s;
                if (seen.insert(y).second) next.push_back(y);
            }
        frontier = std::move(next);
        check_budget(seen.size() / 100, "parahoric_elements");
    }
    std::vector<WeylElement> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(out)).first->second;
}

WeylElement coset_min(const WeylElement& x0, const ParahoricSpec& spec, Side side) {
    const RootDatum& D = x0.datum();
    WeylElement x = x0;
    int lx = length(x);
    bool moved = true;
    while (moved) {
        moved = false;
        for (int j : spec.generators()) {
            const WeylElement& s = simple_reflection(D, j);
            if (side != Side::right) {
                WeylElement y = s * x;
                int ly = length(y);
                if (ly < lx) {
                    x = y;
                    lx = ly;
                    moved = true;
                }
            }
            if (side != Side::left) {
                WeylElement y = x * s;
                int ly = length(y);
                if (ly < lx) {
                    x = y;
                    lx = ly;
                    moved = true;
                }
            }
        }
    }
    return x;
}

bool is_coset_min(const WeylElement& x, const ParahoricSpec& spec, Side side) {
    const RootDatum& D = x.datum();
    int lx = length(x);
    for (int j : spec.generators()) {
        const WeylElement& s = simple_reflection(D, j);
        if (side != Side::right && length(s * x) < lx) return false;
        if (side != Side::left && length(x * s) < lx) return false;
    }
    return true;
}

WeylSet enumerate_below(const WeylElement& y) {
    const RootDatum& D = y.datum();
    ReducedWord rw = reduced_word(y);
    const int k = static_cast<int>(rw.letters.size());
    if (k > 20) throw Error(Errc::budget_exceeded, "enumerate_below: length " + std::to_string(k) + " exceeds 20");
    const WeylElement om = omega_power(D, rw.omega);
    WeylSet out;
    std::vector<WeylElement> letters;
    for (int j : rw.letters) letters.push_back(simple_reflection(D, j));
    // Depth-first over subword masks, sharing prefixes.
    std::vector<WeylElement> stack_x{identity(D)};
    std::vector<int> stack_pos{0};
    while (!stack_x.empty()) {
        WeylElement cur = stack_x.back();
        int pos = stack_pos.back();
        stack_x.pop_back();
        stack_pos.pop_back();
        if (pos == k) {
            out.insert(cur * om);
            continue;
        }
        stack_x.push_back(cur);
        stack_pos.push_back(pos + 1);
        stack_x.push_back(cur * letters[pos]);
        stack_pos.push_back(pos + 1);
    }
    return out;
}

std::vector<std::vector<WeylElement>> elements_by_length(const RootDatum& D, int kappa_value, int max_len) {
    std::vector<std::vector<WeylElement>> levels;
    levels.push_back({omega_power(D, kappa_value)});
    WeylSet seen{levels[0][0]};
    for (int n = 0; n < max_len; ++n) {
        std::vector<WeylElement> next;
        for (const auto& x : levels[n])
            for (int j = 0; j < D.num_simple(); ++j) {
                WeylElement y = x * simple_reflection(D, j);
                if (length(y) == n + 1 && seen.insert(y).second) next.push_back(y);
            }
        check_budget(seen.size(), "elements_by_length");
        std::sort(next.begin(), next.end());
        levels.push_back(std::move(next));
    }
    return levels;
}

std::vector<Coords> finite_orbit(const RootDatum& D, const Coords& lam) {
    std::vector<Coords> out;
    for (const WeylElement& u : finite_group(D)) out.push_back(act(u, lam));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int AffinePerm::operator()(int j) const {
    int q = (j - 1) >= 0 ? (j - 1) / N : -((N - j) / N);
    int k = j - q * N;  // 1..N
    return window[k - 1] + q * N;
}

AffinePerm affine_permutation(const WeylElement& x) {
    const RootDatum& D = x.datum();
    AffinePerm f;
    if (D.kind == Kind::GL) {
        f.N = D.n;
        f.window.resize(static_cast<std::size_t>(D.n));
        for (int k = 1; k <= D.n; ++k) {
            int uk = x.finite_image(k - 1);
            f.window[k - 1] = uk + x.translation()[uk - 1] * D.n;
        }
        return f;
    }
    const int g = D.n, N = 2 * g;
    const int c = x.translation()[g];
    std::vector<int> lam2(static_cast<std::size_t>(N));
    for (int k = 0; k < g; ++k) {
        lam2[k] = x.translation()[k];
        lam2[N - 1 - k] = c - x.translation()[k];
    }
    std::vector<int> P(static_cast<std::size_t>(N) + 1);
    for (int i = 1; i <= g; ++i) {
        int s = x.finite_image(i - 1);
        int j = s > 0 ? s : -s;
        if (s > 0) {
            P[i] = j;
            P[N + 1 - i] = N + 1 - j;
        } else {
            P[i] = N + 1 - j;
            P[N + 1 - i] = j;
        }
    }
    f.N = N;
    f.window.resize(static_cast<std::size_t>(N));
    for (int k = 1; k <= N; ++k) f.window[k - 1] = P[k] + lam2[P[k] - 1] * N;
    return f;
}

std::string cycle_string(const WeylElement& x) {
    const RootDatum& D = x.datum();
    const int n = D.n;
    auto img = [&](int a) {  // a in ±[n]
        int s = x.finite_image((a > 0 ? a : -a) - 1);
        return a > 0 ? s : -s;
    };
    std::ostringstream os;
    std::vector<char> seen(static_cast<std::size_t>(2 * n + 1), 0);
    auto idx = [&](int a) { return static_cast<std::size_t>(a + n); };
    std::vector<int> starts;
    for (int a = 1; a <= n; ++a) starts.push_back(a);
    if (D.kind == Kind::GSp)
        for (int a = 1; a <= n; ++a) starts.push_back(-a);
    bool any = false;
    for (int a : starts) {
        if (seen[idx(a)]) continue;
        std::vector<int> cyc;
        int b = a;
        do {
            cyc.push_back(b);
            seen[idx(b)] = 1;
            b = img(b);
        } while (b != a);
        if (D.kind == Kind::GSp)
            for (int c : cyc) seen[idx(-c)] = 1;
        if (cyc.size() < 2) continue;
        any = true;
        os << '(';
        for (std::size_t i = 0; i < cyc.size(); ++i) os << (i ? " " : "") << cyc[i];
        os << ')';
    }
    if (!any) os << "()";
    return os.str();
}

std::string translation_string(const WeylElement& x) {
    std::string s;
    for (int k = 0; k < x.datum().coord_dim(); ++k) s += (k ? "," : "") + std::to_string(x.translation()[k]);
    return s;
}

}  // namespace locmodel::weyl
