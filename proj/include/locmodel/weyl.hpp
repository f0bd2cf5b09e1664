#pragma once

// Extended affine Weyl groups X ⋊ W0 for GL(d) and GSp(2g).
//
// Elements are pairs x = t_λ·u acting on X⊗R by x(v) = λ + u(v). The base
// alcove is x_1 > ... > x_d > x_1 - 1 for GL(d) and, for GSp(g) in stored
// coordinates (v_1..v_g; c), v_1 > ... > v_g > c/2 > v_1 - 1/2. Lengths are
// counts of affine root hyperplanes separating the base alcove from its image.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "locmodel/errors.hpp"

namespace locmodel::weyl {

enum class Kind { GL, GSp };

inline constexpr int max_coords = 8;
using Coords = std::array<int, max_coords>;

struct RootDatum {
    Kind kind = Kind::GL;
    int n = 2;  // d for GL(d), g for GSp(g)

    static RootDatum gl(int d);
    static RootDatum gsp(int g);

    // Length of a stored coweight: d, resp. g + 1 with the similitude last.
    int coord_dim() const noexcept { return kind == Kind::GL ? n : n + 1; }
    // Number of letters moved by W0.
    int finite_rank() const noexcept { return n; }
    // Affine simple reflections s_0..s_{m-1}.
    int num_simple() const noexcept { return kind == Kind::GL ? (n >= 2 ? n : 0) : n + 1; }
    // Vertex labels of the base alcove: 0..d-1, resp. 0..g.
    int num_vertices() const noexcept { return kind == Kind::GL ? n : n + 1; }
    std::string name() const;

    bool operator==(const RootDatum& o) const noexcept { return kind == o.kind && n == o.n; }
    bool operator!=(const RootDatum& o) const noexcept { return !(*this == o); }
};

struct Root {
    Coords coeff{};  // linear functional on stored coordinates
    bool positive = false;
};

const std::vector<Root>& roots(const RootDatum& D);

// Root paired with a stored coweight.
int pairing(const Root& a, const Coords& lam, int dim);

class WeylElement {
public:
    WeylElement() = default;
    explicit WeylElement(const RootDatum& D);

    const RootDatum& datum() const noexcept { return D_; }
    const Coords& translation() const noexcept { return lam_; }
    // Signed one-based image of letter i (0-based); always positive for GL.
    int finite_image(int i) const noexcept { return perm_[i]; }
    std::vector<int> translation_vector() const;
    std::vector<int> finite_vector() const;

    bool is_identity() const noexcept;
    bool operator==(const WeylElement& o) const noexcept {
        return D_ == o.D_ && lam_ == o.lam_ && perm_ == o.perm_;
    }
    bool operator!=(const WeylElement& o) const noexcept { return !(*this == o); }
    bool operator<(const WeylElement& o) const noexcept;
    std::size_t hash() const noexcept;

    // Raw construction; `perm` holds signed one-based images.
    static WeylElement make(const RootDatum& D, const std::vector<int>& lam, const std::vector<int>& perm);

private:
    friend WeylElement multiply(const WeylElement&, const WeylElement&);
    friend WeylElement invert(const WeylElement&);

    RootDatum D_{};
    Coords lam_{};
    std::array<std::int8_t, max_coords> perm_{};
};

struct WeylHash {
    std::size_t operator()(const WeylElement& w) const noexcept { return w.hash(); }
};
using WeylSet = std::unordered_set<WeylElement, WeylHash>;

// Constructors.
WeylElement identity(const RootDatum& D);
WeylElement translation(const RootDatum& D, const std::vector<int>& lam);
WeylElement finite(const RootDatum& D, const std::vector<int>& signed_perm);
WeylElement simple_reflection(const RootDatum& D, int j);
// The length-zero element with κ = 1.
WeylElement omega_generator(const RootDatum& D);
WeylElement omega_power(const RootDatum& D, int k);

WeylElement multiply(const WeylElement& x, const WeylElement& y);
WeylElement invert(const WeylElement& x);
inline WeylElement operator*(const WeylElement& x, const WeylElement& y) { return multiply(x, y); }

// Finite part acting on an integral coweight.
Coords act(const WeylElement& u, const Coords& lam);

// Finite part acting on a vector over any ordered field T (stored coordinates).
template <class T>
std::vector<T> act_finite(const WeylElement& u, const std::vector<T>& v) {
    const RootDatum& D = u.datum();
    std::vector<T> out(v.size(), T(0));
    if (D.kind == Kind::GL) {
        for (int i = 0; i < D.n; ++i) out[u.finite_image(i) - 1] = v[i];
    } else {
        const T c = v[D.n];
        for (int i = 0; i < D.n; ++i) {
            int s = u.finite_image(i);
            int j = (s > 0 ? s : -s) - 1;
            out[j] = s > 0 ? v[i] : c - v[i];
        }
        out[D.n] = c;
    }
    return out;
}

// x acting on a point of X⊗R: λ + u(v).
template <class T>
std::vector<T> act_affine(const WeylElement& x, const std::vector<T>& v) {
    auto out = act_finite(x, v);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += T(x.translation()[k]);
    return out;
}

int length(const WeylElement& x);
int kappa(const WeylElement& x);

// Closed-form length of a translation: <λ⁺, 2ρ> = Σ_{α>0} |<α, λ>|.
int translation_length_formula(const RootDatum& D, const Coords& lam);

bool bruhat_leq(const WeylElement& x, const WeylElement& y);

struct ReducedWord {
    std::vector<int> letters;  // affine simple indices, read left to right
    int omega = 0;             // x = s_{l1}...s_{lk} · τ^omega
};

ReducedWord reduced_word(const WeylElement& x);
WeylElement from_word(const RootDatum& D, const ReducedWord& w);

struct ParahoricSpec {
    RootDatum datum;
    std::vector<int> I;  // nonempty, sorted vertex labels

    ParahoricSpec() = default;
    ParahoricSpec(const RootDatum& D, std::vector<int> labels);
    static ParahoricSpec iwahori(const RootDatum& D);

    // Indices j with s_j in W_I, i.e. j not in I.
    std::vector<int> generators() const;
    bool contains_label(int i) const;
    std::string label_string() const;
};

// All elements of the finite group W_I.
const std::vector<WeylElement>& parahoric_elements(const ParahoricSpec& spec);

enum class Side { left, right, both };

WeylElement coset_min(const WeylElement& x, const ParahoricSpec& spec, Side side);
bool is_coset_min(const WeylElement& x, const ParahoricSpec& spec, Side side);

// Bruhat down-set of y via subwords of one reduced word. Requires ℓ(y) <= 20.
WeylSet enumerate_below(const WeylElement& y);

// All elements of component κ with length <= max_len, grouped by length.
std::vector<std::vector<WeylElement>> elements_by_length(const RootDatum& D, int kappa_value, int max_len);

// All elements of W0 as finite WeylElements.
const std::vector<WeylElement>& finite_group(const RootDatum& D);

// W0-orbit of a coweight, sorted and deduplicated.
std::vector<Coords> finite_orbit(const RootDatum& D, const Coords& lam);

// Affine permutation of Z with period N (N = d, resp. 2g) induced by x on a
// Z-indexed basis b_j with b_{j+N} = Π^{-1} b_j: x·b_j = b_{f(j)}, and t_λ
// sends b_k to Π^{-λ_k} b_k. For GSp the basis order is e_1..e_g, f_g..f_1.
struct AffinePerm {
    int N = 0;
    std::vector<int> window;  // f(1..N)
    int operator()(int j) const;
};

AffinePerm affine_permutation(const WeylElement& x);

// One-line cycle notation of the finite part, e.g. "(1 2)" or "(1 -1)(2 3)".
std::string cycle_string(const WeylElement& x);
// Translation part as comma-separated integers.
std::string translation_string(const WeylElement& x);

}  // namespace locmodel::weyl
