#pragma once

// Finite models of the special fibers of local models for Res GL_d and
// Res GSp_2g over a totally ramified extension of degree e.
//
// Everything lives on one Z-indexed basis b_j of k((Π))^N (N = d, resp. 2g)
// with b_{j-N} = Π b_j and Λ(j) = span{b_k : k <= j}. Slot t of the chain is
// M_t = Λ(c_t) / Λ(c_t - eN), an F_p-space of dimension eN on which Π acts by
// the nilpotent N_t. Transition maps are induced by the inclusions
// Λ(c_t) ⊆ Λ(c_{t+1}), and the wrap map by Π : Λ(c_last) -> Λ(c_first).
//
// GL(d): c_t = d + i_t for i_t ∈ I.
// GSp(g): the basis is ẽ_1..ẽ_g, f̃_g..f̃_1; slots run over -i_{m-1} < .. < -i_0
// <= i_0 < .. < i_{m-1} with c = 2g ± i, and slot ±i is paired with slot ∓i by
// the finite shadow of the alternating form.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "locmodel/admissible.hpp"
#include "locmodel/linalg.hpp"
#include "locmodel/weyl.hpp"

namespace locmodel::latmod {

using linalg::Field;
using linalg::Matrix;
using linalg::Subspace;
using weyl::Kind;
using weyl::WeylElement;

struct ModelParams {
    Kind kind = Kind::GL;
    int n = 2;  // d for GL, g for GSp
    int e = 1;
    std::vector<int> I{0};
    int p = 2;
    std::vector<int> r;  // GL: r_1..r_e with 0 <= r_l <= d; GSp: all r_l = g (may be left empty)
    // GSp with p | e: pair by the Π^{e-1} coefficient alone instead of e times it.
    bool allow_wild = false;
};

struct Slot {
    int label = 0;  // i_t for GL; ±i for GSp (-0 and +0 are distinct slots)
    bool minus = false;
    int top = 0;            // c_t
    std::vector<int> bidx;  // b-index of each coordinate
};

class ChainModel {
public:
    ModelParams params;
    Field field{2};
    int N = 0;          // period of the b-indexing
    int dim = 0;        // eN
    int rank = 0;       // rank of every F_t
    std::vector<int> R; // R[j] = rank of F^j, j = 0..e
    std::vector<Slot> slots;
    std::vector<Matrix> nilp;  // Π on each slot
    std::vector<Matrix> trans; // trans[t]: slot t -> slot t+1
    Matrix wrap;               // last slot -> first slot
    // GSp only: dual[t] is the paired slot, gram[t] the pairing slot t × slot dual[t].
    std::vector<int> dual;
    std::vector<Matrix> gram;

    weyl::RootDatum datum() const;
    weyl::ParahoricSpec spec() const;
    std::vector<int> mu() const;
    int num_slots() const noexcept { return static_cast<int>(slots.size()); }
    bool symplectic() const noexcept { return params.kind == Kind::GSp; }
    // Coordinate of b_j in slot t, or -1 if b_j is not in the range of M_t.
    int position(int t, int j) const;
    std::string describe() const;
};

ChainModel build_model(const ModelParams& params);

struct ChainPoint {
    std::vector<Subspace> F;  // one per slot

    bool operator==(const ChainPoint& o) const { return F == o.F; }
    bool operator<(const ChainPoint& o) const;
};

// F^j_t for j = 1..e stored as levels[j-1][t]; levels[e-1] is the chain point.
struct FlagPoint {
    std::vector<std::vector<Subspace>> levels;
};

// Operator used in the flag conditions: Π itself, or the generator Π + Π².
enum class FlagOperator { pi, pi_plus_pi2 };

// filter: scan the whole Grassmannian. socle: build F through F ∩ ker Π^j.
enum class StableStrategy { filter, socle };

struct EnumOptions {
    int jobs = 1;
    FlagOperator op = FlagOperator::pi;
    StableStrategy stable = StableStrategy::socle;
};

// All Π-stable subspaces of M_slot of the model's rank, in canonical order.
std::vector<Subspace> stable_subspaces(const ChainModel& m, int slot, int jobs = 1,
                                       StableStrategy strategy = StableStrategy::socle);

std::vector<ChainPoint> naive_points(const ChainModel& m, const EnumOptions& opt = {});

// Calls visit for every flag over pt; returns the number visited. A visitor
// returning false stops the search.
std::uint64_t for_each_flag(const ChainModel& m, const ChainPoint& pt, const std::function<bool(const FlagPoint&)>& visit,
                            FlagOperator op = FlagOperator::pi);
bool has_splitting_flag(const ChainModel& m, const ChainPoint& pt, FlagOperator op = FlagOperator::pi);
std::uint64_t count_flags(const ChainModel& m, const ChainPoint& pt, FlagOperator op = FlagOperator::pi);

std::vector<FlagPoint> splitting_points(const ChainModel& m, const EnumOptions& opt = {});
std::uint64_t count_splitting_points(const ChainModel& m, const EnumOptions& opt = {});

std::vector<ChainPoint> canonical_points(const ChainModel& m, const EnumOptions& opt = {});

// The unramified model attached to the l-th embedding (1-based): the same
// chain with e = 1 and rank r_l.
ChainModel unramified_model(const ChainModel& m, int l);
std::vector<ChainPoint> unramified_points(const ChainModel& m, int l, const EnumOptions& opt = {});

// Point of the naive model whose chain is Π^e·w·Λ̃.
ChainPoint standard_point(const WeylElement& w, const ChainModel& m);
bool is_compatible(const WeylElement& w, const ChainModel& m);

// d(t, t', n) = dim(L_t ∩ Π^n Λ̃_{t'}) for -1 <= n <= e, flattened.
using Signature = std::vector<int>;
Signature signature(const ChainModel& m, const ChainPoint& pt);

// Chain automorphisms as matrices acting on every slot simultaneously.
struct ChainAutomorphism {
    std::vector<Matrix> per_slot;
};
ChainPoint apply(const ChainAutomorphism& g, const ChainPoint& pt);
// Elementary generators: periodic transvections b_k -> b_k + x b_j preserving
// every Λ(c_t) (paired to preserve the form for GSp) and torus elements.
std::vector<ChainAutomorphism> automorphism_generators(const ChainModel& m);

// Double-coset classes whose standard points lie in the model, each with one
// representative whose standard point is defined.
struct Candidate {
    WeylElement cls;  // double-minimal representative
    WeylElement rep;
};
std::vector<Candidate> candidate_classes(const ChainModel& m);

// Every condition of the naive model: ranks, Π-stability, transitions, wrap
// and for GSp the duality F_{∓i} = perp(F_{±i}).
bool is_naive_point(const ChainModel& m, const ChainPoint& pt);

struct StratumRow {
    WeylElement w;  // double-minimal representative
    int length = 0;
    std::uint64_t predicted = 0;  // stratum_count if w ∈ Adm, else 0
    std::uint64_t observed = 0;
    bool admissible = false;
    admissible::Poly poly;
};

struct StratumReport {
    std::vector<StratumRow> rows;
    std::uint64_t unmatched = 0;
    std::uint64_t total_predicted = 0;
    std::uint64_t total_observed = 0;
    bool orbit_fallback = false;
    bool pass = false;
};

StratumReport classify_strata(const ChainModel& m, const std::vector<ChainPoint>& points,
                              const admissible::AdmissibleSet& adm);

struct TorsorReport {
    std::uint64_t splitting = 0;
    std::vector<std::uint64_t> factors;
    std::uint64_t product = 1;
    bool pass = false;
};

TorsorReport torsor_check(const ChainModel& m, const EnumOptions& opt = {});

}  // namespace locmodel::latmod
