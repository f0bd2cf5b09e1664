#pragma once

// μ-admissible and μ-permissible sets in W_I\W̃/W_I and the point counts of
// the corresponding Schubert strata.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "locmodel/weyl.hpp"

namespace locmodel::admissible {

using weyl::ParahoricSpec;
using weyl::RootDatum;
using weyl::WeylElement;

using Rational = boost::rational<long long>;
using RVec = std::vector<Rational>;

// Polynomial in q with nonnegative coefficients, coeff[k] of q^k.
struct Poly {
    std::vector<std::uint64_t> coeff;

    std::uint64_t eval(std::uint64_t q) const;
    std::string str() const;
    bool operator==(const Poly& o) const noexcept;
    Poly& operator+=(const Poly& o);
};

// ω_{r_1} + ... + ω_{r_e} for GL(d).
std::vector<int> minuscule_sum(const RootDatum& D, const std::vector<int>& r);
// e·μ_1 = (e^g; e) for GSp(g).
std::vector<int> symplectic_mu(const RootDatum& D, int e);

// Alcove vertices a_0..a_{m-1}: a_i is the point fixed by every s_j, j != i,
// normalized by x_d = 0 (GL) or c = 0 (GSp).
const std::vector<RVec>& vertices(const RootDatum& D);

// y ∈ Conv(W_0 μ). GL: majorization; GSp: exact linear feasibility.
bool conv_membership(const RootDatum& D, const RVec& y, const std::vector<int>& mu);

// Exact Phase-I simplex: is y a convex combination of the given points?
bool convex_feasible(const std::vector<RVec>& points, const RVec& y);

// x(a_i) - a_i ∈ Conv(W_0 μ) for every i ∈ I, and κ(x) = κ(t_μ).
bool is_permissible(const WeylElement& x, const ParahoricSpec& spec, const std::vector<int>& mu);

class DoubleCoset {
public:
    DoubleCoset(const ParahoricSpec& spec, const WeylElement& x);

    const ParahoricSpec& spec() const noexcept { return spec_; }
    const WeylElement& min_rep() const noexcept { return min_; }
    const std::vector<WeylElement>& members() const noexcept { return members_; }
    // Members that are minimal in their right W_I-coset.
    const std::vector<WeylElement>& right_minimal() const noexcept { return right_min_; }
    // Σ q^{ℓ(z)} over right-minimal members z.
    const Poly& polynomial() const noexcept { return poly_; }
    bool contains(const WeylElement& z) const;

    bool operator==(const DoubleCoset& o) const noexcept { return min_ == o.min_; }
    bool operator<(const DoubleCoset& o) const noexcept;

private:
    ParahoricSpec spec_;
    WeylElement min_;
    std::vector<WeylElement> members_;
    std::vector<WeylElement> right_min_;
    Poly poly_;
};

std::uint64_t stratum_count(const DoubleCoset& c, std::uint64_t q);
bool double_coset_leq(const DoubleCoset& a, const DoubleCoset& b);

struct AdmissibleSet {
    ParahoricSpec spec;
    std::vector<int> mu;
    std::vector<DoubleCoset> classes;  // sorted by (length of min_rep, min_rep)

    bool contains(const WeylElement& x) const;
    // Index of the class containing x, or -1.
    int find(const WeylElement& x) const;
    std::vector<WeylElement> min_reps() const;
};

AdmissibleSet adm_set(const ParahoricSpec& spec, const std::vector<int>& mu);

struct PermResult {
    AdmissibleSet set;
    std::size_t pool_size = 0;
    int pool_length = 0;
    // No permissible double-minimal element sits at the pool boundary.
    bool boundary_clean = true;
};

PermResult perm_set_detailed(const ParahoricSpec& spec, const std::vector<int>& mu);
AdmissibleSet perm_set(const ParahoricSpec& spec, const std::vector<int>& mu);

std::uint64_t total_count(const AdmissibleSet& s, std::uint64_t q);
Poly total_polynomial(const AdmissibleSet& s);

// All nonempty vertex subsets I, in increasing bitmask order.
std::vector<ParahoricSpec> all_parahorics(const RootDatum& D);

}  // namespace locmodel::admissible
