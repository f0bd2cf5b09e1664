#pragma once

// Point counts of two matrix schemes over F_p:
//   symmetric A with A² = 0, ∧^{s+1}A = 0, ∧^{r+1}A = 0, det(T - A) = T^n;
//   A = (a b; 0 aᵗ) of size 2ge with b alternating, char_a = T^{ge}, A^e = 0.

#include <cstdint>
#include <vector>

#include "locmodel/linalg.hpp"

namespace locmodel::matschemes {

struct UnitarySchemeSpec {
    int n = 2;
    int r = 1;
    int s = 1;
    int p = 2;
};

struct UnitaryCount {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> by_rank;  // by_rank[k] = points of rank k
    // Direct strategy only: every enumerated square-zero matrix had det(T - A) = T^n.
    bool charpoly_ok = true;
};

// Rejects bad sizes or ranks with invalid_argument.
void validate(const UnitarySchemeSpec& spec);

UnitaryCount unitary_points_direct(const UnitarySchemeSpec& spec, int jobs = 1);
UnitaryCount unitary_points_stratified(const UnitarySchemeSpec& spec);

struct SymplecticPSpec {
    int g = 1;
    int e = 1;
    int p = 2;
};

void validate(const SymplecticPSpec& spec);

// Enumerates a and b.
std::uint64_t symplectic_P_points(const SymplecticPSpec& spec);
// Enumerates a and counts the solutions b of the linear conditions.
std::uint64_t symplectic_P_points_linear(const SymplecticPSpec& spec);

// Coefficients c_0..c_n of det(T·I - A), c_n = 1.
std::vector<linalg::elem> charpoly(const linalg::Matrix& A);

}  // namespace locmodel::matschemes
