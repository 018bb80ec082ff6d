#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arw/lattice.hpp"
#include "arw/rational.hpp"

namespace arw {

// B_k = (1/(m^k N^2)) sum_{mu1, mu2} (mu1 . mu2)^k, computed exactly.
// The double sum is expanded multinomially into squares of single sums
// S_beta = sum_mu prod_i mu_i^{beta_i}, so the cost is O(N * #monomials)
// instead of O(N^2).  Odd k gives 0 (the set is closed under negation) and
// k = 2 gives exactly 1/d; both fall out of the computed S_beta, they are
// not special-cased.  Requires 1 <= k <= 8 and m <= 10^6 (keeps every
// monomial inside the 128-bit fast path before the arbitrary-precision
// flush).
Rat b_k_exact(const FrequencySet& set, int k);

// Large-m limit of B_k for even k: the Gamma-ratio
//   Gamma((k+1)/2) Gamma(d/2) / (Gamma((k+d)/2) Gamma(1/2)),
// evaluated via log-Gamma.  k = 2 gives 1/d.  Throws on odd k.
double b_k_limit(int d, int k);

// Same limit as an exact rational: (k-1)!! / prod_{j=0}^{k/2-1} (d + 2j).
Rat b_k_limit_exact(int d, int k);

struct MomentValue {
    int k = 0;
    Rat exact;
    double limit = 0.0;  // NaN for odd k (no limit defined)
    double gap = 0.0;    // exact - limit (0 - 0 convention for odd k)
};

std::vector<MomentValue> moment_table(const FrequencySet& set, int k_max = 8);

// CSV rows "m,k,exact_num,exact_den,limit,gap", one per moment.
std::string moment_table_csv(const FrequencySet& set, int k_max = 8);

}  // namespace arw
