#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "arw/lattice.hpp"
#include "arw/packed_map.hpp"
#include "arw/rational.hpp"

namespace arw {

// Representation function of pair sums: a(v) = #{(mu1, mu2) : mu1 + mu2 = v}
// over ordered pairs from the frequency set.  Symmetric under v -> -v.
struct PairSumTable {
    int d = 0;
    std::int64_t m = 0;
    PackedShape shape;
    PackedIndexMap index;
    std::vector<std::int64_t> count;

    std::int64_t at_key(std::uint64_t key) const {
        std::int64_t i = index.find(key);
        return i < 0 ? 0 : count[static_cast<std::size_t>(i)];
    }
    std::int64_t at(std::span<const std::int64_t> v) const {
        return at_key(shape.pack(v));
    }
};

// Builds the table in O(N^2); throws BudgetExceeded if the number of distinct
// pair sums would exceed entry_cap.
PairSumTable build_pair_sum_table(const FrequencySet& set,
                                  std::size_t entry_cap = 1u << 24);

// |C(4)| = sum_v a(v)^2, counted without materializing the table: pairs are
// bucketed by the first coordinate of the sum, each bucket sorted, and run
// lengths squared.  Deterministic and cache-friendly for large sets.
std::int64_t count_c4(const FrequencySet& set);

// Split of the degenerate (pairing-forced) part of C(4).  For any set that is
// closed under negation and duplicate-free:
//   d_diag = 3N   (tuples with a repeated antipodal pair, e.g. mu3 = -mu1 = mu4')
//   d_sym  = 3N^2 - 6N
//   x4     = c4 - 3N^2 + 3N  (non-degenerate count)
// d_sym + d_diag + x4 == c4 always.
struct C4Decomposition {
    std::int64_t d_sym = 0;
    std::int64_t d_diag = 0;
    std::int64_t x4 = 0;
};
C4Decomposition decompose_c4(const FrequencySet& set, std::int64_t c4);

// |C(6)| via the triple-sum counts t(w) = sum_mu a(w - mu), i.e. the number
// of ordered triples from the set summing to w: |C(6)| = sum_w t(w) * t(-w).
// Tabulating t costs supp(a) * N work, rejected up front when it exceeds
// work_budget.
std::int64_t count_c6(const FrequencySet& set, const PairSumTable& table,
                      std::int64_t work_budget = 200'000'000);

struct CorrelationCensus {
    int d = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;
    std::int64_t c4 = 0;
    std::int64_t d_sym = 0;
    std::int64_t d_diag = 0;
    std::int64_t x4 = 0;
    std::optional<std::int64_t> c6;  // absent when over budget
    Rat r4;                          // c4 / N^4
    std::optional<Rat> r6;           // c6 / N^6
};

struct CensusOptions {
    std::size_t table_entry_cap = 1u << 24;
    std::int64_t c6_work_budget = 200'000'000;
    bool want_c6 = true;
    bool throw_on_c6_budget = false;  // if false, c6 is simply left absent
};

CorrelationCensus build_census(const FrequencySet& set,
                               const CensusOptions& opts = {});

nlohmann::json census_to_json(const CorrelationCensus& c);

// Power-saving exponent alpha(d): 2/(d-1) at d = 4, 2/(d-2) for d >= 5.
Rat alpha_exponent(int d);

// Least-squares fit of log |C(4)| against log N across censuses, plus the
// ratios |C(4)| / N^{3 - alpha(d)} that the variance bound needs to be
// uniformly bounded.  Requires at least 5 censuses.
struct AlphaFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> ratios;
    double ratio_max_min = 0.0;
};
AlphaFit check_alpha_bound(const std::vector<CorrelationCensus>& censuses, int d);

}  // namespace arw
