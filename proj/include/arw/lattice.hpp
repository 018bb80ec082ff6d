#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "arw/common.hpp"
#include "arw/rational.hpp"

namespace arw {

using Frequency = std::vector<std::int64_t>;

// All lattice points mu in Z^d with |mu|^2 = m, stored row-major in
// lexicographic order.  The set is closed under negation and sums to zero
// (for every solution, -mu is a solution).
struct FrequencySet {
    int d = 0;
    std::int64_t m = 0;
    std::vector<std::int64_t> coords;  // size() * d entries

    std::size_t size() const {
        return d == 0 ? 0 : coords.size() / static_cast<std::size_t>(d);
    }
    std::int64_t n() const { return static_cast<std::int64_t>(size()); }
    std::span<const std::int64_t> point(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(d),
                static_cast<std::size_t>(d)};
    }
};

// Enumerate the frequency set by recursive coordinate descent with
// square-sum pruning (coordinates emitted in ascending order, so the result
// is lexicographically sorted without a separate sort pass).
//
// strict mode rejects configurations outside the regime the rest of the
// pipeline assumes: d < 2, m < 1, m > 2^31, and even m at d = 4 (where
// every solution has even coordinate sum and the set degenerates under
// scaling).  Throws StrictModeError for the parity rejection and
// std::invalid_argument for the others.
FrequencySet enumerate_frequencies(int d, std::int64_t m, bool strict = true);

// Binary search over the sorted rows.
bool set_contains(const FrequencySet& set, std::span<const std::int64_t> mu);

// Throws std::logic_error if any structural invariant fails (sorted rows,
// no duplicates, |mu|^2 = m, closure under negation, zero sum).
void validate(const FrequencySet& set);

// Built-in polynomial test functions g(u) on the unit sphere, indexed:
//   0: 1        1: u1        2: u1^2      3: u1*u2
//   4: u1^4     5: u1^2*u2^2
int num_test_functions();
std::string test_function_name(int index);

// Exact spherical average of the indexed test function on S^{d-1}.
Rat spherical_average(int d, int index);

// (1/N) sum_mu g(mu/|mu|) minus the exact spherical average.
double equidistribution_statistic(const FrequencySet& set, int index);

// {"d":..,"m":..,"n":..,"points":[[..],..]}
nlohmann::json to_json(const FrequencySet& set);
FrequencySet frequency_set_from_json(const nlohmann::json& j);

}  // namespace arw
