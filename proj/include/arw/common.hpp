#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace arw {

// Error raised when a requested computation exceeds its configured work or
// memory budget.  The CLI maps this to a distinct exit code so callers can
// skip budget-gated outputs (e.g. sixth-order counts) for oversized inputs.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Error raised when strict-mode input validation rejects a configuration
// (notably even m at d = 4, where the frequency set degenerates).
struct StrictModeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Integer square root: largest s >= 0 with s*s <= v.
inline std::int64_t isqrt64(std::int64_t v) {
    if (v < 0) throw std::invalid_argument("isqrt64: negative argument");
    if (v == 0) return 0;
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (s > 0 && s * s > v) --s;
    while ((s + 1) * (s + 1) <= v) ++s;
    return s;
}

inline bool is_perfect_square(std::int64_t v, std::int64_t& root) {
    if (v < 0) return false;
    root = isqrt64(v);
    return root * root == v;
}

// Checked narrowing from 128-bit accumulators back to int64 results.
inline std::int64_t checked_i64(__int128 v, const char* what) {
    if (v > static_cast<__int128>(std::numeric_limits<std::int64_t>::max()) ||
        v < static_cast<__int128>(std::numeric_limits<std::int64_t>::min()))
        throw std::overflow_error(std::string(what) + ": value exceeds 64 bits");
    return static_cast<std::int64_t>(v);
}

}  // namespace arw
