#include "arw/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace arw {

namespace {

void descend(int d, std::int64_t remaining, int depth,
             std::vector<std::int64_t>& prefix,
             std::vector<std::int64_t>& out) {
    if (depth == d - 1) {
        // Last coordinate: +-sqrt(remaining) when remaining is a square.
        std::int64_t root;
        if (!is_perfect_square(remaining, root)) return;
        if (root == 0) {
            out.insert(out.end(), prefix.begin(), prefix.end());
            out.push_back(0);
            return;
        }
        out.insert(out.end(), prefix.begin(), prefix.end());
        out.push_back(-root);
        out.insert(out.end(), prefix.begin(), prefix.end());
        out.push_back(root);
        return;
    }
    std::int64_t bound = isqrt64(remaining);
    for (std::int64_t c = -bound; c <= bound; ++c) {
        prefix.push_back(c);
        descend(d, remaining - c * c, depth + 1, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

FrequencySet enumerate_frequencies(int d, std::int64_t m, bool strict) {
    if (d < 2) throw std::invalid_argument("enumerate_frequencies: d must be >= 2");
    if (m < 1) throw std::invalid_argument("enumerate_frequencies: m must be >= 1");
    if (m > (std::int64_t{1} << 31))
        throw std::invalid_argument("enumerate_frequencies: m exceeds 2^31 cap");
    if (strict && d == 4 && m % 2 == 0)
        throw StrictModeError(
            "enumerate_frequencies: even m rejected at d = 4 (strict mode)");
    FrequencySet set;
    set.d = d;
    set.m = m;
    std::vector<std::int64_t> prefix;
    prefix.reserve(d);
    descend(d, m, 0, prefix, set.coords);
    return set;
}

bool set_contains(const FrequencySet& set, std::span<const std::int64_t> mu) {
    const int d = set.d;
    std::size_t lo = 0, hi = set.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        auto row = set.point(mid);
        int cmp = 0;
        for (int i = 0; i < d; ++i) {
            if (row[i] != mu[i]) {
                cmp = row[i] < mu[i] ? -1 : 1;
                break;
            }
        }
        if (cmp == 0) return true;
        if (cmp < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return false;
}

void validate(const FrequencySet& set) {
    const int d = set.d;
    const std::size_t n = set.size();
    if (set.coords.size() != n * static_cast<std::size_t>(d))
        throw std::logic_error("validate: ragged coordinate array");
    std::vector<std::int64_t> sum(d, 0), neg(d);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = set.point(i);
        std::int64_t norm2 = 0;
        for (int j = 0; j < d; ++j) {
            norm2 += row[j] * row[j];
            sum[j] += row[j];
            neg[j] = -row[j];
        }
        if (norm2 != set.m) throw std::logic_error("validate: wrong norm");
        if (!set_contains(set, neg))
            throw std::logic_error("validate: not closed under negation");
        if (i > 0) {
            auto prev = set.point(i - 1);
            bool less = false;
            for (int j = 0; j < d; ++j) {
                if (prev[j] != row[j]) {
                    less = prev[j] < row[j];
                    break;
                }
            }
            if (!less) throw std::logic_error("validate: rows not strictly sorted");
        }
    }
    for (int j = 0; j < d; ++j)
        if (sum[j] != 0) throw std::logic_error("validate: nonzero coordinate sum");
}

int num_test_functions() { return 6; }

std::string test_function_name(int index) {
    switch (index) {
        case 0: return "1";
        case 1: return "u1";
        case 2: return "u1^2";
        case 3: return "u1*u2";
        case 4: return "u1^4";
        case 5: return "u1^2*u2^2";
        default: throw std::invalid_argument("test_function_name: bad index");
    }
}

Rat spherical_average(int d, int index) {
    if (d < 2) throw std::invalid_argument("spherical_average: d must be >= 2");
    // Moments of a uniform unit vector: E[u1^2] = 1/d, E[u1^4] = 3/(d(d+2)),
    // E[u1^2 u2^2] = 1/(d(d+2)); odd monomials vanish.
    switch (index) {
        case 0: return Rat(1);
        case 1: return Rat(0);
        case 2: return Rat(Int(1), Int(d));
        case 3: return Rat(0);
        case 4: return Rat(Int(3), Int(d) * (d + 2));
        case 5: return Rat(Int(1), Int(d) * (d + 2));
        default: throw std::invalid_argument("spherical_average: bad index");
    }
}

double equidistribution_statistic(const FrequencySet& set, int index) {
    const double m = static_cast<double>(set.m);
    const std::size_t n = set.size();
    if (n == 0) throw std::invalid_argument("equidistribution_statistic: empty set");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto row = set.point(i);
        double u1 = static_cast<double>(row[0]);
        double u2 = set.d > 1 ? static_cast<double>(row[1]) : 0.0;
        switch (index) {
            case 0: acc += 1.0; break;
            case 1: acc += u1 / std::sqrt(m); break;
            case 2: acc += u1 * u1 / m; break;
            case 3: acc += u1 * u2 / m; break;
            case 4: acc += (u1 * u1) * (u1 * u1) / (m * m); break;
            case 5: acc += (u1 * u1) * (u2 * u2) / (m * m); break;
            default: throw std::invalid_argument("equidistribution_statistic: bad index");
        }
    }
    return acc / static_cast<double>(n) - rat_to_double(spherical_average(set.d, index));
}

nlohmann::json to_json(const FrequencySet& set) {
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto row = set.point(i);
        points.push_back(std::vector<std::int64_t>(row.begin(), row.end()));
    }
    return {{"d", set.d}, {"m", set.m}, {"n", set.n()}, {"points", std::move(points)}};
}

FrequencySet frequency_set_from_json(const nlohmann::json& j) {
    FrequencySet set;
    set.d = j.at("d").get<int>();
    set.m = j.at("m").get<std::int64_t>();
    for (const auto& p : j.at("points"))
        for (const auto& c : p) set.coords.push_back(c.get<std::int64_t>());
    if (set.n() != j.at("n").get<std::int64_t>())
        throw std::invalid_argument("frequency_set_from_json: n mismatch");
    return set;
}

}  // namespace arw
