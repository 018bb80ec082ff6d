#include "arw/correlations.hpp"

#include <algorithm>
#include <cmath>

#include "arw/common.hpp"

namespace arw {

PairSumTable build_pair_sum_table(const FrequencySet& set, std::size_t entry_cap) {
    PairSumTable t;
    t.d = set.d;
    t.m = set.m;
    const std::int64_t bound = 2 * isqrt64(set.m);
    t.shape = PackedShape::for_bound(set.d, bound);
    const std::size_t n = set.size();
    t.index = PackedIndexMap(std::min<std::size_t>(n * n / 4 + 16, entry_cap));
    std::vector<std::int64_t> v(set.d);
    for (std::size_t i = 0; i < n; ++i) {
        auto a = set.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            auto b = set.point(j);
            for (int k = 0; k < set.d; ++k) v[k] = a[k] + b[k];
            std::int64_t idx = t.index.insert_or_get(t.shape.pack(v));
            if (static_cast<std::size_t>(idx) >= t.count.size()) {
                if (t.count.size() >= entry_cap)
                    throw BudgetExceeded("pair sum table exceeds entry cap");
                t.count.push_back(0);
            }
            ++t.count[static_cast<std::size_t>(idx)];
        }
    }
    return t;
}

std::int64_t count_c4(const FrequencySet& set) {
    const int d = set.d;
    const std::size_t n = set.size();
    const std::int64_t a_max = isqrt64(set.m);
    PackedShape shape = PackedShape::for_bound(d, 2 * a_max);

    // Group points by first coordinate so each bucket of pair sums with a
    // fixed first coordinate can be generated independently.
    std::vector<std::vector<std::size_t>> by_first(2 * a_max + 1);
    for (std::size_t i = 0; i < n; ++i)
        by_first[static_cast<std::size_t>(set.point(i)[0] + a_max)].push_back(i);

    __int128 total = 0;
    std::vector<std::uint64_t> bucket;
    std::vector<std::int64_t> v(d);
    for (std::int64_t c = -2 * a_max; c <= 2 * a_max; ++c) {
        bucket.clear();
        for (std::int64_t f1 = std::max(-a_max, c - a_max);
             f1 <= std::min(a_max, c + a_max); ++f1) {
            const auto& left = by_first[static_cast<std::size_t>(f1 + a_max)];
            const auto& right = by_first[static_cast<std::size_t>(c - f1 + a_max)];
            for (std::size_t i : left) {
                auto a = set.point(i);
                for (std::size_t j : right) {
                    auto b = set.point(j);
                    for (int k = 0; k < d; ++k) v[k] = a[k] + b[k];
                    bucket.push_back(shape.pack(v));
                }
            }
        }
        std::sort(bucket.begin(), bucket.end());
        for (std::size_t i = 0; i < bucket.size();) {
            std::size_t j = i;
            while (j < bucket.size() && bucket[j] == bucket[i]) ++j;
            std::int64_t run = static_cast<std::int64_t>(j - i);
            total += static_cast<__int128>(run) * run;
            i = j;
        }
    }
    return checked_i64(total, "count_c4");
}

C4Decomposition decompose_c4(const FrequencySet& set, std::int64_t c4) {
    const std::int64_t n = set.n();
    C4Decomposition dec;
    dec.d_diag = 3 * n;
    dec.d_sym = 3 * n * n - 6 * n;
    dec.x4 = c4 - 3 * n * n + 3 * n;
    return dec;
}

std::int64_t count_c6(const FrequencySet& set, const PairSumTable& table,
                      std::int64_t work_budget) {
    const std::size_t n = set.size();
    const std::size_t supp = table.index.size();
    if (static_cast<std::int64_t>(supp) * static_cast<std::int64_t>(n) > work_budget)
        throw BudgetExceeded("count_c6: supp(a) * N exceeds work budget");
    const int d = set.d;
    // Triple sums reach 3*sqrt(m) per coordinate, beyond the pair-sum
    // packing, so tabulate t over a wider shape.
    PackedShape shape3 = PackedShape::for_bound(d, 3 * isqrt64(set.m));
    PackedIndexMap tindex(supp * 4);
    std::vector<std::int64_t> tcount;
    std::vector<std::int64_t> v(d), w(d);
    const auto& keys = table.index.keys();
    for (std::size_t e = 0; e < keys.size(); ++e) {
        table.shape.unpack(keys[e], v);
        const std::int64_t a_v = table.count[e];
        for (std::size_t i = 0; i < n; ++i) {
            auto mu = set.point(i);
            for (int k = 0; k < d; ++k) w[k] = v[k] + mu[k];
            std::int64_t idx = tindex.insert_or_get(shape3.pack(w));
            if (static_cast<std::size_t>(idx) >= tcount.size()) tcount.push_back(0);
            tcount[static_cast<std::size_t>(idx)] += a_v;
        }
    }
    __int128 total = 0;
    const auto& tkeys = tindex.keys();
    for (std::size_t e = 0; e < tkeys.size(); ++e) {
        shape3.unpack(tkeys[e], w);
        for (int k = 0; k < d; ++k) v[k] = -w[k];
        std::int64_t j = tindex.find(shape3.pack(v));
        if (j >= 0)
            total += static_cast<__int128>(tcount[e]) *
                     tcount[static_cast<std::size_t>(j)];
    }
    return checked_i64(total, "count_c6");
}

CorrelationCensus build_census(const FrequencySet& set, const CensusOptions& opts) {
    CorrelationCensus c;
    c.d = set.d;
    c.m = set.m;
    c.n = set.n();
    c.c4 = count_c4(set);
    C4Decomposition dec = decompose_c4(set, c.c4);
    c.d_sym = dec.d_sym;
    c.d_diag = dec.d_diag;
    c.x4 = dec.x4;
    Int n4 = Int(c.n) * c.n * c.n * c.n;
    c.r4 = Rat(Int(c.c4), n4);
    if (opts.want_c6) {
        try {
            PairSumTable table = build_pair_sum_table(set, opts.table_entry_cap);
            c.c6 = count_c6(set, table, opts.c6_work_budget);
            c.r6 = Rat(Int(*c.c6), n4 * c.n * c.n);
        } catch (const BudgetExceeded&) {
            if (opts.throw_on_c6_budget) throw;
        }
    }
    return c;
}

nlohmann::json census_to_json(const CorrelationCensus& c) {
    nlohmann::json j = {
        {"d", c.d},       {"m", c.m},           {"n", c.n},
        {"c4", c.c4},     {"d_sym", c.d_sym},   {"d_diag", c.d_diag},
        {"x4", c.x4},     {"r4", rat_to_json(c.r4)},
    };
    if (c.c6) {
        j["c6"] = *c.c6;
        j["r6"] = rat_to_json(*c.r6);
    } else {
        j["c6"] = nullptr;
        j["r6"] = nullptr;
    }
    return j;
}

Rat alpha_exponent(int d) {
    if (d < 4) throw std::invalid_argument("alpha_exponent: d must be >= 4");
    if (d == 4) return Rat(Int(2), Int(3));
    return Rat(Int(2), Int(d - 2));
}

AlphaFit check_alpha_bound(const std::vector<CorrelationCensus>& censuses, int d) {
    if (censuses.size() < 5)
        throw std::invalid_argument(
            "check_alpha_bound: need at least 5 censuses for a trend fit");
    AlphaFit fit;
    const double expo = 3.0 - rat_to_double(alpha_exponent(d));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& c : censuses) {
        if (c.d != d) throw std::invalid_argument("check_alpha_bound: mixed dimensions");
        double x = std::log(static_cast<double>(c.n));
        double y = std::log(static_cast<double>(c.c4));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        fit.ratios.push_back(static_cast<double>(c.c4) /
                             std::pow(static_cast<double>(c.n), expo));
    }
    const double k = static_cast<double>(censuses.size());
    fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / k;
    auto [mn, mx] = std::minmax_element(fit.ratios.begin(), fit.ratios.end());
    fit.ratio_max_min = *mx / *mn;
    return fit;
}

}  // namespace arw
