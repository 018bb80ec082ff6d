#include "arw/moments.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace arw {

namespace {

// All multi-indices beta over d coordinates with |beta| = k, together with
// the multinomial coefficient k! / prod(beta_i!).
struct Monomial {
    std::vector<int> beta;
    std::int64_t coeff;
};

void compose(int d, int k, int depth, std::vector<int>& beta,
             std::vector<Monomial>& out) {
    if (depth == d - 1) {
        beta[depth] = k;
        static constexpr std::int64_t fact[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
        std::int64_t c = fact[std::accumulate(beta.begin(), beta.end(), 0)];
        for (int b : beta) c /= fact[b];
        out.push_back({beta, c});
        return;
    }
    for (int v = 0; v <= k; ++v) {
        beta[depth] = v;
        compose(d, k - v, depth + 1, beta, out);
    }
}

}  // namespace

Rat b_k_exact(const FrequencySet& set, int k) {
    if (k < 1 || k > 8) throw std::invalid_argument("b_k_exact: k must be in [1,8]");
    if (set.m > 1'000'000)
        throw std::invalid_argument("b_k_exact: m above the 10^6 overflow guard");
    const int d = set.d;
    std::vector<Monomial> monomials;
    std::vector<int> beta(d, 0);
    compose(d, k, 0, beta, monomials);

    // S_beta accumulated in 128-bit blocks, flushed to cpp_int periodically.
    const std::size_t n = set.size();
    std::vector<Int> s(monomials.size(), Int(0));
    std::vector<__int128> block(monomials.size(), 0);
    std::size_t since_flush = 0;
    auto flush = [&] {
        for (std::size_t t = 0; t < block.size(); ++t) {
            s[t] += int_from_i128(block[t]);
            block[t] = 0;
        }
        since_flush = 0;
    };
    std::vector<std::int64_t> powers(static_cast<std::size_t>(d) * (k + 1));
    for (std::size_t i = 0; i < n; ++i) {
        auto mu = set.point(i);
        for (int j = 0; j < d; ++j) {
            std::int64_t p = 1;
            for (int e = 0; e <= k; ++e) {
                powers[static_cast<std::size_t>(j) * (k + 1) + e] = p;
                p *= mu[j];
            }
        }
        for (std::size_t t = 0; t < monomials.size(); ++t) {
            std::int64_t prod = 1;
            const auto& b = monomials[t].beta;
            for (int j = 0; j < d; ++j)
                prod *= powers[static_cast<std::size_t>(j) * (k + 1) + b[j]];
            block[t] += prod;
        }
        if (++since_flush == 4096) flush();
    }
    flush();

    // sum (mu1.mu2)^k = sum_beta multinomial(beta) * S_beta^2.
    Int total = 0;
    for (std::size_t t = 0; t < monomials.size(); ++t)
        total += Int(monomials[t].coeff) * s[t] * s[t];
    Int denom = 1;
    for (int e = 0; e < k; ++e) denom *= set.m;
    denom *= Int(set.n()) * set.n();
    return Rat(total, denom);
}

double b_k_limit(int d, int k) {
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("b_k_limit: defined for even k >= 2 only");
    using boost::math::lgamma;
    double lg = lgamma((k + 1) / 2.0) + lgamma(d / 2.0) - lgamma((k + d) / 2.0) -
                lgamma(0.5);
    return std::exp(lg);
}

Rat b_k_limit_exact(int d, int k) {
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("b_k_limit_exact: defined for even k >= 2 only");
    Int num = 1;
    for (int j = k - 1; j >= 1; j -= 2) num *= j;  // (k-1)!!
    Int den = 1;
    for (int j = 0; j < k / 2; ++j) den *= d + 2 * j;
    return Rat(num, den);
}

std::vector<MomentValue> moment_table(const FrequencySet& set, int k_max) {
    std::vector<MomentValue> out;
    for (int k = 1; k <= k_max; ++k) {
        MomentValue mv;
        mv.k = k;
        mv.exact = b_k_exact(set, k);
        if (k % 2 == 0) {
            mv.limit = b_k_limit(set.d, k);
            mv.gap = rat_to_double(mv.exact) - mv.limit;
        } else {
            mv.limit = std::numeric_limits<double>::quiet_NaN();
            mv.gap = rat_to_double(mv.exact);
        }
        out.push_back(std::move(mv));
    }
    return out;
}

std::string moment_table_csv(const FrequencySet& set, int k_max) {
    std::ostringstream os;
    os << "m,k,exact_num,exact_den,limit,gap\n";
    os.precision(17);
    for (const auto& mv : moment_table(set, k_max)) {
        os << set.m << ',' << mv.k << ',' << numerator(mv.exact).str() << ','
           << denominator(mv.exact).str() << ',';
        if (std::isnan(mv.limit))
            os << "";
        else
            os << mv.limit;
        os << ',' << mv.gap << '\n';
    }
    return os.str();
}

}  // namespace arw
