#include "oracles.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "arw/common.hpp"

namespace oracle {

SetIndex::SetIndex(const arw::FrequencySet& set)
    : d(set.d),
      bound(arw::isqrt64(set.m)),
      shape(arw::PackedShape::for_bound(set.d, arw::isqrt64(set.m))),
      map(set.size() * 2) {
    for (std::size_t i = 0; i < set.size(); ++i)
        map.insert_or_get(shape.pack(set.point(i)));
}

bool SetIndex::contains(std::span<const std::int64_t> mu) const {
    for (int j = 0; j < d; ++j)
        if (mu[j] < -bound || mu[j] > bound) return false;
    return map.find(shape.pack(mu)) >= 0;
}

std::int64_t brute_c4(const arw::FrequencySet& set) {
    const SetIndex idx(set);
    const int d = set.d;
    const std::size_t n = set.size();
    std::vector<std::int64_t> mu4(d);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto m1 = set.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            auto m2 = set.point(j);
            for (std::size_t k = 0; k < n; ++k) {
                auto m3 = set.point(k);
                for (int c = 0; c < d; ++c) mu4[c] = -(m1[c] + m2[c] + m3[c]);
                if (idx.contains(mu4)) ++count;
            }
        }
    }
    return count;
}

std::int64_t brute_c6(const arw::FrequencySet& set) {
    const SetIndex idx(set);
    const int d = set.d;
    const std::size_t n = set.size();
    std::vector<std::int64_t> s3(d), s4(d), s5(d), mu6(d);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto m1 = set.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            auto m2 = set.point(j);
            for (std::size_t k = 0; k < n; ++k) {
                auto m3 = set.point(k);
                for (int c = 0; c < d; ++c) s3[c] = m1[c] + m2[c] + m3[c];
                for (std::size_t l = 0; l < n; ++l) {
                    auto m4 = set.point(l);
                    for (int c = 0; c < d; ++c) s4[c] = s3[c] + m4[c];
                    for (std::size_t p = 0; p < n; ++p) {
                        auto m5 = set.point(p);
                        for (int c = 0; c < d; ++c) mu6[c] = -(s4[c] + m5[c]);
                        if (idx.contains(mu6)) ++count;
                    }
                }
            }
        }
    }
    return count;
}

namespace {
bool is_negation(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    for (std::size_t c = 0; c < a.size(); ++c)
        if (a[c] != -b[c]) return false;
    return true;
}
bool same(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    for (std::size_t c = 0; c < a.size(); ++c)
        if (a[c] != b[c]) return false;
    return true;
}
bool in_class(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    return same(a, b) || is_negation(a, b);
}
}  // namespace

BruteC4Split brute_classify_c4(const arw::FrequencySet& set) {
    const SetIndex idx(set);
    const int d = set.d;
    const std::size_t n = set.size();
    std::vector<std::int64_t> mu4(d);
    BruteC4Split out;
    for (std::size_t i = 0; i < n; ++i) {
        auto m1 = set.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            auto m2 = set.point(j);
            for (std::size_t k = 0; k < n; ++k) {
                auto m3 = set.point(k);
                for (int c = 0; c < d; ++c) mu4[c] = -(m1[c] + m2[c] + m3[c]);
                if (!idx.contains(mu4)) continue;
                std::span<const std::int64_t> m4(mu4.data(), mu4.size());
                if (in_class(m2, m1) && in_class(m3, m1) && in_class(m4, m1)) {
                    ++out.d_diag;
                } else if ((is_negation(m2, m1) && is_negation(m4, m3)) ||
                           (is_negation(m3, m1) && is_negation(m4, m2)) ||
                           (is_negation(m4, m1) && is_negation(m3, m2))) {
                    ++out.d_sym;
                } else {
                    ++out.x4;
                }
            }
        }
    }
    return out;
}

arw::Rat brute_b_k(const arw::FrequencySet& set, int k) {
    const int d = set.d;
    const std::size_t n = set.size();
    arw::Int total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto m1 = set.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            auto m2 = set.point(j);
            std::int64_t dot = 0;
            for (int c = 0; c < d; ++c) dot += m1[c] * m2[c];
            arw::Int p = 1;
            for (int t = 0; t < k; ++t) p *= dot;
            total += p;
        }
    }
    arw::Int denom = arw::Int(set.n()) * set.n();
    for (int t = 0; t < k; ++t) denom *= set.m;
    return arw::Rat(total, denom);
}

std::array<double, arw::kNumTags> quadrature_integrals(
    const arw::FrequencySet& set, int per_dim) {
    const int d = set.d;
    if (per_dim <= 6 * arw::isqrt64(set.m))
        throw std::invalid_argument("quadrature grid too coarse to be exact");
    std::array<double, arw::kNumTags> sum{}, comp{};
    auto add = [&](arw::Tag t, double v) {
        // Kahan accumulation per integrand.
        const int i = static_cast<int>(t);
        const double y = v - comp[i];
        const double s = sum[i] + y;
        comp[i] = (s - sum[i]) - y;
        sum[i] = s;
    };
    std::vector<int> idx(d, 0);
    Eigen::VectorXd x(d);
    const double step = 1.0 / per_dim;
    for (;;) {
        for (int j = 0; j < d; ++j) x[j] = idx[j] * step;
        const arw::SpectralFrame f = arw::eval_frame(set, x);
        const double r = f.r, r2 = r * r;
        const double g2 = f.grad.squaredNorm();
        const Eigen::MatrixXd h2 = f.hess * f.hess;
        const double tr_h2 = h2.trace();
        const double tr_h4 = h2.squaredNorm();
        const double tr_h6 = (h2 * f.hess).squaredNorm();
        const double dhd = f.grad.dot(f.hess * f.grad);
        const double dh2d = f.grad.dot(h2 * f.grad);
        add(arw::Tag::r2, r2);
        add(arw::Tag::r4, r2 * r2);
        add(arw::Tag::dd, g2);
        add(arw::Tag::dd2, g2 * g2);
        add(arw::Tag::r2dd, r2 * g2);
        add(arw::Tag::h2, tr_h2);
        add(arw::Tag::r2h2, r2 * tr_h2);
        add(arw::Tag::h4, tr_h4);
        add(arw::Tag::h22, tr_h2 * tr_h2);
        add(arw::Tag::ddh2, g2 * tr_h2);
        add(arw::Tag::rdhd, r * dhd);
        add(arw::Tag::dh2d, dh2d);
        add(arw::Tag::dd3, g2 * g2 * g2);
        add(arw::Tag::r4dd, r2 * r2 * g2);
        add(arw::Tag::h6, tr_h6);
        add(arw::Tag::rdddhd, r * g2 * dhd);
        int j = 0;
        while (j < d && ++idx[j] == per_dim) idx[j++] = 0;
        if (j == d) break;
    }
    const double cells = std::pow(static_cast<double>(per_dim), d);
    for (auto& v : sum) v /= cells;
    return sum;
}

}  // namespace oracle
