#include "arw/spectral.hpp"

#include <cmath>

#include "arw/common.hpp"
#include "arw/kacrice.hpp"
#include "arw/packed_map.hpp"

namespace arw {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

SpectralFrame eval_frame(const FrequencySet& set, const Eigen::VectorXd& x) {
    const int d = set.d;
    if (x.size() != d) throw std::invalid_argument("eval_frame: wrong point dimension");
    SpectralFrame f;
    f.x = x;
    f.grad = Eigen::VectorXd::Zero(d);
    f.hess = Eigen::MatrixXd::Zero(d, d);
    const std::size_t n = set.size();
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto mu = set.point(i);
        double phase = 0.0;
        for (int j = 0; j < d; ++j) phase += static_cast<double>(mu[j]) * x[j];
        phase *= kTwoPi;
        const double c = std::cos(phase), s = std::sin(phase);
        r += c;
        for (int j = 0; j < d; ++j) {
            f.grad[j] -= s * static_cast<double>(mu[j]);
            for (int k = 0; k < d; ++k)
                f.hess(j, k) -= c * static_cast<double>(mu[j] * mu[k]);
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    f.r = r * inv_n;
    f.grad *= kTwoPi * inv_n;
    f.hess *= kTwoPi * kTwoPi * inv_n;
    const double e = kTwoPi * kTwoPi * static_cast<double>(set.m);
    if (1.0 - std::abs(f.r) <= 1e-12) {
        f.xy_available = false;
        f.x_mat = Eigen::MatrixXd::Zero(d, d);
        f.y_mat = Eigen::MatrixXd::Zero(d, d);
        return f;
    }
    f.xy_available = true;
    const double one_minus = 1.0 - f.r * f.r;
    Eigen::MatrixXd gg = f.grad * f.grad.transpose();
    f.x_mat = -(d / e) / one_minus * gg;
    f.y_mat = -(d / e) * (f.hess + (f.r / one_minus) * gg);
    return f;
}

std::string tag_name(Tag t) {
    static const char* names[kNumTags] = {
        "int_r2",  "int_r4",   "int_dd",   "int_dd2", "int_r2dd", "int_h2",
        "int_r2h2", "int_h4",  "int_h22",  "int_ddh2", "int_rdhd", "int_dh2d",
        "int_dd3", "int_r4dd", "int_h6",   "int_rdddhd",
    };
    return names[static_cast<int>(t)];
}

int tag_order(Tag t) {
    switch (t) {
        case Tag::r2:
        case Tag::dd:
        case Tag::h2: return 2;
        case Tag::dd3:
        case Tag::r4dd:
        case Tag::h6:
        case Tag::rdddhd: return 6;
        default: return 4;
    }
}

int tag_e_power(Tag t) {
    switch (t) {
        case Tag::r2:
        case Tag::r4: return 0;
        case Tag::dd:
        case Tag::r2dd:
        case Tag::r4dd: return 1;
        case Tag::h2:
        case Tag::dd2:
        case Tag::r2h2:
        case Tag::rdhd: return 2;
        case Tag::ddh2:
        case Tag::dh2d:
        case Tag::dd3:
        case Tag::rdddhd: return 3;
        case Tag::h4:
        case Tag::h22: return 4;
        case Tag::h6: return 6;
    }
    return 0;
}

double ExactIntegral::numeric(std::int64_t m) const {
    const double e = kTwoPi * kTwoPi * static_cast<double>(m);
    return rat_to_double(coeff) * std::pow(e, e_power);
}

const ExactIntegral& IntegralSet::at(Tag t) const {
    const auto& entry = entries[static_cast<int>(t)];
    if (!entry)
        throw BudgetExceeded("integral " + tag_name(t) +
                             " requires order-6 sums over budget");
    return *entry;
}

namespace {

// Order-4 interface accumulators keyed by the pair sum v = mu1 + mu2:
//   a   : #pairs
//   A   : sum (mu1.mu2)
//   A2  : sum (mu1.mu2)^2
//   S_j : sum (mu1.mu2) mu1_j
//   Q_jk: sum (mu1.mu2) mu1_j mu2_k
// Contracting an accumulator at v against one at -v closes the zero-sum
// 4-tuple; the swap and negation closure of the pair set make the choice of
// mu1 vs mu2 in S and Q immaterial up to the transposes used below.
struct Order4Acc {
    int d;
    PackedShape shape;
    PackedIndexMap map;
    std::vector<std::int64_t> a, A, A2;
    std::vector<std::int64_t> S;  // d per entry
    std::vector<std::int64_t> Q;  // d*d per entry
};

Order4Acc build_order4(const FrequencySet& set, std::size_t entry_cap) {
    const int d = set.d;
    Order4Acc acc{d,
                  PackedShape::for_bound(d, 2 * isqrt64(set.m)),
                  PackedIndexMap(set.size() * 2),
                  {}, {}, {}, {}, {}};
    const std::size_t n = set.size();
    std::vector<std::int64_t> v(d);
    for (std::size_t i = 0; i < n; ++i) {
        auto mu1 = set.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            auto mu2 = set.point(j);
            std::int64_t dot = 0;
            for (int k = 0; k < d; ++k) {
                v[k] = mu1[k] + mu2[k];
                dot += mu1[k] * mu2[k];
            }
            std::int64_t idx = acc.map.insert_or_get(acc.shape.pack(v));
            if (static_cast<std::size_t>(idx) >= acc.a.size()) {
                if (acc.a.size() >= entry_cap)
                    throw BudgetExceeded("order-4 accumulators exceed entry cap");
                acc.a.push_back(0);
                acc.A.push_back(0);
                acc.A2.push_back(0);
                acc.S.insert(acc.S.end(), d, 0);
                acc.Q.insert(acc.Q.end(), d * d, 0);
            }
            auto u = static_cast<std::size_t>(idx);
            acc.a[u] += 1;
            acc.A[u] += dot;
            acc.A2[u] += dot * dot;
            std::int64_t* s = &acc.S[u * d];
            std::int64_t* q = &acc.Q[u * d * d];
            for (int k = 0; k < d; ++k) {
                s[k] += dot * mu1[k];
                for (int l = 0; l < d; ++l) q[k * d + l] += dot * mu1[k] * mu2[l];
            }
        }
    }
    return acc;
}

// Order-6 accumulators keyed by the triple sum s = nu1 + nu2 + nu3:
//   n3     : #triples
//   C      : sum (nu2.nu3)
//   Dsc    : sum (nu1.nu2)(nu2.nu3)
//   V_j    : sum (nu1.nu2) nu3_j
//   Am_jk  : sum (nu1.nu2)(nu2.nu3) nu3_j nu1_k
struct Order6Acc {
    int d;
    PackedShape shape;
    PackedIndexMap map;
    std::vector<std::int64_t> n3, C, Dsc;
    std::vector<std::int64_t> V;   // d per entry
    std::vector<std::int64_t> Am;  // d*d per entry
};

Order6Acc build_order6(const FrequencySet& set) {
    const int d = set.d;
    Order6Acc acc{d,
                  PackedShape::for_bound(d, 3 * isqrt64(set.m)),
                  PackedIndexMap(set.size() * 8),
                  {}, {}, {}, {}, {}};
    const std::size_t n = set.size();
    std::vector<std::int64_t> sum12(d), s(d);
    for (std::size_t i = 0; i < n; ++i) {
        auto nu1 = set.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            auto nu2 = set.point(j);
            std::int64_t dot12 = 0;
            for (int k = 0; k < d; ++k) {
                sum12[k] = nu1[k] + nu2[k];
                dot12 += nu1[k] * nu2[k];
            }
            for (std::size_t l = 0; l < n; ++l) {
                auto nu3 = set.point(l);
                std::int64_t dot23 = 0;
                for (int k = 0; k < d; ++k) {
                    s[k] = sum12[k] + nu3[k];
                    dot23 += nu2[k] * nu3[k];
                }
                std::int64_t idx = acc.map.insert_or_get(acc.shape.pack(s));
                if (static_cast<std::size_t>(idx) >= acc.n3.size()) {
                    acc.n3.push_back(0);
                    acc.C.push_back(0);
                    acc.Dsc.push_back(0);
                    acc.V.insert(acc.V.end(), d, 0);
                    acc.Am.insert(acc.Am.end(), d * d, 0);
                }
                auto u = static_cast<std::size_t>(idx);
                acc.n3[u] += 1;
                acc.C[u] += dot23;
                acc.Dsc[u] += dot12 * dot23;
                std::int64_t* vv = &acc.V[u * d];
                std::int64_t* am = &acc.Am[u * d * d];
                const std::int64_t w = dot12 * dot23;
                for (int k = 0; k < d; ++k) {
                    vv[k] += dot12 * nu3[k];
                    for (int p = 0; p < d; ++p) am[k * d + p] += w * nu3[k] * nu1[p];
                }
            }
        }
    }
    return acc;
}

std::vector<std::int64_t> negated_index(const PackedShape& shape,
                                        const PackedIndexMap& map) {
    // Pairing v <-> -v; negation closure of the frequency set guarantees -v
    // is present whenever v is.
    std::vector<std::int64_t> out(map.size());
    std::vector<std::int64_t> v(shape.dims);
    for (std::size_t e = 0; e < map.keys().size(); ++e) {
        shape.unpack(map.keys()[e], v);
        for (auto& c : v) c = -c;
        std::int64_t other = map.find(shape.pack(v));
        if (other < 0) throw std::logic_error("pair sum support not symmetric");
        out[e] = other;
    }
    return out;
}

Rat scaled(__int128 total, std::int64_t m, int m_power, const Int& n_power) {
    Int denom = 1;
    for (int i = 0; i < m_power; ++i) denom *= m;
    denom *= n_power;
    return Rat(int_from_i128(total), denom);
}

}  // namespace

IntegralSet compute_exact_integrals(const FrequencySet& set,
                                    const SpectralOptions& opts) {
    IntegralSet out;
    out.d = set.d;
    out.m = set.m;
    out.n = set.n();
    const int d = set.d;
    const std::int64_t n = out.n;
    const std::int64_t m = set.m;
    const Int n2 = Int(n) * n;
    const Int n4 = n2 * n2;
    const Int n6 = n4 * n2;

    auto put = [&](Tag t, Rat coeff) {
        out.entries[static_cast<int>(t)] =
            ExactIntegral{t, std::move(coeff), tag_e_power(t), tag_order(t)};
    };

    // Order 2: C(2) is exactly the antipodal pairing, summed literally.
    {
        __int128 cnt = 0, dot_sum = 0, dot2_sum = 0;
        std::vector<std::int64_t> neg(d);
        for (std::size_t i = 0; i < set.size(); ++i) {
            auto mu = set.point(i);
            std::int64_t dot = 0;
            for (int k = 0; k < d; ++k) dot += mu[k] * (-mu[k]);
            ++cnt;
            dot_sum += dot;
            dot2_sum += static_cast<__int128>(dot) * dot;
        }
        put(Tag::r2, scaled(cnt, m, 0, n2));
        put(Tag::dd, scaled(-dot_sum, m, 1, n2));
        put(Tag::h2, scaled(dot2_sum, m, 2, n2));
    }

    // Order 4: contract the pair-sum accumulators at v against -v.
    {
        Order4Acc acc = build_order4(set, opts.table_entry_cap);
        std::vector<std::int64_t> negidx = negated_index(acc.shape, acc.map);
        __int128 t_r4 = 0, t_dd2 = 0, t_r2dd = 0, t_r2h2 = 0, t_h22 = 0,
                 t_ddh2 = 0, t_h4 = 0, t_rdhd2 = 0, t_dh2d = 0;
        std::vector<std::int64_t> v(d);
        for (std::size_t e = 0; e < acc.map.size(); ++e) {
            const auto o = static_cast<std::size_t>(negidx[e]);
            t_r4 += static_cast<__int128>(acc.a[e]) * acc.a[o];
            t_dd2 += static_cast<__int128>(acc.A[e]) * acc.A[o];
            t_r2dd += static_cast<__int128>(acc.a[e]) * acc.A[o];
            t_r2h2 += static_cast<__int128>(acc.a[e]) * acc.A2[o];
            t_h22 += static_cast<__int128>(acc.A2[e]) * acc.A2[o];
            t_ddh2 += static_cast<__int128>(acc.A[e]) * acc.A2[o];
            const std::int64_t* se = &acc.S[e * d];
            const std::int64_t* so = &acc.S[o * d];
            const std::int64_t* qe = &acc.Q[e * d * d];
            const std::int64_t* qo = &acc.Q[o * d * d];
            acc.shape.unpack(acc.map.keys()[e], v);
            __int128 vdot = 0, sdot = 0, h4c = 0;
            for (int k = 0; k < d; ++k) {
                vdot += static_cast<__int128>(v[k]) * so[k];
                sdot += static_cast<__int128>(se[k]) * so[k];
                for (int l = 0; l < d; ++l)
                    h4c += static_cast<__int128>(qe[k * d + l]) * qo[l * d + k];
            }
            // rdhd interface: sum mu2 over pairs at v equals a(v) v / 2; the
            // halving is deferred to the rational scale below.
            t_rdhd2 += static_cast<__int128>(acc.a[e]) * vdot;
            t_dh2d += sdot;
            t_h4 += h4c;
        }
        put(Tag::r4, scaled(t_r4, m, 0, n4));
        put(Tag::dd2, scaled(t_dd2, m, 2, n4));
        put(Tag::r2dd, scaled(-t_r2dd, m, 1, n4));
        put(Tag::r2h2, scaled(t_r2h2, m, 2, n4));
        put(Tag::h22, scaled(t_h22, m, 4, n4));
        put(Tag::ddh2, scaled(-t_ddh2, m, 3, n4));
        put(Tag::h4, scaled(t_h4, m, 4, n4));
        put(Tag::rdhd, scaled(t_rdhd2, m, 2, n4 * 2));
        put(Tag::dh2d, scaled(-t_dh2d, m, 3, n4));
    }

    // Order 6: one streaming pass over all N^3 ordered triples, budget-gated.
    const __int128 triples = static_cast<__int128>(n) * n * n;
    if (opts.want_order6 &&
        triples <= static_cast<__int128>(opts.order6_work_budget)) {
        Order6Acc acc = build_order6(set);
        std::vector<std::int64_t> negidx = negated_index(acc.shape, acc.map);
        __int128 t_dd3 = 0, t_r4dd = 0, t_h6 = 0, t_rdddhd = 0, t_c6 = 0;
        for (std::size_t e = 0; e < acc.map.size(); ++e) {
            const auto o = static_cast<std::size_t>(negidx[e]);
            t_c6 += static_cast<__int128>(acc.n3[e]) * acc.n3[o];
            t_r4dd += static_cast<__int128>(acc.n3[e]) * acc.C[o];
            t_rdddhd += static_cast<__int128>(acc.C[e]) * acc.Dsc[o];
            const std::int64_t* ve = &acc.V[e * d];
            const std::int64_t* vo = &acc.V[o * d];
            const std::int64_t* ae = &acc.Am[e * d * d];
            const std::int64_t* ao = &acc.Am[o * d * d];
            for (int k = 0; k < d; ++k) {
                t_dd3 += static_cast<__int128>(ve[k]) * vo[k];
                for (int l = 0; l < d; ++l)
                    t_h6 += static_cast<__int128>(ae[k * d + l]) * ao[l * d + k];
            }
        }
        put(Tag::dd3, scaled(-t_dd3, m, 3, n6));
        put(Tag::r4dd, scaled(-t_r4dd, m, 1, n6));
        put(Tag::h6, scaled(t_h6, m, 6, n6));
        put(Tag::rdddhd, scaled(-t_rdddhd, m, 3, n6));
        out.order6_available = true;
        out.c6_check = checked_i64(t_c6, "c6_check");
    }
    return out;
}

ExactIntegral exact_integral(const IntegralSet& materials, Tag t) {
    return materials.at(t);
}

Rat berry_coefficient(int d) {
    ExpansionCoefficients a = expansion_coefficients(d);
    return Rat(Int(1), Int(2)) + a.a[1] * Rat(-d) + a.a[2] * Rat(Int(d) * d);
}

Rat assembled_n2_coefficient(int d) {
    ExpansionCoefficients a = expansion_coefficients(d);
    const Rat dd(d);
    // 1/N^2 parts of the leading terms of each trace integral, weighted by
    // the expansion coefficients of L(x); same table as assemble_L_integrals.
    Rat total = a.a[1] * Rat(-d)                                   // tr X
              + a.a[2] * Rat(-2 * d)                                // tr Y^2
              + Rat(Int(9), Int(8))                                 // (3/8) r^4
              + a.a[3] * Rat(Int(-d) * d)                           // tr XY^2
              + a.a[4] * Rat(Int(d) * (d + 2))                      // tr X^2
              + a.a[5] * Rat(Int(d) * d * d * (2 * d + 7), Int(d + 2))      // tr Y^4
              + a.a[6] * Rat(Int(d) * d * d * (Int(d) * d + 2 * d + 6), Int(d + 2))  // (tr Y^2)^2
              + a.a[7] * Rat(Int(-d) * d * d)                       // tr X tr Y^2
              + a.a[1] / 2 * Rat(-d)                                // r^2 tr X
              + a.a[2] / 2 * Rat(Int(d) * (d + 2));                 // r^2 tr Y^2
    (void)dd;
    return total;
}

LAssembly assemble_L_integrals(const IntegralSet& in) {
    LAssembly out;
    out.d = in.d;
    out.m = in.m;
    out.n = in.n;
    out.order6_available = in.order6_available;
    out.berry_coeff = berry_coefficient(in.d);
    out.n2_coeff = assembled_n2_coefficient(in.d);
    out.n2_reference = Rat(Int(in.d - 1), Int(in.d + 2) * (in.d + 2) * (in.d + 2));

    const int d = in.d;
    const Rat n(in.n);
    const Rat n_inv = 1 / n;
    const Rat n2_inv = n_inv * n_inv;
    auto val = [&](Tag t) { return in.at(t).coeff; };
    auto have6 = in.order6_available;

    auto add = [&](std::string tag, std::optional<Rat> value, Rat main,
                   bool complete) {
        LEntry e;
        e.tag = std::move(tag);
        e.value = std::move(value);
        e.main_term = std::move(main);
        if (e.value) e.residual = *e.value - e.main_term;
        e.complete = complete;
        out.entries.push_back(std::move(e));
    };

    const Rat D(d);

    // int_X = -d * [ (1/E)int DD^t + (1/E)int r^2 DD^t + (1/E)int r^4 DD^t ];
    // the Taylor tail of (1-r^2)^{-1} past r^4 is not among the sixteen tags
    // and stays in the residual.
    {
        Rat v = val(Tag::dd) + val(Tag::r2dd);
        if (have6) v += val(Tag::r4dd);
        add("int_X", -D * v, -D * n_inv - D * n2_inv, have6);
    }
    // int_Y2 = d^2 [ int_h2 + 2 int_rdhd ] + (dropped) d^2 (1/E^2)int r^2(DD^t)^2.
    add("int_Y2", D * D * (val(Tag::h2) + 2 * val(Tag::rdhd)),
        D * D * n_inv - 2 * D * n2_inv, false);
    // int_XY2 = -d^3 [ int_dh2d + 2 int_rdddhd + ... ].
    {
        Rat v = val(Tag::dh2d);
        if (have6) v += 2 * val(Tag::rdddhd);
        add("int_XY2", -D * D * D * v, -D * D * n2_inv, false);
    }
    add("int_X2", D * D * val(Tag::dd2), D * (D + 2) * n2_inv, false);
    add("int_Y4", D * D * D * D * val(Tag::h4),
        Rat(Int(d) * d * d * (2 * d + 7), Int(d + 2)) * n2_inv, false);
    add("int_Y22", D * D * D * D * val(Tag::h22),
        Rat(Int(d) * d * d * (Int(d) * d + 2 * d + 6), Int(d + 2)) * n2_inv, false);
    {
        Rat v = val(Tag::ddh2);
        if (have6) v += 2 * val(Tag::rdddhd);
        add("int_XtrY2", -D * D * D * v, -D * D * D * n2_inv, false);
    }
    {
        Rat v = val(Tag::r2dd);
        if (have6) v += val(Tag::r4dd);
        add("int_r2X", -D * v, -D * n2_inv, have6);
    }
    add("int_r2Y2", D * D * val(Tag::r2h2), D * (D + 2) * n2_inv, false);
    // Leading content of int_X3 / int_Y6 is purely order-6.
    add("int_X3",
        have6 ? std::optional<Rat>(-D * D * D * val(Tag::dd3)) : std::nullopt,
        Rat(0), false);
    add("int_Y6",
        have6 ? std::optional<Rat>(D * D * D * D * D * D * val(Tag::h6))
              : std::nullopt,
        Rat(0), false);
    return out;
}

nlohmann::json integrals_to_json(const IntegralSet& in, const LAssembly& as) {
    nlohmann::json tags = nlohmann::json::array();
    for (int t = 0; t < kNumTags; ++t) {
        const auto& entry = in.entries[t];
        nlohmann::json j = {{"id", tag_name(static_cast<Tag>(t))},
                            {"order", tag_order(static_cast<Tag>(t))},
                            {"e_power", tag_e_power(static_cast<Tag>(t))}};
        if (entry) {
            j["coeff"] = rat_to_json(entry->coeff);
            j["numeric"] = entry->numeric(in.m);
        } else {
            j["coeff"] = nullptr;
            j["numeric"] = nullptr;
        }
        tags.push_back(std::move(j));
    }
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : as.entries) {
        entries.push_back(
            {{"tag", e.tag},
             {"value", e.value ? rat_to_json(*e.value) : nlohmann::json()},
             {"main_term", rat_to_json(e.main_term)},
             {"residual", e.residual ? rat_to_json(*e.residual) : nlohmann::json()},
             {"complete", e.complete}});
    }
    return {{"d", in.d},
            {"m", in.m},
            {"n", in.n},
            {"order6_available", in.order6_available},
            {"exact_integrals", std::move(tags)},
            {"assembly", std::move(entries)},
            {"berry_coeff", rat_to_json(as.berry_coeff)},
            {"n2_coeff", rat_to_json(as.n2_coeff)},
            {"n2_reference", rat_to_json(as.n2_reference)}};
}

}  // namespace arw
