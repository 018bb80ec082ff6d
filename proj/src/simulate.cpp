#include "arw/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arw/common.hpp"
#include "arw/parallel.hpp"
#include "arw/rng.hpp"

namespace arw {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

std::vector<std::size_t> pair_representatives(const FrequencySet& set) {
    std::vector<std::size_t> rep;
    rep.reserve(set.size() / 2);
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto mu = set.point(i);
        for (int j = 0; j < set.d; ++j) {
            if (mu[j] > 0) {
                rep.push_back(i);
                break;
            }
            if (mu[j] < 0) break;
        }
    }
    return rep;
}

double kahan_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}
}  // namespace

WaveSample sample_wave(const FrequencySet& set, std::uint64_t seed) {
    WaveSample w;
    w.set = &set;
    w.rep = pair_representatives(set);
    const double scale = std::sqrt(2.0 / static_cast<double>(set.size()));
    Rng rng(derive_seed(seed, {0x77617665u}));
    w.amp_cos.resize(w.rep.size());
    w.amp_sin.resize(w.rep.size());
    for (std::size_t p = 0; p < w.rep.size(); ++p) {
        w.amp_cos[p] = scale * rng.gaussian();
        w.amp_sin[p] = -scale * rng.gaussian();
    }
    return w;
}

WaveSample wave_from_coefficients(const FrequencySet& set,
                                  const std::vector<std::complex<double>>& a) {
    WaveSample w;
    w.set = &set;
    w.rep = pair_representatives(set);
    if (a.size() != w.rep.size())
        throw std::invalid_argument(
            "wave_from_coefficients: need one coefficient per antipodal pair");
    const double scale = 2.0 / std::sqrt(static_cast<double>(set.size()));
    w.amp_cos.resize(w.rep.size());
    w.amp_sin.resize(w.rep.size());
    for (std::size_t p = 0; p < a.size(); ++p) {
        w.amp_cos[p] = scale * a[p].real();
        w.amp_sin[p] = -scale * a[p].imag();
    }
    return w;
}

double eval_wave(const WaveSample& w, const Eigen::VectorXd& x) {
    const FrequencySet& set = *w.set;
    double f = 0.0;
    for (std::size_t p = 0; p < w.rep.size(); ++p) {
        auto mu = set.point(w.rep[p]);
        double phase = 0.0;
        for (int j = 0; j < set.d; ++j) phase += static_cast<double>(mu[j]) * x[j];
        phase *= kTwoPi;
        f += w.amp_cos[p] * std::cos(phase) + w.amp_sin[p] * std::sin(phase);
    }
    return f;
}

std::complex<double> eval_wave_complex(const WaveSample& w,
                                       const Eigen::VectorXd& x) {
    const FrequencySet& set = *w.set;
    const double root_n = std::sqrt(static_cast<double>(set.size()));
    std::complex<double> f = 0.0;
    for (std::size_t p = 0; p < w.rep.size(); ++p) {
        auto mu = set.point(w.rep[p]);
        double phase = 0.0;
        for (int j = 0; j < set.d; ++j) phase += static_cast<double>(mu[j]) * x[j];
        phase *= kTwoPi;
        const std::complex<double> a = w.coefficient(p);
        // a_mu e(mu.x) and a_{-mu} e(-mu.x) as two genuinely complex terms.
        f += a * std::complex<double>(std::cos(phase), std::sin(phase));
        f += std::conj(a) * std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    return f / root_n;
}

std::vector<double> transect_zero_crossings(const WaveSample& w,
                                            const Eigen::VectorXd& x0,
                                            const Eigen::VectorXd& u,
                                            double length) {
    if (length <= 0) throw std::invalid_argument("transect: length must be > 0");
    const FrequencySet& set = *w.set;
    const int d = set.d;
    const std::size_t np = w.rep.size();
    // Per-line reduction of g(t) = F(x0 + t u) to a 1-d trigonometric
    // polynomial: frequency omega_p = 2 pi mu_p.u, offset phi_p = 2 pi mu_p.x0.
    std::vector<double> omega(np), phi(np);
    for (std::size_t p = 0; p < np; ++p) {
        auto mu = set.point(w.rep[p]);
        double om = 0.0, ph = 0.0;
        for (int j = 0; j < d; ++j) {
            om += static_cast<double>(mu[j]) * u[j];
            ph += static_cast<double>(mu[j]) * x0[j];
        }
        omega[p] = kTwoPi * om;
        phi[p] = kTwoPi * ph;
    }
    auto g = [&](double t) {
        double s = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
            const double arg = phi[p] + omega[p] * t;
            s += w.amp_cos[p] * std::cos(arg) + w.amp_sin[p] * std::sin(arg);
        }
        return s;
    };

    const double max_step = 1.0 / (32.0 * std::sqrt(static_cast<double>(set.m)));
    const auto n_steps =
        static_cast<std::int64_t>(std::ceil(length / max_step));
    const double step = length / static_cast<double>(n_steps);

    std::vector<double> roots;
    double t_prev = 0.0;
    double g_prev = g(0.0);
    for (std::int64_t i = 1; i <= n_steps; ++i) {
        const double t_cur = static_cast<double>(i) * step;
        const double g_cur = g(t_cur);
        if (g_prev == 0.0) {
            roots.push_back(t_prev);
        } else if (g_prev * g_cur < 0.0) {
            double lo = t_prev, hi = t_cur, g_lo = g_prev;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double g_mid = g(mid);
                if (g_mid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (g_lo * g_mid < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    g_lo = g_mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        t_prev = t_cur;
        g_prev = g_cur;
    }
    if (g_prev == 0.0) roots.push_back(t_prev);
    return roots;
}

int transect_zero_count(const WaveSample& w, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& u, double length) {
    return static_cast<int>(transect_zero_crossings(w, x0, u, length).size());
}

double crofton_kappa(int d) {
    if (d < 2) throw std::invalid_argument("crofton_kappa: d must be >= 2");
    using std::lgamma;
    return std::exp(lgamma(d / 2.0) - lgamma((d + 1) / 2.0)) / std::sqrt(kPi);
}

NodalEstimate crofton_volume(const WaveSample& w, std::int64_t n_lines,
                             std::uint64_t seed) {
    if (n_lines < 1) throw std::invalid_argument("crofton_volume: n_lines >= 1");
    const FrequencySet& set = *w.set;
    const int d = set.d;
    constexpr std::int64_t kBlock = 256;
    const std::int64_t n_blocks = (n_lines + kBlock - 1) / kBlock;
    std::vector<std::int64_t> count_sum(n_blocks, 0), count_sq(n_blocks, 0);
    parallel_blocks(n_blocks, [&](std::int64_t b) {
        Eigen::VectorXd x0(d), u(d);
        std::int64_t s = 0, s2 = 0;
        const std::int64_t lo = b * kBlock;
        const std::int64_t hi = std::min(n_lines, lo + kBlock);
        for (std::int64_t j = lo; j < hi; ++j) {
            // One stream per line: scheduling cannot affect the draw.
            Rng rng(derive_seed(seed, {0x6c696e65u, static_cast<std::uint64_t>(j)}));
            for (int k = 0; k < d; ++k) x0[k] = rng.uniform_half_open();
            double norm2 = 0.0;
            do {
                for (int k = 0; k < d; ++k) u[k] = rng.gaussian();
                norm2 = u.squaredNorm();
            } while (norm2 < 1e-12);
            u /= std::sqrt(norm2);
            const std::int64_t c = transect_zero_count(w, x0, u, 1.0);
            s += c;
            s2 += c * c;
        }
        count_sum[b] = s;
        count_sq[b] = s2;
    });
    std::int64_t total = 0, total_sq = 0;
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        total += count_sum[b];
        total_sq += count_sq[b];
    }
    NodalEstimate est;
    est.n_lines = n_lines;
    const double n = static_cast<double>(n_lines);
    est.mean_crossings = static_cast<double>(total) / n;
    const double kappa = crofton_kappa(d);
    est.volume = est.mean_crossings / kappa;
    est.per_line_variance =
        n_lines > 1
            ? (static_cast<double>(total_sq) - n * est.mean_crossings * est.mean_crossings) /
                  (n - 1.0)
            : 0.0;
    est.std_error = std::sqrt(std::max(0.0, est.per_line_variance) / n) / kappa;
    return est;
}

BatchStats aggregate_batch(int d, std::int64_t m, std::int64_t n,
                           const std::vector<NodalEstimate>& estimates,
                           std::int64_t n_lines, std::uint64_t seed,
                           int n_boot) {
    const auto ns = static_cast<std::int64_t>(estimates.size());
    if (ns < 2) throw std::invalid_argument("aggregate_batch: need >= 2 samples");
    BatchStats b;
    b.d = d;
    b.m = m;
    b.n = n;
    b.n_samples = ns;
    b.n_lines = n_lines;
    b.seed = seed;
    b.kappa = crofton_kappa(d);
    b.volumes.reserve(ns);
    b.per_line_vars.reserve(ns);
    for (const auto& e : estimates) {
        b.volumes.push_back(e.volume);
        b.per_line_vars.push_back(e.per_line_variance);
    }
    const double nd = static_cast<double>(ns);
    auto variance_of = [&](const std::vector<double>& v, double mean) {
        double acc = 0.0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return acc / (static_cast<double>(v.size()) - 1.0);
    };
    auto corrected_of = [&](const std::vector<double>& vols,
                            const std::vector<double>& plvars) {
        const double mean = kahan_sum(vols) / static_cast<double>(vols.size());
        const double raw = variance_of(vols, mean);
        const double noise = kahan_sum(plvars) / static_cast<double>(plvars.size()) /
                             (static_cast<double>(n_lines) * b.kappa * b.kappa);
        return std::pair<double, double>(raw, raw - noise);
    };
    b.mean = kahan_sum(b.volumes) / nd;
    b.raw_var = variance_of(b.volumes, b.mean);
    b.mean_se = std::sqrt(b.raw_var / nd);
    b.noise_correction = kahan_sum(b.per_line_vars) / nd /
                         (static_cast<double>(n_lines) * b.kappa * b.kappa);
    b.corrected_var = b.raw_var - b.noise_correction;

    // Bootstrap over samples, resampling (volume, per-line variance) jointly.
    Rng rng(derive_seed(seed, {0x626f6f74u}));
    std::vector<double> raw_reps(n_boot), cor_reps(n_boot);
    std::vector<double> vols(ns), plvars(ns);
    for (int rep = 0; rep < n_boot; ++rep) {
        for (std::int64_t i = 0; i < ns; ++i) {
            const auto pick = static_cast<std::size_t>(rng.uniform_half_open() * nd);
            vols[i] = b.volumes[pick];
            plvars[i] = b.per_line_vars[pick];
        }
        auto [raw, cor] = corrected_of(vols, plvars);
        raw_reps[rep] = raw;
        cor_reps[rep] = cor;
    }
    const double raw_mean = kahan_sum(raw_reps) / n_boot;
    const double cor_mean = kahan_sum(cor_reps) / n_boot;
    b.raw_var_se = std::sqrt(variance_of(raw_reps, raw_mean));
    b.corrected_var_se = std::sqrt(variance_of(cor_reps, cor_mean));
    return b;
}

BatchStats batch_stats(const FrequencySet& set, std::int64_t n_samples,
                       std::int64_t n_lines, std::uint64_t seed, int n_boot) {
    if (n_samples < 30)
        throw std::invalid_argument("batch_stats: n_samples must be >= 30");
    std::vector<NodalEstimate> estimates(n_samples);
    parallel_blocks(n_samples, [&](std::int64_t i) {
        WaveSample w = sample_wave(set, derive_seed(seed, {1, static_cast<std::uint64_t>(i)}));
        estimates[static_cast<std::size_t>(i)] =
            crofton_volume(w, n_lines, derive_seed(seed, {2, static_cast<std::uint64_t>(i)}));
    });
    return aggregate_batch(set.d, set.m, set.n(), estimates, n_lines, seed, n_boot);
}

nlohmann::json batch_to_json(const BatchStats& b) {
    return {{"d", b.d},
            {"m", b.m},
            {"n", b.n},
            {"n_samples", b.n_samples},
            {"n_lines", b.n_lines},
            {"seed", b.seed},
            {"kappa", b.kappa},
            {"mean", b.mean},
            {"mean_se", b.mean_se},
            {"raw_var", b.raw_var},
            {"raw_var_se", b.raw_var_se},
            {"noise_correction", b.noise_correction},
            {"corrected_var", b.corrected_var},
            {"corrected_var_se", b.corrected_var_se},
            {"volumes", b.volumes},
            {"per_line_vars", b.per_line_vars}};
}

std::string batch_to_csv(const BatchStats& b) {
    std::ostringstream os;
    os.precision(17);
    os << "sample,volume,std_error\n";
    const double denom = static_cast<double>(b.n_lines) * b.kappa * b.kappa;
    for (std::size_t i = 0; i < b.volumes.size(); ++i)
        os << i << ',' << b.volumes[i] << ','
           << std::sqrt(std::max(0.0, b.per_line_vars[i]) / denom) << '\n';
    os << "summary," << b.mean << ',' << b.mean_se << '\n';
    return os.str();
}

}  // namespace arw
