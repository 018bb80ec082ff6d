#include "arw/kacrice.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "arw/parallel.hpp"
#include "arw/predict.hpp"
#include "arw/rng.hpp"

namespace arw {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols() ||
        (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
}
}  // namespace

OmegaMatrix omega_matrix(const SpectralFrame& frame) {
    if (!frame.xy_available)
        throw std::invalid_argument("omega_matrix: frame has |r| = 1, X/Y unavailable");
    const int d = static_cast<int>(frame.x_mat.rows());
    OmegaMatrix o;
    o.dim = 2 * d;
    o.x_block = frame.x_mat;
    o.y_block = frame.y_mat;
    o.full = Eigen::MatrixXd::Identity(2 * d, 2 * d);
    o.full.topLeftCorner(d, d) += frame.x_mat;
    o.full.bottomRightCorner(d, d) += frame.x_mat;
    o.full.topRightCorner(d, d) += frame.y_mat;
    o.full.bottomLeftCorner(d, d) += frame.y_mat;
    return o;
}

ExpansionCoefficients expansion_coefficients(int d) {
    if (d < 2) throw std::invalid_argument("expansion_coefficients: d must be >= 2");
    ExpansionCoefficients c;
    const Int D(d);
    c.a[0] = Rat(1);
    c.a[1] = Rat(Int(1), D);
    c.a[2] = Rat(Int(1), 2 * D * D);
    c.a[3] = Rat(Int(-1), D * D * (d + 2));
    c.a[4] = Rat(Int(-(d - 1)), 2 * D * D * (d + 2));
    c.a[5] = Rat(Int(1), 4 * D * D * (d + 2) * (d + 2));
    c.a[6] = c.a[5] / 2;
    c.a[7] = Rat(Int(-1), 2 * D * D * (d + 2));
    return c;
}

NormProductExpansion norm_product_expectation(const Eigen::MatrixXd& x_mat,
                                              const Eigen::MatrixXd& y_mat,
                                              int d) {
    require_symmetric(x_mat, "norm_product_expectation");
    require_symmetric(y_mat, "norm_product_expectation");
    ExpansionCoefficients c = expansion_coefficients(d);
    auto a = [&](int i) { return rat_to_double(c.a[i]); };
    const Eigen::MatrixXd y2 = y_mat * y_mat;
    const double tr_x = x_mat.trace();
    const double tr_y2 = y2.trace();
    const double tr_xy2 = (x_mat * y2).trace();
    const double tr_x2 = (x_mat * x_mat).trace();
    const double tr_y4 = (y2 * y2).trace();
    NormProductExpansion out;
    const double g = g_constant(d);
    out.value = g * g / kTwoPi *
                (a(0) + a(1) * tr_x + a(2) * tr_y2 + a(3) * tr_xy2 +
                 a(4) * tr_x2 + a(5) * tr_y4 + a(6) * tr_y2 * tr_y2 +
                 a(7) * tr_x * tr_y2);
    out.dropped_monitor =
        std::abs((x_mat * x_mat * x_mat).trace()) + std::abs((y2 * y2 * y2).trace());
    return out;
}

McEstimate mc_norm_product(const Eigen::MatrixXd& omega, std::int64_t samples,
                           std::uint64_t seed) {
    require_symmetric(omega, "mc_norm_product");
    const int dim = static_cast<int>(omega.rows());
    if (dim % 2 != 0) throw std::invalid_argument("mc_norm_product: odd dimension");
    const int d = dim / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("mc_norm_product: omega not PSD within tolerance");
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd factor =
        es.eigenvectors() * clipped.cwiseSqrt().asDiagonal();

    constexpr std::int64_t kBlock = 8192;
    const std::int64_t n_blocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> sum(n_blocks, 0.0), sum2(n_blocks, 0.0);
    parallel_blocks(n_blocks, [&](std::int64_t b) {
        Rng rng(derive_seed(seed, {0x6d63u, static_cast<std::uint64_t>(b)}));
        const std::int64_t lo = b * kBlock;
        const std::int64_t hi = std::min(samples, lo + kBlock);
        Eigen::VectorXd z(dim), w(dim);
        double s = 0.0, s2 = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            for (int k = 0; k < dim; ++k) z[k] = rng.gaussian();
            w.noalias() = factor * z;
            const double v = w.head(d).norm() * w.tail(d).norm();
            s += v;
            s2 += v * v;
        }
        sum[b] = s;
        sum2[b] = s2;
    });
    double s = 0.0, s2 = 0.0;
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        s += sum[b];
        s2 += sum2[b];
    }
    McEstimate est;
    const double n = static_cast<double>(samples);
    est.mean = s / n;
    const double var = std::max(0.0, s2 / n - est.mean * est.mean);
    est.std_error = std::sqrt(var / n);
    return est;
}

double f_exact(double t, double s, const Eigen::MatrixXd& x_mat,
               const Eigen::MatrixXd& y_mat) {
    if (t < 0 || s < 0) throw std::invalid_argument("f_exact: t, s must be >= 0");
    require_symmetric(x_mat, "f_exact");
    require_symmetric(y_mat, "f_exact");
    const int d = static_cast<int>(x_mat.rows());
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd top = (1.0 + t) * id + t * x_mat;
    const Eigen::MatrixXd bot = (1.0 + s) * id + s * x_mat;
    const double root_ts = std::sqrt(t * s);

    Eigen::MatrixXd full(2 * d, 2 * d);
    full.topLeftCorner(d, d) = top;
    full.bottomRightCorner(d, d) = bot;
    full.topRightCorner(d, d) = root_ts * y_mat;
    full.bottomLeftCorner(d, d) = root_ts * y_mat;
    const double det_direct = full.determinant();

    // Schur complement on the top-left block.
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(top);
    const Eigen::MatrixXd schur =
        bot - (t * s) * (y_mat * lu.solve(y_mat));
    const double det_block = top.determinant() * schur.determinant();

    if (det_direct <= 0.0 || det_block <= 0.0)
        throw std::invalid_argument("f_exact: matrix not positive definite");
    if (std::abs(det_direct - det_block) >
        1e-10 * std::max(std::abs(det_direct), 1.0))
        throw std::logic_error("f_exact: block factorization disagrees with "
                               "direct determinant beyond 1e-10");
    return 1.0 / std::sqrt(det_direct);
}

EtaThetaXi eta_theta_xi_integrals(int d) {
    const double g = g_constant(d);
    return {g, g / d, g / (static_cast<double>(d) * (d + 2))};
}

EtaThetaXi eta_theta_xi_quadrature(int d) {
    boost::math::quadrature::tanh_sinh<double> integ;
    const double hd = 0.5 * d;
    // Split at t = 1 and substitute u = 1/t on the tail.  Each integrand is
    // written so it stays a finite double arbitrarily close to the endpoint
    // singularities tanh-sinh probes: expm1/log1p kills the 1 - (1+t)^{-d/2}
    // cancellation, the tail powers are simplified to u^{d/2}(1+u)^{-d/2-k},
    // and arguments are floored away from exact zero before dividing.
    auto floor0 = [](double t) {
        return std::max(t, std::numeric_limits<double>::min());
    };
    auto head_eta = [&](double t) {
        t = floor0(t);
        return -std::expm1(-hd * std::log1p(t)) / t / std::sqrt(t);
    };
    auto tail_eta = [&](double u) {
        u = floor0(u);
        return (1.0 - std::pow(u, hd) * std::pow(1.0 + u, -hd)) / std::sqrt(u);
    };
    auto head_theta = [&](double t) {
        t = floor0(t);
        return std::pow(1.0 + t, -hd - 1.0) / std::sqrt(t);
    };
    auto tail_theta = [&](double u) {
        return std::pow(u, hd - 0.5) * std::pow(1.0 + u, -hd - 1.0);
    };
    auto head_xi = [&](double t) {
        return std::sqrt(t) * std::pow(1.0 + t, -hd - 2.0);
    };
    auto tail_xi = [&](double u) {
        return std::pow(u, hd - 0.5) * std::pow(1.0 + u, -hd - 2.0);
    };
    EtaThetaXi out;
    out.one_minus_eta =
        integ.integrate(head_eta, 0.0, 1.0) + integ.integrate(tail_eta, 0.0, 1.0);
    out.theta =
        integ.integrate(head_theta, 0.0, 1.0) + integ.integrate(tail_theta, 0.0, 1.0);
    out.xi =
        integ.integrate(head_xi, 0.0, 1.0) + integ.integrate(tail_xi, 0.0, 1.0);
    return out;
}

Singularity is_singular(const FrequencySet& set, const Eigen::VectorXd& x) {
    const int d = set.d;
    const std::size_t n = set.size();
    std::int64_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto mu = set.point(i);
        double phase = 0.0;
        for (int j = 0; j < d; ++j) phase += static_cast<double>(mu[j]) * x[j];
        const double c = std::cos(kTwoPi * phase);
        if (c > 0.75) ++pos;
        if (c < -0.75) ++neg;
    }
    // count > (1 - 1/(4d)) N  <=>  4d * count > (4d - 1) * N.
    const std::int64_t lhs_scale = 4 * static_cast<std::int64_t>(d);
    const std::int64_t rhs = (lhs_scale - 1) * static_cast<std::int64_t>(n);
    if (lhs_scale * pos > rhs) return Singularity::positive;
    if (lhs_scale * neg > rhs) return Singularity::negative;
    return Singularity::none;
}

SingularMeasure estimate_singular_measure(const FrequencySet& set,
                                          std::int64_t samples,
                                          std::uint64_t seed) {
    if (samples < 1000)
        throw std::invalid_argument("estimate_singular_measure: samples must be >= 1000");
    const int d = set.d;
    constexpr std::int64_t kBlock = 4096;
    const std::int64_t n_blocks = (samples + kBlock - 1) / kBlock;
    std::vector<std::int64_t> hits(n_blocks, 0);
    parallel_blocks(n_blocks, [&](std::int64_t b) {
        Rng rng(derive_seed(seed, {0x5347u, static_cast<std::uint64_t>(b)}));
        const std::int64_t lo = b * kBlock;
        const std::int64_t hi = std::min(samples, lo + kBlock);
        Eigen::VectorXd x(d);
        std::int64_t h = 0;
        for (std::int64_t i = lo; i < hi; ++i) {
            for (int j = 0; j < d; ++j) x[j] = rng.uniform_half_open();
            if (is_singular(set, x) != Singularity::none) ++h;
        }
        hits[b] = h;
    });
    std::int64_t total = 0;
    for (auto h : hits) total += h;
    SingularMeasure out;
    out.samples = samples;
    out.fraction = static_cast<double>(total) / static_cast<double>(samples);
    out.std_error =
        std::sqrt(out.fraction * (1.0 - out.fraction) / static_cast<double>(samples));
    return out;
}

double singular_measure_grid(const FrequencySet& set, int per_dim) {
    const int d = set.d;
    double hits = 0.0;
    std::vector<int> idx(d, 0);
    Eigen::VectorXd x(d);
    const double step = 1.0 / per_dim;
    for (;;) {
        for (int j = 0; j < d; ++j) x[j] = (idx[j] + 0.5) * step;
        if (is_singular(set, x) != Singularity::none) hits += 1.0;
        int j = 0;
        while (j < d && ++idx[j] == per_dim) idx[j++] = 0;
        if (j == d) break;
    }
    return hits * std::pow(step, d);
}

double k2_series_value(double r, const Eigen::MatrixXd& x_mat,
                       const Eigen::MatrixXd& y_mat, int d) {
    ExpansionCoefficients c = expansion_coefficients(d);
    auto a = [&](int i) { return rat_to_double(c.a[i]); };
    const Eigen::MatrixXd y2 = y_mat * y_mat;
    const double tr_x = x_mat.trace();
    const double tr_y2 = y2.trace();
    const double tr_xy2 = (x_mat * y2).trace();
    const double tr_x2 = (x_mat * x_mat).trace();
    const double tr_y4 = (y2 * y2).trace();
    const double r2 = r * r;
    const double bracket = 0.5 * r2 + a(1) * tr_x + a(2) * tr_y2 +
                           0.375 * r2 * r2 + a(3) * tr_xy2 + a(4) * tr_x2 +
                           a(5) * tr_y4 + a(6) * tr_y2 * tr_y2 +
                           a(7) * tr_x * tr_y2 + 0.5 * a(1) * r2 * tr_x +
                           0.5 * a(2) * r2 * tr_y2;
    const double g = g_constant(d);
    return g * g / (4.0 * kPi * kPi) * (1.0 + bracket);
}

K2Point k2_pointwise(const FrequencySet& set, const Eigen::VectorXd& x,
                     std::int64_t mc_samples, std::uint64_t seed) {
    K2Point p;
    p.x = x;
    SpectralFrame frame = eval_frame(set, x);
    p.r = frame.r;
    p.singular = is_singular(set, x);
    if (!frame.xy_available)
        throw std::invalid_argument("k2_pointwise: |r(x)| = 1, Omega undefined");
    OmegaMatrix omega = omega_matrix(frame);
    McEstimate mc = mc_norm_product(omega.full, mc_samples, seed);
    const double scale = 1.0 / (kTwoPi * std::sqrt(1.0 - p.r * p.r));
    p.k2_mc = mc.mean * scale;
    p.k2_se = mc.std_error * scale;
    const Eigen::MatrixXd y2 = frame.y_mat * frame.y_mat;
    p.eps_monitor = std::pow(std::abs(p.r), 6) +
                    std::abs((frame.x_mat * frame.x_mat * frame.x_mat).trace()) +
                    std::abs((y2 * y2 * y2).trace());
    if (std::abs(p.r) < 1.0 - 1.0 / (16.0 * set.d)) {
        p.series_ok = true;
        p.k2_series = k2_series_value(p.r, frame.x_mat, frame.y_mat, set.d);
    }
    return p;
}

nlohmann::json k2_point_to_json(const K2Point& p) {
    nlohmann::json x = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.x.size(); ++i) x.push_back(p.x[i]);
    return {{"x", std::move(x)},
            {"r", p.r},
            {"singular", static_cast<int>(p.singular)},
            {"k2_mc", p.k2_mc},
            {"k2_se", p.k2_se},
            {"k2_series", p.series_ok ? nlohmann::json(p.k2_series) : nlohmann::json()},
            {"eps_monitor", p.eps_monitor}};
}

}  // namespace arw
