#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "arw/kacrice.hpp"
#include "arw/lattice.hpp"
#include "arw/predict.hpp"
#include "arw/rng.hpp"
#include "arw/spectral.hpp"

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

Eigen::MatrixXd random_symmetric(int d, double scale, arw::Rng& rng) {
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = rng.gaussian();
    Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    // Normalize to the requested spectral norm.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    return sym * (scale / top);
}

// Rank-one NSD matrix lambda g g^t with |lambda| = scale and |g| = 1, the
// shape the conditioned-gradient X block always takes.
Eigen::MatrixXd rank_one_nsd(int d, double scale, arw::Rng& rng) {
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) g[i] = rng.gaussian();
    g.normalize();
    return -scale * (g * g.transpose());
}

Eigen::MatrixXd omega_from_blocks(const Eigen::MatrixXd& x,
                                  const Eigen::MatrixXd& y) {
    const int d = static_cast<int>(x.rows());
    Eigen::MatrixXd full = Eigen::MatrixXd::Identity(2 * d, 2 * d);
    full.topLeftCorner(d, d) += x;
    full.bottomRightCorner(d, d) += x;
    full.topRightCorner(d, d) += y;
    full.bottomLeftCorner(d, d) += y;
    return full;
}

}  // namespace

TEST_SUITE("kacrice") {

TEST_CASE("expansion coefficients at d = 4") {
    arw::ExpansionCoefficients c = arw::expansion_coefficients(4);
    CHECK(c.a[0] == arw::Rat(1));
    CHECK(c.a[1] == arw::Rat(1, 4));
    CHECK(c.a[2] == arw::Rat(1, 32));
    CHECK(c.a[3] == arw::Rat(-1, 96));
    CHECK(c.a[4] == arw::Rat(-1, 64));
    CHECK(c.a[5] == arw::Rat(1, 2304));
    CHECK(c.a[6] == arw::Rat(1, 4608));
    CHECK(c.a[7] == arw::Rat(-1, 192));
    CHECK_THROWS_AS(arw::expansion_coefficients(1), std::invalid_argument);
}

TEST_CASE("independent case: identity covariance") {
    // Omega = I_{2d} makes the two gradients independent, so the product of
    // norms factors into (E|chi_d|)^2.
    arw::McEstimate one = arw::mc_norm_product(Eigen::MatrixXd::Identity(2, 2),
                                               400000, 20240601);
    CHECK(one.std_error > 0.0);
    CHECK(std::abs(one.mean - 2.0 / kPi) <= 4.0 * one.std_error);

    const double nine_pi_8 = 9.0 * kPi / 8.0;
    arw::McEstimate four = arw::mc_norm_product(Eigen::MatrixXd::Identity(8, 8),
                                                200000, 20240602);
    CHECK(std::abs(four.mean - nine_pi_8) <= 4.0 * four.std_error);

    // The trace expansion at X = Y = 0 reduces to its constant term.
    arw::NormProductExpansion flat = arw::norm_product_expectation(
        Eigen::MatrixXd::Zero(4, 4), Eigen::MatrixXd::Zero(4, 4), 4);
    CHECK(flat.value == doctest::Approx(nine_pi_8).epsilon(1e-13));
    CHECK(flat.dropped_monitor == 0.0);

    CHECK_THROWS_AS(
        arw::mc_norm_product(Eigen::MatrixXd::Identity(3, 3), 1000, 1),
        std::invalid_argument);
}

TEST_CASE("trace expansion tracks Monte Carlo for small rank-one X") {
    arw::Rng rng(arw::derive_seed(555, {7}));
    Eigen::MatrixXd x = rank_one_nsd(4, 0.06, rng);
    Eigen::MatrixXd y = random_symmetric(4, 0.07, rng);
    arw::NormProductExpansion ex = arw::norm_product_expectation(x, y, 4);
    arw::McEstimate mc = arw::mc_norm_product(omega_from_blocks(x, y), 400000,
                                              20240603);
    const double slack = 4.0 * mc.std_error + ex.dropped_monitor;
    CHECK(std::abs(ex.value - mc.mean) <= slack);
    CHECK(ex.dropped_monitor > 0.0);

    Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(4, 4);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(arw::norm_product_expectation(skew, y, 4),
                    std::invalid_argument);
}

TEST_CASE("f_exact factorizes at X = Y = 0 and ignores Y on the axes") {
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
    for (auto [t, s] : {std::pair{0.3, 0.7}, {2.0, 0.1}, {5.0, 5.0}}) {
        CAPTURE(t);
        CAPTURE(s);
        const double expect = arw::eta_kernel(t, 4) * arw::eta_kernel(s, 4);
        CHECK(arw::f_exact(t, s, zero, zero) ==
              doctest::Approx(expect).epsilon(1e-12));
    }

    arw::Rng rng(arw::derive_seed(556, {3}));
    Eigen::MatrixXd x = rank_one_nsd(4, 0.05, rng);
    Eigen::MatrixXd y1 = random_symmetric(4, 0.08, rng);
    Eigen::MatrixXd y2 = random_symmetric(4, 0.08, rng);
    // The off-diagonal coupling carries sqrt(ts), so t = 0 erases Y.
    CHECK(arw::f_exact(0.0, 1.3, x, y1) ==
          doctest::Approx(arw::f_exact(0.0, 1.3, x, y2)).epsilon(1e-12));
    // Generic small blocks exercise the internal Schur-vs-direct cross-check.
    CHECK(arw::f_exact(0.9, 1.7, x, y1) > 0.0);

    CHECK_THROWS_AS(arw::f_exact(-0.1, 1.0, zero, zero), std::invalid_argument);
    Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(4, 4);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(arw::f_exact(1.0, 1.0, skew, zero), std::invalid_argument);
}

TEST_CASE("weighted kernel integrals: closed form vs quadrature") {
    for (int d = 4; d <= 8; ++d) {
        CAPTURE(d);
        arw::EtaThetaXi closed = arw::eta_theta_xi_integrals(d);
        arw::EtaThetaXi quad = arw::eta_theta_xi_quadrature(d);
        CHECK(closed.one_minus_eta == doctest::Approx(arw::g_constant(d)));
        CHECK(quad.one_minus_eta ==
              doctest::Approx(closed.one_minus_eta).epsilon(1e-8));
        CHECK(quad.theta == doctest::Approx(closed.theta).epsilon(1e-8));
        CHECK(quad.xi == doctest::Approx(closed.xi).epsilon(1e-8));
    }
}

TEST_CASE("singularity classification at (4, 1)") {
    auto set = arw::enumerate_frequencies(4, 1);
    CHECK(arw::is_singular(set, Eigen::VectorXd::Zero(4)) ==
          arw::Singularity::positive);
    Eigen::VectorXd half = Eigen::VectorXd::Constant(4, 0.5);
    CHECK(arw::is_singular(set, half) == arw::Singularity::negative);
    Eigen::VectorXd quarter = Eigen::VectorXd::Constant(4, 0.25);
    CHECK(arw::is_singular(set, quarter) == arw::Singularity::none);
}

TEST_CASE("singular measure at (4, 1) matches the exact product value") {
    // cos(2 pi x_j) > 3/4 for every coordinate has probability
    // (arccos(3/4)/pi)^d; positive and negative cases are disjoint.
    auto set = arw::enumerate_frequencies(4, 1);
    const double per_coord = std::acos(0.75) / kPi;
    const double exact = 2.0 * std::pow(per_coord, 4);

    arw::SingularMeasure mc = arw::estimate_singular_measure(set, 100000, 99);
    CHECK(mc.samples == 100000);
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.fraction - exact) <= 4.0 * mc.std_error);

    CHECK(std::abs(arw::singular_measure_grid(set, 48) - exact) <= 0.003);

    CHECK_THROWS_AS(arw::estimate_singular_measure(set, 999, 1),
                    std::invalid_argument);
}

TEST_CASE("omega matrix structure") {
    auto set = arw::enumerate_frequencies(4, 3);
    arw::Rng rng(arw::derive_seed(557, {1}));
    int built = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x[i] = rng.uniform_half_open();
        arw::SpectralFrame f = arw::eval_frame(set, x);
        if (!f.xy_available) continue;
        arw::OmegaMatrix o = arw::omega_matrix(f);
        ++built;
        CHECK(o.dim == 8);
        CHECK((o.full - o.full.transpose()).norm() <= 1e-12);
        CHECK((o.x_block - f.x_mat).norm() == 0.0);
        CHECK((o.y_block - f.y_mat).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(o.full);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
    CHECK(built >= 15);

    arw::SpectralFrame origin = arw::eval_frame(set, Eigen::VectorXd::Zero(4));
    CHECK_THROWS_AS(arw::omega_matrix(origin), std::invalid_argument);
}

TEST_CASE("two-point intensity: Monte Carlo vs series") {
    auto set = arw::enumerate_frequencies(4, 3);
    arw::Rng rng(arw::derive_seed(558, {2}));
    int checked = 0;
    for (int trial = 0; trial < 12 && checked < 4; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x[i] = rng.uniform_half_open();
        if (arw::is_singular(set, x) != arw::Singularity::none) continue;
        arw::K2Point p = arw::k2_pointwise(set, x, 30000, 4200 + trial);
        if (!p.series_ok) continue;
        ++checked;
        CHECK(p.k2_se > 0.0);
        CHECK(p.k2_mc > 0.0);
        CHECK(std::abs(p.k2_mc - p.k2_series) <=
              4.0 * p.k2_se + p.eps_monitor);

        // Same seed, same point: byte-identical Monte Carlo.
        arw::K2Point again = arw::k2_pointwise(set, x, 30000, 4200 + trial);
        CHECK(again.k2_mc == p.k2_mc);
        CHECK(again.k2_se == p.k2_se);

        nlohmann::json j = arw::k2_point_to_json(p);
        CHECK(j["x"].size() == 4);
        CHECK(j.contains("r"));
        CHECK(j.contains("singular"));
        CHECK(j.contains("k2_mc"));
        CHECK(j.contains("k2_se"));
        CHECK(j["k2_series"].is_number());
        CHECK(j.contains("eps_monitor"));
    }
    CHECK(checked >= 3);
}

}  // TEST_SUITE
