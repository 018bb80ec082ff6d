#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>
#include <json.hpp>

#include "arw/lattice.hpp"
#include "arw/rational.hpp"
#include "arw/spectral.hpp"

namespace arw {

// Covariance of the conditioned gradient pair: I_{2d} + [[X, Y], [Y, X]].
struct OmegaMatrix {
    int dim = 0;  // 2d
    Eigen::MatrixXd x_block;
    Eigen::MatrixXd y_block;
    Eigen::MatrixXd full;
};

OmegaMatrix omega_matrix(const SpectralFrame& frame);

// Coefficients of the expansion of E[|w1| |w2|] in traces of X and Y:
//   a0 = 1, a1 = 1/d, a2 = 1/(2d^2), a3 = -1/(d^2(d+2)),
//   a4 = -(d-1)/(2d^2(d+2)), a5 = 1/(4d^2(d+2)^2), a6 = a5/2,
//   a7 = -1/(2d^2(d+2)).
struct ExpansionCoefficients {
    std::array<Rat, 8> a;
};

ExpansionCoefficients expansion_coefficients(int d);

// (G_d^2 / 2pi) [ a0 + a1 trX + a2 trY^2 + a3 tr(XY^2) + a4 trX^2
//                + a5 trY^4 + a6 (trY^2)^2 + a7 trX trY^2 ],
// with the dropped-order monitor |tr X^3| + |tr Y^6| reported alongside.
struct NormProductExpansion {
    double value = 0.0;
    double dropped_monitor = 0.0;
};

NormProductExpansion norm_product_expectation(const Eigen::MatrixXd& x_mat,
                                              const Eigen::MatrixXd& y_mat,
                                              int d);

// Monte Carlo E[|w1| |w2|] for (w1, w2) centered Gaussian with covariance
// omega (PSD up to a -1e-9 eigenvalue floor, clipped to 0).  Samples are
// drawn in fixed-size blocks with per-block RNG streams derived from
// (seed, block), so results are independent of thread scheduling.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

McEstimate mc_norm_product(const Eigen::MatrixXd& omega, std::int64_t samples,
                           std::uint64_t seed);

// f(t,s) = det^{-1/2} of
//   [ (1+t)I + tX     sqrt(ts) Y   ]
//   [ sqrt(ts) Y      (1+s)I + sX  ]
// computed directly and via the Schur block factorization; the two paths
// must agree to 1e-10 (relative).
double f_exact(double t, double s, const Eigen::MatrixXd& x_mat,
               const Eigen::MatrixXd& y_mat);

// Shorthand kernels and their weighted integrals against t^{-3/2}:
//   eta = (1+t)^{-d/2}, theta = t(1+t)^{-d/2-1}, xi = t^2(1+t)^{-d/2-2};
//   int (1-eta) = G_d, int theta = G_d/d, int xi = G_d/(d(d+2)).
inline double eta_kernel(double t, int d) { return std::pow(1.0 + t, -0.5 * d); }
inline double theta_kernel(double t, int d) {
    return t * std::pow(1.0 + t, -0.5 * d - 1.0);
}
inline double xi_kernel(double t, int d) {
    return t * t * std::pow(1.0 + t, -0.5 * d - 2.0);
}

struct EtaThetaXi {
    double one_minus_eta = 0.0;
    double theta = 0.0;
    double xi = 0.0;
};

EtaThetaXi eta_theta_xi_integrals(int d);   // closed forms via G_d
EtaThetaXi eta_theta_xi_quadrature(int d);  // tanh-sinh numeric path

enum class Singularity { none = 0, positive = 1, negative = -1 };

// Positive-singular iff #{mu : cos(2 pi mu.x) > 3/4} > (1 - 1/(4d)) N;
// negative-singular with cos < -3/4.  Integer-exact threshold comparison.
Singularity is_singular(const FrequencySet& set, const Eigen::VectorXd& x);

struct SingularMeasure {
    double fraction = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

// Monte Carlo fraction of uniform points that are singular (point-level).
// Requires samples >= 1000.
SingularMeasure estimate_singular_measure(const FrequencySet& set,
                                          std::int64_t samples,
                                          std::uint64_t seed);

// Deterministic grid scan of the same point-level condition (oracle path;
// cost per_dim^d, intended for m = 1 cross-checks).
double singular_measure_grid(const FrequencySet& set, int per_dim);

// Series value G_d^2/(4 pi^2) * (1 + L-bracket) of the two-point intensity.
double k2_series_value(double r, const Eigen::MatrixXd& x_mat,
                       const Eigen::MatrixXd& y_mat, int d);

struct K2Point {
    Eigen::VectorXd x;
    double r = 0.0;
    Singularity singular = Singularity::none;
    double k2_mc = 0.0;
    double k2_se = 0.0;
    bool series_ok = false;   // false when |r| >= 1 - 1/(16d): series refused
    double k2_series = 0.0;   // valid only when series_ok
    double eps_monitor = 0.0; // r^6 + |tr X^3| + tr Y^6
};

// k2_mc = mc_norm_product(Omega(x)) / (2 pi sqrt(1 - r^2)); the series path
// additionally requires |r| < 1 - 1/(16d).
K2Point k2_pointwise(const FrequencySet& set, const Eigen::VectorXd& x,
                     std::int64_t mc_samples, std::uint64_t seed);

nlohmann::json k2_point_to_json(const K2Point& p);

}  // namespace arw
