#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "arw/correlations.hpp"
#include "arw/lattice.hpp"
#include "arw/rational.hpp"

namespace arw {

// Covariance function r(x) = (1/N) sum_mu cos(2 pi mu.x) and its derived
// objects at one torus point.  grad holds the real vector
// -(2 pi / N) sum sin(2 pi mu.x) mu; the complex-exponential factor 2*pi*i
// in the gradient only ever enters the integrals through even powers, so
// everything downstream stays real.
struct SpectralFrame {
    Eigen::VectorXd x;
    double r = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    bool xy_available = false;  // false when |r| = 1 within 1e-12
    Eigen::MatrixXd x_mat;      // -(d/E) (1/(1-r^2)) grad grad^t, rank <= 1
    Eigen::MatrixXd y_mat;      // -(d/E) (hess + (r/(1-r^2)) grad grad^t)
};

SpectralFrame eval_frame(const FrequencySet& set, const Eigen::VectorXd& x);

// The sixteen exactly-computable torus integrals of covariance products.
// Each integral equals a finite sum of integer inner-product polynomials
// over zero-sum tuples (correlations), divided by N^order; displayed values
// carry the recorded power of E = 4 pi^2 m.
enum class Tag {
    r2, r4, dd, dd2, r2dd, h2, r2h2, h4,
    h22, ddh2, rdhd, dh2d, dd3, r4dd, h6, rdddhd,
};
inline constexpr int kNumTags = 16;

std::string tag_name(Tag t);            // "int_r2", ...
int tag_order(Tag t);                   // correlation order: 2, 4 or 6
int tag_e_power(Tag t);                 // displayed integral = coeff * E^power

struct ExactIntegral {
    Tag id{};
    Rat coeff;          // exact rational part: (1/E^power) * integral
    int e_power = 0;
    int order = 0;
    // Displayed value coeff * (4 pi^2 m)^power as a double.
    double numeric(std::int64_t m) const;
};

struct IntegralSet {
    int d = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;
    std::array<std::optional<ExactIntegral>, kNumTags> entries;
    bool order6_available = false;
    std::int64_t c6_check = 0;  // sum_s n3(s)^2, cross-checkable against count_c6

    const ExactIntegral& at(Tag t) const;
};

struct SpectralOptions {
    std::size_t table_entry_cap = 1u << 24;
    // Order-6 tags stream over all N^3 ordered triples; refused above this.
    std::int64_t order6_work_budget = 300'000'000;
    bool want_order6 = true;
};

// One O(N^2) pass (plus an O(N^3) pass for the order-6 tags) accumulating
// interface polynomials per pair/triple sum, then contracting v against -v.
IntegralSet compute_exact_integrals(const FrequencySet& set,
                                    const SpectralOptions& opts = {});

// Accessor matching the per-tag operation shape; throws BudgetExceeded if the
// tag needs order-6 sums that were not materialized.
ExactIntegral exact_integral(const IntegralSet& materials, Tag t);

// Assembled X/Y trace integrals (Taylor expansion of the (1-r^2)^{-1}
// factors, truncated to the sixteen computable tags; the truncation and the
// singular-set corrections live in the residual).
struct LEntry {
    std::string tag;
    std::optional<Rat> value;  // absent when only order-6 content exists and
                               // order-6 sums were not materialized
    Rat main_term;
    std::optional<Rat> residual;
    bool complete = false;  // true when every Taylor term through the
                            // documented order was included
};

struct LAssembly {
    int d = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;
    std::vector<LEntry> entries;
    Rat berry_coeff;     // assembled 1/N coefficient; identically 0
    Rat n2_coeff;        // assembled 1/N^2 coefficient
    Rat n2_reference;    // (d-1)/(d+2)^3, the closed form it must equal
    bool order6_available = false;
};

LAssembly assemble_L_integrals(const IntegralSet& integrals);

// The 1/N coefficient of the variance expansion: 1/2 + a1*(-d) + a2*d^2.
// Vanishes identically in d (Berry cancellation).
Rat berry_coefficient(int d);

// The 1/N^2 coefficient assembled from the expansion coefficients and the
// main terms above; equals (d-1)/(d+2)^3.
Rat assembled_n2_coefficient(int d);

nlohmann::json integrals_to_json(const IntegralSet& integrals,
                                 const LAssembly& assembly);

}  // namespace arw
