#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "arw/correlations.hpp"
#include "arw/rational.hpp"

namespace arw {

// G_d = sqrt(4 pi) Gamma((d+1)/2) / Gamma(d/2); expected nodal volume is
// G_d sqrt(m/d).
double g_constant(int d);

// Rational shape (d-1)/(d(d+2)^3) of the variance main-term constant.
Rat main_term_shape(int d);

// (d-1)/(d(d+2)^3) * G_d^2; at d = 4 this is pi^2/128.
double main_term_constant(int d);

// Reference constants for the known low-dimensional asymptotics, exposed as
// cross-check values only (this toolkit does not simulate d = 2, 3):
// c2 = G_2^2/128 and c3 = 2 G_3^2/375 = 32/375.
double c2_reference();
double c3_reference();

// Bound ladder and error budget for one (d, m).  All "<<" bounds are shape
// values: implied constant 1, epsilon = 0, as labeled in the JSON output.
struct VariancePrediction {
    int d = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;
    double g_d = 0.0;
    double expected_volume = 0.0;   // G_d sqrt(m/d)
    double main_term = 0.0;         // (d-1)/(d(d+2)^3) G_d^2 m/N^2
    double rw_bound = 0.0;          // m/sqrt(N)
    double conjecture_bound = 0.0;  // m/N
    Rat alpha;                      // 2/(d-1) at d=4, 2/(d-2) at d>=5
    double thm_exponent = 0.0;      // 1 + alpha(d): Var << m N^-(1+alpha)+eps
    // Error-budget shapes for the variance expansion: m^{-(d-3)/4},
    // |X(4)|/N^2, |C(6)|/N^4 (the last absent when the census lacks c6).
    double eb_equid = 0.0;
    double eb_x4 = 0.0;
    std::optional<double> eb_c6;
};

VariancePrediction variance_prediction(int d, std::int64_t m,
                                       const CorrelationCensus& census);

nlohmann::json prediction_to_json(const VariancePrediction& p);

}  // namespace arw
