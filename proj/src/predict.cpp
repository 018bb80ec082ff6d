#include "arw/predict.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace arw {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

double g_constant(int d) {
    if (d < 2) throw std::invalid_argument("g_constant: d must be >= 2");
    using boost::math::lgamma;
    return std::sqrt(4.0 * kPi) *
           std::exp(lgamma((d + 1) / 2.0) - lgamma(d / 2.0));
}

Rat main_term_shape(int d) {
    if (d < 2) throw std::invalid_argument("main_term_shape: d must be >= 2");
    Int den = Int(d) * (d + 2) * (d + 2) * (d + 2);
    return Rat(Int(d - 1), den);
}

double main_term_constant(int d) {
    const double g = g_constant(d);
    return rat_to_double(main_term_shape(d)) * g * g;
}

double c2_reference() {
    const double g2 = g_constant(2);
    return g2 * g2 / 128.0;
}

double c3_reference() {
    const double g3 = g_constant(3);
    return 2.0 * g3 * g3 / 375.0;
}

VariancePrediction variance_prediction(int d, std::int64_t m,
                                       const CorrelationCensus& census) {
    if (census.d != d || census.m != m)
        throw std::invalid_argument("variance_prediction: census (d, m) mismatch");
    VariancePrediction p;
    p.d = d;
    p.m = m;
    p.n = census.n;
    p.g_d = g_constant(d);
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(census.n);
    p.expected_volume = p.g_d * std::sqrt(md / d);
    p.main_term = main_term_constant(d) * md / (nd * nd);
    p.rw_bound = md / std::sqrt(nd);
    p.conjecture_bound = md / nd;
    p.alpha = alpha_exponent(d);
    p.thm_exponent = 1.0 + rat_to_double(p.alpha);
    p.eb_equid = std::pow(md, -(d - 3) / 4.0);
    p.eb_x4 = static_cast<double>(census.x4) / (nd * nd);
    if (census.c6)
        p.eb_c6 = static_cast<double>(*census.c6) / (nd * nd * nd * nd);
    return p;
}

nlohmann::json prediction_to_json(const VariancePrediction& p) {
    return {{"d", p.d},
            {"m", p.m},
            {"n", p.n},
            {"g_d", p.g_d},
            {"expected_volume", p.expected_volume},
            {"main_term", p.main_term},
            {"main_term_shape", rat_to_json(main_term_shape(p.d))},
            {"rw_bound", p.rw_bound},
            {"conjecture_bound", p.conjecture_bound},
            {"alpha", rat_to_json(p.alpha)},
            {"thm_exponent", p.thm_exponent},
            {"bounds_are_shape_values", true},
            {"error_budget",
             {{"equid", p.eb_equid},
              {"x4_over_n2", p.eb_x4},
              {"c6_over_n4", p.eb_c6 ? nlohmann::json(*p.eb_c6) : nlohmann::json()}}},
            {"c2_reference", c2_reference()},
            {"c3_reference", c3_reference()}};
}

}  // namespace arw
