#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "arw/correlations.hpp"
#include "arw/lattice.hpp"
#include "arw/predict.hpp"

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

TEST_SUITE("predict") {

TEST_CASE("expected-volume constants in closed form") {
    CHECK(arw::g_constant(2) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(arw::g_constant(3) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(arw::g_constant(4) == doctest::Approx(1.5 * kPi).epsilon(1e-12));
    CHECK(arw::g_constant(5) == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(arw::g_constant(1), std::invalid_argument);
}

TEST_CASE("variance main-term constant") {
    CHECK(arw::main_term_shape(4) == arw::Rat(3, 864));
    CHECK(arw::main_term_shape(4) == arw::Rat(1, 288));
    CHECK(arw::main_term_constant(4) ==
          doctest::Approx(kPi * kPi / 128.0).epsilon(1e-12));
    // d = 5: (4 / (5 * 343)) * (16/3)^2 = 1024/15435.
    CHECK(arw::main_term_constant(5) ==
          doctest::Approx(1024.0 / 15435.0).epsilon(1e-12));
}

TEST_CASE("low-dimensional reference constants") {
    CHECK(arw::c2_reference() == doctest::Approx(kPi * kPi / 128.0).epsilon(1e-12));
    CHECK(arw::c3_reference() == doctest::Approx(32.0 / 375.0).epsilon(1e-12));
}

TEST_CASE("prediction fields at (4, 5)") {
    auto set = arw::enumerate_frequencies(4, 5);
    arw::CorrelationCensus census = arw::build_census(set);
    arw::VariancePrediction p = arw::variance_prediction(4, 5, census);
    const double n = static_cast<double>(set.n());
    CHECK(p.n == set.n());
    CHECK(p.alpha == arw::Rat(2, 3));
    CHECK(p.thm_exponent == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(p.expected_volume ==
          doctest::Approx(arw::g_constant(4) * std::sqrt(5.0 / 4.0)).epsilon(1e-14));
    CHECK(p.main_term ==
          doctest::Approx(kPi * kPi / 128.0 * 5.0 / (n * n)).epsilon(1e-13));
    CHECK(p.rw_bound == doctest::Approx(5.0 / std::sqrt(n)).epsilon(1e-14));
    CHECK(p.conjecture_bound == doctest::Approx(5.0 / n).epsilon(1e-14));
    // d = 4: equidistribution shape m^{-1/4}.
    CHECK(p.eb_equid == doctest::Approx(std::pow(5.0, -0.25)).epsilon(1e-14));
    CHECK(p.eb_x4 ==
          doctest::Approx(static_cast<double>(census.x4) / (n * n)).epsilon(1e-14));
    REQUIRE(census.c6.has_value());
    REQUIRE(p.eb_c6.has_value());
    CHECK(*p.eb_c6 ==
          doctest::Approx(static_cast<double>(*census.c6) / std::pow(n, 4.0))
              .epsilon(1e-14));
}

TEST_CASE("census without sixth-order counts drops that budget line") {
    auto set = arw::enumerate_frequencies(5, 2);
    arw::CensusOptions opts;
    opts.want_c6 = false;
    arw::CorrelationCensus census = arw::build_census(set, opts);
    arw::VariancePrediction p = arw::variance_prediction(5, 2, census);
    CHECK(p.alpha == arw::Rat(2, 3));
    CHECK_FALSE(p.eb_c6.has_value());

    nlohmann::json j = arw::prediction_to_json(p);
    CHECK(j["error_budget"]["c6_over_n4"].is_null());
}

TEST_CASE("census identity mismatch is rejected") {
    auto set = arw::enumerate_frequencies(4, 5);
    arw::CorrelationCensus census = arw::build_census(set);
    CHECK_THROWS_AS(arw::variance_prediction(4, 7, census), std::invalid_argument);
    CHECK_THROWS_AS(arw::variance_prediction(5, 5, census), std::invalid_argument);
}

TEST_CASE("json export shape") {
    auto set = arw::enumerate_frequencies(4, 1);
    arw::VariancePrediction p =
        arw::variance_prediction(4, 1, arw::build_census(set));
    nlohmann::json j = arw::prediction_to_json(p);
    for (const char* key :
         {"d", "m", "n", "g_d", "expected_volume", "main_term",
          "main_term_shape", "rw_bound", "conjecture_bound", "alpha",
          "thm_exponent", "bounds_are_shape_values", "error_budget",
          "c2_reference", "c3_reference"})
        CHECK(j.contains(key));
    CHECK(j["bounds_are_shape_values"] == true);
    CHECK(j["error_budget"].contains("equid"));
    CHECK(j["error_budget"].contains("x4_over_n2"));
    CHECK(j["error_budget"]["c6_over_n4"].is_number());
}

}  // TEST_SUITE
