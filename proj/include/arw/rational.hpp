#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <utility>

#include <json.hpp>

namespace arw {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(std::int64_t num, std::int64_t den = 1) {
    return Rat(Int(num), Int(den));
}

inline Int int_from_i128(__int128 v) {
    // cpp_int has no __int128 constructor; split into high/low halves.
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v)
                              : static_cast<unsigned __int128>(v);
    Int r = Int(static_cast<std::uint64_t>(u >> 64));
    r <<= 64;
    r += Int(static_cast<std::uint64_t>(u));
    if (neg) r = -r;
    return r;
}

inline Rat rat_from_i128(__int128 v) { return Rat(int_from_i128(v)); }

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

// Rational values are serialized as ["num", "den"] pairs of decimal strings
// so that consumers never round through floating point.
inline nlohmann::json rat_to_json(const Rat& r) {
    return nlohmann::json::array(
        {numerator(r).str(), denominator(r).str()});
}

inline Rat rat_from_json(const nlohmann::json& j) {
    return Rat(Int(j.at(0).get<std::string>()), Int(j.at(1).get<std::string>()));
}

}  // namespace arw
