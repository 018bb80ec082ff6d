#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace arw {

// splitmix64 step; used both as a mixer for seed derivation and as the
// finalizer for hashing packed integer keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_u64(std::uint64_t v) {
    std::uint64_t s = v;
    return splitmix64(s);
}

// Derive a child stream seed from a base seed and a path of integer tags.
// Every independent random stream in the project is keyed this way, so all
// results are reproducible from a single user-facing seed and are unaffected
// by thread count or evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = base ^ 0x243f6a8885a308d3ULL;  // avoid the all-zero state
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t tag : path) {
        s = h ^ (tag + 0x452821e638d01377ULL);
        h = splitmix64(s);
    }
    return h;
}

// Deterministic generator: mt19937_64 with hand-rolled uniform and gaussian
// transforms.  std::normal_distribution is implementation-defined, so Box-
// Muller is written out to keep byte-identical output across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on (0, 1]; never returns 0 so log() below is safe.
    double uniform01() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [0, 1).
    double uniform_half_open() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform_half_open();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace arw
