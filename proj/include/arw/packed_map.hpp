#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "arw/rng.hpp"

namespace arw {

// Fixed-width packing of small integer vectors into a single uint64 key.
// Coordinates must lie in [-bound, bound]; the packed value uses
// dims * bit_width(2*bound) bits and must fit in 63 bits (the all-ones key
// is reserved as the hash-table empty sentinel).
struct PackedShape {
    int dims = 0;
    int bits = 0;
    std::int64_t bound = 0;

    static PackedShape for_bound(int dims, std::int64_t bound) {
        PackedShape s;
        s.dims = dims;
        s.bound = bound;
        std::uint64_t range = static_cast<std::uint64_t>(2 * bound);
        s.bits = range == 0 ? 1 : std::bit_width(range);
        if (s.dims * s.bits > 63)
            throw std::invalid_argument(
                "PackedShape: coordinates do not fit in a 63-bit key");
        return s;
    }

    std::uint64_t pack(std::span<const std::int64_t> v) const {
        std::uint64_t key = 0;
        for (int i = 0; i < dims; ++i) {
            std::uint64_t c = static_cast<std::uint64_t>(v[i] + bound);
            key = (key << bits) | c;
        }
        return key;
    }

    void unpack(std::uint64_t key, std::span<std::int64_t> out) const {
        std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
        for (int i = dims - 1; i >= 0; --i) {
            out[i] = static_cast<std::int64_t>(key & mask) - bound;
            key >>= bits;
        }
    }
};

// Open-addressing hash map from uint64 keys (< 2^63) to dense indices
// 0,1,2,... in insertion order.  Callers keep per-index payloads in plain
// vectors; integer reductions over entries are order-independent, and
// anything order-sensitive iterates keys() sorted.
class PackedIndexMap {
  public:
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    explicit PackedIndexMap(std::size_t expected = 16) {
        std::size_t cap = 16;
        while (cap < expected * 2) cap <<= 1;
        slots_.assign(cap, Slot{kEmpty, 0});
        mask_ = cap - 1;
    }

    std::size_t size() const { return keys_.size(); }
    const std::vector<std::uint64_t>& keys() const { return keys_; }

    // Returns the dense index for key, inserting it if absent.
    std::int64_t insert_or_get(std::uint64_t key) {
        if (keys_.size() * 10 >= (mask_ + 1) * 7) grow();
        std::size_t pos = mix_u64(key) & mask_;
        for (;;) {
            Slot& s = slots_[pos];
            if (s.key == key) return s.index;
            if (s.key == kEmpty) {
                s.key = key;
                s.index = static_cast<std::int64_t>(keys_.size());
                keys_.push_back(key);
                return s.index;
            }
            pos = (pos + 1) & mask_;
        }
    }

    // Returns the dense index for key, or -1 if absent.
    std::int64_t find(std::uint64_t key) const {
        std::size_t pos = mix_u64(key) & mask_;
        for (;;) {
            const Slot& s = slots_[pos];
            if (s.key == key) return s.index;
            if (s.key == kEmpty) return -1;
            pos = (pos + 1) & mask_;
        }
    }

  private:
    struct Slot {
        std::uint64_t key;
        std::int64_t index;
    };

    void grow() {
        std::size_t cap = (mask_ + 1) * 2;
        std::vector<Slot> fresh(cap, Slot{kEmpty, 0});
        for (const Slot& s : slots_) {
            if (s.key == kEmpty) continue;
            std::size_t pos = mix_u64(s.key) & (cap - 1);
            while (fresh[pos].key != kEmpty) pos = (pos + 1) & (cap - 1);
            fresh[pos] = s;
        }
        slots_.swap(fresh);
        mask_ = cap - 1;
    }

    std::vector<Slot> slots_;
    std::vector<std::uint64_t> keys_;
    std::size_t mask_ = 0;
};

}  // namespace arw
