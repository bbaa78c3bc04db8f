#pragma once

#include <cstdint>

namespace cliffstat {

// Counter-style splittable generator. Every Monte Carlo driver derives one
// independent stream per 4096-sample chunk from (seed, chunk_index), so merged
// results do not depend on how chunks are scheduled across workers.
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t s = 0) : state(s) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static uint64_t mix(uint64_t a, uint64_t b) {
        SplitMix64 s(a ^ (0x9E3779B97F4A7C15ULL * (b + 1)));
        s.next();
        return s.next();
    }
};

class RngStream {
  public:
    explicit RngStream(uint64_t state) : gen_(state) {}

    static RngStream for_chunk(uint64_t seed, uint64_t chunk_index) {
        return RngStream(SplitMix64::mix(seed, chunk_index));
    }

    uint64_t next_u64() { return gen_.next(); }

    // Unbiased sampling from [0, n) (Lemire rejection).
    uint32_t bounded(uint32_t n) {
        uint64_t m = uint64_t(uint32_t(next_u64())) * n;
        uint32_t lo = uint32_t(m);
        if (lo < n) {
            uint32_t threshold = uint32_t(-int32_t(n)) % n;
            while (lo < threshold) {
                m = uint64_t(uint32_t(next_u64())) * n;
                lo = uint32_t(m);
            }
        }
        return uint32_t(m >> 32);
    }

    uint8_t residue(uint8_t d) {
        if (d == 2) return uint8_t(bit());
        return uint8_t(bounded(d));
    }

    int bit() {
        if (bit_count_ == 0) {
            bit_buffer_ = next_u64();
            bit_count_ = 64;
        }
        int b = int(bit_buffer_ & 1u);
        bit_buffer_ >>= 1;
        --bit_count_;
        return b;
    }

    // Uniform double in [0, 1).
    double real01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  private:
    SplitMix64 gen_;
    uint64_t bit_buffer_ = 0;
    int bit_count_ = 0;
};

}  // namespace cliffstat
