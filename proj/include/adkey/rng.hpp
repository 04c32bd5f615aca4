#pragma once

#include <cmath>
#include <cstdint>

namespace adkey {

// Counter-based generator: output i is a 64-bit mix of (key, i), so streams
// can be split per trial or per restart and results do not depend on thread
// count or evaluation order. The mix is the splitmix64 finalizer; constants
// are fixed so any implementation reproduces identical streams.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    // Independent stream i of a master seed.
    static CounterRng stream(std::uint64_t seed, std::uint64_t i) {
        return CounterRng(mix(seed + (i + 1) * 0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t next_u64() {
        return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    // Unbiased uniform integer in [0, n), n >= 1, by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace adkey
