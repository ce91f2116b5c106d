#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace secemb {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Labels for derived randomness streams. Every random choice in the simulator
// is drawn from a stream addressed by (master seed, purpose, indices...), so
// the secure and plaintext pipelines consume identical draws regardless of
// which extra crypto randomness either one needs.
enum class StreamPurpose : std::uint64_t {
    model_init = 1,
    client_init = 2,
    round_sample = 3,
    round_dropout = 4,
    padding = 5,
    crypto = 6,
    dp_noise = 7,
    train_test_split = 8,
    synthetic_data = 9,
    count_share = 10,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master ^ 0x5ec3b5ecull);
    for (std::uint64_t part : path) h = splitmix64(h ^ part);
    return h;
}

// mt19937_64 with hand-rolled distributions. The standard engine is
// bit-reproducible everywhere; standard distributions are not, so sampling is
// pinned here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n) by rejection; n must be nonzero.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Box-Muller; one value per call for replay stability.
    double next_gaussian() {
        double u1;
        do { u1 = next_double01(); } while (u1 <= 0.0);
        double u2 = next_double01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::mt19937_64 engine_;
};

inline Rng derive_rng(std::uint64_t master, StreamPurpose purpose,
                      std::initializer_list<std::uint64_t> path = {}) {
    std::uint64_t h = derive_seed(master, {static_cast<std::uint64_t>(purpose)});
    for (std::uint64_t part : path) h = splitmix64(h ^ part);
    return Rng(h);
}

}  // namespace secemb
