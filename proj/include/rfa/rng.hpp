#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rfa {

// Deterministic generator used everywhere randomness is needed. The normal
// and poisson samplers are implemented here (not via std distributions) so
// that a given seed yields the same stream on every platform/stdlib.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (caches the spare deviate).
    double normal();

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    // Poisson draw; Knuth's method for small rates, normal approximation above.
    long poisson(double rate);

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent sub-stream seed from a base seed and a tag
// (FNV-1a over the tag, mixed with the base). Used to give each
// group/stage/fold its own deterministic stream.
std::uint64_t mix_seed(std::uint64_t base, std::string_view tag);

}  // namespace rfa
