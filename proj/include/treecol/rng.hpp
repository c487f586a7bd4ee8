#pragma once

#include <cstdint>
#include <random>

namespace treecol {

// Seeded deterministic random stream. All randomized routines in the library
// take one of these explicitly; independent substreams for worker tasks come
// from split(), so results are reproducible for a fixed master seed
// regardless of thread scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on {0, ..., m-1}, unbiased via rejection. Implemented by hand so
    // the byte stream does not depend on the standard library's
    // uniform_int_distribution, which is implementation-defined.
    std::int64_t below(std::int64_t m) {
        const std::uint64_t range = static_cast<std::uint64_t>(m);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t r;
        do {
            r = gen_();
        } while (r >= limit);
        return static_cast<std::int64_t>(r % range);
    }

    // Independent substream for task k, derived from the master seed.
    RngStream split(std::uint64_t k) const {
        return RngStream(mix(seed_ ^ (0x9e3779b97f4a7c15ULL * (k + 1))));
    }

private:
    // splitmix64 finalizer; decorrelates consecutive seeds.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace treecol
