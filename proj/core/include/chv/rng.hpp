#ifndef CHV_RNG_HPP
#define CHV_RNG_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace chv {

// Deterministic PRNG (splitmix64) with hand-rolled distributions.
// The standard <random> distributions are implementation-defined, which
// would break the byte-identical-rerun contract across toolchains, so
// everything downstream of a seed goes through this class.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Unbiased draw in [0, bound).
    std::uint64_t next_below(std::uint64_t bound);

    // Uniform in [0, 1) with 53 random bits.
    double next_double();

    // Standard normal via Box-Muller.
    double next_gaussian();

    // Fisher-Yates with next_below; deterministic everywhere.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream for a named purpose from a master seed,
// so e.g. mask generation and noise injection never share draws.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

} // namespace chv

#endif
