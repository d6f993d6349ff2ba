#ifndef LMSCAT_RNG_HPP
#define LMSCAT_RNG_HPP
//
// lmscat/rng: seeded, portable normal variates for the synthetic-noise model.
// mt19937_64 plus an explicit Marsaglia polar transform; std::normal_distribution
// is implementation-defined, so golden datasets pin the transform here. The
// algorithm identity string goes into every dataset header.
//

#include <cmath>
#include <cstdint>
#include <random>

namespace lmscat {

inline constexpr const char* kRngId = "mt19937_64-polar-v1";

// splitmix64; used to derive independent per-block sub-seeds
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t block_seed(std::uint64_t base, std::uint64_t freq_index,
                                std::uint64_t pair_key) {
    return mix_seed(base + 0x632BE59BD9B4E019ULL * mix_seed(freq_index + 1) +
                    0x9E3779B97F4A7C15ULL * mix_seed(pair_key + 1));
}

class NormalRng {
public:
    explicit NormalRng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0,1) with 53 random bits
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lmscat

#endif  // LMSCAT_RNG_HPP
