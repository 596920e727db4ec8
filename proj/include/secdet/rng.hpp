#ifndef SECDET_RNG_HPP
#define SECDET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace secdet {

// Counter-derived random substream.  A scenario holds one master seed;
// every (theta, trial, sensor) tuple maps to its own stream so trials can
// run on any number of threads and still reproduce bit-identical results.
//
// Draws are generated from mt19937_64 through our own uniform/normal
// transforms rather than std::*_distribution, whose output is
// implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(mix(seed)) {}

    static RngStream derive(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
        std::uint64_t h = mix(master + 0x9e3779b97f4a7c15ull);
        h = mix(h ^ mix(a + 0xbf58476d1ce4e5b9ull));
        h = mix(h ^ mix(b + 0x94d049bb133111ebull));
        h = mix(h ^ mix(c + 0xd6e8feb86659fd93ull));
        return RngStream(h);
    }

    // uniform on (0,1); never returns exactly 0 or 1
    double uniform() {
        const std::uint64_t x = gen_();
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal, Box-Muller with a cached spare
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace secdet

#endif
