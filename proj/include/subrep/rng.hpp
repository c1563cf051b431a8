#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace subrep {

// splitmix64 finalizer; used to derive independent stream seeds from a master
// seed so that per-instance streams never overlap.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// mt19937_64 with hand-rolled draws. std:: distributions are not pinned by the
// standard, so going through them would make "same seed, same bytes" claims
// depend on the standard library version.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // uniform in [0, n); rejection sampling avoids modulo bias
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

private:
    std::mt19937_64 gen_;
};

} // namespace subrep
