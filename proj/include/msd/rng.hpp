#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>

// Deterministic, splittable random number generation. Replication streams are
// derived as hash(master_seed, cell_id, replication_index) so that results do
// not depend on scheduling or worker count, only on the master seed.

namespace msd {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive combination of two 64-bit values into a new seed.
inline std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15ULL));
}

// Stream seed for one replication of one experiment cell.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell_id,
                                 std::uint64_t replication) {
    return seed_combine(seed_combine(master, cell_id), replication);
}

// FNV-1a, used to map cell-id strings to stable 64-bit cell keys.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x = splitmix64(x);
            word = x;
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // One standard normal pair via the (non-polar) Box-Muller transform.
    // Consumes exactly two uniforms, which keeps the draw sequence
    // reproducible regardless of how many normals a caller requests.
    void gaussian_pair(double& z0, double& z1) {
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard; probability 2^-53
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(phi);
        z1 = r * std::sin(phi);
    }

    // Fills out[0..count) with standard normals; an odd count discards the
    // second element of the last pair (the uniforms are still consumed).
    void gaussians(double* out, std::size_t count) {
        std::size_t i = 0;
        for (; i + 1 < count; i += 2) gaussian_pair(out[i], out[i + 1]);
        if (i < count) {
            double z0, z1;
            gaussian_pair(z0, z1);
            out[i] = z0;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace msd
