#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hyposde {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: every 128-bit counter maps independently to 128 output bits,
// which is what makes draws addressable by (seed, step, coordinate) and
// replications safely parallel.
namespace philox {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, ctr[0], hi0, lo0);
        mulhilo(kM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

}  // namespace philox

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic normal/uniform source keyed by (seed, stream); individual
// draws are addressed by (step, coordinate) so a path simulation, a
// replication worker and a re-run all see identical noise.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) {
        const std::uint64_t k = splitmix64(seed ^ splitmix64(stream + 0x1234567890ABCDEFull));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    // Three i.i.d. standard normals for (step, coordinate).
    std::array<double, 3> normals3(std::uint64_t step, std::uint32_t coord) const {
        const auto a = normal_pair(step, coord, 0);
        const auto b = normal_pair(step, coord, 1);
        return {a[0], a[1], b[0]};
    }

    double normal(std::uint64_t step, std::uint32_t coord) const { return normal_pair(step, coord, 0)[0]; }

    double uniform(std::uint64_t step, std::uint32_t coord) const {
        const auto blk = philox::block(counter(step, coord, 2), key_);
        return to_unit(blk[0], blk[1]);
    }

  private:
    static std::array<std::uint32_t, 4> counter(std::uint64_t step, std::uint32_t coord, std::uint32_t slot) {
        return {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), coord, slot};
    }

    // (0,1) uniform from 53 bits, offset by half an ulp so 0 is unreachable.
    static double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    std::array<double, 2> normal_pair(std::uint64_t step, std::uint32_t coord, std::uint32_t slot) const {
        const auto blk = philox::block(counter(step, coord, slot), key_);
        const double u1 = to_unit(blk[0], blk[1]);
        const double u2 = to_unit(blk[2], blk[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    std::array<std::uint32_t, 2> key_{};
};

}  // namespace hyposde
