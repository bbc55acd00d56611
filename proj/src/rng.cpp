#include "ifnet/rng.hpp"

#include <cmath>

namespace ifnet {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline double u64_to_unit(std::uint64_t u) {
    // 53 significand bits, offset so the result is strictly inside (0,1)
    return static_cast<double>(u >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    round_once(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        round_once(ctr, key);
    }
    return ctr;
}

StreamRng::StreamRng(std::uint64_t seed, StreamClass cls, std::uint32_t replica,
                     std::uint32_t particle, std::uint64_t start_block)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      particle_(particle),
      replica_(replica),
      cls_(static_cast<std::uint32_t>(cls)),
      next_block_(start_block) {}

void StreamRng::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        particle_,
        replica_,
        static_cast<std::uint32_t>(next_block_),
        static_cast<std::uint32_t>(next_block_ >> 32 & 0x03FFFFFFu) | (cls_ << 26),
    };
    const auto out = Philox4x32::block(ctr, key_);
    const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    buf_[0] = u64_to_unit(a);
    buf_[1] = u64_to_unit(b);
    avail_ = 2;
    ++next_block_;
}

double StreamRng::uniform() {
    if (avail_ == 0) refill();
    return buf_[2 - avail_--];
}

double StreamRng::normal() {
    // consume a whole block so the draw is a pure function of (stream, block)
    avail_ = 0;
    refill();
    const double u1 = buf_[0];
    const double u2 = buf_[1];
    avail_ = 0;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t StreamRng::uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

double step_normal(std::uint64_t seed, std::uint32_t replica, std::uint32_t particle,
                   std::uint64_t step) {
    StreamRng rng(seed, StreamClass::StepNoise, replica, particle, step);
    return rng.normal();
}

}  // namespace ifnet
