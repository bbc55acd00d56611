#pragma once

#include <array>
#include <cstdint>

namespace ifnet {

// Philox4x32-10 counter-based generator (Salmon et al. construction).
// Pure function of (counter, key); streams are carved out of the counter
// space, so any draw can be recomputed independently of execution order.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);
};

// Disjoint stream classes; the class id lives in the top bits of the
// counter so draws for different purposes can never collide.
enum class StreamClass : std::uint32_t {
    InitPosition = 1,
    InitVoltage = 2,
    StepNoise = 3,
    PdeAtoms = 4,
    MkvSelect = 5,
    Scenario = 6,
};

// Sequential view over the stream (seed, cls, replica, particle):
// block index 0,1,2,... each yielding two doubles.
class StreamRng {
  public:
    StreamRng(std::uint64_t seed, StreamClass cls, std::uint32_t replica,
              std::uint32_t particle, std::uint64_t start_block = 0);

    // uniform in (0,1), never 0 or 1
    double uniform();
    // standard normal (Box-Muller; one per block)
    double normal();
    // uniform in [0, n)
    std::uint64_t uniform_index(std::uint64_t n);

    std::uint64_t block_index() const { return next_block_; }

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint32_t particle_;
    std::uint32_t replica_;
    std::uint32_t cls_;
    std::uint64_t next_block_;
    double buf_[2];
    int avail_ = 0;
};

// One-shot standard normal for (seed, replica, particle, step); the draw
// euler stepping uses. Identical to StepNoise stream block `step`.
double step_normal(std::uint64_t seed, std::uint32_t replica, std::uint32_t particle,
                   std::uint64_t step);

}  // namespace ifnet
