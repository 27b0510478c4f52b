#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace selfrep {

// Philox4x32-10 counter-based generator.
// Key is the 64-bit seed; the upper half of the counter is a stream id, so
// (seed, stream) pairs give independent sequences without shared state.
class Philox {
public:
    using result_type = std::uint64_t;

    Philox() : Philox(0, 0) {}
    Philox(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t blocks_used() const { return block_index_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

// Stream tags keep the randomness of different sub-tasks of one replica apart.
enum class Purpose : std::uint64_t {
    walk = 1,
    field = 2,
    field_aux = 3,
    driver = 4,
    jump = 5,
    clock = 6,
    continuation = 7,
    misc = 8,
};

inline Philox replica_rng(std::uint64_t seed, std::uint64_t replica, Purpose p) {
    return Philox(seed, (replica << 4) | static_cast<std::uint64_t>(p));
}

double uniform01(Philox& g);     // in (0, 1)
double exp1(Philox& g);          // Exp(1)
double std_normal(Philox& g);

}  // namespace selfrep
