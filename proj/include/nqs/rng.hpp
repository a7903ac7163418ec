#ifndef NQS_RNG_HPP
#define NQS_RNG_HPP

#include <array>
#include <cstdint>

namespace nqs {

// Philox4x32-10 counter-based generator. Each output block is a pure
// function of (key, counter), so independent streams are obtained by
// reserving the high counter words for a stream id: streams with distinct
// ids draw from disjoint counter sets and can never overlap.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// One deterministic random stream, keyed by (seed, stream). Used with
// stream = chain index so that sampler output is independent of how chains
// are scheduled across threads.
class ChainRng {
  public:
    ChainRng(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // uniform in [0, 1) with 53 random bits
    double next_double();

    // fair +1/-1
    int next_spin();

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_hi_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

// splitmix64 finalizer; used to derive sub-seeds for experiment jobs.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

}  // namespace nqs

#endif
