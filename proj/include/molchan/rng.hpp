#pragma once

#include <cstdint>
#include <limits>

namespace molchan {

/// Counter-based SplitMix64 stream. Output n is mix(origin + n * gamma), so a
/// stream is fully determined by its origin and needs no warm-up.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t origin) : state_(origin) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

private:
    std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

/// Independent sub-streams of one experiment.
enum class StreamLane : std::uint64_t {
    Observations = 0,
    Distance = 1,
    Prior = 2,
};

/// Origin of the stream identified by (seed, index, lane).
std::uint64_t stream_origin(std::uint64_t seed, std::uint64_t index, StreamLane lane);

inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t index, StreamLane lane)
{
    return SplitMix64(stream_origin(seed, index, lane));
}

}  // namespace molchan
