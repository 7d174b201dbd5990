#include "molchan/rng.hpp"

namespace molchan {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SplitMix64::result_type SplitMix64::operator()()
{
    state_ += kGamma;
    return mix64(state_);
}

double SplitMix64::uniform01()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t stream_origin(std::uint64_t seed, std::uint64_t index, StreamLane lane)
{
    std::uint64_t h = mix64(seed + kGamma);
    h = mix64(h ^ (static_cast<std::uint64_t>(lane) + 0x632be59bd9b4e019ULL));
    return mix64(h ^ mix64(index + 0xd1b54a32d192ed03ULL));
}

}  // namespace molchan
