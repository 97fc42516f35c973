#include "trapsim/rng.hpp"

#include <bit>

namespace trapsim {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Multiplicative inverse of an odd number modulo 2^64 (Newton iteration).
constexpr std::uint64_t inverse_odd(std::uint64_t a) noexcept
{
    std::uint64_t x = a;
    for (int i = 0; i < 6; ++i)
        x *= 2 - a * x;
    return x;
}

// Gamma selection from Java's SplittableRandom: odd, with enough bit
// transitions that the Weyl sequence is well mixed.
std::uint64_t mix_gamma(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    z = (z ^ (z >> 33)) | 1ull;
    int n = std::popcount(z ^ (z >> 1));
    return (n < 24) ? z ^ 0xaaaaaaaaaaaaaaaaull : z;
}

} // namespace

StreamKey::StreamKey(std::uint64_t seed) : seed_(seed)
{
    lo_ = mix64(seed ^ 0x243f6a8885a308d3ull);
    hi_ = mix64(seed + 0x13198a2e03707344ull);
}

StreamKey::StreamKey(std::uint64_t seed, std::initializer_list<std::uint64_t> lineage)
    : StreamKey(seed)
{
    for (auto w : lineage)
    {
        lineage_.push_back(w);
        absorb(w);
    }
}

StreamKey StreamKey::child(std::uint64_t index) const
{
    StreamKey k = *this;
    k.lineage_.push_back(index);
    k.absorb(index);
    return k;
}

void StreamKey::absorb(std::uint64_t word) noexcept
{
    // Two independent chains so the digest is effectively 128 bits wide.
    lo_ = mix64(lo_ ^ mix64(word + kGolden));
    hi_ = mix64(hi_ + mix64(word ^ 0xa4093822299f31d0ull) + kGolden);
}

RandomStream::RandomStream(const StreamKey& key) noexcept
    : base_(key.digest_lo())
    , gamma_(mix_gamma(key.digest_hi()))
    , inv_gamma_(inverse_odd(gamma_))
    , state_(base_)
{
}

} // namespace trapsim
