#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace trapsim {

/// Identity of a random stream: a user seed plus a lineage of child indices,
/// e.g. {replicate, outer path, inner path}.
///
/// The 128-bit digest is folded incrementally as children are derived, so
/// constructing a stream from a key is O(1) regardless of lineage depth.
class StreamKey
{
  public:
    explicit StreamKey(std::uint64_t seed);
    StreamKey(std::uint64_t seed, std::initializer_list<std::uint64_t> lineage);

    StreamKey child(std::uint64_t index) const;

    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::uint64_t>& lineage() const noexcept { return lineage_; }

    std::uint64_t digest_lo() const noexcept { return lo_; }
    std::uint64_t digest_hi() const noexcept { return hi_; }

    friend bool operator==(const StreamKey& a, const StreamKey& b) noexcept
    {
        return a.seed_ == b.seed_ && a.lineage_ == b.lineage_;
    }

  private:
    void absorb(std::uint64_t word) noexcept;

    std::uint64_t seed_;
    std::vector<std::uint64_t> lineage_;
    std::uint64_t lo_ = 0;
    std::uint64_t hi_ = 0;
};

/// Stream offset reserved for sub-grid bridge uniforms; path increments
/// start at 0 and never come near it.
inline constexpr std::uint64_t kBridgeOffset = std::uint64_t{1} << 62;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Counter-based generator: output k is mix64(base + (k + 1) * gamma), with
/// base and an odd gamma taken from the key digest. Any position can be
/// reached in O(1) via seek().
///
/// Satisfies UniformRandomBitGenerator so it plugs into Boost.Random
/// distributions.
class RandomStream
{
  public:
    using result_type = std::uint64_t;

    explicit RandomStream(const StreamKey& key) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        state_ += gamma_;
        return mix64(state_);
    }

    /// Uniform on (0, 1); never returns 0 or 1. Smallest value is 2^-54.
    double uniform() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() noexcept { return normal_(*this); }

    /// Unit-rate exponential.
    double exponential() noexcept { return exponential_(*this); }

    /// Number of 64-bit words consumed so far.
    std::uint64_t position() const noexcept { return (state_ - base_) * inv_gamma_; }
    void seek(std::uint64_t pos) noexcept { state_ = base_ + pos * gamma_; }

    /// Copy of this stream positioned at `pos`. Used to carve disjoint
    /// sub-streams out of one key (e.g. bridge uniforms at kBridgeOffset).
    RandomStream at(std::uint64_t pos) const noexcept
    {
        RandomStream s = *this;
        s.seek(pos);
        return s;
    }

  private:
    std::uint64_t base_;
    std::uint64_t gamma_;
    std::uint64_t inv_gamma_;
    std::uint64_t state_;
    boost::random::normal_distribution<double> normal_;
    boost::random::exponential_distribution<double> exponential_;
};

} // namespace trapsim
