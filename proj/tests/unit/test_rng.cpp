#include "doctest.h"

#include <cmath>
#include <set>

#include "trapsim/estimate.hpp"
#include "trapsim/rng.hpp"

using namespace trapsim;

TEST_CASE("same key reproduces the same stream")
{
    RandomStream a(StreamKey(42, {3, 7}));
    RandomStream b(StreamKey(42).child(3).child(7));
    for (int i = 0; i < 1000; ++i)
        CHECK(a() == b());
}

TEST_CASE("distinct lineages and seeds give distinct streams")
{
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t i = 0; i < 256; ++i)
            firsts.insert(RandomStream(StreamKey(s, {i}))());
    CHECK(firsts.size() == 4 * 256);

    // Lineage is ordered: [1, 2] and [2, 1] are different streams.
    CHECK(RandomStream(StreamKey(0, {1, 2}))() != RandomStream(StreamKey(0, {2, 1}))());
}

TEST_CASE("seek gives random access into the stream")
{
    RandomStream s(StreamKey(9, {1}));
    std::vector<std::uint64_t> seq;
    for (int i = 0; i < 20; ++i)
        seq.push_back(s());
    CHECK(s.position() == 20);
    RandomStream t = s.at(7);
    CHECK(t() == seq[7]);
    CHECK(t.position() == 8);
}

TEST_CASE("uniform stays inside the open unit interval with the right moments")
{
    RandomStream s(StreamKey(1));
    MomentSum m;
    for (int i = 0; i < 200000; ++i)
    {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        m.add(u);
    }
    CHECK(m.mean() == doctest::Approx(0.5).epsilon(0.005));
    CHECK(m.variance() == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("normal and exponential moments")
{
    RandomStream s(StreamKey(2));
    MomentSum n, e;
    for (int i = 0; i < 200000; ++i)
    {
        n.add(s.normal());
        e.add(s.exponential());
    }
    CHECK(std::abs(n.mean()) < 3.0 * n.std_err());
    CHECK(n.variance() == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(e.mean() - 1.0) < 3.0 * e.std_err());
}

TEST_CASE("streams from sibling keys are uncorrelated")
{
    // Pairwise correlation of sibling streams, pooled over many siblings.
    MomentSum prod;
    for (std::uint64_t i = 0; i < 200; ++i)
    {
        RandomStream a(StreamKey(5, {i}));
        RandomStream b(StreamKey(5, {i + 1}));
        for (int k = 0; k < 500; ++k)
            prod.add(a.normal() * b.normal());
    }
    CHECK(std::abs(prod.mean()) < 4.0 * prod.std_err());
}
