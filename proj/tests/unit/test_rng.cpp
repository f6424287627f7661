#include <doctest.h>

#include <set>
#include <stdexcept>

#include "chainrisk/rng.hpp"

using namespace chainrisk;

TEST_CASE("substream keys depend only on (seed, stream, index)") {
    CHECK(substream_key(0, StreamId::Replication, 5) == substream_key(0, StreamId::Replication, 5));
    std::set<std::uint64_t> keys;
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
        for (auto s : {StreamId::Replication, StreamId::Cycle, StreamId::Auxiliary}) {
            for (std::uint64_t i = 0; i < 1000; ++i) keys.insert(substream_key(seed, s, i));
        }
    }
    CHECK(keys.size() == 9000);
}

TEST_CASE("EngineSource yields values strictly inside (0, 1), reproducibly") {
    auto a = make_substream(3, StreamId::Replication, 9);
    auto b = make_substream(3, StreamId::Replication, 9);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = a.next_uniform();
        CHECK_MESSAGE((u > 0.0 && u < 1.0), "u = " << u);
        CHECK(u == b.next_uniform());
        sum += u;
    }
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("ScriptedSource and CountingSource") {
    ScriptedSource s({0.1, 0.2});
    CountingSource c(s);
    CHECK(c.next_uniform() == 0.1);
    CHECK(c.next_uniform() == 0.2);
    CHECK(c.count() == 2);
    CHECK_THROWS_AS(c.next_uniform(), std::out_of_range);
}
