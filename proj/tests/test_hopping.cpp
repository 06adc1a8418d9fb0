#include "nprach/errors.hpp"
#include "nprach/hopping.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace nprach;

TEST_CASE("gold_bits matches the array recurrence")
{
    for (std::uint32_t cell : {0u, 1u, 2u, 37u, 503u, 0x7fffffffu})
        CHECK(gold_bits(cell, 256) == oracle::gold(cell, 256));
}

TEST_CASE("gold_bits: cell 0 reduces to the first register")
{
    CHECK(gold_bits(0, 8) == oracle::x1_stream(8));
}

TEST_CASE("gold_bits: determinism and cell dependence")
{
    CHECK(gold_bits(5, 64) == gold_bits(5, 64));
    CHECK(gold_bits(1, 64) != gold_bits(2, 64));
}

TEST_CASE("block_offset: anchored at zero, never a zero hop")
{
    for (std::uint32_t cell : {0u, 1u, 2u, 7u, 100u, 255u, 503u, 65535u}) {
        CHECK(block_offset(0, cell) == 0);
        const auto f = block_offsets(cell, 1001);
        for (std::size_t t = 1; t < f.size(); ++t) {
            const int hop = ((f[t] - f[t - 1]) % 12 + 12) % 12;
            REQUIRE(hop >= 1);
            REQUIRE(hop <= 11);
            REQUIRE(f[t] >= 0);
            REQUIRE(f[t] < 12);
        }
        CHECK(block_offset(17, cell) == f[17]);
        CHECK(block_offset(17, cell) == block_offset(17, cell));
    }
}

TEST_CASE("block_offset follows the Gold-word recursion")
{
    const std::uint32_t cell = 42;
    const auto bits = oracle::gold(cell, 4 * 50);
    int f = 0;
    for (std::size_t t = 1; t < 50; ++t) {
        const int word = bits[4 * t] | bits[4 * t + 1] << 1 | bits[4 * t + 2] << 2 | bits[4 * t + 3] << 3;
        f = (f + 1 + word % 11) % 12;
        CHECK(block_offset(t, cell) == f);
    }
}

TEST_CASE("subcarrier_index: first unit shapes")
{
    // f_0 = 0 for every cell.
    auto unit = [](int n0) {
        std::vector<int> v;
        for (std::size_t m = 0; m < 4; ++m)
            v.push_back(subcarrier_index(m, n0, 9));
        return v;
    };
    CHECK(unit(0) == std::vector<int>{0, 1, 7, 6});
    CHECK(unit(11) == std::vector<int>{11, 10, 4, 5});
    CHECK(unit(5) == std::vector<int>{5, 4, 10, 11});
}

TEST_CASE("pattern with a forced outer offset")
{
    const auto p = pattern_from_offsets(0, {0, 3});
    CHECK(p.indices == std::vector<int>{0, 1, 7, 6, 3, 2, 8, 9});
}

TEST_CASE("full_pattern: invariants over 12 starts x 32 cells, L = 128")
{
    NprachConfig cfg;
    cfg.preamble_groups = 128;
    for (std::uint32_t cell = 0; cell < 32; ++cell) {
        cfg.cell_id = cell * 97 + 3;
        std::vector<HoppingPattern> all;
        for (int n0 = 0; n0 < 12; ++n0) {
            auto p = full_pattern(cfg, n0);
            REQUIRE(p.size() == 128);
            REQUIRE(check_pattern(p).empty());
            for (std::size_t m = 0; m < p.size(); ++m)
                REQUIRE(p[m] == subcarrier_index(m, n0, cfg.cell_id));
            all.push_back(std::move(p));
        }
        for (std::size_t m = 0; m < 128; ++m) {
            std::set<int> seen;
            for (const auto& p : all)
                seen.insert(p[m]);
            REQUIRE(seen.size() == 12);
        }
    }
}

TEST_CASE("in-band without clamping over 1000 units")
{
    const auto offsets = block_offsets(77, 1000);
    for (int n0 = 0; n0 < 12; ++n0)
        CHECK(check_pattern(pattern_from_offsets(n0, offsets)).empty());
}

TEST_CASE("check_pattern flags broken hops")
{
    HoppingPattern bad;
    bad.indices = {0, 2, 8, 9};
    CHECK(check_pattern(bad).size() == 2);
    bad.indices = {0, 1, 7, 8};
    CHECK(check_pattern(bad).size() == 1);
}

TEST_CASE("full_pattern rejects non-12 bands and bad starts")
{
    NprachConfig cfg;
    cfg.band_subcarriers = 24;
    CHECK_THROWS_AS(full_pattern(cfg, 0), ValidationError);
    CHECK_THROWS_AS(full_pattern(NprachConfig{}, 12), ValidationError);
    CHECK_THROWS_AS(full_pattern(NprachConfig{}, -1), ValidationError);
}

TEST_CASE("pattern text export")
{
    NprachConfig cfg;
    cfg.preamble_groups = 4;
    CHECK(pattern_to_text(full_pattern(cfg, 0)) == "0, 0\n1, 1\n2, 7\n3, 6\n");
}
