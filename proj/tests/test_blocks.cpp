#include "snnls/blocks.hpp"

#include "snnls/experiments.hpp"
#include "snnls/priors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace snnls;

TEST_CASE("BlockStructure validates the partition") {
    CHECK_NOTHROW(BlockStructure(4, {{0, 1}, {2, 3}}));
    CHECK_THROWS_AS(BlockStructure(4, {{0, 1}, {1, 2, 3}}), ValidationError);  // overlap
    CHECK_THROWS_AS(BlockStructure(4, {{0, 1}, {3}}), ValidationError);        // gap
    CHECK_THROWS_AS(BlockStructure(4, {{0, 1}, {2, 4}}), ValidationError);     // out of range
    CHECK_THROWS_AS(BlockStructure(4, {{0, 1, 2, 3}, {}}), ValidationError);   // empty group
}

TEST_CASE("contiguous blocks and ownership") {
    const BlockStructure b = BlockStructure::contiguous(6, 2);
    CHECK(b.n() == 6);
    CHECK(b.num_blocks() == 3);
    CHECK(b.group(1) == std::vector<int>{2, 3});
    CHECK(b.block_of(0) == 0);
    CHECK(b.block_of(3) == 1);
    CHECK(b.block_of(5) == 2);
    CHECK_THROWS_AS(BlockStructure::contiguous(5, 2), ValidationError);
    CHECK_THROWS_AS(BlockStructure::contiguous(4, 0), ValidationError);
}

TEST_CASE("block statistics: l2 energy and l1 sum") {
    Matrix h(4, 1, {3.0, 4.0, 1.0, 2.0});
    const BlockStructure b = BlockStructure::contiguous(4, 2);
    const Matrix s2 = block_stats(h, b, 2);
    CHECK(s2(0, 0) == 25.0);  // 3^2 + 4^2
    CHECK(s2(1, 0) == 5.0);
    const Matrix s1 = block_stats(h, b, 1);
    CHECK(s1(0, 0) == 7.0);
    CHECK(s1(1, 0) == 3.0);
}

TEST_CASE("singleton blocks reproduce the scalar statistics bit-for-bit") {
    Rng rng(33);
    Matrix h(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) h(i, j) = std::fabs(rng.normal());
    const BlockStructure singles = BlockStructure::contiguous(5, 1);
    const Matrix s2 = block_stats(h, singles, 2);
    const Matrix s1 = block_stats(h, singles, 1);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(s2(i, j) == h(i, j) * h(i, j));
            CHECK(s1(i, j) == h(i, j));
        }
}

TEST_CASE("singleton block weights bit-match the scalar families") {
    Rng rng(34);
    Matrix h(6, 2);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 2; ++j) h(i, j) = std::fabs(rng.normal());

    PriorSpec scalar_rst{PriorFamily::RST, 0.8, {}};
    PriorSpec block_rst{PriorFamily::BlockRST, 0.8, BlockStructure::contiguous(6, 1)};
    const Matrix ws = weight_matrix(scalar_rst, h);
    const Matrix wb = weight_matrix(block_rst, h);
    CHECK(std::memcmp(ws.data(), wb.data(), ws.size() * sizeof(double)) == 0);

    PriorSpec scalar_rgdp{PriorFamily::RGDP, 0.3, {}};
    PriorSpec block_rgdp{PriorFamily::BlockRGDP, 0.3, BlockStructure::contiguous(6, 1)};
    const Matrix vs = weight_matrix(scalar_rgdp, h);
    const Matrix vb = weight_matrix(block_rgdp, h);
    CHECK(std::memcmp(vs.data(), vb.data(), vs.size() * sizeof(double)) == 0);
}

TEST_CASE("block weights are constant within a block") {
    Rng rng(35);
    Matrix h(6, 2);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 2; ++j) h(i, j) = std::fabs(rng.normal());
    PriorSpec prior{PriorFamily::BlockRST, 0.5, BlockStructure::contiguous(6, 3)};
    const Matrix w = weight_matrix(prior, h);
    for (int j = 0; j < 2; ++j) {
        CHECK(w(0, j) == w(1, j));
        CHECK(w(1, j) == w(2, j));
        CHECK(w(3, j) == w(4, j));
        CHECK(w(4, j) == w(5, j));
    }
}
