// SPDX-License-Identifier: MIT
#include "normbridge/errors.hpp"
#include "normbridge/subset.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace normbridge;

TEST(SubsetIndex, MaskEncodingIsOneBased) {
    SubsetIndex u = SubsetIndex::from_coordinates({1, 3}, 4);
    EXPECT_EQ(u.mask(), Mask{0b101});
    EXPECT_EQ(u.cardinality(), 2U);
    EXPECT_TRUE(u.contains(1));
    EXPECT_FALSE(u.contains(2));
    EXPECT_TRUE(u.contains(3));
    EXPECT_FALSE(u.contains(0));
    EXPECT_FALSE(u.contains(5));
    EXPECT_EQ(u.to_string(), "{1,3}");
    EXPECT_EQ(SubsetIndex(0, 3).to_string(), "{}");
}

TEST(SubsetIndex, ComplementAndInclusion) {
    SubsetIndex u(0b0101, 4);
    EXPECT_EQ(u.complement().mask(), Mask{0b1010});
    EXPECT_TRUE(SubsetIndex(0b0001, 4).is_subset_of(u));
    EXPECT_FALSE(SubsetIndex(0b0011, 4).is_subset_of(u));
    EXPECT_EQ(SubsetIndex(0, 0).complement().mask(), Mask{0});
}

TEST(SubsetIndex, Diameter) {
    EXPECT_EQ(SubsetIndex(0, 5).diameter(), 0U);
    EXPECT_EQ(SubsetIndex(0b00100, 5).diameter(), 0U);
    EXPECT_EQ(SubsetIndex::from_coordinates({2, 5}, 5).diameter(), 3U);
    EXPECT_EQ(mask_diameter(Mask{1} << 62 | 1), 62U);
}

TEST(SubsetIndex, RejectsOutOfRange) {
    EXPECT_THROW(SubsetIndex(0b1000, 3), DomainError);
    EXPECT_THROW(SubsetIndex::from_coordinates({0}, 3), DomainError);
    EXPECT_THROW(SubsetIndex::from_coordinates({4}, 3), DomainError);
    EXPECT_THROW(SubsetIndex(0, 64), CapacityError);
}

TEST(SubsetIndex, FullMask) {
    EXPECT_EQ(full_mask(0), Mask{0});
    EXPECT_EQ(full_mask(3), Mask{7});
    EXPECT_EQ(full_mask(64), ~Mask{0});
}

TEST(SubsetIndexProperty, CardinalityIsPopcountAndCoordinatesRoundTrip) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const unsigned d = 1 + static_cast<unsigned>(rng() % 63);
        const Mask m = rng() & full_mask(d);
        SubsetIndex u(m, d);
        EXPECT_EQ(u.cardinality(), popcount(m));
        EXPECT_EQ(SubsetIndex::from_coordinates(u.coordinates(), d), u);
        EXPECT_EQ(u.complement().complement(), u);
        EXPECT_EQ(u.cardinality() + u.complement().cardinality(), d);
    }
}

TEST(SubsetIndexProperty, SubmaskEnumerationVisitsEachSubsetOnce) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const Mask m = rng() & full_mask(12);
        std::set<Mask> seen;
        Mask prev = ~Mask{0};
        for_each_submask(m, [&](Mask s) {
            EXPECT_EQ(s & ~m, Mask{0});
            EXPECT_LT(s, prev);  // decreasing order
            prev = s;
            seen.insert(s);
        });
        EXPECT_EQ(seen.size(), std::size_t{1} << popcount(m));
        EXPECT_TRUE(seen.count(0));
        EXPECT_TRUE(seen.count(m));
    }
}
