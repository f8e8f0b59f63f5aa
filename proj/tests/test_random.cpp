#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <set>
#include <vector>

#include "gpptest/random.hpp"

using namespace gpptest;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
            (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameSeedAndStreamReproduce) {
  RandomStream a(42, 7);
  RandomStream b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, StreamsAreDistinct) {
  std::set<std::uint64_t> first;
  for (std::uint64_t s = 0; s < 1000; ++s) first.insert(RandomStream(42, s).next_u64());
  EXPECT_EQ(first.size(), 1000u);
  EXPECT_NE(RandomStream(1, 0).next_u64(), RandomStream(2, 0).next_u64());
  EXPECT_NE(RandomStream(1, cell_stream_id(1, 0)).next_u64(), RandomStream(1, 0).next_u64());
}

TEST(RandomStream, CreationOrderDoesNotMatter) {
  RandomStream late(9, 3);
  std::vector<std::uint64_t> expected;
  for (int i = 0; i < 10; ++i) expected.push_back(late.next_u64());
  RandomStream other(9, 2);
  other.next_u64();
  RandomStream again(9, 3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(again.next_u64(), expected[i]);
}

TEST(RandomStream, UniformStaysInOpenInterval) {
  RandomStream rng(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, UniformPassesChiSquare) {
  constexpr int kBins = 100;
  constexpr int kDraws = 1'000'000;
  std::vector<int> counts(kBins, 0);
  RandomStream rng(2024, 5);
  for (int i = 0; i < kDraws; ++i) ++counts[static_cast<int>(rng.uniform() * kBins)];
  const double expected = static_cast<double>(kDraws) / kBins;
  double stat = 0.0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(kBins - 1);
  EXPECT_LT(stat, boost::math::quantile(dist, 0.999));
}

TEST(RandomStream, BelowIsBoundedAndCoversRange) {
  RandomStream rng(3, 1);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++seen[k];
  }
  for (int c : seen) EXPECT_NEAR(c, 10000, 500);
}

TEST(CellStreamId, DisjointRanges) {
  EXPECT_EQ(cell_stream_id(0, 5), 5u);
  EXPECT_EQ(cell_stream_id(1, 0), std::uint64_t{1} << 40);
  EXPECT_NE(cell_stream_id(1, 0), cell_stream_id(0, (std::uint64_t{1} << 40) - 1));
}
