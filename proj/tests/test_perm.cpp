#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "cminhash/core.hpp"
#include "cminhash/perm.hpp"
#include "cminhash/rng.hpp"

using namespace cminhash;

// Golden values below come from an independent Python transcription of the
// generator contract (splitmix64 seeding, xoshiro256**, Lemire bounded draws,
// descending Fisher-Yates).

TEST(Rng, GoldenStream) {
  Xoshiro256 rng(0);
  EXPECT_EQ(rng(), 0x99ec5f36cb75f2b4ULL);
  EXPECT_EQ(rng(), 0xbf6e1f784956452aULL);
  EXPECT_EQ(rng(), 0x1a5f849d4933e6e0ULL);
  EXPECT_EQ(derive_seed(1, 0), 0x9e0160293a33aaf7ULL);
  EXPECT_EQ(derive_seed(0x5eed, 3), 0x922bcf35287d3e32ULL);
}

TEST(RandomPermutation, GoldenAndDeterministic) {
  EXPECT_EQ(random_permutation(1, 123).map()[0], 0u);
  const auto p = random_permutation(5, 42);
  EXPECT_EQ(std::vector<index_t>(p.map().begin(), p.map().end()),
            (std::vector<index_t>{4, 3, 2, 1, 0}));
  EXPECT_EQ(p, random_permutation(5, 42));
  const auto q = random_permutation(10, 0xdeadbeef);
  EXPECT_EQ(std::vector<index_t>(q.map().begin(), q.map().end()),
            (std::vector<index_t>{9, 6, 0, 4, 8, 5, 1, 2, 3, 7}));
  EXPECT_THROW(random_permutation(0, 1), validation_error);
}

TEST(RandomPermutation, UniformOverS3) {
  constexpr int n = 60000;
  std::map<std::vector<index_t>, int> freq;
  for (int s = 0; s < n; ++s) {
    const auto p = random_permutation(3, derive_seed(0xC0FFEE, s));
    ++freq[std::vector<index_t>(p.map().begin(), p.map().end())];
  }
  ASSERT_EQ(freq.size(), 6u);
  const double p = 1.0 / 6.0, se = std::sqrt(p * (1 - p) / n);
  for (const auto& [perm, count] : freq) EXPECT_NEAR(static_cast<double>(count) / n, p, 4 * se);
}

TEST(ShiftedValue, WorkedExample) {
  // [3,1,2,4] one-based is [2,0,1,3] zero-based.
  const Permutation pi({2, 0, 1, 3});
  std::vector<index_t> k1, k2;
  for (index_t i = 0; i < 4; ++i) {
    k1.push_back(shifted_value(pi, 1, i));
    k2.push_back(shifted_value(pi, 2, i));
  }
  EXPECT_EQ(k1, (std::vector<index_t>{3, 2, 0, 1}));
  EXPECT_EQ(k2, (std::vector<index_t>{1, 3, 2, 0}));
  for (index_t i = 0; i < 4; ++i) {
    EXPECT_EQ(shifted_value(pi, 0, i), pi(i));
    EXPECT_EQ(shifted_value(pi, 4, i), pi(i));
  }
  EXPECT_THROW(shifted_value(pi, 1, 4), validation_error);
}

TEST(ShiftedValue, BijectionAndPeriod) {
  for (seed_t seed = 0; seed < 20; ++seed) {
    const index_t dim = 1 + static_cast<index_t>(seed * 7 % 23);
    const auto p = random_permutation(dim, seed);
    for (index_t k = 0; k < 2 * dim + 1; ++k) {
      std::vector<bool> seen(dim, false);
      for (index_t i = 0; i < dim; ++i) {
        const index_t y = shifted_value(p, k, i);
        EXPECT_FALSE(seen[y]);
        seen[y] = true;
        EXPECT_EQ(y, shifted_value(p, k + dim, i));
      }
    }
  }
}

TEST(Apply, Examples) {
  const BinaryVector v(3, {0});
  EXPECT_EQ(apply(Permutation::identity(3), v), v);
  EXPECT_EQ(apply(Permutation({2, 0, 1}), v), BinaryVector(3, {2}));
  EXPECT_THROW(apply(Permutation::identity(4), v), validation_error);
}

TEST(Apply, PreservesCountAndPairStatistics) {
  Xoshiro256 rng(99);
  for (int t = 0; t < 200; ++t) {
    const auto dim = static_cast<index_t>(2 + rng.bounded(30));
    std::vector<index_t> a, b;
    for (index_t i = 0; i < dim; ++i) {
      if (rng.bounded(2)) a.push_back(i);
      if (rng.bounded(3) == 0) b.push_back(i);
    }
    const BinaryVector v(dim, a), w(dim, b);
    const auto p = random_permutation(dim, rng());
    EXPECT_EQ(apply(p, v).count(), v.count());
    EXPECT_EQ(summarize_pair(apply(p, v), apply(p, w)), summarize_pair(v, w));
  }
}

TEST(PermutationDump, RoundTripAndErrors) {
  const auto p = random_permutation(12, 0xabc);
  std::stringstream ss;
  write_permutation_dump(ss, p, 0xabc);
  EXPECT_EQ(ss.str().substr(0, 29), "dim=12 seed=0000000000000abc\n");
  auto [q, seed] = read_permutation_dump(ss);
  EXPECT_EQ(q, p);
  EXPECT_EQ(seed, 0xabcu);

  std::stringstream bad("dim=3 seed=1\n0 1\n");
  EXPECT_THROW(read_permutation_dump(bad), validation_error);
  EXPECT_THROW(Permutation({0, 0, 1}), validation_error);
  EXPECT_THROW(parse_seed_hex("xyz"), validation_error);
}
