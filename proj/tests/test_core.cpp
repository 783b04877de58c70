#include <gtest/gtest.h>

#include "cminhash/core.hpp"
#include "cminhash/rng.hpp"

using namespace cminhash;

namespace {

BinaryVector bv(index_t dim, std::vector<index_t> idx) { return BinaryVector(dim, std::move(idx)); }

BinaryVector random_vector(index_t dim, Xoshiro256& rng) {
  std::vector<index_t> idx;
  for (index_t i = 0; i < dim; ++i)
    if (rng.bounded(3) == 0) idx.push_back(i);
  return bv(dim, idx);
}

}  // namespace

TEST(BinaryVector, RejectsBadInput) {
  EXPECT_THROW(bv(0, {}), validation_error);
  EXPECT_THROW(bv(4, {4}), validation_error);
  EXPECT_THROW(bv(4, {2, 1}), validation_error);
  EXPECT_THROW(bv(4, {1, 1}), validation_error);
  EXPECT_THROW(BinaryVector::from_unsorted(4, {3, 1, 3}), validation_error);
  EXPECT_EQ(BinaryVector::from_unsorted(4, {3, 0, 1}), bv(4, {0, 1, 3}));
  EXPECT_TRUE(bv(3, {}).empty());
}

TEST(SummarizePair, Examples) {
  const auto s1 = summarize_pair(bv(4, {0, 2}), bv(4, {0, 2}));
  EXPECT_EQ(s1.intersection, 2u);
  EXPECT_EQ(s1.union_size, 2u);
  EXPECT_DOUBLE_EQ(s1.jaccard(), 1.0);

  const auto s2 = summarize_pair(bv(4, {0}), bv(4, {1}));
  EXPECT_EQ(s2.intersection, 0u);
  EXPECT_EQ(s2.union_size, 2u);
  EXPECT_DOUBLE_EQ(s2.jaccard(), 0.0);

  const auto s3 = summarize_pair(bv(4, {0, 1, 3}), bv(4, {0, 3}));
  EXPECT_EQ(s3.intersection, 2u);
  EXPECT_EQ(s3.union_size, 3u);
  EXPECT_DOUBLE_EQ(s3.jaccard(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s3.jaccard_tilde(), 0.5);
}

TEST(SummarizePair, Errors) {
  EXPECT_THROW(summarize_pair(bv(4, {0}), bv(5, {0})), validation_error);
  const auto empty = summarize_pair(bv(4, {}), bv(4, {}));
  EXPECT_FALSE(empty.jaccard_defined());
  EXPECT_THROW((void)empty.jaccard(), validation_error);
  EXPECT_FALSE(summarize_pair(bv(4, {1}), bv(4, {1})).jaccard_tilde_defined());
}

TEST(LocationVector, Examples) {
  EXPECT_EQ(location_vector(bv(4, {0, 3}), bv(4, {0, 1})).to_string(), "Ox-x");
  EXPECT_EQ(location_vector(bv(3, {}), bv(3, {})).to_string(), "---");
  EXPECT_EQ(location_vector(bv(4, {0, 1, 3}), bv(4, {0, 3})).to_string(), "Ox-O");
  EXPECT_THROW(location_vector(bv(4, {}), bv(3, {})), validation_error);
}

TEST(LocationVector, CircularIndexingAndParse) {
  const auto x = LocationVector::parse("[O, x, -, O]");
  EXPECT_EQ(x.dim(), 4u);
  EXPECT_EQ(x[4], Symbol::Match);
  EXPECT_EQ(x[5], Symbol::Mismatch);
  EXPECT_EQ(x[6], Symbol::BothZero);
  EXPECT_THROW(LocationVector::parse("Oq"), validation_error);
  EXPECT_THROW(LocationVector::parse(""), validation_error);
}

TEST(PairProperties, CountsSymmetryAndRoundTrip) {
  Xoshiro256 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto dim = static_cast<index_t>(1 + rng.bounded(40));
    const auto v = random_vector(dim, rng), w = random_vector(dim, rng);
    const auto s = summarize_pair(v, w);
    EXPECT_EQ(s, summarize_pair(w, v));
    const auto x = location_vector(v, w);
    EXPECT_EQ(x.count(Symbol::Match), s.intersection);
    EXPECT_EQ(x.count(Symbol::Mismatch), s.union_size - s.intersection);
    EXPECT_EQ(x.count(Symbol::BothZero), dim - s.union_size);
    EXPECT_EQ(x.summary(), s);
    const auto [v2, w2] = pair_from_location(x);
    EXPECT_EQ(location_vector(v2, w2), x);
  }
}

TEST(SetSizes, ConstraintCheck) {
  SetSizes s;
  s.l0 = 1; s.l1 = 1; s.h2 = 1; s.g0 = 1;
  EXPECT_TRUE(s.satisfies_constraints(4, 3, 2));
  s.g0 = 0;
  EXPECT_FALSE(s.satisfies_constraints(4, 3, 2));
}
