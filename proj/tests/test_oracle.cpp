#include <gtest/gtest.h>

#include <cmath>

#include "cminhash/oracle.hpp"

using namespace cminhash;

namespace {

std::pair<BinaryVector, BinaryVector> pair_of(const char* loc) {
  return pair_from_location(LocationVector::parse(loc));
}

}  // namespace

TEST(ExactMoments0Pi, SingleHashIsBernoulli) {
  const auto [v, w] = pair_of("OxO-x");
  const auto m = exact_moments_0pi(v, w, 1);
  EXPECT_EQ(m.mean, Rational(2, 4));
  EXPECT_EQ(m.variance, Rational(1, 4));
}

TEST(ExactMoments0Pi, UnbiasedForEveryK) {
  const auto [v, w] = pair_of("Ox-Ox--");
  const auto all = exact_moments_0pi_all(v, w, 7);
  ASSERT_EQ(all.size(), 7u);
  for (const auto& m : all) EXPECT_EQ(m.mean, Rational(2, 4));
}

TEST(ExactMoments0Pi, IdenticalVectorsHaveZeroVariance) {
  const BinaryVector v(6, {0, 2, 3});
  const auto m = exact_moments_0pi(v, v, 4);
  EXPECT_EQ(m.mean, Rational(1));
  EXPECT_EQ(m.variance, Rational(0));
}

TEST(ExactMoments0Pi, DisjointVectorsNeverCollide) {
  const BinaryVector v(5, {0, 1}), w(5, {3});
  const auto m = exact_moments_0pi(v, w, 5);
  EXPECT_EQ(m.mean, Rational(0));
  EXPECT_EQ(m.variance, Rational(0));
}

TEST(ExactMoments0Pi, HandCountedTwoHashCase) {
  // D = 3, v = {0}, w = {0, 1}: J = 1/2. Hash k collides iff pi(-k) < pi(1-k).
  // With K = 2 the shifts compare pi(2) < pi(0) and pi(1) < pi(2); both hold for
  // 1 of 6 orders, exactly one for 4, neither for 1. E[C^2] = (4 + 4) / 6.
  const BinaryVector v(3, {0}), w(3, {0, 1});
  const auto m = exact_moments_0pi(v, w, 2);
  EXPECT_EQ(m.mean, Rational(1, 2));
  EXPECT_EQ(m.variance, Rational(8, 6 * 4) - Rational(1, 4));
}

TEST(ExactMoments, Bounds) {
  const BinaryVector v9(9, {0}), w9(9, {1});
  EXPECT_THROW(exact_moments_0pi(v9, w9, 2), validation_error);
  const BinaryVector v7(7, {0}), w7(7, {1});
  EXPECT_THROW(exact_moments_sigma_pi(v7, w7, 2), validation_error);
  const BinaryVector v4(4, {0}), w4(4, {1});
  EXPECT_THROW(exact_moments_0pi(v4, w4, 0), validation_error);
  EXPECT_THROW(exact_moments_0pi(v4, w4, 5), validation_error);
  EXPECT_THROW(exact_moments_0pi(v4, BinaryVector(5, {1}), 2), validation_error);
  try {
    exact_moments_0pi(v9, w9, 2);
  } catch (const validation_error& e) {
    EXPECT_NE(std::string(e.what()).find("enumeration bound exceeded"), std::string::npos);
  }
}

TEST(ExactMomentsSigmaPi, ThreadedMatchesSerial) {
  const auto [v, w] = pair_of("Ox-xO");
  const auto one = exact_moments_sigma_pi_all(v, w, 5, 1);
  const auto many = exact_moments_sigma_pi_all(v, w, 5, 4);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].mean, many[k].mean);
    EXPECT_EQ(one[k].variance, many[k].variance);
  }
  EXPECT_EQ(one[0].variance, Rational(1, 4));
}

TEST(ExactMomentsSigmaPi, InvariantToLocationPattern) {
  // sigma makes the result depend on (D, f, a) only.
  const auto [v1, w1] = pair_of("OOxx--");
  const auto [v2, w2] = pair_of("x-O-xO");
  const auto a = exact_moments_sigma_pi_all(v1, w1, 6, 1);
  const auto b = exact_moments_sigma_pi_all(v2, w2, 6, 1);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].variance, b[k].variance);
}

TEST(ExactJointCollision, Basics) {
  const auto [v, w] = pair_of("Ox-O");
  EXPECT_EQ(exact_joint_collision(v, w, 1), Rational(5, 12));
  const BinaryVector same(4, {1, 2});
  EXPECT_EQ(exact_joint_collision(same, same, 2), Rational(1));
  EXPECT_THROW(exact_joint_collision(v, w, 0), validation_error);
  EXPECT_THROW(exact_joint_collision(v, w, 4), validation_error);
}

TEST(SampleMoments, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto m = sample_moments(x);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
  EXPECT_GT(m.std_error, 0.0);
  EXPECT_THROW(sample_moments(std::vector<double>{1.0}), validation_error);
}

TEST(EstimatorDraws, PrefixMatchesDirectSketch) {
  const auto [v, w] = pair_of("OOx-xO-x-O");
  const index_t ks[] = {2, 5, 10};
  const auto draws = estimator_draws(Scheme::CMinHashSigmaPi, v, w, ks, 3, 77);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t j = 0; j < 3; ++j) {
      const Sketcher sk(Scheme::CMinHashSigmaPi, 10, ks[j], derive_seed(77, r));
      EXPECT_DOUBLE_EQ(draws[r * 3 + j], estimate_jaccard(sk.sign(v), sk.sign(w)));
    }
}

TEST(McMoments, IdenticalVectorsGiveZero) {
  const BinaryVector v(50, {1, 4, 9, 16, 25, 36, 49});
  for (Scheme s : {Scheme::MinHash, Scheme::CMinHash0Pi, Scheme::CMinHashSigmaPi}) {
    const auto m = mc_moments(s, v, v, 10, 100, 5);
    EXPECT_EQ(m.mean, 1.0);
    EXPECT_EQ(m.variance, 0.0);
  }
  EXPECT_THROW(mc_moments(Scheme::MinHash, BinaryVector(5, {}), BinaryVector(5, {}), 2, 10, 0), validation_error);
}

TEST(McMoments, MatchesExactOracle) {
  const auto [v, w] = pair_of("OxxO-x-");
  const double exact = to_double(exact_moments_0pi(v, w, 3).variance);
  const auto m = mc_moments(Scheme::CMinHash0Pi, v, w, 3, 40000, 9);
  EXPECT_NEAR(m.variance, exact, 4 * m.std_error);
}

TEST(McETilde, Cases) {
  EXPECT_EQ(mc_e_tilde(20, 6, 6, 50, 1).estimate, 1.0);
  const auto full = mc_e_tilde(12, 12, 5, 20000, 2);
  EXPECT_NEAR(full.estimate, 5.0 * 4.0 / (12.0 * 11.0), 4 * full.std_error);
  const auto est = mc_e_tilde(128, 32, 8, 100000, 0xC0FFEE);
  EXPECT_NEAR(est.estimate, e_tilde(128, 32, 8), 4 * est.std_error);
  EXPECT_THROW(mc_e_tilde(10, 11, 2, 10, 0), validation_error);
  EXPECT_THROW(mc_e_tilde(10, 5, 2, 1, 0), validation_error);
}
