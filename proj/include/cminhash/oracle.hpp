#pragma once

// Ground truth for the theory engine. The exhaustive routines walk every
// permutation in lexicographic order and accumulate exact integer sums; they
// share no code with theory.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <thread>
#include <vector>

#include "cminhash/core.hpp"
#include "cminhash/numeric.hpp"
#include "cminhash/rng.hpp"
#include "cminhash/sketch.hpp"
#include "cminhash/theory.hpp"

namespace cminhash {

struct ExactMoments {
  Rational mean;
  Rational variance;
};

struct McMoments {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;  // of the sample variance
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

namespace oracle_detail {

constexpr index_t kMaxSingle = 8;
constexpr index_t kMaxDouble = 6;

/// Sums over permutations of (#collisions among the first K shifts) and its
/// square, for every K = 1..k_max.
struct CollisionSums {
  std::vector<std::uint64_t> s1, s2;
  std::uint64_t count = 0;

  explicit CollisionSums(index_t k_max) : s1(k_max + 1, 0), s2(k_max + 1, 0) {}

  void merge(const CollisionSums& o) {
    for (std::size_t k = 0; k < s1.size(); ++k) {
      s1[k] += o.s1[k];
      s2[k] += o.s2[k];
    }
    count += o.count;
  }
};

/// Collision indicator of shift k: min over support of pi((i - k) mod D) agrees.
inline bool collides(std::span<const index_t> pi, std::span<const index_t> v,
                     std::span<const index_t> w, index_t k) {
  const auto D = static_cast<index_t>(pi.size());
  auto h = [&](std::span<const index_t> sup) {
    index_t best = D;
    for (index_t i : sup) best = std::min(best, pi[(i + D - k % D) % D]);
    return best;
  };
  return h(v) == h(w);
}

/// Walks permutations of {0..D-1} whose first entry is `first`.
inline void sweep_first(index_t D, index_t first, std::span<const index_t> v,
                        std::span<const index_t> w, index_t k_max, CollisionSums& acc) {
  std::vector<index_t> pi(D);
  pi[0] = first;
  for (index_t i = 0, j = 1; i < D; ++i)
    if (i != first) pi[j++] = i;
  do {
    std::uint64_t c = 0;
    for (index_t k = 1; k <= k_max; ++k) {
      c += collides(pi, v, w, k);
      acc.s1[k] += c;
      acc.s2[k] += c * c;
    }
    ++acc.count;
  } while (std::next_permutation(pi.begin() + 1, pi.end()));
}

inline CollisionSums sweep_all(index_t D, std::span<const index_t> v, std::span<const index_t> w,
                               index_t k_max) {
  CollisionSums acc(k_max);
  for (index_t first = 0; first < D; ++first) sweep_first(D, first, v, w, k_max, acc);
  return acc;
}

inline ExactMoments moments_from(const CollisionSums& acc, index_t K) {
  const BigInt n = acc.count;
  const Rational mean(BigInt(acc.s1[K]), n * K);
  const Rational second(BigInt(acc.s2[K]), n * K * K);
  return {mean, second - mean * mean};
}

inline void require_pair(const BinaryVector& v, const BinaryVector& w, index_t K, index_t max_dim) {
  if (v.dim() != w.dim()) throw validation_error("oracle: dimension mismatch");
  if (v.dim() > max_dim) throw validation_error("enumeration bound exceeded");
  if (K < 1 || K > v.dim()) throw validation_error("oracle: K must lie in [1, D]");
}

}  // namespace oracle_detail

/// Exact E and Var of the C-MinHash-(0,pi) estimator over all D! permutations, D <= 8.
inline ExactMoments exact_moments_0pi(const BinaryVector& v, const BinaryVector& w, index_t K) {
  oracle_detail::require_pair(v, w, K, oracle_detail::kMaxSingle);
  const auto acc = oracle_detail::sweep_all(v.dim(), v.nonzeros(), w.nonzeros(), K);
  return oracle_detail::moments_from(acc, K);
}

/// Moments for every K = 1..k_max from one sweep; element K-1 holds K.
inline std::vector<ExactMoments> exact_moments_0pi_all(const BinaryVector& v, const BinaryVector& w,
                                                       index_t k_max) {
  oracle_detail::require_pair(v, w, k_max, oracle_detail::kMaxSingle);
  const auto acc = oracle_detail::sweep_all(v.dim(), v.nonzeros(), w.nonzeros(), k_max);
  std::vector<ExactMoments> out;
  for (index_t K = 1; K <= k_max; ++K) out.push_back(oracle_detail::moments_from(acc, K));
  return out;
}

/// Moments of C-MinHash-(sigma,pi) for every K = 1..k_max over all D!^2
/// (sigma, pi) pairs, D <= 6. The sigma space is split by sigma(0) across
/// tasks; integer partial sums make the result independent of scheduling.
inline std::vector<ExactMoments> exact_moments_sigma_pi_all(const BinaryVector& v,
                                                            const BinaryVector& w, index_t k_max,
                                                            unsigned threads = 0) {
  oracle_detail::require_pair(v, w, k_max, oracle_detail::kMaxDouble);
  const index_t D = v.dim();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  auto stripe = [&](index_t first) {
    oracle_detail::CollisionSums acc(k_max);
    std::vector<index_t> sigma(D);
    sigma[0] = first;
    for (index_t i = 0, j = 1; i < D; ++i)
      if (i != first) sigma[j++] = i;
    std::vector<index_t> sv, sw;
    do {
      sv.clear();
      sw.clear();
      for (index_t i : v.nonzeros()) sv.push_back(sigma[i]);
      for (index_t i : w.nonzeros()) sw.push_back(sigma[i]);
      acc.merge(oracle_detail::sweep_all(D, sv, sw, k_max));
    } while (std::next_permutation(sigma.begin() + 1, sigma.end()));
    return acc;
  };

  oracle_detail::CollisionSums total(k_max);
  if (threads == 1) {
    for (index_t first = 0; first < D; ++first) total.merge(stripe(first));
  } else {
    std::vector<std::future<oracle_detail::CollisionSums>> parts;
    for (index_t first = 0; first < D; ++first)
      parts.push_back(std::async(std::launch::async, stripe, first));
    for (auto& p : parts) total.merge(p.get());
  }
  std::vector<ExactMoments> out;
  for (index_t K = 1; K <= k_max; ++K) out.push_back(oracle_detail::moments_from(total, K));
  return out;
}

inline ExactMoments exact_moments_sigma_pi(const BinaryVector& v, const BinaryVector& w, index_t K) {
  return exact_moments_sigma_pi_all(v, w, K).back();
}

/// Exact P[hash s and hash s+delta both collide] over all D! permutations, D <= 8.
inline Rational exact_joint_collision(const BinaryVector& v, const BinaryVector& w, index_t delta) {
  if (v.dim() != w.dim()) throw validation_error("oracle: dimension mismatch");
  const index_t D = v.dim();
  if (D > oracle_detail::kMaxSingle) throw validation_error("enumeration bound exceeded");
  if (delta < 1 || delta >= D) throw validation_error("oracle: delta must lie in [1, D-1]");
  std::vector<index_t> pi(D);
  std::iota(pi.begin(), pi.end(), index_t{0});
  std::uint64_t hits = 0, total = 0;
  do {
    hits += oracle_detail::collides(pi, v.nonzeros(), w.nonzeros(), 1) &&
            oracle_detail::collides(pi, v.nonzeros(), w.nonzeros(), 1 + delta);
    ++total;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return Rational(BigInt(hits), BigInt(total));
}

// ---------------------------------------------------------------------------
// Monte-Carlo

/// Per-repetition estimates of J for each K in `ks` (ascending, prefix reuse):
/// repetition r uses the master seed derive_seed(master_seed, r), and the
/// estimate for K uses the first K hashes of one K_max-long signature.
/// Result layout: [r * ks.size() + j].
inline std::vector<double> estimator_draws(Scheme scheme, const BinaryVector& v,
                                           const BinaryVector& w, std::span<const index_t> ks,
                                           std::size_t reps, seed_t master_seed) {
  if (ks.empty()) throw validation_error("no K values");
  const index_t k_max = *std::max_element(ks.begin(), ks.end());
  std::vector<double> out(reps * ks.size());
  std::vector<index_t> hv(k_max), hw(k_max), prefix(k_max + 1);
  for (std::size_t r = 0; r < reps; ++r) {
    const Sketcher sk(scheme, v.dim(), k_max, derive_seed(master_seed, r));
    sk.sign_into(v, hv);
    sk.sign_into(w, hw);
    prefix[0] = 0;
    for (index_t k = 0; k < k_max; ++k) prefix[k + 1] = prefix[k] + (hv[k] == hw[k]);
    for (std::size_t j = 0; j < ks.size(); ++j)
      out[r * ks.size() + j] = static_cast<double>(prefix[ks[j]]) / ks[j];
  }
  return out;
}

/// Sample mean, unbiased sample variance and the standard error of that variance.
inline McMoments sample_moments(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw validation_error("need at least 2 samples");
  CompensatedSum s;
  for (double v : x) s.add(v);
  const double mean = s.value() / n;
  CompensatedSum m2, m4;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2.add(d);
    m4.add(d * d);
  }
  const double var = m2.value() / (n - 1);
  const double mu2 = m2.value() / n, mu4 = m4.value() / n;
  // Var(s^2) ~ (mu4 - mu2^2 (n-3)/(n-1)) / n
  const double var_of_var = std::max(0.0, (mu4 - mu2 * mu2 * (n - 3) / (n - 1)) / n);
  return {mean, var, std::sqrt(var_of_var)};
}

inline McMoments mc_moments(Scheme scheme, const BinaryVector& v, const BinaryVector& w, index_t K,
                            std::size_t reps, seed_t master_seed) {
  if (reps < 2) throw validation_error("mc_moments: reps must be >= 2");
  if (!summarize_pair(v, w).jaccard_defined())
    throw validation_error("degenerate pair: f = 0 (both vectors empty)");
  const index_t ks[] = {K};
  const auto draws = estimator_draws(scheme, v, w, ks, reps, master_seed);
  return sample_moments(draws);
}

/// Monte-Carlo E~: average of Theta(1) over uniformly shuffled location vectors.
inline McEstimate mc_e_tilde(index_t D, index_t f, index_t a, std::size_t samples, seed_t master_seed) {
  if (!(a <= f && f <= D && f > 0 && D >= 2))
    throw validation_error("mc_e_tilde: requires 0 <= a <= f <= D, f > 0, D >= 2");
  if (samples < 2) throw validation_error("mc_e_tilde: samples must be >= 2");
  std::vector<Symbol> sym(D, Symbol::BothZero);
  std::fill_n(sym.begin(), a, Symbol::Match);
  std::fill(sym.begin() + a, sym.begin() + f, Symbol::Mismatch);
  Xoshiro256 rng(master_seed);
  std::vector<double> th(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    fisher_yates(std::span<Symbol>(sym), rng);
    th[i] = theta(count_sets(LocationVector(sym), 1), f, a);
  }
  const McMoments m = sample_moments(th);
  return {m.mean, std::sqrt(m.variance / static_cast<double>(samples))};
}

}  // namespace cminhash
