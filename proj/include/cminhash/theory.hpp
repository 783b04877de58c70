#pragma once

// Exact variance theory for MinHash and the two circulant variants.
//
// Notation: a (D,f,a) pair has dimension D, union size f and intersection a.
// Theta(delta) is the joint collision probability of two circulant hashes
// whose shifts differ by delta; E~ is its expectation over a uniformly random
// initial permutation sigma. E~ is the same for every delta coprime to D; a
// shift with g = gcd(delta, D) > 1 splits the pairs (i, i + delta) into g
// cycles of length D/g and has its own expectation, see e_tilde_shift.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cminhash/core.hpp"
#include "cminhash/numeric.hpp"

namespace cminhash {

enum class Method : std::uint8_t { LogSpace, ExactRational };

inline std::string method_name(Method m) {
  return m == Method::LogSpace ? "log-space" : "exact-rational";
}

struct VarianceReport {
  Scheme scheme = Scheme::MinHash;
  index_t D = 0, f = 0, a = 0, K = 0;
  double variance = 0.0;
  std::optional<double> e_tilde;    // C-MinHash-(sigma,pi), interior a only
  std::vector<double> theta_series;  // C-MinHash-(0,pi): Theta(1..K-1)
  Method method = Method::LogSpace;
  std::optional<Rational> exact_variance;  // set when method == ExactRational
  std::optional<Rational> exact_e_tilde;
};

// ---------------------------------------------------------------------------
// Set counting and the joint collision probability

inline SetSizes count_sets(const LocationVector& x, index_t delta) {
  const index_t D = x.dim();
  if (delta < 1 || delta >= D)
    throw validation_error("count_sets: delta must lie in [1, D-1], got " + std::to_string(delta));
  SetSizes s;
  s.delta = delta;
  index_t* cell[3][3] = {{&s.l0, &s.l1, &s.l2}, {&s.h0, &s.h1, &s.h2}, {&s.g0, &s.g1, &s.g2}};
  for (index_t i = 0; i < D; ++i)
    ++*cell[static_cast<int>(x[i])][static_cast<int>(x[i + delta])];
  return s;
}

namespace detail {
inline void require_union(index_t f) {
  if (f == 0) throw validation_error("degenerate pair: f = 0 (both vectors empty)");
}
}  // namespace detail

/// (l0 + (g0 + l2) J) / (f + g0 + g1), J = a/f.
inline double theta(const SetSizes& s, index_t f, index_t a) {
  detail::require_union(f);
  const double J = static_cast<double>(a) / f;
  return (s.l0 + (static_cast<double>(s.g0) + s.l2) * J) / (static_cast<double>(f) + s.g0 + s.g1);
}

inline Rational theta_exact(const SetSizes& s, index_t f, index_t a) {
  detail::require_union(f);
  return Rational(BigInt(s.l0) * f + BigInt(s.g0 + s.l2) * a, BigInt(f) * (f + s.g0 + s.g1));
}

// ---------------------------------------------------------------------------
// MinHash

inline double variance_mh(double J, index_t K) {
  if (!(J >= 0.0 && J <= 1.0)) throw validation_error("variance_mh: J must lie in [0, 1]");
  if (K < 1) throw validation_error("variance_mh: K must be >= 1");
  return J * (1.0 - J) / K;
}

inline Rational variance_mh_exact(index_t f, index_t a, index_t K) {
  detail::require_union(f);
  return Rational(BigInt(a) * (f - a), BigInt(f) * f * K);
}

// ---------------------------------------------------------------------------
// C-MinHash-(0, pi): location dependent

inline VarianceReport variance_0pi(const LocationVector& x, index_t K,
                                   Method method = Method::LogSpace) {
  const PairSummary ps = x.summary();
  detail::require_union(ps.union_size);
  const index_t D = x.dim(), f = ps.union_size, a = ps.intersection;
  if (K < 1 || K > D)
    throw validation_error("variance_0pi: K must lie in [1, D], got " + std::to_string(K));

  VarianceReport r{Scheme::CMinHash0Pi, D, f, a, K, 0.0, {}, {}, method, {}, {}};
  r.method = method;
  r.theta_series.reserve(K > 0 ? K - 1 : 0);

  if (method == Method::ExactRational) {
    const Rational J(a, f);
    Rational cross = 0;
    for (index_t d = 1; d < K; ++d) {
      const Rational th = theta_exact(count_sets(x, d), f, a);
      r.theta_series.push_back(to_double(th));
      cross += th * (K - d);
    }
    const Rational var = J / K + 2 * cross / (BigInt(K) * K) - J * J;
    r.exact_variance = var;
    r.variance = to_double(var);
    return r;
  }

  const double J = static_cast<double>(a) / f;
  CompensatedSum cross;
  for (index_t d = 1; d < K; ++d) {
    const double th = theta(count_sets(x, d), f, a);
    r.theta_series.push_back(th);
    cross.add(th * (K - d));
  }
  // Sum over s = 2..K of (s-1) Theta_{K-s+1} equals sum over d = 1..K-1 of (K-d) Theta_d.
  r.variance = std::max(0.0, J / K + 2.0 * cross.value() / (static_cast<double>(K) * K) - J * J);
  return r;
}

// ---------------------------------------------------------------------------
// Joint distribution of the set sizes under a random initial permutation

struct PmfTerm {
  index_t s = 0, n1 = 0, n2 = 0, n3 = 0, n4 = 0;
  double probability = 0.0;
  std::optional<Rational> exact_probability;
};

struct PmfEntry {
  index_t l0 = 0, l1 = 0, l2 = 0, g0 = 0, g1 = 0;
  double probability = 0.0;
  std::optional<Rational> exact_probability;
  std::vector<PmfTerm> s_terms;

  /// Conditional joint collision probability given these set sizes.
  double weight(index_t f, index_t a) const {
    return (static_cast<double>(l0) * f + static_cast<double>(a) * (g0 + l2)) /
           (static_cast<double>(f) * (f + g0 + g1));
  }
};

namespace detail {

inline void require_interior(index_t D, index_t f, index_t a, const char* who) {
  if (!(a > 0 && a < f && f <= D))
    throw validation_error(std::string(who) + ": requires 0 < a < f <= D, got (D,f,a) = (" +
                           std::to_string(D) + "," + std::to_string(f) + "," +
                           std::to_string(a) + ")");
}

/// Visits every non-vanishing term of the two-step placement pmf.
///
/// Step 1 places the x and - symbols on the circle; s is the number of (-,-)
/// neighbours and m = D-f-s the number of (-,x) and of (x,-) neighbours, so
/// c4 = f-a-m gaps lie between two x's. Step 2 drops the a O's into the D-a
/// gaps; n1..n4 count occupied gaps of each kind.
template <typename Visit>
void for_each_pmf_term(std::int64_t D, std::int64_t f, std::int64_t a, Visit&& visit) {
  const std::int64_t s_lo = std::max<std::int64_t>(0, D - 2 * f + a);
  for (std::int64_t s = s_lo; s <= D - f - 1; ++s) {
    const std::int64_t m = D - f - s;
    const std::int64_t c4 = f - a - m;
    if (c4 < 0) continue;
    for (std::int64_t n1 = 0; n1 <= std::min(s, a); ++n1)
      for (std::int64_t n2 = 0; n2 <= std::min(m, a - n1); ++n2)
        for (std::int64_t n3 = 0; n3 <= std::min(m, a - n1 - n2); ++n3)
          for (std::int64_t n4 = 0; n4 <= std::min(c4, a - n1 - n2 - n3); ++n4) {
            if (n1 + n2 + n3 + n4 == 0) continue;
            visit(s, m, c4, n1, n2, n3, n4);
          }
  }
}

}  // namespace detail

/// Joint pmf of (|L0|,|L1|,|L2|,|G0|,|G1|) at delta = 1 under a random sigma,
/// requiring 0 < a < f < D. Entries are sorted by (l0, l2, g0, g1); each carries
/// its per-s decomposition.
inline std::vector<PmfEntry> joint_pmf(index_t D, index_t f, index_t a,
                                       Method method = Method::LogSpace) {
  detail::require_interior(D, f, a, "joint_pmf");
  if (D == f) throw validation_error("joint_pmf: requires D > f (no both-zero coordinates when D = f)");

  const LogFactorials lf(D);
  const double log_den = lf.log_binom(D - a - 1, D - f - 1) + lf.log_binom(D - 1, a);
  const BigInt exact_den = method == Method::ExactRational
                               ? exact_binom(D - a - 1, D - f - 1) * exact_binom(D - 1, a)
                               : BigInt(1);

  std::map<std::tuple<index_t, index_t, index_t, index_t>, PmfEntry> boxes;
  detail::for_each_pmf_term(D, f, a, [&](auto s, auto m, auto c4, auto n1, auto n2, auto n3, auto n4) {
    const std::int64_t n = n1 + n2 + n3 + n4;
    const auto l0 = static_cast<index_t>(a - n);
    const auto l1 = static_cast<index_t>(n2 + n4);
    const auto l2 = static_cast<index_t>(n1 + n3);
    const auto g0 = static_cast<index_t>(n1 + n2);
    const auto g1 = static_cast<index_t>(m - n2);

    PmfTerm t{static_cast<index_t>(s), static_cast<index_t>(n1), static_cast<index_t>(n2),
              static_cast<index_t>(n3), static_cast<index_t>(n4), 0.0, {}};
    t.probability = std::exp(lf.log_binom(D - f, s) + lf.log_binom(f - a - 1, m - 1) +
                             lf.log_binom(s, n1) + lf.log_binom(m, n2) + lf.log_binom(m, n3) +
                             lf.log_binom(c4, n4) + lf.log_binom(a - 1, n - 1) - log_den);
    if (method == Method::ExactRational) {
      BigInt num = exact_binom(D - f, s) * exact_binom(f - a - 1, m - 1);
      num *= exact_binom(s, n1);
      num *= exact_binom(m, n2);
      num *= exact_binom(m, n3);
      num *= exact_binom(c4, n4);
      num *= exact_binom(a - 1, n - 1);
      t.exact_probability = Rational(num, exact_den);
    }

    auto [it, inserted] = boxes.try_emplace({l0, l2, g0, g1});
    PmfEntry& e = it->second;
    if (inserted) {
      e.l0 = l0; e.l1 = l1; e.l2 = l2; e.g0 = g0; e.g1 = g1;
      if (method == Method::ExactRational) e.exact_probability = Rational(0);
    }
    e.s_terms.push_back(t);
  });

  std::vector<PmfEntry> out;
  out.reserve(boxes.size());
  for (auto& [key, e] : boxes) {
    CompensatedSum p;
    for (const auto& t : e.s_terms) {
      p.add(t.probability);
      if (t.exact_probability) *e.exact_probability += *t.exact_probability;
    }
    e.probability = p.value();
    if (e.exact_probability) e.probability = to_double(*e.exact_probability);
    if (e.probability > 0.0 || (e.exact_probability && *e.exact_probability != 0))
      out.push_back(std::move(e));
  }
  return out;
}

/// E~ in exact rationals. D = f uses a(a-1) / (f(f-1)); otherwise the full
/// term-by-term enumeration of the placement pmf over a common denominator.
inline Rational e_tilde_exact(index_t D, index_t f, index_t a) {
  detail::require_interior(D, f, a, "e_tilde");
  if (D == f) return Rational(BigInt(a) * (a - 1), BigInt(f) * (f - 1));

  // Accumulate numerators grouped by the denominator q = f + g0 + g1.
  std::vector<BigInt> by_q(std::size_t{2} * D + 1);
  detail::for_each_pmf_term(D, f, a, [&](auto s, auto m, auto c4, auto n1, auto n2, auto n3, auto n4) {
    const std::int64_t n = n1 + n2 + n3 + n4;
    const std::int64_t l0 = a - n, l2 = n1 + n3, g0 = n1 + n2, g1 = m - n2;
    BigInt num = exact_binom(D - f, s) * exact_binom(f - a - 1, m - 1);
    num *= exact_binom(s, n1);
    num *= exact_binom(m, n2);
    num *= exact_binom(m, n3);
    num *= exact_binom(c4, n4);
    num *= exact_binom(a - 1, n - 1);
    num *= BigInt(l0 * f + a * (g0 + l2));
    by_q[static_cast<std::size_t>(f + g0 + g1)] += num;
  });
  Rational total = 0;
  for (std::size_t q = 1; q < by_q.size(); ++q)
    if (!by_q[q].is_zero()) total += Rational(by_q[q], BigInt(q));
  const BigInt den = exact_binom(D - a - 1, D - f - 1) * exact_binom(D - 1, a) * f;
  return total / den;
}

/// E~ in log space.
///
/// Summing the placement pmf over (n2, n3) with n2 + n3 = t, and over n4, via
/// Vandermonde's identity leaves a double sum per s:
///   E~ = sum_s P(s) / C(D-1, a) * sum_{n1, t} C(s, n1) C(2m, t)
///        * [f (a-1) C(c4+a-2, a-n1-t-1) + a (2 n1 + t) C(c4+a-1, a-n1-t)]
///        / (f (f + n1 + m))
/// with P(s) = C(D-f, s) C(f-a-1, m-1) / C(D-a-1, D-f-1). Every term is non-negative.
inline double e_tilde(index_t D_, index_t f_, index_t a_) {
  detail::require_interior(D_, f_, a_, "e_tilde");
  const std::int64_t D = D_, f = f_, a = a_;
  if (D == f) return static_cast<double>(a) * (a - 1) / (static_cast<double>(f) * (f - 1));

  const LogFactorials lf(D + a);
  const double log_norm = lf.log_binom(D - a - 1, D - f - 1) + lf.log_binom(D - 1, a);
  const double log_f = std::log(static_cast<double>(f));
  LogSumExp sum;
  const std::int64_t s_lo = std::max<std::int64_t>(0, D - 2 * f + a);
  for (std::int64_t s = s_lo; s <= D - f - 1; ++s) {
    const std::int64_t m = D - f - s;
    const std::int64_t c4 = f - a - m;
    if (c4 < 0) continue;
    const double log_ps = lf.log_binom(D - f, s) + lf.log_binom(f - a - 1, m - 1) - log_norm;
    for (std::int64_t n1 = 0; n1 <= std::min(s, a); ++n1) {
      const double base = log_ps + lf.log_binom(s, n1) - log_f -
                          std::log(static_cast<double>(f + n1 + m));
      for (std::int64_t t = 0; t <= std::min(2 * m, a - n1); ++t) {
        const double lt = base + lf.log_binom(2 * m, t);
        if (a > 1)
          sum.add(lt + log_f + std::log(static_cast<double>(a - 1)) +
                  lf.log_binom(c4 + a - 2, a - n1 - t - 1));
        if (2 * n1 + t > 0)
          sum.add(lt + std::log(static_cast<double>(a * (2 * n1 + t))) +
                  lf.log_binom(c4 + a - 1, a - n1 - t));
      }
    }
  }
  return sum.value();
}

// ---------------------------------------------------------------------------
// E~ for an arbitrary shift
//
// Let R count the pairs (x_i, x_{i+delta}) of the form (-, nonzero). Given the
// positions of the nonzeros, their O/x labels are a uniform shuffle, so
//   E[l0 | R] = (f - R) A,  E[g0 + l2 | R] = 2 R a / f,  A = a(a-1) / (f(f-1)),
// and with B = J^2 the expectation of Theta collapses to
//   E~_delta = 2B - A + 2 f (A - B) E[1 / (f + R)].
// R only depends on how the f nonzeros fall on the g = gcd(delta, D) cycles
// of length L = D/g. On one cycle, j nonzeros (0 < j < L) forming r runs can
// be placed in (L/r) C(j-1, r-1) C(L-j-1, r-1) ways.

namespace detail {

inline void require_shift(index_t D, index_t delta) {
  if (delta < 1 || delta >= D)
    throw validation_error("delta must lie in [1, D-1], got " + std::to_string(delta));
}

/// Placements of f nonzeros on g cycles of length D/g, counted by R.
inline std::vector<BigInt> run_counts(index_t D, index_t f, index_t g) {
  const index_t L = D / g, r_max = std::min(f, D - f);
  using Table = std::vector<std::vector<BigInt>>;  // [j][R]
  Table cycle(std::min(L, f) + 1, std::vector<BigInt>(r_max + 1));
  cycle[0][0] = 1;
  if (L <= f) cycle[L][0] += 1;
  for (index_t j = 1; j < std::min(L, f + 1); ++j)
    for (index_t r = 1; r <= std::min({j, L - j, r_max}); ++r)
      cycle[j][r] = exact_binom(j - 1, r - 1) * exact_binom(L - j - 1, r - 1) * L / r;

  Table acc(f + 1, std::vector<BigInt>(r_max + 1));
  acc[0][0] = 1;
  for (index_t c = 0; c < g; ++c) {
    Table next(f + 1, std::vector<BigInt>(r_max + 1));
    for (index_t j0 = 0; j0 <= f; ++j0)
      for (index_t r0 = 0; r0 <= r_max; ++r0) {
        if (acc[j0][r0].is_zero()) continue;
        for (index_t j = 0; j < cycle.size() && j0 + j <= f; ++j)
          for (index_t r = 0; r0 + r <= r_max; ++r)
            if (!cycle[j][r].is_zero()) next[j0 + j][r0 + r] += acc[j0][r0] * cycle[j][r];
      }
    acc = std::move(next);
  }
  return acc[f];
}

/// Gauss-Legendre nodes and weights on [0, 1].
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t n) {
  thread_local std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> x(n), w(n);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

/// E[1 / (f + R)] for g cycles, D > f, as the integral of t^(f-1) E[t^R] over
/// [0, 1]. The integrand is a polynomial of degree < D, so Gauss-Legendre with
/// ceil(D/2) + 1 nodes is exact up to rounding. E[t^R] is the x^f coefficient
/// of the product of per-cycle generating functions, each weighted by
/// binomial(L, f/D) factors so that no intermediate overflows.
inline double mean_inverse_f_plus_r(index_t D, index_t f, index_t g) {
  const index_t L = D / g;
  const LogFactorials lf(D);
  const double lp = std::log(static_cast<double>(f) / D);
  const double lq = std::log(static_cast<double>(D - f) / D);
  const double log_target = lf.log_binom(D, f) + f * lp + (D - f) * lq;
  const index_t jmax = std::min(L, f);

  const auto& [nodes, weights] = gauss_legendre(D / 2 + 2);
  CompensatedSum integral;
  std::vector<double> cyc(jmax + 1), acc, next;
  for (std::size_t node = 0; node < nodes.size(); ++node) {
    const double t = nodes[node], lt = std::log(t);
    for (index_t j = 0; j <= jmax; ++j) {
      const double base = j * lp + (L - j) * lq;
      if (j == 0 || j == L) {
        cyc[j] = std::exp(base);
        continue;
      }
      LogSumExp s;
      for (index_t r = 1; r <= std::min(j, L - j); ++r)
        s.add(base + std::log(static_cast<double>(L) / r) + lf.log_binom(j - 1, r - 1) +
              lf.log_binom(L - j - 1, r - 1) + r * lt);
      cyc[j] = s.value();
    }
    acc.assign(f + 1, 0.0);
    acc[0] = 1.0;
    for (index_t c = 0; c < g; ++c) {
      next.assign(f + 1, 0.0);
      for (index_t j0 = 0; j0 <= f; ++j0) {
        if (acc[j0] == 0.0) continue;
        for (index_t j = 0; j <= jmax && j0 + j <= f; ++j) next[j0 + j] += acc[j0] * cyc[j];
      }
      acc.swap(next);
    }
    const double pgf = acc[f] * std::exp(-log_target);
    integral.add(weights[node] * std::pow(t, static_cast<double>(f) - 1.0) * pgf);
  }
  return integral.value();
}

}  // namespace detail

/// E~ for the shift delta, in exact rationals.
inline Rational e_tilde_shift_exact(index_t D, index_t f, index_t a, index_t delta) {
  detail::require_interior(D, f, a, "e_tilde_shift");
  detail::require_shift(D, delta);
  const index_t g = std::gcd(delta, D);
  if (g == 1) return e_tilde_exact(D, f, a);
  const Rational A(BigInt(a) * (a - 1), BigInt(f) * (f - 1)), B(BigInt(a) * a, BigInt(f) * f);
  if (D == f) return A;
  const auto counts = detail::run_counts(D, f, g);
  Rational inv = 0;
  for (std::size_t r = 0; r < counts.size(); ++r)
    if (!counts[r].is_zero()) inv += Rational(counts[r], BigInt(f + r));
  inv /= exact_binom(D, f);
  return 2 * B - A + 2 * f * (A - B) * inv;
}

/// E~ for the shift delta in floating point; equals e_tilde when gcd(delta, D) = 1.
inline double e_tilde_shift(index_t D, index_t f, index_t a, index_t delta) {
  detail::require_interior(D, f, a, "e_tilde_shift");
  detail::require_shift(D, delta);
  const index_t g = std::gcd(delta, D);
  if (g == 1) return e_tilde(D, f, a);
  const double A = static_cast<double>(a) * (a - 1) / (static_cast<double>(f) * (f - 1));
  const double B = static_cast<double>(a) * a / (static_cast<double>(f) * f);
  if (D == f) return A;
  return 2 * B - A + 2.0 * f * (A - B) * detail::mean_inverse_f_plus_r(D, f, g);
}

// ---------------------------------------------------------------------------
// C-MinHash-(sigma, pi)

namespace detail {
inline void require_sigma_pi_args(index_t D, index_t f, index_t a, index_t K) {
  if (!(a <= f && f <= D)) throw validation_error("requires 0 <= a <= f <= D");
  require_union(f);
  if (K < 1 || K > D)
    throw validation_error("K must lie in [1, D], got " + std::to_string(K));
}

/// Weight sum_{delta < K, gcd(delta, D) = g} (K - delta) for every g that occurs.
inline std::map<index_t, std::uint64_t> shift_weights(index_t D, index_t K) {
  std::map<index_t, std::uint64_t> w;
  for (index_t d = 1; d < K; ++d) w[std::gcd(d, D)] += K - d;
  return w;
}
}  // namespace detail

/// Var of the C-MinHash-(sigma,pi) estimator:
///   J/K + (2/K^2) sum_{delta=1}^{K-1} (K - delta) E~_delta - J^2.
/// When every delta < K is coprime to D (always for prime D) this is
/// J/K + (K-1)/K E~ - J^2; see variance_sigma_pi_single_e.
inline VarianceReport variance_sigma_pi(index_t D, index_t f, index_t a, index_t K,
                                        Method method = Method::LogSpace) {
  detail::require_sigma_pi_args(D, f, a, K);
  VarianceReport r{Scheme::CMinHashSigmaPi, D, f, a, K, 0.0, {}, {}, method, {}, {}};
  r.method = method;
  if (a == 0 || a == f) {
    r.variance = 0.0;
    if (method == Method::ExactRational) r.exact_variance = Rational(0);
    return r;
  }
  const Rational J(a, f);
  const auto weights = detail::shift_weights(D, K);
  // D = f has a closed form; evaluating it exactly keeps the K = D zero exact.
  if (method == Method::ExactRational || D == f) {
    const Rational et = e_tilde_exact(D, f, a);
    Rational sum = 0;
    for (const auto& [g, w] : weights)
      sum += BigInt(w) * (g == 1 ? et : e_tilde_shift_exact(D, f, a, g));
    const Rational var = J / K + 2 * sum / (BigInt(K) * K) - J * J;
    r.e_tilde = to_double(et);
    r.variance = to_double(var);
    if (method == Method::ExactRational) {
      r.exact_e_tilde = et;
      r.exact_variance = var;
    }
    return r;
  }
  const double Jd = static_cast<double>(a) / f;
  const double et = e_tilde(D, f, a);
  CompensatedSum sum;
  for (const auto& [g, w] : weights)
    sum.add(static_cast<double>(w) * (g == 1 ? et : e_tilde_shift(D, f, a, g)));
  r.e_tilde = et;
  r.variance = std::max(0.0, Jd / K + 2.0 * sum.value() / (static_cast<double>(K) * K) - Jd * Jd);
  return r;
}

/// J/K + (K-1)/K E~ - J^2 with the delta = 1 expectation used for every
/// shift. Exact only when every delta < K is coprime to D.
inline double variance_sigma_pi_single_e(index_t D, index_t f, index_t a, index_t K) {
  detail::require_sigma_pi_args(D, f, a, K);
  if (a == 0 || a == f) return 0.0;
  const double J = static_cast<double>(a) / f;
  return std::max(0.0, J / K + (static_cast<double>(K) - 1) * e_tilde(D, f, a) / K - J * J);
}

/// Var_MH / Var_(sigma,pi), independent of the interior a. Evaluated at
/// a = floor(f/2), 1 and f-1; throws self_check_error if the three disagree
/// beyond 1e-8 relative. Returns +inf when Var_(sigma,pi) vanishes (f = D = K).
inline double variance_ratio(index_t D, index_t f, index_t K) {
  if (!(f >= 2 && f <= D)) throw validation_error("variance_ratio: requires 2 <= f <= D");
  if (K < 1 || K > D) throw validation_error("variance_ratio: K must lie in [1, D]");
  auto ratio_at = [&](index_t a) {
    const double mh = variance_mh(static_cast<double>(a) / f, K);
    const double sp = variance_sigma_pi(D, f, a, K).variance;
    return sp > 0.0 ? mh / sp : std::numeric_limits<double>::infinity();
  };
  const double mid = ratio_at(f / 2);
  for (index_t a : {index_t{1}, f - 1}) {
    const double other = ratio_at(a);
    const bool both_inf = std::isinf(mid) && std::isinf(other);
    if (!both_inf && !(std::abs(other - mid) <= 1e-8 * std::abs(mid)))
      throw self_check_error("variance ratio not constant in a at (D,f,K) = (" +
                             std::to_string(D) + "," + std::to_string(f) + "," +
                             std::to_string(K) + "): " + std::to_string(mid) + " vs " +
                             std::to_string(other) + " at a=" + std::to_string(a));
  }
  return mid;
}

}  // namespace cminhash
