#pragma once

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cminhash/core.hpp"
#include "cminhash/perm.hpp"
#include "cminhash/rng.hpp"

namespace cminhash {

namespace detail {

inline void require_nonempty(const BinaryVector& v) {
  if (v.empty()) throw validation_error("undefined hash of empty set");
}

inline void require_k(index_t k, index_t dim, bool circulant) {
  if (k == 0) throw validation_error("K must be >= 1");
  if (circulant && k > dim)
    throw validation_error("K = " + std::to_string(k) + " exceeds D = " + std::to_string(dim) +
                           " (circulant schemes require K <= D)");
}

}  // namespace detail

/// One MinHash value: min over the nonzeros i of p(i).
inline index_t min_hash(const Permutation& p, const BinaryVector& v) {
  if (p.dim() != v.dim()) throw validation_error("min_hash: dimension mismatch");
  detail::require_nonempty(v);
  index_t best = std::numeric_limits<index_t>::max();
  for (index_t i : v.nonzeros()) best = std::min(best, p(i));
  return best;
}

/// Classical MinHash with K independent permutations; permutation k is
/// random_permutation(D, derive_seed(master_seed, k)).
class MinHasher {
 public:
  MinHasher(index_t dim, index_t k, seed_t master_seed) : dim_(dim), k_(k), seed_(master_seed) {
    detail::require_k(k, dim, false);
    perms_.reserve(std::size_t{dim} * k);
    for (index_t j = 0; j < k; ++j) {
      const Permutation p = random_permutation(dim, derive_seed(master_seed, j));
      perms_.insert(perms_.end(), p.map().begin(), p.map().end());
    }
  }

  index_t dim() const noexcept { return dim_; }
  index_t k() const noexcept { return k_; }

  Signature sign(const BinaryVector& v) const {
    Signature s{Scheme::MinHash, k_, dim_, {seed_, std::nullopt}, std::vector<index_t>(k_)};
    sign_into(v, s.values);
    return s;
  }

  void sign_into(const BinaryVector& v, std::span<index_t> out) const {
    if (v.dim() != dim_) throw validation_error("minhash: dimension mismatch");
    detail::require_nonempty(v);
    for (index_t j = 0; j < k_; ++j) {
      const index_t* p = perms_.data() + std::size_t{j} * dim_;
      index_t best = std::numeric_limits<index_t>::max();
      for (index_t i : v.nonzeros()) best = std::min(best, p[i]);
      out[j] = best;
    }
  }

 private:
  index_t dim_, k_;
  seed_t seed_;
  std::vector<index_t> perms_;  // K rows of length D
};

/// C-MinHash: hash k (k = 1..K) is min over nonzeros i of pi((i - k) mod D),
/// optionally after an initial permutation sigma of the input.
class CirculantHasher {
 public:
  /// C-MinHash-(0, pi).
  CirculantHasher(index_t dim, index_t k, seed_t pi_seed)
      : CirculantHasher(random_permutation(dim, pi_seed), k, {pi_seed, std::nullopt}) {}

  /// C-MinHash-(sigma, pi).
  CirculantHasher(index_t dim, index_t k, seed_t sigma_seed, seed_t pi_seed)
      : CirculantHasher(random_permutation(dim, pi_seed), k, {pi_seed, sigma_seed}) {
    sigma_ = random_permutation(dim, sigma_seed);
  }

  /// Explicit permutations; mainly for tests and exhaustive enumeration.
  CirculantHasher(Permutation pi, index_t k, SeedRecord seeds, std::optional<Permutation> sigma = {})
      : dim_(pi.dim()), k_(k), seeds_(seeds), sigma_(std::move(sigma)) {
    detail::require_k(k, dim_, true);
    if (sigma_ && sigma_->dim() != dim_) throw validation_error("sigma/pi dimension mismatch");
    // Doubled so pi((i - k) mod D) == doubled_[i + D - k] for 0 <= k <= D.
    doubled_.resize(2 * std::size_t{dim_});
    for (index_t i = 0; i < 2 * dim_; ++i) doubled_[i] = pi(i % dim_);
  }

  index_t dim() const noexcept { return dim_; }
  index_t k() const noexcept { return k_; }
  Scheme scheme() const noexcept {
    return sigma_ ? Scheme::CMinHashSigmaPi : Scheme::CMinHash0Pi;
  }

  Signature sign(const BinaryVector& v) const {
    Signature s{scheme(), k_, dim_, seeds_, std::vector<index_t>(k_)};
    sign_into(v, s.values);
    return s;
  }

  void sign_into(const BinaryVector& v, std::span<index_t> out) const {
    if (v.dim() != dim_) throw validation_error("cminhash: dimension mismatch");
    detail::require_nonempty(v);
    if (sigma_) {
      scratch_.clear();
      for (index_t i : v.nonzeros()) scratch_.push_back((*sigma_)(i));
      hash_support(scratch_, out);
    } else {
      hash_support(v.nonzeros(), out);
    }
  }

 private:
  void hash_support(std::span<const index_t> support, std::span<index_t> out) const {
    for (index_t k = 1; k <= k_; ++k) {
      const index_t* row = doubled_.data() + (dim_ - k);
      index_t best = std::numeric_limits<index_t>::max();
      for (index_t i : support) best = std::min(best, row[i]);
      out[k - 1] = best;
    }
  }

  index_t dim_, k_;
  SeedRecord seeds_;
  std::optional<Permutation> sigma_;
  std::vector<index_t> doubled_;
  mutable std::vector<index_t> scratch_;  // not shared across threads
};

inline Signature minhash(const BinaryVector& v, seed_t master_seed, index_t k) {
  detail::require_nonempty(v);
  return MinHasher(v.dim(), k, master_seed).sign(v);
}

inline Signature cminhash_0pi(const BinaryVector& v, seed_t pi_seed, index_t k) {
  detail::require_nonempty(v);
  return CirculantHasher(v.dim(), k, pi_seed).sign(v);
}

inline Signature cminhash_sigma_pi(const BinaryVector& v, seed_t sigma_seed, seed_t pi_seed,
                                   index_t k) {
  detail::require_nonempty(v);
  return CirculantHasher(v.dim(), k, sigma_seed, pi_seed).sign(v);
}

/// Seeds used by a scheme when everything derives from one master seed.
/// C-MinHash-(sigma,pi) takes sigma from child 0 and pi from child 1.
inline SeedRecord scheme_seeds(Scheme scheme, seed_t master) {
  if (scheme == Scheme::CMinHashSigmaPi) return {derive_seed(master, 1), derive_seed(master, 0)};
  return {master, std::nullopt};
}

/// Any of the three schemes behind one interface, built from a master seed.
class Sketcher {
 public:
  Sketcher(Scheme scheme, index_t dim, index_t k, seed_t master) : scheme_(scheme) {
    const SeedRecord s = scheme_seeds(scheme, master);
    switch (scheme) {
      case Scheme::MinHash: minhash_.emplace(dim, k, s.primary); break;
      case Scheme::CMinHash0Pi: circulant_.emplace(dim, k, s.primary); break;
      case Scheme::CMinHashSigmaPi: circulant_.emplace(dim, k, *s.sigma, s.primary); break;
    }
  }

  Scheme scheme() const noexcept { return scheme_; }
  index_t k() const noexcept { return minhash_ ? minhash_->k() : circulant_->k(); }

  Signature sign(const BinaryVector& v) const {
    return minhash_ ? minhash_->sign(v) : circulant_->sign(v);
  }
  void sign_into(const BinaryVector& v, std::span<index_t> out) const {
    if (minhash_) minhash_->sign_into(v, out);
    else circulant_->sign_into(v, out);
  }

 private:
  Scheme scheme_;
  std::optional<MinHasher> minhash_;
  std::optional<CirculantHasher> circulant_;
};

/// Number of positions where two equally long hash arrays agree.
inline index_t count_collisions(std::span<const index_t> x, std::span<const index_t> y) noexcept {
  index_t c = 0;
  for (std::size_t i = 0; i < x.size(); ++i) c += x[i] == y[i];
  return c;
}

/// Throws naming the first mismatched field.
inline void require_comparable(const Signature& a, const Signature& b) {
  if (a.scheme != b.scheme)
    throw validation_error("incomparable signatures: scheme differs (" + scheme_name(a.scheme) +
                           " vs " + scheme_name(b.scheme) + ")");
  if (a.k != b.k) throw validation_error("incomparable signatures: k differs");
  if (a.dim != b.dim) throw validation_error("incomparable signatures: dim differs");
  if (!(a.seeds == b.seeds)) throw validation_error("incomparable signatures: seed_record differs");
  if (a.values.size() != a.k || b.values.size() != b.k)
    throw validation_error("incomparable signatures: values length differs from k");
}

inline double estimate_jaccard(const Signature& a, const Signature& b) {
  require_comparable(a, b);
  return static_cast<double>(count_collisions(a.values, b.values)) / a.k;
}

// Signature file: one record per line,
//   <vector-id> TAB <scheme> TAB <K> TAB <D> TAB <seed-hex> TAB <space-separated values>
// seed-hex is the 16-digit seed; for csigmapi it is "<sigma-hex>:<pi-hex>".

struct SignatureRecord {
  std::string id;
  Signature signature;
};

inline std::string format_seed_record(const SeedRecord& s) {
  return s.sigma ? seed_hex(*s.sigma) + ":" + seed_hex(s.primary) : seed_hex(s.primary);
}

inline SeedRecord parse_seed_record(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {parse_seed_hex(text), std::nullopt};
  return {parse_seed_hex(text.substr(colon + 1)), parse_seed_hex(text.substr(0, colon))};
}

inline void write_signature(std::ostream& os, const std::string& id, const Signature& s) {
  os << id << '\t' << scheme_name(s.scheme) << '\t' << s.k << '\t' << s.dim << '\t'
     << format_seed_record(s.seeds) << '\t';
  for (std::size_t i = 0; i < s.values.size(); ++i) os << (i ? " " : "") << s.values[i];
  os << '\n';
}

inline std::vector<SignatureRecord> read_signatures(std::istream& is) {
  std::vector<SignatureRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw validation_error("signature file line " + std::to_string(lineno) + ": " + why);
    };
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 6) fail("expected 6 tab-separated fields");
    SignatureRecord r;
    r.id = fields[0];
    try {
      r.signature.scheme = parse_scheme(fields[1]);
      r.signature.k = static_cast<index_t>(std::stoul(fields[2]));
      r.signature.dim = static_cast<index_t>(std::stoul(fields[3]));
      r.signature.seeds = parse_seed_record(fields[4]);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    std::stringstream vs(fields[5]);
    long long x;
    while (vs >> x) {
      if (x < 0 || x >= static_cast<long long>(r.signature.dim)) fail("hash value out of range");
      r.signature.values.push_back(static_cast<index_t>(x));
    }
    if (r.signature.values.size() != r.signature.k) fail("number of values != K");
    if ((r.signature.scheme == Scheme::CMinHashSigmaPi) != r.signature.seeds.sigma.has_value())
      fail("seed record does not match scheme");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cminhash
