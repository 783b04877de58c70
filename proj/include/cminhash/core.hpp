#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cminhash {

using index_t = std::uint32_t;
using seed_t = std::uint64_t;

/// Raised for malformed inputs and violated preconditions.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an internal cross-check between two routes disagrees.
class self_check_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sparse 0/1 vector: the sorted support of a vector in {0,1}^dim.
class BinaryVector {
 public:
  BinaryVector() = default;

  BinaryVector(index_t dim, std::vector<index_t> nonzeros)
      : dim_(dim), nonzeros_(std::move(nonzeros)) {
    if (dim_ == 0) throw validation_error("BinaryVector: dim must be >= 1");
    for (std::size_t i = 0; i < nonzeros_.size(); ++i) {
      if (nonzeros_[i] >= dim_)
        throw validation_error("BinaryVector: index " + std::to_string(nonzeros_[i]) +
                               " out of range for dim " + std::to_string(dim_));
      if (i > 0 && nonzeros_[i] <= nonzeros_[i - 1])
        throw validation_error("BinaryVector: indices must be strictly increasing");
    }
  }

  /// Builds from unsorted indices; duplicates are rejected.
  static BinaryVector from_unsorted(index_t dim, std::vector<index_t> idx) {
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
      throw validation_error("BinaryVector: duplicate index");
    return BinaryVector(dim, std::move(idx));
  }

  static BinaryVector all_ones(index_t dim) {
    std::vector<index_t> idx(dim);
    for (index_t i = 0; i < dim; ++i) idx[i] = i;
    return BinaryVector(dim, std::move(idx));
  }

  index_t dim() const noexcept { return dim_; }
  std::span<const index_t> nonzeros() const noexcept { return nonzeros_; }
  std::size_t count() const noexcept { return nonzeros_.size(); }
  bool empty() const noexcept { return nonzeros_.empty(); }

  bool contains(index_t i) const {
    return std::binary_search(nonzeros_.begin(), nonzeros_.end(), i);
  }

  friend bool operator==(const BinaryVector&, const BinaryVector&) = default;

 private:
  index_t dim_ = 1;
  std::vector<index_t> nonzeros_;
};

/// (D, f, a) statistics of a vector pair. J is kept as the exact ratio a/f.
struct PairSummary {
  index_t dim = 0;
  index_t intersection = 0;  // a
  index_t union_size = 0;    // f

  bool jaccard_defined() const noexcept { return union_size > 0; }
  bool jaccard_tilde_defined() const noexcept { return union_size > 1; }

  double jaccard() const {
    if (!jaccard_defined()) throw validation_error("Jaccard undefined: both vectors empty (f = 0)");
    return static_cast<double>(intersection) / union_size;
  }

  /// (a - 1) / (f - 1)
  double jaccard_tilde() const {
    if (!jaccard_tilde_defined()) throw validation_error("J-tilde undefined for f <= 1");
    return (static_cast<double>(intersection) - 1.0) / (union_size - 1.0);
  }

  friend bool operator==(const PairSummary&, const PairSummary&) = default;
};

enum class Symbol : std::uint8_t { Match, Mismatch, BothZero };

inline char symbol_char(Symbol s) {
  switch (s) {
    case Symbol::Match: return 'O';
    case Symbol::Mismatch: return 'x';
    case Symbol::BothZero: return '-';
  }
  return '?';
}

/// Per-coordinate O / x / - classification of a pair. Indexing wraps modulo dim.
class LocationVector {
 public:
  LocationVector() = default;
  explicit LocationVector(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw validation_error("LocationVector: dim must be >= 1");
  }

  /// Parses "Ox-" style text; 'O'/'o' match, 'x'/'X'/'*' mismatch, '-'/'.' both zero.
  /// Whitespace and commas are ignored.
  static LocationVector parse(const std::string& text) {
    std::vector<Symbol> out;
    for (char c : text) {
      switch (c) {
        case 'O': case 'o': out.push_back(Symbol::Match); break;
        case 'x': case 'X': case '*': out.push_back(Symbol::Mismatch); break;
        case '-': case '.': out.push_back(Symbol::BothZero); break;
        case ' ': case '\t': case '\n': case '\r': case ',': case '[': case ']': break;
        default: throw validation_error(std::string("LocationVector: bad symbol '") + c + "'");
      }
    }
    return LocationVector(std::move(out));
  }

  index_t dim() const noexcept { return static_cast<index_t>(symbols_.size()); }
  Symbol operator[](std::size_t j) const noexcept { return symbols_[j % symbols_.size()]; }
  std::span<const Symbol> symbols() const noexcept { return symbols_; }

  index_t count(Symbol s) const {
    return static_cast<index_t>(std::count(symbols_.begin(), symbols_.end(), s));
  }

  PairSummary summary() const {
    const index_t a = count(Symbol::Match);
    return {dim(), a, a + count(Symbol::Mismatch)};
  }

  std::string to_string() const {
    std::string s;
    s.reserve(symbols_.size());
    for (Symbol x : symbols_) s.push_back(symbol_char(x));
    return s;
  }

  friend bool operator==(const LocationVector&, const LocationVector&) = default;

 private:
  std::vector<Symbol> symbols_;
};

/// Sizes of the nine sets of circular pairs (x_i, x_{i+delta}).
/// l*: first symbol O; g*: first symbol -; h*: first symbol x.
/// Second index 0/1/2: second symbol O / x / -.
struct SetSizes {
  index_t delta = 0;
  index_t l0 = 0, l1 = 0, l2 = 0;
  index_t g0 = 0, g1 = 0, g2 = 0;
  index_t h0 = 0, h1 = 0, h2 = 0;

  /// True when all six intrinsic linear identities hold for (D, f, a).
  bool satisfies_constraints(index_t D, index_t f, index_t a) const noexcept {
    return l0 + l1 + l2 == a && l0 + g0 + h0 == a &&
           g0 + g1 + g2 == D - f && l2 + g2 + h2 == D - f &&
           h0 + h1 + h2 == f - a && l1 + g1 + h1 == f - a;
  }

  friend bool operator==(const SetSizes&, const SetSizes&) = default;
};

enum class Scheme : std::uint8_t { MinHash, CMinHash0Pi, CMinHashSigmaPi };

/// Names used by the signature file format.
inline std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::MinHash: return "minhash";
    case Scheme::CMinHash0Pi: return "c0pi";
    case Scheme::CMinHashSigmaPi: return "csigmapi";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "minhash" || s == "mh") return Scheme::MinHash;
  if (s == "c0pi") return Scheme::CMinHash0Pi;
  if (s == "csigmapi") return Scheme::CMinHashSigmaPi;
  throw validation_error("unknown scheme '" + s + "'");
}

/// Seeds a signature was produced with. `sigma` is set only for C-MinHash-(sigma,pi).
struct SeedRecord {
  seed_t primary = 0;
  std::optional<seed_t> sigma;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

struct Signature {
  Scheme scheme = Scheme::MinHash;
  index_t k = 0;
  index_t dim = 0;
  SeedRecord seeds;
  std::vector<index_t> values;
};

inline PairSummary summarize_pair(const BinaryVector& v, const BinaryVector& w) {
  if (v.dim() != w.dim())
    throw validation_error("dimension mismatch: " + std::to_string(v.dim()) + " vs " +
                           std::to_string(w.dim()));
  auto x = v.nonzeros();
  auto y = w.nonzeros();
  index_t a = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] == y[j]) {
      ++a; ++i; ++j;
    } else if (x[i] < y[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const auto f = static_cast<index_t>(x.size() + y.size() - a);
  return {v.dim(), a, f};
}

inline LocationVector location_vector(const BinaryVector& v, const BinaryVector& w) {
  if (v.dim() != w.dim())
    throw validation_error("dimension mismatch: " + std::to_string(v.dim()) + " vs " +
                           std::to_string(w.dim()));
  std::vector<std::uint8_t> ones(v.dim(), 0);
  for (index_t i : v.nonzeros()) ++ones[i];
  for (index_t i : w.nonzeros()) ++ones[i];
  std::vector<Symbol> s(v.dim());
  for (index_t i = 0; i < v.dim(); ++i)
    s[i] = ones[i] == 2 ? Symbol::Match : ones[i] == 1 ? Symbol::Mismatch : Symbol::BothZero;
  return LocationVector(std::move(s));
}

/// Inverse of location_vector: mismatches alternate between v and w, starting with v.
inline std::pair<BinaryVector, BinaryVector> pair_from_location(const LocationVector& x) {
  std::vector<index_t> v, w;
  bool to_v = true;
  for (index_t i = 0; i < x.dim(); ++i) {
    switch (x[i]) {
      case Symbol::Match: v.push_back(i); w.push_back(i); break;
      case Symbol::Mismatch:
        (to_v ? v : w).push_back(i);
        to_v = !to_v;
        break;
      case Symbol::BothZero: break;
    }
  }
  return {BinaryVector(x.dim(), std::move(v)), BinaryVector(x.dim(), std::move(w))};
}

}  // namespace cminhash
