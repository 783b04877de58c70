#pragma once

#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cminhash/core.hpp"
#include "cminhash/rng.hpp"

namespace cminhash {

/// A bijection on {0, ..., dim-1}; map()[i] is the image of i.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<index_t> map) : map_(std::move(map)) {
    if (map_.empty()) throw validation_error("Permutation: dim must be >= 1");
    std::vector<bool> seen(map_.size(), false);
    for (index_t m : map_) {
      if (m >= map_.size() || seen[m]) throw validation_error("Permutation: map is not a bijection");
      seen[m] = true;
    }
  }

  static Permutation identity(index_t dim) {
    if (dim == 0) throw validation_error("Permutation: dim must be >= 1");
    Permutation p;
    p.map_.resize(dim);
    std::iota(p.map_.begin(), p.map_.end(), index_t{0});
    return p;
  }

  index_t dim() const noexcept { return static_cast<index_t>(map_.size()); }
  std::span<const index_t> map() const noexcept { return map_; }
  index_t operator()(index_t i) const noexcept { return map_[i]; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  friend Permutation random_permutation(index_t, seed_t);
  std::vector<index_t> map_;
};

/// Fisher-Yates shuffle of the identity driven by Xoshiro256(seed).
inline Permutation random_permutation(index_t dim, seed_t seed) {
  Permutation p = Permutation::identity(dim);
  Xoshiro256 rng(seed);
  fisher_yates(std::span<index_t>(p.map_), rng);
  return p;
}

/// pi shifted circulantly rightwards by k, evaluated at i: pi((i - k) mod D).
inline index_t shifted_value(const Permutation& p, std::uint64_t k, index_t i) {
  const index_t d = p.dim();
  if (i >= d) throw validation_error("shifted_value: index out of range");
  const auto r = static_cast<index_t>(k % d);
  return p(i >= r ? i - r : i + d - r);
}

inline BinaryVector apply(const Permutation& p, const BinaryVector& v) {
  if (p.dim() != v.dim()) throw validation_error("apply: dimension mismatch");
  std::vector<index_t> out;
  out.reserve(v.count());
  for (index_t i : v.nonzeros()) out.push_back(p(i));
  std::sort(out.begin(), out.end());
  return BinaryVector(v.dim(), std::move(out));
}

inline std::string seed_hex(seed_t seed) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(seed));
  return buf;
}

inline seed_t parse_seed_hex(const std::string& text) {
  std::string s = text;
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
  if (s.empty() || s.size() > 16) throw validation_error("bad hex seed '" + text + "'");
  seed_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw validation_error("bad hex seed '" + text + "'");
    v = (v << 4) | static_cast<seed_t>(d);
  }
  return v;
}

/// Debug dump: "dim=<D> seed=<hex>" then the space-separated map on one line.
inline void write_permutation_dump(std::ostream& os, const Permutation& p, seed_t seed) {
  os << "dim=" << p.dim() << " seed=" << seed_hex(seed) << '\n';
  for (index_t i = 0; i < p.dim(); ++i) os << (i ? " " : "") << p(i);
  os << '\n';
}

inline std::pair<Permutation, seed_t> read_permutation_dump(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw validation_error("permutation dump: missing header");
  unsigned long dim = 0;
  char hex[40] = {0};
  if (std::sscanf(header.c_str(), "dim=%lu seed=%39s", &dim, hex) != 2)
    throw validation_error("permutation dump: bad header '" + header + "'");
  std::vector<index_t> map;
  map.reserve(dim);
  index_t x;
  while (is >> x) map.push_back(x);
  if (map.size() != dim) throw validation_error("permutation dump: map length != dim");
  return {Permutation(std::move(map)), parse_seed_hex(hex)};
}

}  // namespace cminhash
