#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cminhash/core.hpp"
#include "cminhash/oracle.hpp"
#include "cminhash/perm.hpp"
#include "cminhash/rng.hpp"
#include "cminhash/sketch.hpp"
#include "cminhash/theory.hpp"

namespace cminhash {

// ---------------------------------------------------------------------------
// Synthetic pairs

enum class Pattern : std::uint8_t { Blocked, UniformRandom };

inline Pattern parse_pattern(const std::string& s) {
  if (s == "blocked") return Pattern::Blocked;
  if (s == "uniform_random" || s == "uniform-random" || s == "random") return Pattern::UniformRandom;
  throw validation_error("unknown pattern '" + s + "'");
}

inline std::string pattern_name(Pattern p) {
  return p == Pattern::Blocked ? "blocked" : "uniform_random";
}

struct SyntheticPairSpec {
  index_t D = 0, f = 0, a = 0;
  Pattern pattern = Pattern::Blocked;

  void validate() const {
    if (D == 0 || !(a <= f && f <= D))
      throw validation_error("synthetic pair spec requires 0 <= a <= f <= D, D >= 1");
  }
  std::string id() const {
    return "D" + std::to_string(D) + "_f" + std::to_string(f) + "_a" + std::to_string(a) + "_" +
           pattern_name(pattern);
  }
};

/// Blocked: a O's, then f-a x's, then D-f -'s. Uniform random: the same
/// symbols shuffled with Xoshiro256(seed). Mismatches alternate v, w, v, ...
inline std::pair<BinaryVector, BinaryVector> synth_pair(const SyntheticPairSpec& spec, seed_t seed) {
  spec.validate();
  std::vector<Symbol> sym(spec.D, Symbol::BothZero);
  std::fill_n(sym.begin(), spec.a, Symbol::Match);
  std::fill(sym.begin() + spec.a, sym.begin() + spec.f, Symbol::Mismatch);
  if (spec.pattern == Pattern::UniformRandom) {
    Xoshiro256 rng(seed);
    fisher_yates(std::span<Symbol>(sym), rng);
  }
  return pair_from_location(LocationVector(std::move(sym)));
}

// ---------------------------------------------------------------------------
// Datasets

enum class VectorFormat : std::uint8_t { SparseTsv, DenseCsv };

inline VectorFormat parse_format(const std::string& s) {
  if (s == "sparse-tsv") return VectorFormat::SparseTsv;
  if (s == "dense-csv") return VectorFormat::DenseCsv;
  throw validation_error("unknown format '" + s + "'");
}

struct Dataset {
  index_t dim = 0;
  std::vector<std::string> ids;
  std::vector<BinaryVector> vectors;
};

/// Sparse TSV: "#dim=<D>" header, then "id<TAB>i1 i2 ..." with 0-based indices.
/// Dense CSV: "#dim=<D>" header, then D comma-separated values per row; an
/// entry strictly above `threshold` becomes a 1. Row ids are 0, 1, 2, ...
/// Other lines starting with '#' and blank lines are skipped.
inline Dataset read_vectors(std::istream& is, VectorFormat format, double threshold = 0.0) {
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  bool have_dim = false;
  auto fail = [&](const std::string& why) -> void {
    throw validation_error("line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#dim=", 0) == 0) {
        if (have_dim) fail("duplicate #dim header");
        try {
          const long long d = std::stoll(line.substr(5));
          if (d <= 0 || d > 0xFFFFFFFFLL) fail("dim must be positive");
          ds.dim = static_cast<index_t>(d);
        } catch (const std::logic_error&) {
          fail("bad #dim header");
        }
        have_dim = true;
      }
      continue;
    }
    if (!have_dim) fail("missing #dim=<D> header before data");

    std::vector<index_t> idx;
    std::string id;
    if (format == VectorFormat::SparseTsv) {
      const auto tab = line.find('\t');
      id = line.substr(0, tab);
      if (id.empty()) fail("missing vector id");
      if (tab != std::string::npos) {
        std::stringstream ss(line.substr(tab + 1));
        std::string tok;
        while (ss >> tok) {
          long long x;
          std::size_t used = 0;
          try {
            x = std::stoll(tok, &used);
          } catch (const std::logic_error&) {
            fail("bad index '" + tok + "'");
          }
          if (used != tok.size()) fail("bad index '" + tok + "'");
          if (x < 0 || x >= static_cast<long long>(ds.dim))
            fail("index " + tok + " out of range for dim " + std::to_string(ds.dim));
          idx.push_back(static_cast<index_t>(x));
        }
      }
      std::sort(idx.begin(), idx.end());
      if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) fail("duplicate index");
    } else {
      id = std::to_string(ds.vectors.size());
      std::stringstream ss(line);
      std::string tok;
      index_t col = 0;
      while (std::getline(ss, tok, ',')) {
        double x;
        try {
          x = std::stod(tok);
        } catch (const std::logic_error&) {
          fail("bad value '" + tok + "'");
        }
        if (col >= ds.dim) fail("row has more than dim entries");
        if (x > threshold) idx.push_back(col);
        ++col;
      }
      if (col != ds.dim) fail("row has " + std::to_string(col) + " entries, expected " +
                              std::to_string(ds.dim));
    }
    ds.ids.push_back(std::move(id));
    ds.vectors.emplace_back(ds.dim, std::move(idx));
  }
  if (!have_dim) throw validation_error("missing #dim=<D> header");
  return ds;
}

inline Dataset load_vectors(const std::filesystem::path& path, VectorFormat format,
                            double threshold = 0.0) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path.string());
  try {
    return read_vectors(in, format, threshold);
  } catch (const validation_error& e) {
    throw validation_error(path.string() + ": " + e.what());
  }
}

inline void write_sparse_tsv(std::ostream& os, const Dataset& ds) {
  os << "#dim=" << ds.dim << '\n';
  for (std::size_t i = 0; i < ds.vectors.size(); ++i) {
    os << ds.ids[i] << '\t';
    bool first = true;
    for (index_t x : ds.vectors[i].nonzeros()) {
      os << (first ? "" : " ") << x;
      first = false;
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Bundled corpora generators

/// Sparse "text-like" corpus: each document picks one of `topics` topics and
/// draws distinct terms from a Zipf(1) law, either in the topic's own term
/// ranking (probability 0.6) or in the global ranking.
inline Dataset make_text_like_corpus(std::size_t n, index_t dim, seed_t seed, index_t min_terms = 40,
                                     index_t max_terms = 200, index_t topics = 5) {
  std::vector<double> cdf(dim);
  double acc = 0.0;
  for (index_t i = 0; i < dim; ++i) cdf[i] = (acc += 1.0 / (i + 1.0));
  for (double& c : cdf) c /= acc;
  auto zipf = [&](Xoshiro256& rng) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<index_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), dim - 1));
  };
  std::vector<Permutation> ranking;
  for (index_t t = 0; t < topics; ++t) ranking.push_back(random_permutation(dim, derive_seed(seed, 1, t)));

  Dataset ds;
  ds.dim = dim;
  for (std::size_t d = 0; d < n; ++d) {
    Xoshiro256 rng(derive_seed(seed, 2, d));
    const auto topic = static_cast<index_t>(rng.bounded(topics));
    const auto terms = static_cast<index_t>(min_terms + rng.bounded(max_terms - min_terms + 1));
    std::vector<bool> used(dim, false);
    std::vector<index_t> idx;
    while (idx.size() < terms) {
      const index_t r = zipf(rng);
      const index_t term = rng.uniform01() < 0.6 ? ranking[topic](r) : r;
      if (!used[term]) {
        used[term] = true;
        idx.push_back(term);
      }
    }
    ds.ids.push_back("doc" + std::to_string(d));
    ds.vectors.push_back(BinaryVector::from_unsorted(dim, std::move(idx)));
  }
  return ds;
}

/// Blocked corpus: every vector is one contiguous run of ones, so every
/// overlapping pair has a blocked location vector (x's, O's, x's).
inline Dataset make_blocked_corpus(std::size_t n, index_t dim, seed_t seed, index_t min_len = 100,
                                   index_t max_len = 400) {
  Dataset ds;
  ds.dim = dim;
  Xoshiro256 rng(seed);
  for (std::size_t d = 0; d < n; ++d) {
    const auto len = static_cast<index_t>(min_len + rng.bounded(max_len - min_len + 1));
    const auto start = static_cast<index_t>(rng.bounded(dim - len + 1));
    std::vector<index_t> idx(len);
    for (index_t i = 0; i < len; ++i) idx[i] = start + i;
    ds.ids.push_back("blk" + std::to_string(d));
    ds.vectors.emplace_back(dim, std::move(idx));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// CSV helpers

inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::uint64_t scheme_code(Scheme s) { return static_cast<std::uint64_t>(s); }

// ---------------------------------------------------------------------------
// Experiments

enum class Metric : std::uint8_t { Mse, Mae, Variance };

inline Metric parse_metric(const std::string& s) {
  if (s == "mse" || s == "MSE") return Metric::Mse;
  if (s == "mae" || s == "MAE") return Metric::Mae;
  if (s == "variance" || s == "VARIANCE") return Metric::Variance;
  throw validation_error("unknown metric '" + s + "'");
}

struct ExperimentConfig {
  std::vector<Scheme> schemes{Scheme::MinHash, Scheme::CMinHash0Pi, Scheme::CMinHashSigmaPi};
  std::vector<index_t> ks;
  std::size_t repetitions = 1;
  seed_t master_seed = 0;
  Metric metric = Metric::Mse;
  std::vector<SyntheticPairSpec> synthetic;  // pair source when no dataset
  seed_t pair_seed = 0;                       // for uniform_random patterns
  std::optional<std::filesystem::path> dataset;
  VectorFormat format = VectorFormat::SparseTsv;
  double threshold = 0.0;
  std::optional<std::filesystem::path> output;

  void validate() const {
    if (repetitions < 1) throw validation_error("repetitions must be >= 1");
    if (ks.empty()) throw validation_error("K list is empty");
    if (schemes.empty()) throw validation_error("scheme list is empty");
    for (index_t k : ks)
      if (k < 1) throw validation_error("K values must be >= 1");
    for (const auto& s : synthetic) s.validate();
  }

  void validate_dim(index_t D) const {
    for (index_t k : ks)
      if (k > D)
        throw validation_error("K = " + std::to_string(k) + " exceeds D = " + std::to_string(D));
  }
};

struct NamedPair {
  std::string id;
  BinaryVector v, w;
};

struct VarianceRow {
  std::string pair_id;
  Scheme scheme;
  index_t K;
  double empirical = NAN;   // MSE about J, or sample variance
  double std_error = NAN;   // of `empirical`
  double theoretical = NAN;
  std::string flag;         // "" or "degenerate"
};

/// Empirical MSE (or variance) of each scheme at each K against the exact
/// theoretical variance. Repetition streams for pair p and scheme s start
/// from derive_seed(master_seed, p, s).
inline std::vector<VarianceRow> run_variance_experiment(const ExperimentConfig& cfg,
                                                        const std::vector<NamedPair>& pairs) {
  cfg.validate();
  if (cfg.repetitions < 2) throw validation_error("variance experiment needs repetitions >= 2");
  std::vector<index_t> ks = cfg.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<VarianceRow> rows;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& pr = pairs[p];
    const PairSummary ps = summarize_pair(pr.v, pr.w);
    cfg.validate_dim(ps.dim);
    const bool degenerate = !ps.jaccard_defined() || pr.v.empty() || pr.w.empty();
    for (Scheme scheme : cfg.schemes) {
      if (degenerate) {
        for (index_t K : ks) rows.push_back({pr.id, scheme, K, NAN, NAN, NAN, "degenerate"});
        continue;
      }
      const double J = ps.jaccard();
      const auto draws = estimator_draws(scheme, pr.v, pr.w, ks,
                                         cfg.repetitions, derive_seed(cfg.master_seed, p, scheme_code(scheme)));
      const LocationVector x = location_vector(pr.v, pr.w);
      for (std::size_t j = 0; j < ks.size(); ++j) {
        std::vector<double> sample(cfg.repetitions);
        for (std::size_t r = 0; r < cfg.repetitions; ++r) sample[r] = draws[r * ks.size() + j];
        VarianceRow row{pr.id, scheme, ks[j], NAN, NAN, NAN, ""};
        if (cfg.metric == Metric::Variance) {
          const McMoments m = sample_moments(sample);
          row.empirical = m.variance;
          row.std_error = m.std_error;
        } else {
          std::vector<double> sq(sample.size());
          for (std::size_t r = 0; r < sample.size(); ++r) sq[r] = (sample[r] - J) * (sample[r] - J);
          const McMoments m = sample_moments(sq);
          row.empirical = m.mean;
          row.std_error = std::sqrt(m.variance / static_cast<double>(sq.size()));
        }
        switch (scheme) {
          case Scheme::MinHash: row.theoretical = variance_mh(J, ks[j]); break;
          case Scheme::CMinHash0Pi: row.theoretical = variance_0pi(x, ks[j]).variance; break;
          case Scheme::CMinHashSigmaPi:
            row.theoretical = variance_sigma_pi(ps.dim, ps.union_size, ps.intersection, ks[j]).variance;
            break;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

inline void write_variance_csv(std::ostream& os, const std::vector<VarianceRow>& rows,
                               Metric metric = Metric::Mse) {
  os << "pair_id,scheme,K," << (metric == Metric::Variance ? "empirical_variance" : "empirical_mse")
     << ",theoretical_var,stderr,flag\n";
  for (const auto& r : rows)
    os << r.pair_id << ',' << scheme_name(r.scheme) << ',' << r.K << ',' << fmt_double(r.empirical)
       << ',' << fmt_double(r.theoretical) << ',' << fmt_double(r.std_error) << ',' << r.flag << '\n';
}

struct MaeRow {
  Scheme scheme;
  index_t K;
  double mae = 0.0;     // mean over repetitions of the per-repetition MAE
  double stderr_ = 0.0; // standard error of that mean across repetitions
  std::size_t pairs = 0;
  std::size_t excluded = 0;
};

/// MAE of each scheme over all pairs of the dataset. Each repetition signs
/// every vector once per scheme with master seed derive_seed(master_seed, r, s).
/// Pairs involving an empty vector (whose hash is undefined) are excluded.
inline std::vector<MaeRow> run_mae_experiment(const Dataset& ds, std::vector<index_t> ks,
                                              std::size_t repetitions, seed_t master_seed,
                                              const std::vector<Scheme>& schemes = {
                                                  Scheme::MinHash, Scheme::CMinHash0Pi,
                                                  Scheme::CMinHashSigmaPi}) {
  if (ds.vectors.size() < 2) throw validation_error("MAE experiment needs at least 2 vectors");
  if (repetitions < 1) throw validation_error("repetitions must be >= 1");
  if (ks.empty()) throw validation_error("K list is empty");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.front() < 1 || ks.back() > ds.dim)
    throw validation_error("K values must lie in [1, D]");
  const index_t k_max = ks.back();

  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < ds.vectors.size(); ++i)
    if (!ds.vectors[i].empty()) live.push_back(i);
  const std::size_t n = ds.vectors.size();
  const std::size_t total_pairs = n * (n - 1) / 2;
  const std::size_t used_pairs = live.size() * (live.size() - (live.empty() ? 0 : 1)) / 2;
  if (used_pairs == 0) throw validation_error("MAE experiment: no pair with two non-empty vectors");

  std::vector<double> truth;
  truth.reserve(used_pairs);
  for (std::size_t x = 0; x < live.size(); ++x)
    for (std::size_t y = x + 1; y < live.size(); ++y)
      truth.push_back(summarize_pair(ds.vectors[live[x]], ds.vectors[live[y]]).jaccard());

  std::vector<MaeRow> rows;
  std::vector<index_t> sig(live.size() * k_max);
  std::vector<double> per_rep(repetitions * ks.size());
  std::vector<CompensatedSum> err(ks.size());
  for (Scheme scheme : schemes) {
    for (std::size_t r = 0; r < repetitions; ++r) {
      const Sketcher sk(scheme, ds.dim, k_max, derive_seed(master_seed, r, scheme_code(scheme)));
      for (std::size_t x = 0; x < live.size(); ++x)
        sk.sign_into(ds.vectors[live[x]], std::span<index_t>(sig).subspan(x * k_max, k_max));
      for (auto& e : err) e = CompensatedSum{};
      std::size_t p = 0;
      for (std::size_t x = 0; x < live.size(); ++x) {
        const index_t* hx = sig.data() + x * k_max;
        for (std::size_t y = x + 1; y < live.size(); ++y, ++p) {
          const index_t* hy = sig.data() + y * k_max;
          index_t c = 0, k = 0;
          for (std::size_t j = 0; j < ks.size(); ++j) {
            for (; k < ks[j]; ++k) c += hx[k] == hy[k];
            err[j].add(std::abs(static_cast<double>(c) / ks[j] - truth[p]));
          }
        }
      }
      for (std::size_t j = 0; j < ks.size(); ++j)
        per_rep[r * ks.size() + j] = err[j].value() / static_cast<double>(used_pairs);
    }
    for (std::size_t j = 0; j < ks.size(); ++j) {
      CompensatedSum s, s2;
      for (std::size_t r = 0; r < repetitions; ++r) s.add(per_rep[r * ks.size() + j]);
      const double mean = s.value() / static_cast<double>(repetitions);
      for (std::size_t r = 0; r < repetitions; ++r) {
        const double d = per_rep[r * ks.size() + j] - mean;
        s2.add(d * d);
      }
      const double se = repetitions > 1
                            ? std::sqrt(s2.value() / static_cast<double>(repetitions - 1) /
                                        static_cast<double>(repetitions))
                            : NAN;
      rows.push_back({scheme, ks[j], mean, se, used_pairs, total_pairs - used_pairs});
    }
  }
  return rows;
}

inline void write_mae_csv(std::ostream& os, const std::vector<MaeRow>& rows) {
  os << "scheme,K,mae,stderr,pairs,excluded_pairs\n";
  for (const auto& r : rows)
    os << scheme_name(r.scheme) << ',' << r.K << ',' << fmt_double(r.mae) << ','
       << fmt_double(r.stderr_) << ',' << r.pairs << ',' << r.excluded << '\n';
}

struct RatioRow {
  index_t D, f, K;
  double ratio;
  std::string increasing_in_k;  // "1"/"0" against the previous K for this f; "NA" first
  std::string increasing_in_f;  // against the previous f for this K
};

inline std::vector<RatioRow> run_ratio_table(index_t D, std::vector<index_t> fs, std::vector<index_t> ks) {
  if (fs.empty() || ks.empty()) throw validation_error("ratio table needs non-empty f and K lists");
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<RatioRow> rows;
  std::map<index_t, double> prev_f;  // K -> ratio at previous f
  for (index_t f : fs) {
    std::optional<double> prev_k;
    for (index_t K : ks) {
      const double r = variance_ratio(D, f, K);
      auto cmp = [](std::optional<double> prev, double cur) -> std::string {
        if (!prev) return "NA";
        return cur > *prev ? "1" : "0";
      };
      const auto it = prev_f.find(K);
      rows.push_back({D, f, K, r, cmp(prev_k, r),
                      cmp(it == prev_f.end() ? std::nullopt : std::optional<double>(it->second), r)});
      prev_k = r;
      prev_f[K] = r;
    }
  }
  return rows;
}

inline void write_ratio_csv(std::ostream& os, const std::vector<RatioRow>& rows) {
  os << "D,f,K,ratio,increasing_in_K,increasing_in_f\n";
  for (const auto& r : rows)
    os << r.D << ',' << r.f << ',' << r.K << ',' << fmt_double(r.ratio) << ',' << r.increasing_in_k
       << ',' << r.increasing_in_f << '\n';
}

inline void write_theory_csv_header(std::ostream& os) {
  os << "scheme,D,f,a,K,variance,e_tilde,method\n";
}

inline void write_theory_csv_row(std::ostream& os, const VarianceReport& r) {
  os << scheme_name(r.scheme) << ',' << r.D << ',' << r.f << ',' << r.a << ',' << r.K << ','
     << fmt_double(r.variance) << ',' << (r.e_tilde ? fmt_double(*r.e_tilde) : "NA") << ','
     << method_name(r.method) << '\n';
}

}  // namespace cminhash
