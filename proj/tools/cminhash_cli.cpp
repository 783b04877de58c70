// cminhash: command-line front end for sketching, estimation, variance
// theory, exhaustive oracles and the simulation experiments.
//
// Exit codes: 0 success, 1 validation error, 2 internal self-check failure.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cminhash/cminhash.hpp"

namespace {

using namespace cminhash;

/// Writes to the named file, or stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw validation_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct SketchArgs {
  std::string input, format = "sparse-tsv", scheme = "csigmapi", seed = "0", out;
  double threshold = 0.0;
  index_t k = 0;
};

void run_sketch(const SketchArgs& a) {
  const Dataset ds = load_vectors(a.input, parse_format(a.format), a.threshold);
  const Scheme scheme = parse_scheme(a.scheme);
  const Sketcher sk(scheme, ds.dim, a.k, parse_seed_hex(a.seed));
  Output out(a.out);
  for (std::size_t i = 0; i < ds.vectors.size(); ++i) {
    if (ds.vectors[i].empty())
      throw validation_error("vector '" + ds.ids[i] + "': undefined hash of empty set");
    write_signature(out.stream(), ds.ids[i], sk.sign(ds.vectors[i]));
  }
}

struct EstimateArgs {
  std::string signatures, pairs = "all", out;
};

void run_estimate(const EstimateArgs& a) {
  std::ifstream in(a.signatures);
  if (!in) throw validation_error("cannot open " + a.signatures);
  const auto recs = read_signatures(in);
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (!by_id.emplace(recs[i].id, i).second)
      throw validation_error("duplicate vector id '" + recs[i].id + "' in signature file");

  std::vector<std::pair<std::size_t, std::size_t>> todo;
  if (a.pairs == "all") {
    for (std::size_t i = 0; i < recs.size(); ++i)
      for (std::size_t j = i + 1; j < recs.size(); ++j) todo.emplace_back(i, j);
  } else {
    // "id,id;id,id;..."
    std::stringstream ss(a.pairs);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (item.empty()) continue;
      const auto comma = item.find(',');
      if (comma == std::string::npos) throw validation_error("bad pair '" + item + "' (want id,id)");
      const std::string x = item.substr(0, comma), y = item.substr(comma + 1);
      const auto ix = by_id.find(x), iy = by_id.find(y);
      if (ix == by_id.end()) throw validation_error("unknown vector id '" + x + "'");
      if (iy == by_id.end()) throw validation_error("unknown vector id '" + y + "'");
      todo.emplace_back(ix->second, iy->second);
    }
  }
  Output out(a.out);
  out.stream() << "id_a,id_b,estimate\n";
  for (auto [i, j] : todo)
    out.stream() << recs[i].id << ',' << recs[j].id << ','
                 << fmt_double(estimate_jaccard(recs[i].signature, recs[j].signature)) << '\n';
}

struct TheoryVarArgs {
  std::string scheme = "csigmapi", location, out;
  index_t dim = 0, f = 0, a = 0, k = 0;
  bool exact = false;
};

VarianceReport theory_var(const TheoryVarArgs& t) {
  const Method method = t.exact ? Method::ExactRational : Method::LogSpace;
  if (t.exact && t.dim > 64) throw validation_error("--exact-rational supports D <= 64");
  if (t.scheme == "mh" || t.scheme == "minhash") {
    if (!(t.a <= t.f && t.f <= t.dim && t.f > 0)) throw validation_error("requires 0 <= a <= f <= D, f > 0");
    if (t.k < 1) throw validation_error("K must be >= 1");
    VarianceReport r{Scheme::MinHash, t.dim, t.f, t.a, t.k, 0.0, {}, {}, method, {}, {}};
    r.method = method;
    if (t.exact) {
      r.exact_variance = variance_mh_exact(t.f, t.a, t.k);
      r.variance = to_double(*r.exact_variance);
    } else {
      r.variance = variance_mh(static_cast<double>(t.a) / t.f, t.k);
    }
    return r;
  }
  if (t.scheme == "c0pi") {
    LocationVector x;
    if (!t.location.empty()) {
      std::ifstream in(t.location);
      if (!in) throw validation_error("cannot open " + t.location);
      std::stringstream buf;
      buf << in.rdbuf();
      x = LocationVector::parse(buf.str());
      const PairSummary s = x.summary();
      if (s.dim != t.dim || s.union_size != t.f || s.intersection != t.a)
        throw validation_error("location pattern is a (" + std::to_string(s.dim) + "," +
                               std::to_string(s.union_size) + "," + std::to_string(s.intersection) +
                               ") pair, not the requested (D,f,a)");
    } else {
      const auto [v, w] = synth_pair({t.dim, t.f, t.a, Pattern::Blocked}, 0);
      x = location_vector(v, w);
    }
    return variance_0pi(x, t.k, method);
  }
  if (t.scheme == "csigmapi") return variance_sigma_pi(t.dim, t.f, t.a, t.k, method);
  throw validation_error("unknown scheme '" + t.scheme + "'");
}

void write_theory(const TheoryVarArgs& t) {
  const VarianceReport r = theory_var(t);
  Output out(t.out);
  write_theory_csv_header(out.stream());
  write_theory_csv_row(out.stream(), r);
  if (r.exact_variance) out.stream() << "# exact variance = " << *r.exact_variance << '\n';
}

struct RatioArgs {
  index_t dim = 0;
  std::vector<index_t> fs, ks;
  std::string out;
};

struct OracleArgs {
  std::string scheme = "csigmapi";
  index_t dim = 0, f = 0, a = 0, k = 0;
};

void run_oracle(const OracleArgs& o) {
  auto [v, w] = synth_pair({o.dim, o.f, o.a, Pattern::Blocked}, 0);
  ExactMoments m;
  if (o.scheme == "c0pi") m = exact_moments_0pi(v, w, o.k);
  else if (o.scheme == "csigmapi") m = exact_moments_sigma_pi(v, w, o.k);
  else throw validation_error("oracle exact: scheme must be c0pi or csigmapi");
  std::cout << "scheme,D,f,a,K,mean,variance,mean_exact,variance_exact\n"
            << o.scheme << ',' << o.dim << ',' << o.f << ',' << o.a << ',' << o.k << ','
            << fmt_double(to_double(m.mean)) << ',' << fmt_double(to_double(m.variance)) << ','
            << m.mean << ',' << m.variance << '\n';
}

struct SimulateArgs {
  std::string config, out;
};

void run_simulate(const std::string& mode, const SimulateArgs& s) {
  ExperimentConfig cfg = load_config(s.config);
  std::string out_path = s.out;
  if (out_path.empty() && cfg.output) out_path = cfg.output->string();
  if (mode == "mse") {
    if (cfg.metric == Metric::Mae) cfg.metric = Metric::Mse;
    const auto rows = run_variance_experiment(cfg, config_pairs(cfg));
    Output out(out_path);
    write_variance_csv(out.stream(), rows, cfg.metric);
  } else {
    if (!cfg.dataset) throw validation_error("simulate mae needs a 'dataset' in the config");
    const Dataset ds = load_vectors(*cfg.dataset, cfg.format, cfg.threshold);
    const auto rows = run_mae_experiment(ds, cfg.ks, cfg.repetitions, cfg.master_seed, cfg.schemes);
    Output out(out_path);
    write_mae_csv(out.stream(), rows);
  }
}

struct CorpusArgs {
  std::size_t n = 0;
  index_t dim = 1024;
  std::string seed = "0", out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MinHash and circulant MinHash sketches with exact variance theory"};
  app.require_subcommand(1);

  SketchArgs sk;
  auto* c_sketch = app.add_subcommand("sketch", "Sign every vector of a dataset");
  c_sketch->add_option("--input", sk.input, "Vector file")->required();
  c_sketch->add_option("--format", sk.format, "sparse-tsv | dense-csv");
  c_sketch->add_option("--threshold", sk.threshold, "Binarization threshold for dense-csv");
  c_sketch->add_option("--scheme", sk.scheme, "minhash | c0pi | csigmapi")->required();
  c_sketch->add_option("--k", sk.k, "Number of hashes K")->required();
  c_sketch->add_option("--seed", sk.seed, "Master seed (hex)")->required();
  c_sketch->add_option("--out", sk.out, "Signature file (default stdout)");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate Jaccard similarities from signatures");
  c_est->add_option("--signatures", est.signatures, "Signature file")->required();
  c_est->add_option("--pairs", est.pairs, "all, or 'id,id;id,id;...'");
  c_est->add_option("--out", est.out, "CSV output (default stdout)");

  auto* c_theory = app.add_subcommand("theory", "Exact variance formulas");
  c_theory->require_subcommand(1);
  TheoryVarArgs tv;
  auto* c_var = c_theory->add_subcommand("var", "Variance of one estimator");
  c_var->add_option("--scheme", tv.scheme, "mh | c0pi | csigmapi")->required();
  c_var->add_option("--dim", tv.dim, "D")->required();
  c_var->add_option("--f", tv.f, "union size f")->required();
  c_var->add_option("--a", tv.a, "intersection a")->required();
  c_var->add_option("--k", tv.k, "K")->required();
  c_var->add_option("--location", tv.location, "Location pattern file (O/x/- symbols), c0pi only");
  c_var->add_flag("--exact-rational", tv.exact, "Use exact big-integer rationals (D <= 64)");
  c_var->add_option("--out", tv.out, "CSV output (default stdout)");

  RatioArgs ra;
  auto* c_ratio = c_theory->add_subcommand("ratio", "Var_MH / Var_(sigma,pi) table");
  c_ratio->add_option("--dim", ra.dim, "D")->required();
  c_ratio->add_option("--f", ra.fs, "Comma-separated f values")->required()->delimiter(',');
  c_ratio->add_option("--k", ra.ks, "Comma-separated K values")->required()->delimiter(',');
  c_ratio->add_option("--out", ra.out, "CSV output (default stdout)");

  auto* c_oracle = app.add_subcommand("oracle", "Exhaustive enumeration oracles");
  c_oracle->require_subcommand(1);
  OracleArgs orc;
  auto* c_exact = c_oracle->add_subcommand("exact", "Exact moments over all permutations (blocked pair)");
  c_exact->add_option("--scheme", orc.scheme, "c0pi | csigmapi")->required();
  c_exact->add_option("--dim", orc.dim, "D")->required();
  c_exact->add_option("--f", orc.f, "f")->required();
  c_exact->add_option("--a", orc.a, "a")->required();
  c_exact->add_option("--k", orc.k, "K")->required();

  auto* c_sim = app.add_subcommand("simulate", "Monte-Carlo experiments");
  c_sim->require_subcommand(1);
  SimulateArgs sim_mse, sim_mae;
  auto* c_mse = c_sim->add_subcommand("mse", "Empirical MSE vs theoretical variance");
  c_mse->add_option("--config", sim_mse.config, "JSON config")->required();
  c_mse->add_option("--out", sim_mse.out, "CSV output");
  auto* c_mae = c_sim->add_subcommand("mae", "MAE over all dataset pairs");
  c_mae->add_option("--config", sim_mae.config, "JSON config")->required();
  c_mae->add_option("--out", sim_mae.out, "CSV output");

  CorpusArgs corp;
  std::string corpus_kind;
  auto* c_corpus = app.add_subcommand("corpus", "Generate a synthetic corpus (sparse-tsv)");
  c_corpus->add_option("kind", corpus_kind, "text | blocked")->required();
  c_corpus->add_option("--n", corp.n, "Number of vectors")->required();
  c_corpus->add_option("--dim", corp.dim, "D");
  c_corpus->add_option("--seed", corp.seed, "Seed (hex)");
  c_corpus->add_option("--out", corp.out, "Output file (default stdout)");

  index_t perm_dim = 0;
  std::string perm_seed = "0";
  auto* c_perm = app.add_subcommand("perm", "Dump the permutation generated from a seed");
  c_perm->add_option("--dim", perm_dim, "D")->required();
  c_perm->add_option("--seed", perm_seed, "Seed (hex)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*c_sketch) run_sketch(sk);
    else if (*c_est) run_estimate(est);
    else if (*c_var) write_theory(tv);
    else if (*c_ratio) {
      const auto rows = run_ratio_table(ra.dim, ra.fs, ra.ks);
      Output out(ra.out);
      write_ratio_csv(out.stream(), rows);
    } else if (*c_exact) run_oracle(orc);
    else if (*c_mse) run_simulate("mse", sim_mse);
    else if (*c_mae) run_simulate("mae", sim_mae);
    else if (*c_corpus) {
      const seed_t seed = parse_seed_hex(corp.seed);
      Dataset ds;
      if (corpus_kind == "text") ds = make_text_like_corpus(corp.n, corp.dim, seed);
      else if (corpus_kind == "blocked") ds = make_blocked_corpus(corp.n, corp.dim, seed);
      else throw validation_error("corpus kind must be text or blocked");
      Output out(corp.out);
      write_sparse_tsv(out.stream(), ds);
    } else if (*c_perm) {
      const seed_t seed = parse_seed_hex(perm_seed);
      write_permutation_dump(std::cout, random_permutation(perm_dim, seed), seed);
    }
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const self_check_error& e) {
    std::cerr << "self-check failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
