#pragma once

// Flat JSON experiment configuration, e.g.
//
//   {
//     "schemes": ["minhash", "c0pi", "csigmapi"],
//     "k": [8, 16, 32],
//     "repetitions": 10000,
//     "master_seed": "0x5eed",
//     "metric": "mse",
//     "dim": 128, "f": [64, 96], "a": [32, 24], "pattern": "blocked",
//     "pair_seed": "0x1"
//   }
//
// or, for a dataset source, "dataset": "corpus.tsv" with optional "format"
// ("sparse-tsv" | "dense-csv") and "threshold". Relative dataset paths
// resolve against the config file's directory.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "cminhash/harness.hpp"

namespace cminhash {

namespace config_detail {

inline seed_t seed_field(const nlohmann::json& j) {
  if (j.is_string()) return parse_seed_hex(j.get<std::string>());
  if (j.is_number_unsigned() || j.is_number_integer()) return j.get<seed_t>();
  throw validation_error("seed must be a hex string or a non-negative integer");
}

inline std::vector<index_t> index_list(const nlohmann::json& j, const char* name) {
  std::vector<index_t> out;
  if (j.is_number_integer() || j.is_number_unsigned()) {
    out.push_back(j.get<index_t>());
  } else if (j.is_array()) {
    for (const auto& x : j) {
      if (!(x.is_number_integer() || x.is_number_unsigned()) || x.get<long long>() < 0)
        throw validation_error(std::string("config: '") + name + "' must hold non-negative integers");
      out.push_back(x.get<index_t>());
    }
  } else {
    throw validation_error(std::string("config: '") + name + "' must be an integer or a list");
  }
  return out;
}

}  // namespace config_detail

inline ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw validation_error("config: top level must be a JSON object");
  static const char* known[] = {"schemes", "k", "repetitions", "master_seed", "metric", "dim", "f",
                                "a", "pattern", "pair_seed", "dataset", "format", "threshold",
                                "output"};
  for (const auto& [key, _] : j.items())
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known))
      throw validation_error("config: unknown field '" + key + "'");

  ExperimentConfig c;
  try {
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (!j.contains("k")) throw validation_error("config: missing 'k'");
    c.ks = config_detail::index_list(j.at("k"), "k");
    if (j.contains("repetitions")) {
      const auto r = j.at("repetitions").get<long long>();
      if (r < 1) throw validation_error("config: repetitions must be >= 1");
      c.repetitions = static_cast<std::size_t>(r);
    }
    if (j.contains("master_seed")) c.master_seed = config_detail::seed_field(j.at("master_seed"));
    if (j.contains("metric")) c.metric = parse_metric(j.at("metric").get<std::string>());
    if (j.contains("pair_seed")) c.pair_seed = config_detail::seed_field(j.at("pair_seed"));
    if (j.contains("dataset")) {
      std::filesystem::path p = j.at("dataset").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.dataset = p;
      if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
      if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
    }
    if (j.contains("dim")) {
      const auto dim = j.at("dim").get<index_t>();
      const auto fs = config_detail::index_list(j.at("f"), "f");
      const auto as = config_detail::index_list(j.at("a"), "a");
      if (fs.size() != as.size()) throw validation_error("config: 'f' and 'a' lists differ in length");
      const Pattern pat = j.contains("pattern") ? parse_pattern(j.at("pattern").get<std::string>())
                                                : Pattern::Blocked;
      for (std::size_t i = 0; i < fs.size(); ++i) c.synthetic.push_back({dim, fs[i], as[i], pat});
    }
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
  if (c.dataset && !c.synthetic.empty())
    throw validation_error("config: give either 'dataset' or synthetic 'dim'/'f'/'a', not both");
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

/// Pairs named by the config: synthetic specs, or every i < j pair of the dataset.
inline std::vector<NamedPair> config_pairs(const ExperimentConfig& c) {
  std::vector<NamedPair> out;
  if (c.dataset) {
    const Dataset ds = load_vectors(*c.dataset, c.format, c.threshold);
    for (std::size_t i = 0; i < ds.vectors.size(); ++i)
      for (std::size_t k = i + 1; k < ds.vectors.size(); ++k)
        out.push_back({ds.ids[i] + ":" + ds.ids[k], ds.vectors[i], ds.vectors[k]});
    return out;
  }
  if (c.synthetic.empty()) throw validation_error("config: no pair source ('dim'/'f'/'a' or 'dataset')");
  for (std::size_t i = 0; i < c.synthetic.size(); ++i) {
    auto [v, w] = synth_pair(c.synthetic[i], derive_seed(c.pair_seed, i));
    out.push_back({c.synthetic[i].id(), std::move(v), std::move(w)});
  }
  return out;
}

}  // namespace cminhash
