#pragma once

// Batch configuration: an INI file with one [section] per subcommand and
// flat key = value entries. Lists are comma separated. Every default mirrors
// the reference parameters (alpha 1.0, J_x 1.05, h_z -0.5, L 8, PERMUTE).

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "petzkit/errors.hpp"

namespace petzkit::batch {

using boost::property_tree::ptree;

inline ptree load_ini(const std::string& path) {
  ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return tree;
}

inline ptree parse_ini(const std::string& text) {
  ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return tree;
}

namespace detail {

template <class T>
T parse_scalar(const std::string& key, std::string text) {
  boost::algorithm::trim(text);
  std::istringstream is(text);
  T value{};
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config: '" + key + "' expects a boolean, got '" + text + "'");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else {
    is >> value;
    if (!is || !is.eof()) {
      throw ConfigError("config: cannot parse '" + text + "' for key '" + key + "'");
    }
    return value;
  }
}

}  // namespace detail

/// One INI section; tracks which keys were read so typos are reported.
class Section {
 public:
  Section(const ptree& tree, std::string name) : name_(std::move(name)) {
    if (auto child = tree.get_child_optional(name_)) node_ = *child;
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    auto v = node_.get_optional<std::string>(key);
    return v ? detail::parse_scalar<T>(name_ + "." + key, *v) : fallback;
  }

  template <class T>
  std::vector<T> get_list(const std::string& key, std::vector<T> fallback) {
    used_.insert(key);
    auto v = node_.get_optional<std::string>(key);
    if (!v) return fallback;
    std::string text = *v;
    boost::algorithm::trim(text);
    std::vector<T> out;
    if (text.empty()) return out;
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
    for (auto& p : parts) out.push_back(detail::parse_scalar<T>(name_ + "." + key, p));
    return out;
  }

  void reject_unknown() const {
    for (const auto& kv : node_) {
      if (!used_.count(kv.first)) {
        throw ConfigError("config: unknown key '" + kv.first + "' in [" + name_ + "]");
      }
    }
  }

 private:
  std::string name_;
  ptree node_;
  std::set<std::string> used_;
};

/// Options shared by every subcommand (also settable from the command line).
struct CommonOptions {
  std::string out;
  std::uint64_t seed = 0;
  int workers = 1;
  int max_L = 14;
};

inline void read_common(Section& s, CommonOptions& c, const std::string& default_out) {
  c.out = s.get<std::string>("out", default_out);
  c.seed = s.get<std::uint64_t>("seed", 0);
  c.workers = s.get<int>("workers", 1);
  c.max_L = s.get<int>("max_L", 14);
  if (c.workers < 1) throw ConfigError("config: workers must be >= 1");
}

struct BetaGrid {
  std::string kind = "geometric";
  double min = 1e-2;
  double max = 1e2;
  int count = 40;
  std::vector<double> values;  ///< explicit list, overrides kind/min/max/count

  std::vector<double> expand() const {
    if (!values.empty()) return values;
    if (count < 1) throw ConfigError("config: beta_count must be >= 1");
    std::vector<double> out;
    if (kind == "geometric") {
      if (!(min > 0.0 && max >= min)) {
        throw ConfigError("config: geometric beta grid needs 0 < beta_min <= beta_max");
      }
      for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(min * std::pow(max / min, t));
      }
    } else if (kind == "linear") {
      if (!(min >= 0.0 && max >= min)) {
        throw ConfigError("config: linear beta grid needs 0 <= beta_min <= beta_max");
      }
      for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(min + (max - min) * t);
      }
    } else {
      throw ConfigError("config: beta_kind must be geometric or linear");
    }
    return out;
  }
};

struct SweepConfig {
  CommonOptions common{"sweep.csv"};
  double alpha = 1.0;
  double J_x = 1.05;
  std::vector<double> h_z{-0.5, 0.0};
  std::vector<int> L{8};
  BetaGrid beta;
  std::vector<std::string> configurations{"nonpermuted", "permuted"};
  std::vector<int> blocks_a, blocks_b, blocks_c;  ///< empty: edge blocks of two sites
  std::vector<int> permutation;                   ///< empty: PERMUTE (L = 8 only)
  double lambda = 0.0;
  bool record_timing = false;

  static SweepConfig from(const ptree& tree) {
    Section s(tree, "sweep");
    SweepConfig c;
    read_common(s, c.common, "sweep.csv");
    c.alpha = s.get("alpha", c.alpha);
    c.J_x = s.get("J_x", c.J_x);
    c.h_z = s.get_list("h_z", c.h_z);
    c.L = s.get_list("L", c.L);
    c.beta.kind = s.get<std::string>("beta_kind", c.beta.kind);
    c.beta.min = s.get("beta_min", c.beta.min);
    c.beta.max = s.get("beta_max", c.beta.max);
    c.beta.count = s.get("beta_count", c.beta.count);
    c.beta.values = s.get_list<double>("beta_values", {});
    c.configurations = s.get_list("configurations", c.configurations);
    c.blocks_a = s.get_list<int>("blocks_a", {});
    c.blocks_b = s.get_list<int>("blocks_b", {});
    c.blocks_c = s.get_list<int>("blocks_c", {});
    c.permutation = s.get_list<int>("permutation", {});
    c.lambda = s.get("lambda", c.lambda);
    c.record_timing = s.get("record_timing", c.record_timing);
    s.reject_unknown();
    c.validate();
    return c;
  }

  void validate() const {
    if (h_z.empty() || L.empty()) throw ConfigError("config: h_z and L lists must be non-empty");
    if (configurations.empty()) throw ConfigError("config: no configurations selected");
    for (const auto& k : configurations) {
      if (k != "nonpermuted" && k != "permuted") {
        throw ConfigError("config: unknown configuration '" + k + "'");
      }
    }
    const bool any = !blocks_a.empty() || !blocks_b.empty() || !blocks_c.empty();
    if (any && blocks_b.empty()) throw ConfigError("config: custom blocks need blocks_b");
    if (beta.expand().empty()) throw ConfigError("config: beta grid is empty");
  }
};

struct RbmConfig {
  CommonOptions common{"rbm.csv"};
  int d_a = 2, d_b = 2, d_c = 2;
  double beta = 1.0;
  double offset = 0.0;
  std::vector<double> strengths{1e-2, 5e-3, 2.5e-3, 1e-3};
  int seeds = 20;

  static RbmConfig from(const ptree& tree) {
    Section s(tree, "rbm");
    RbmConfig c;
    read_common(s, c.common, "rbm.csv");
    auto dims = s.get_list<int>("dims", {c.d_a, c.d_b, c.d_c});
    if (dims.size() != 3) throw ConfigError("config: rbm.dims needs three entries");
    c.d_a = dims[0];
    c.d_b = dims[1];
    c.d_c = dims[2];
    c.beta = s.get("beta", c.beta);
    c.offset = s.get("offset", c.offset);
    c.strengths = s.get_list("strengths", c.strengths);
    c.seeds = s.get("seeds", c.seeds);
    s.reject_unknown();
    if (c.d_a < 1 || c.d_b < 1 || c.d_c < 1 || c.d_a * c.d_b * c.d_c < 2) {
      throw ConfigError("config: rbm.dims must be positive with product >= 2");
    }
    if (c.seeds < 0 || c.beta < 0.0) throw ConfigError("config: rbm seeds and beta must be >= 0");
    for (double d : c.strengths)
      if (d < 0.0) throw ConfigError("config: rbm strengths must be >= 0");
    return c;
  }
};

struct SpectrumConfig {
  CommonOptions common{"spectrum.csv"};
  std::string hist_out;  ///< empty: <out stem>_hist.csv
  double alpha = 1.0;
  double J_x = 1.05;
  std::vector<double> h_z{-0.5, 0.0};
  std::vector<int> L{12};
  std::vector<std::string> sectors{"even"};
  double window_low = 0.25;
  double window_high = 0.75;
  int poly_degree = 7;
  int bins = 30;
  double hist_max = 4.0;

  static SpectrumConfig from(const ptree& tree) {
    Section s(tree, "spectrum");
    SpectrumConfig c;
    read_common(s, c.common, "spectrum.csv");
    c.hist_out = s.get<std::string>("hist_out", "");
    c.alpha = s.get("alpha", c.alpha);
    c.J_x = s.get("J_x", c.J_x);
    c.h_z = s.get_list("h_z", c.h_z);
    c.L = s.get_list("L", c.L);
    c.sectors = s.get_list("sectors", c.sectors);
    c.window_low = s.get("window_low", c.window_low);
    c.window_high = s.get("window_high", c.window_high);
    c.poly_degree = s.get("poly_degree", c.poly_degree);
    c.bins = s.get("bins", c.bins);
    c.hist_max = s.get("hist_max", c.hist_max);
    s.reject_unknown();
    for (const auto& k : c.sectors) {
      if (k != "even" && k != "odd") throw ConfigError("config: sectors are even or odd");
    }
    if (c.h_z.empty() || c.L.empty()) throw ConfigError("config: h_z and L must be non-empty");
    return c;
  }

  std::string histogram_path() const {
    if (!hist_out.empty()) return hist_out;
    const auto& out = common.out;
    const auto dot = out.rfind('.');
    const auto slash = out.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? out.substr(0, dot) : out) + "_hist.csv";
  }
};

struct BoundsConfig {
  CommonOptions common{"bounds.csv"};
  std::vector<int> lemmas{1, 2, 3, 4};
  int instances = 100;
  int min_sites = 3;
  int max_sites = 6;
  std::vector<double> lemma4_betas{0.01, 0.05, 0.1};
  double time = 1.0;
  double perturbation = 0.1;

  static BoundsConfig from(const ptree& tree) {
    Section s(tree, "bounds");
    BoundsConfig c;
    read_common(s, c.common, "bounds.csv");
    c.lemmas = s.get_list("lemmas", c.lemmas);
    c.instances = s.get("instances", c.instances);
    c.min_sites = s.get("min_sites", c.min_sites);
    c.max_sites = s.get("max_sites", c.max_sites);
    c.lemma4_betas = s.get_list("lemma4_betas", c.lemma4_betas);
    c.time = s.get("time", c.time);
    c.perturbation = s.get("perturbation", c.perturbation);
    s.reject_unknown();
    for (int l : c.lemmas)
      if (l < 1 || l > 4) throw ConfigError("config: lemmas are numbered 1..4");
    if (c.instances < 0) throw ConfigError("config: instances must be >= 0");
    if (c.min_sites < 3 || c.max_sites < c.min_sites) {
      throw ConfigError("config: need 3 <= min_sites <= max_sites");
    }
    return c;
  }
};

}  // namespace petzkit::batch
