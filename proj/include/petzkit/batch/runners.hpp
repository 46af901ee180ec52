#pragma once

// Batch runners behind the command-line subcommands. Each runner is a pure
// function of its configuration: rows are computed into per-index slots and
// emitted in a fixed order, so reruns produce byte-identical CSV.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "petzkit/batch/config.hpp"
#include "petzkit/batch/csv.hpp"
#include "petzkit/batch/parallel.hpp"
#include "petzkit/bounds.hpp"
#include "petzkit/petz.hpp"
#include "petzkit/rbm.hpp"
#include "petzkit/spectral.hpp"
#include "petzkit/spinchain.hpp"

namespace petzkit::batch {

struct RunSummary {
  std::size_t rows = 0;
  std::size_t violations = 0;  ///< hard-asserted margins below -1e-8
};

/// Rough peak footprint of a dense recovery sweep at L sites.
inline std::size_t estimated_sweep_bytes(int L) {
  return static_cast<std::size_t>(8.0 * 16.0 * std::ldexp(1.0, 2 * L));
}

inline void require_within_cap(int L, int max_L, std::size_t bytes) {
  if (L > max_L) {
    std::ostringstream os;
    os << "L=" << L << " exceeds max-L=" << max_L << "; estimated memory "
       << bytes / (1024.0 * 1024.0) << " MiB";
    throw ResourceError(os.str(), bytes);
  }
}

// ---------------------------------------------------------------- sweep

struct SweepRecord {
  int L = 0;
  double h_z = 0.0;
  double beta = 0.0;
  std::string configuration;
  double cmi_bits = 0.0;
  double fidelity = 0.0;
  double trace_distance = 0.0;
  double opnorm_distance = 0.0;
  double fr_bound_margin = 0.0;
  double figbound_margin = 0.0;
  double recovered_trace = 0.0;
  double wall_time_s = 0.0;
};

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "L",          "h_z",           "beta",           "configuration",
      "cmi_bits",   "fidelity",      "trace_distance", "opnorm_distance",
      "fr_bound_margin", "figbound_margin", "recovered_trace", "wall_time_s"};
  return cols;
}

inline Partition sweep_partition(const SweepConfig& cfg, int L, const std::string& configuration) {
  Partition p;
  try {
    if (cfg.blocks_b.empty()) {
      p = Partition::chain_default(L);
    } else {
      p = Partition::chain(L, cfg.blocks_a, cfg.blocks_b, cfg.blocks_c);
    }
    if (configuration == "permuted") {
      if (!cfg.permutation.empty()) {
        p.permutation = cfg.permutation;
      } else if (L == 8) {
        p.permutation = Partition::chain8_permuted().permutation;
      } else {
        throw ConfigError("config: the permuted configuration needs a permutation for L != 8");
      }
      p.validate();
    }
  } catch (const PartitionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return p;
}

inline std::vector<SweepRecord> sweep_records(const SweepConfig& cfg) {
  cfg.validate();
  auto Ls = cfg.L;
  auto hzs = cfg.h_z;
  auto configs = cfg.configurations;
  auto betas = cfg.beta.expand();
  std::sort(Ls.begin(), Ls.end());
  std::sort(hzs.begin(), hzs.end());
  std::sort(configs.begin(), configs.end());
  std::sort(betas.begin(), betas.end());
  for (int L : Ls) require_within_cap(L, cfg.common.max_L, estimated_sweep_bytes(L));
  for (double b : betas)
    if (b < 0.0) throw ConfigError("config: beta values must be >= 0");

  // Partitions are validated up front so configuration errors surface early.
  std::vector<std::tuple<int, double>> models;
  for (int L : Ls) {
    for (const auto& k : configs) sweep_partition(cfg, L, k);
    for (double hz : hzs) models.emplace_back(L, hz);
  }

  std::vector<Spectrum<double>> spectra(models.size());
  parallel_for(models.size(), cfg.common.workers, [&](std::size_t i) {
    const auto [L, hz] = models[i];
    spectra[i] = eigh(build_hamiltonian({L, cfg.alpha, hz, cfg.J_x}, cfg.common.max_L));
  });

  struct Task {
    std::size_t model;
    std::string configuration;
    double beta;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < models.size(); ++m)
    for (const auto& k : configs)
      for (double b : betas) tasks.push_back({m, k, b});

  std::vector<SweepRecord> out(tasks.size());
  parallel_for(tasks.size(), cfg.common.workers, [&](std::size_t i) {
    const auto& t = tasks[i];
    const auto [L, hz] = models[t.model];
    const auto start = std::chrono::steady_clock::now();
    const auto rho = gibbs_state(spectra[t.model], t.beta, std::vector<int>(L, 2));
    const auto rep = recovery_report(rho, sweep_partition(cfg, L, t.configuration), cfg.lambda);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    out[i] = {L,
              hz,
              t.beta,
              t.configuration,
              rep.cmi,
              rep.fidelity,
              rep.trace_distance,
              rep.opnorm_distance,
              rep.fr_bound_margin,
              rep.figbound_margin,
              rep.recovered_trace,
              cfg.record_timing ? dt.count() : 0.0};
  });
  return out;
}

inline CsvTable sweep_table(const std::vector<SweepRecord>& records) {
  CsvTable t("sweep", sweep_columns());
  for (const auto& r : records) {
    t.add_row({fmt_num(r.L), fmt_num(r.h_z), fmt_num(r.beta), r.configuration,
               fmt_num(r.cmi_bits), fmt_num(r.fidelity), fmt_num(r.trace_distance),
               fmt_num(r.opnorm_distance), fmt_num(r.fr_bound_margin),
               fmt_num(r.figbound_margin), fmt_num(r.recovered_trace),
               fmt_num(r.wall_time_s)});
  }
  return t;
}

inline RunSummary run_sweep(const SweepConfig& cfg) {
  const auto records = sweep_records(cfg);
  sweep_table(records).save(cfg.common.out);
  RunSummary s{records.size(), 0};
  for (const auto& r : records) {
    if (r.fr_bound_margin < -kBoundSlack || r.figbound_margin < -kBoundSlack) ++s.violations;
  }
  return s;
}

// ---------------------------------------------------------------- rbm

struct RbmRecord {
  std::uint64_t seed = 0;
  std::string dims;
  double beta = 0.0;
  double strength = 0.0;
  double exact_cmi = 0.0;
  double perturbative_cmi = 0.0;
  double paper_formula_cmi = 0.0;
  double abs_error = 0.0;
  double fidelity = 0.0;
  double fr_bound_margin = 0.0;
};

inline std::vector<RbmRecord> rbm_records(const RbmConfig& cfg) {
  const int d = cfg.d_a * cfg.d_b * cfg.d_c;
  const std::string dims = std::to_string(cfg.d_a) + "x" + std::to_string(cfg.d_b) + "x" +
                           std::to_string(cfg.d_c);
  const std::size_t per_seed = cfg.strengths.size();
  std::vector<RbmRecord> out(static_cast<std::size_t>(cfg.seeds) * per_seed);
  parallel_for(static_cast<std::size_t>(cfg.seeds), cfg.common.workers, [&](std::size_t k) {
    const std::uint64_t seed = cfg.common.seed + k;
    const RHermitian r = sample_band_matrix(d, seed);
    for (std::size_t j = 0; j < per_seed; ++j) {
      BandModel m{cfg.d_a, cfg.d_b, cfg.d_c, cfg.offset, cfg.strengths[j], cfg.beta, seed};
      const auto rep = recovery_report(band_gibbs_state(r, m), m.partition());
      const auto pert = perturbative_cmi(r, m);
      out[k * per_seed + j] = {seed,          dims,
                               cfg.beta,      cfg.strengths[j],
                               rep.cmi,       pert.bits,
                               pert.paper_formula_bits, std::abs(rep.cmi - pert.bits),
                               rep.fidelity,  rep.fr_bound_margin};
    }
  });
  return out;
}

inline CsvTable rbm_table(const std::vector<RbmRecord>& records) {
  CsvTable t("rbm", {"seed", "dims", "beta", "D", "exact_cmi", "perturbative_cmi",
                     "paper_formula_cmi", "abs_error", "fidelity", "fr_bound_margin"});
  for (const auto& r : records) {
    t.add_row({fmt_num(static_cast<unsigned long long>(r.seed)), r.dims, fmt_num(r.beta),
               fmt_num(r.strength), fmt_num(r.exact_cmi), fmt_num(r.perturbative_cmi),
               fmt_num(r.paper_formula_cmi), fmt_num(r.abs_error), fmt_num(r.fidelity),
               fmt_num(r.fr_bound_margin)});
  }
  return t;
}

inline RunSummary run_rbm(const RbmConfig& cfg) {
  const auto records = rbm_records(cfg);
  rbm_table(records).save(cfg.common.out);
  RunSummary s{records.size(), 0};
  for (const auto& r : records)
    if (r.fr_bound_margin < -kBoundSlack) ++s.violations;
  return s;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumRecord {
  int L = 0;
  double h_z = 0.0;
  std::string sector;
  double mean_gap_ratio = 0.0;
  double ks_vs_wigner = 0.0;
  double ks_vs_poisson = 0.0;
  std::size_t retained_levels = 0;
  Histogram histogram;
};

/// Statistics of one sorted level sequence; shared by the chain pipeline and
/// synthetic inputs.
inline SpectrumRecord spectrum_record(std::vector<double> levels, const SpectrumConfig& cfg) {
  const SpectrumSample sample(std::move(levels), cfg.window_low, cfg.window_high);
  SpectrumRecord r;
  r.retained_levels = sample.retained().size();
  r.mean_gap_ratio = spacing_ratios(sample).mean;
  const auto s = unfolded_spacings(sample, cfg.poly_degree);
  r.ks_vs_wigner = ks_distance(s, wigner_cdf);
  r.ks_vs_poisson = ks_distance(s, poisson_cdf);
  r.histogram = histogram(s, cfg.bins, 0.0, cfg.hist_max);
  return r;
}

inline std::vector<SpectrumRecord> spectrum_records(const SpectrumConfig& cfg) {
  auto Ls = cfg.L;
  auto hzs = cfg.h_z;
  auto sectors = cfg.sectors;
  std::sort(Ls.begin(), Ls.end());
  std::sort(hzs.begin(), hzs.end());
  std::sort(sectors.begin(), sectors.end());
  for (int L : Ls) {
    const auto n = static_cast<double>(sector_dimension(L, Sector::even));
    require_within_cap(L, cfg.common.max_L, static_cast<std::size_t>(16.0 * n * n));
  }
  struct Task {
    int L;
    double h_z;
    std::string sector;
  };
  std::vector<Task> tasks;
  for (int L : Ls)
    for (double hz : hzs)
      for (const auto& s : sectors) tasks.push_back({L, hz, s});

  std::vector<SpectrumRecord> out(tasks.size());
  parallel_for(tasks.size(), cfg.common.workers, [&](std::size_t i) {
    const auto& t = tasks[i];
    const Sector sector = t.sector == "even" ? Sector::even : Sector::odd;
    const RHermitian block =
        sector_hamiltonian({t.L, cfg.alpha, t.h_z, cfg.J_x}, sector, cfg.common.max_L);
    const VectorXd ev = eigvalsh(block);
    auto rec = spectrum_record({ev.data(), ev.data() + ev.size()}, cfg);
    rec.L = t.L;
    rec.h_z = t.h_z;
    rec.sector = t.sector;
    out[i] = std::move(rec);
  });
  return out;
}

inline CsvTable spectrum_table(const std::vector<SpectrumRecord>& records) {
  CsvTable t("spectrum", {"L", "h_z", "sector", "mean_gap_ratio", "ks_vs_wigner",
                          "ks_vs_poisson", "retained_levels"});
  for (const auto& r : records) {
    t.add_row({fmt_num(r.L), fmt_num(r.h_z), r.sector, fmt_num(r.mean_gap_ratio),
               fmt_num(r.ks_vs_wigner), fmt_num(r.ks_vs_poisson),
               fmt_num(static_cast<unsigned long long>(r.retained_levels))});
  }
  return t;
}

inline CsvTable spectrum_histogram_table(const std::vector<SpectrumRecord>& records) {
  CsvTable t("spectrum_hist", {"L", "h_z", "sector", "bin_left", "bin_right", "density"});
  for (const auto& r : records) {
    for (std::size_t b = 0; b < r.histogram.density.size(); ++b) {
      t.add_row({fmt_num(r.L), fmt_num(r.h_z), r.sector, fmt_num(r.histogram.edges[b]),
                 fmt_num(r.histogram.edges[b + 1]), fmt_num(r.histogram.density[b])});
    }
  }
  return t;
}

inline RunSummary run_spectrum(const SpectrumConfig& cfg) {
  const auto records = spectrum_records(cfg);
  spectrum_table(records).save(cfg.common.out);
  spectrum_histogram_table(records).save(cfg.histogram_path());
  return {records.size(), 0};
}

// ---------------------------------------------------------------- bounds

/// A randomized lemma instance: Gibbs state of a random-parameter chain on
/// 3..6 sites with a random (possibly interleaved) A/B/C split.
struct BoundsInstance {
  int index = 0;
  ChainParams params;
  double beta = 0.0;
  Partition partition;
  RHermitian hamiltonian;
  std::mt19937_64 rng;
};

inline BoundsInstance make_bounds_instance(std::uint64_t base_seed, int index, int min_sites,
                                           int max_sites) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(index)};
  BoundsInstance inst;
  inst.index = index;
  inst.rng.seed(seq);
  auto& rng = inst.rng;
  std::uniform_int_distribution<int> sites(min_sites, max_sites);
  std::uniform_real_distribution<double> coupling(-1.5, 1.5);
  std::uniform_real_distribution<double> log_beta(std::log(0.05), std::log(5.0));
  const int n = sites(rng);
  inst.params = {n, coupling(rng), coupling(rng), coupling(rng)};
  inst.beta = std::exp(log_beta(rng));

  std::vector<int> order = identity_permutation(n);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_a = std::uniform_int_distribution<int>(1, n - 2)(rng);
  const int n_b = std::uniform_int_distribution<int>(1, n - 1 - n_a)(rng);
  std::vector<int> a(order.begin(), order.begin() + n_a);
  std::vector<int> b(order.begin() + n_a, order.begin() + n_a + n_b);
  std::vector<int> c(order.begin() + n_a + n_b, order.end());
  for (auto* v : {&a, &b, &c}) std::sort(v->begin(), v->end());
  inst.partition = Partition::chain(n, a, b, c);
  inst.hamiltonian = build_hamiltonian(inst.params);
  return inst;
}

inline CMatrix evolution_unitary(const RHermitian& h, double t) {
  const auto s = eigh(h.cast<cplx>());
  return spectral_function(s, [t](double e) { return std::exp(cplx(0.0, -e * t)); });
}

struct BoundsRecord {
  std::string lemma;
  int instance = 0;
  int n_sites = 0;
  double beta = 0.0;
  double cmi_bits = 0.0;
  double value = 0.0;
  double limit = 0.0;
  double margin = 0.0;  ///< limit - value
  double reported_limit = 0.0;
  bool asserted = true;
};

inline std::vector<BoundsRecord> bounds_instance_records(const BoundsConfig& cfg, int k) {
  auto inst = make_bounds_instance(cfg.common.seed, k, cfg.min_sites, cfg.max_sites);
  const int n = inst.params.L;
  const auto dims = inst.partition.local_dims;
  const auto rho = gibbs_state(eigh(inst.hamiltonian), inst.beta, dims);
  auto& rng = inst.rng;
  std::vector<BoundsRecord> rows;
  auto has = [&](int l) {
    return std::find(cfg.lemmas.begin(), cfg.lemmas.end(), l) != cfg.lemmas.end();
  };

  if (has(1)) {
    const QuantumChannel ch = [&] {
      switch (k % 3) {
        case 0: return QuantumChannel::random(rho.dim(), 2, rng);
        case 1: {
          const int site = std::uniform_int_distribution<int>(0, n - 1)(rng);
          return QuantumChannel::local_depolarizing(dims, site, 0.5);
        }
        default: return QuantumChannel::unitary(evolution_unitary(inst.hamiltonian, cfg.time));
      }
    }();
    const auto c = check_lemma1(rho, inst.partition, ch);
    rows.push_back({"1a", k, n, inst.beta, c.cmi, c.fidelity_bound, c.fidelity,
                    c.fidelity_margin, c.fidelity, true});
    rows.push_back({"1b", k, n, inst.beta, c.cmi, c.trace_distance, c.eps_safe,
                    c.trace_margin, c.eps_reported, true});
  }
  if (has(2)) {
    const int site = std::uniform_int_distribution<int>(0, n - 1)(rng);
    RMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const RHermitian h2 = RHermitian::trusted(
        inst.hamiltonian.matrix() + cfg.perturbation * embed(x, dims, {site}));
    const auto c = check_lemma2(rho, inst.partition, evolution_unitary(inst.hamiltonian, cfg.time),
                                evolution_unitary(h2, cfg.time));
    rows.push_back({"2", k, n, inst.beta, c.cmi, c.lhs, c.eps_safe + c.delta_upper, c.margin,
                    c.eps_reported + c.delta_upper, true});
  }
  if (has(3)) {
    CMatrix o = CMatrix::Zero(rho.dim(), rho.dim());
    if (k % 2 == 0) {
      RMatrix z(2, 2);
      z << 1, 0, 0, -1;
      for (int s = 0; s < n; ++s) o += embed(z, dims, {s}).cast<cplx>();
    } else {
      std::normal_distribution<double> g;
      for (Index j = 0; j < o.cols(); ++j)
        for (Index i = 0; i < o.rows(); ++i) o(i, j) = cplx(g(rng), g(rng));
      o = (o + o.adjoint()).eval() * 0.5;
    }
    const auto c = check_lemma3(rho, inst.partition, CHermitian::trusted(o));
    rows.push_back({"3", k, n, inst.beta, c.cmi, c.lhs, c.bound, c.margin, c.bound_reported, true});
    rows.push_back({"3e", k, n, inst.beta, c.cmi, c.expectation_gap, c.bound,
                    c.bound - c.expectation_gap, c.bound_reported, true});
  }
  if (has(4)) {
    for (double beta : cfg.lemma4_betas) {
      const auto c = check_lemma4(inst.hamiltonian, inst.partition, beta);
      rows.push_back({"4", k, n, beta, c.cmi, c.hamiltonian_gap, c.bound,
                      c.bound - c.hamiltonian_gap, c.bound, false});
    }
  }
  return rows;
}

inline std::vector<BoundsRecord> bounds_records(const BoundsConfig& cfg) {
  std::vector<std::vector<BoundsRecord>> per(static_cast<std::size_t>(cfg.instances));
  parallel_for(per.size(), cfg.common.workers, [&](std::size_t k) {
    per[k] = bounds_instance_records(cfg, static_cast<int>(k));
  });
  std::vector<BoundsRecord> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

inline CsvTable bounds_table(const std::vector<BoundsRecord>& records) {
  CsvTable t("bounds", {"lemma", "instance", "n_sites", "beta", "cmi_bits", "value", "limit",
                        "margin", "reported_limit", "asserted"});
  for (const auto& r : records) {
    t.add_row({r.lemma, fmt_num(r.instance), fmt_num(r.n_sites), fmt_num(r.beta),
               fmt_num(r.cmi_bits), fmt_num(r.value), fmt_num(r.limit), fmt_num(r.margin),
               fmt_num(r.reported_limit), r.asserted ? "1" : "0"});
  }
  return t;
}

inline RunSummary run_bounds(const BoundsConfig& cfg) {
  const auto records = bounds_records(cfg);
  bounds_table(records).save(cfg.common.out);
  RunSummary s{records.size(), 0};
  for (const auto& r : records)
    if (r.asserted && r.margin < -kBoundSlack) ++s.violations;
  return s;
}

// ---------------------------------------------------------------- paper

/// Full figure-data pipeline at desk scale into `dir`, with a manifest that
/// maps each figure to its CSV and plot kind.
inline RunSummary run_paper(const std::string& dir, const CommonOptions& common) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  auto with = [&](CommonOptions c, const char* name) {
    c.out = path(name);
    return c;
  };
  RunSummary total;
  auto add = [&](const RunSummary& s) {
    total.rows += s.rows;
    total.violations += s.violations;
  };

  SpectrumConfig spec;
  spec.common = with(common, "spectrum.csv");
  add(run_spectrum(spec));

  SweepConfig sweep;
  sweep.common = with(common, "sweep.csv");
  add(run_sweep(sweep));

  SweepConfig sizes;
  sizes.common = with(common, "sweep_sizes.csv");
  sizes.L = {6, 8, 10};
  sizes.h_z = {-0.5};
  sizes.configurations = {"nonpermuted"};
  sizes.beta.count = 24;
  add(run_sweep(sizes));

  SweepConfig hz;
  hz.common = with(common, "sweep_hz.csv");
  hz.h_z.clear();
  for (int i = -10; i <= 10; ++i) hz.h_z.push_back(0.1 * i);
  hz.beta.count = 30;
  add(run_sweep(hz));

  RbmConfig rbm;
  rbm.common = with(common, "rbm.csv");
  add(run_rbm(rbm));

  BoundsConfig bounds;
  bounds.common = with(common, "bounds.csv");
  add(run_bounds(bounds));

  std::ofstream m(path("manifest.txt"), std::ios::binary | std::ios::trunc);
  if (!m) throw IoError("cannot write manifest in '" + dir + "'");
  m << "# figure kind csv\n"
       "fig2 spacing_hist spectrum_hist.csv\n"
       "fig3 beta_lines sweep_sizes.csv\n"
       "fig4 beta_lines sweep.csv\n"
       "fig5 beta_lines sweep.csv\n"
       "fig6 bound_check sweep.csv\n"
       "fig7 beta_lines sweep.csv\n"
       "fig9 beta_hz_heatmap sweep_hz.csv\n";
  return total;
}

}  // namespace petzkit::batch
