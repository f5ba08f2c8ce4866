#pragma once

// Command-line front end: simulate | fit | eval | baseline.
// Exit codes: 0 success, 2 usage or configuration error, 1 runtime error.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cortree/cortree.hpp"

namespace cortree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::string join(const std::filesystem::path& dir, const char* name) { return (dir / name).string(); }

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

struct SimulateArgs {
  std::string out_dir;
  std::optional<std::size_t> n, bins;
  std::optional<std::uint64_t> seed;
  std::optional<double> group1_frac;
  std::optional<std::int64_t> count_min, count_max;
  bool low_count = false;
};

inline int run_simulate(const SimulateArgs& a, std::ostream& out) {
  SimSpec spec = a.low_count ? SimSpec::low_count() : SimSpec{};
  if (a.n) spec.n = *a.n;
  if (a.bins) spec.bins = *a.bins;
  if (a.seed) spec.seed = *a.seed;
  if (a.group1_frac) spec.group1_frac = *a.group1_frac;
  if (a.count_min) spec.count_low = *a.count_min;
  if (a.count_max) spec.count_high = *a.count_max;
  spec.validate();
  const SimData data = simulate(spec);
  ensure_dir(a.out_dir);
  io::write_count_matrix(join(a.out_dir, "counts.csv"), data.counts);
  io::write_labels(join(a.out_dir, "truth.csv"), data.truth);
  out << "wrote " << data.counts.rows << " x " << data.counts.cols << " counts to " << a.out_dir << '\n';
  return kExitOk;
}

struct FitArgs {
  std::string counts, out_dir;
  std::optional<std::string> config_file, init;
  std::optional<int> k, depth, cor_layers, burn_in, keep, threads, report_min_size, ghs_sweeps;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha0, sigma2_mu, sigma2_mu_tail;
  CLI::Option* ind_tree = nullptr;
  CLI::Option* mu_decay = nullptr;
  CLI::Option* trace_psi = nullptr;
  CLI::Option* raw_features = nullptr;
};

inline RunConfig resolve_config(const FitArgs& a) {
  RunConfig cfg;
  if (a.config_file) io::apply_key_values(cfg, io::read_key_values(*a.config_file));
  if (a.k) cfg.clusters = *a.k;
  if (a.depth) cfg.depth = *a.depth;
  if (a.cor_layers) cfg.cor_layers = *a.cor_layers;
  if (a.burn_in) cfg.burn_in = *a.burn_in;
  if (a.keep) cfg.n_keep = *a.keep;
  if (a.threads) cfg.threads = *a.threads;
  if (a.report_min_size) cfg.report_min_size = *a.report_min_size;
  if (a.ghs_sweeps) cfg.hyper.ghs_sweeps = *a.ghs_sweeps;
  if (a.seed) cfg.seed = *a.seed;
  if (a.alpha0) cfg.hyper.alpha0 = *a.alpha0;
  if (a.sigma2_mu) cfg.hyper.sigma2_mu_head = *a.sigma2_mu;
  if (a.sigma2_mu_tail) cfg.hyper.sigma2_mu_tail = *a.sigma2_mu_tail;
  if (a.init) cfg.init = *a.init;
  if (a.ind_tree && a.ind_tree->count()) cfg.ind_tree = true;
  if (a.mu_decay && a.mu_decay->count()) cfg.hyper.mu_layer_decay = true;
  if (a.trace_psi && a.trace_psi->count()) cfg.trace_psi = true;
  if (a.raw_features && a.raw_features->count()) cfg.raw_features = true;
  cfg.validate();
  return cfg;
}

inline std::string format_summary(const CountMatrix& counts, const RunConfig& cfg, const PipelineResult& r) {
  std::ostringstream s;
  s << "method=" << (cfg.ind_tree ? "ind-tree" : "cor-tree") << '\n'
    << "samples=" << counts.rows << '\n'
    << "bins=" << counts.cols << '\n'
    << "depth=" << r.layout.depth() << '\n'
    << "coarse_leaves=" << (r.layout.coarse() ? "true" : "false") << '\n'
    << "cor_layers=" << cfg.cor_layers << '\n'
    << "clusters=" << cfg.clusters << '\n'
    << "burn_in=" << cfg.burn_in << '\n'
    << "keep=" << cfg.n_keep << '\n'
    << "seed=" << cfg.seed << '\n'
    << "init=" << cfg.init << '\n'
    << "occupied_clusters=" << r.fit.occupied << '\n'
    << "reported_clusters=" << r.fit.reported << '\n'
    << "report_min_size=" << cfg.report_min_size << '\n';
  for (std::size_t k = 0; k < r.fit.sizes.size(); ++k) {
    s << "cluster_" << k << "_size=" << r.fit.sizes[k];
    if (r.fit.sizes[k] > 0 && !r.fit.reportable[k]) s << " (below report size)";
    s << '\n';
  }
  const auto& last = r.fit.trace.pi.back();
  s << "final_pi=";
  for (std::size_t k = 0; k < last.size(); ++k) s << (k ? "," : "") << io::detail::format_real(last[k]);
  s << '\n';
  return s.str();
}

inline int run_fit(const FitArgs& a, std::ostream& out) {
  const RunConfig cfg = resolve_config(a);
  const CountMatrix counts = io::read_count_matrix(a.counts);
  const auto start = std::chrono::steady_clock::now();
  const PipelineResult r = run_pipeline(counts, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ensure_dir(a.out_dir);
  io::write_labels(join(a.out_dir, "labels.csv"), r.fit.labels);
  io::write_pi_trace(join(a.out_dir, "pi_trace.csv"), r.fit.trace.pi);
  io::write_cluster_means(join(a.out_dir, "cluster_means.csv"), r.fit.cluster_density);
  {
    auto f = io::detail::open_out(join(a.out_dir, "summary.txt"));
    f << format_summary(counts, cfg, r);
  }
  {
    auto f = io::detail::open_out(join(a.out_dir, "run_config.txt"));
    f << io::format_config(cfg);
  }
  if (cfg.trace_psi) {
    auto f = io::detail::open_out(join(a.out_dir, "psi_trace.csv"));
    f << "kept_iteration,sample";
    const auto m = r.layout.internal_count();
    for (std::size_t j = 0; j < m; ++j) f << ",psi_" << j;
    f << '\n';
    for (std::size_t it = 0; it < r.fit.trace.psi.size(); ++it)
      for (std::size_t i = 0; i < r.fit.trace.psi[it].size(); ++i) {
        f << it + 1 << ',' << i;
        for (double v : r.fit.trace.psi[it][i]) f << ',' << io::detail::format_real(v);
        f << '\n';
      }
  }
  out << "occupied clusters: " << r.fit.occupied << " (" << r.fit.reported << " with >= " << cfg.report_min_size
      << " members)\n";
  out << "wall time: " << std::fixed << std::setprecision(2) << seconds << " s\n";
  return kExitOk;
}

inline int run_eval(const std::string& truth_path, const std::string& pred_path, std::ostream& out) {
  const auto truth = io::read_labels(truth_path);
  const auto pred = io::read_labels(pred_path);
  if (truth.size() != pred.size())
    throw input_error("label files differ in length (" + std::to_string(truth.size()) + " vs " +
                      std::to_string(pred.size()) + ")");
  const ContingencyTable t(truth, pred);
  out << "ari=" << io::detail::format_real(ari(t)) << '\n';
  out << "contingency (rows: " << truth_path << ", columns: " << pred_path << ")\n";
  out << std::setw(8) << "";
  for (int c : t.col_labels()) out << std::setw(8) << c;
  out << '\n';
  for (std::size_t i = 0; i < t.rows(); ++i) {
    out << std::setw(8) << t.row_labels()[i];
    for (std::size_t j = 0; j < t.cols(); ++j) out << std::setw(8) << t.count(i, j);
    out << '\n';
  }
  return kExitOk;
}

struct BaselineArgs {
  std::string counts, out, method = "pam";
  int k = 2;
  std::uint64_t seed = 1;
  bool raw = false;
};

inline int run_baseline(const BaselineArgs& a, std::ostream& out) {
  const CountMatrix counts = io::read_count_matrix(a.counts);
  const FeatureMatrix x = make_features(counts.data, counts.rows, counts.cols, !a.raw);
  std::vector<int> labels;
  if (a.method == "pam") {
    labels = pam(x, a.k).labels;
  } else {
    Rng rng = make_substream(a.seed, 0, 5);
    labels = kmeans(x, a.k, rng).labels;
  }
  io::write_labels(a.out, labels);
  out << "wrote " << labels.size() << " labels to " << a.out << '\n';
  return kExitOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlated dyadic-tree mixture clustering of count histograms", "cortree"};
  app.require_subcommand(1);

  detail::SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate two-group synthetic count histograms");
  s->add_option("--out-dir,-o", sim.out_dir, "Directory for counts.csv and truth.csv")->required();
  s->add_option("--n", sim.n, "Number of samples");
  s->add_option("--bins", sim.bins, "Histogram bins on [0, 1]");
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--group1-frac", sim.group1_frac, "Probability a sample belongs to group 1");
  s->add_option("--count-min", sim.count_min, "Smallest per-sample total count");
  s->add_option("--count-max", sim.count_max, "Largest per-sample total count");
  s->add_flag("--low-count", sim.low_count, "Low-count preset: n=570, totals in [100, 2156]");

  detail::FitArgs fa;
  auto* f = app.add_subcommand("fit", "Fit the tree-kernel mixture by Gibbs sampling");
  f->add_option("--counts,-c", fa.counts, "Count matrix CSV")->required();
  f->add_option("--out-dir,-o", fa.out_dir, "Output directory")->required();
  f->add_option("--config", fa.config_file, "key=value config file (flags override it)");
  f->add_option("--k", fa.k, "Truncation level (number of mixture components)");
  f->add_option("--depth", fa.depth, "Tree depth (default ceil(log2 bins))");
  f->add_option("--cor-layers", fa.cor_layers, "Layers in the correlated head");
  f->add_option("--burn-in", fa.burn_in, "Burn-in iterations");
  f->add_option("--keep", fa.keep, "Retained iterations");
  f->add_option("--init", fa.init, "pam | kmeans | file:<path> | discretize:<path>");
  f->add_option("--seed", fa.seed, "Random seed");
  f->add_option("--threads", fa.threads, "Worker threads");
  f->add_option("--alpha0", fa.alpha0, "Shape of the InvGamma prior on tail variances");
  f->add_option("--sigma2-mu", fa.sigma2_mu, "Prior variance of head means");
  f->add_option("--sigma2-mu-tail", fa.sigma2_mu_tail, "Prior variance of tail means");
  f->add_option("--ghs-sweeps", fa.ghs_sweeps, "GHS sweeps per iteration");
  f->add_option("--report-min-size", fa.report_min_size, "Smallest cluster reported as a finding");
  fa.ind_tree = f->add_flag("--ind-tree", "Independent head (no GHS precision)");
  fa.mu_decay = f->add_flag("--mu-decay", "Divide the mean prior variance by the layer index");
  fa.trace_psi = f->add_flag("--trace-psi", "Write psi_trace.csv (large)");
  fa.raw_features = f->add_flag("--raw-features", "PAM/k-means initializers on raw counts");

  std::string truth_path, pred_path;
  auto* e = app.add_subcommand("eval", "Adjusted Rand index between two label files");
  e->add_option("--truth,-t", truth_path, "Reference labels")->required();
  e->add_option("--pred,-p", pred_path, "Labels to score")->required();

  detail::BaselineArgs ba;
  auto* b = app.add_subcommand("baseline", "K-means or PAM labels for a count matrix");
  b->add_option("--counts,-c", ba.counts, "Count matrix CSV")->required();
  b->add_option("--out,-o", ba.out, "Output labels CSV")->required();
  b->add_option("--method", ba.method, "kmeans | pam")->check(CLI::IsMember({"kmeans", "pam"}));
  b->add_option("--k", ba.k, "Number of clusters");
  b->add_option("--seed", ba.seed, "Random seed (k-means)");
  b->add_flag("--raw-features", ba.raw, "Cluster raw counts instead of proportions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s->parsed()) return detail::run_simulate(sim, out);
    if (f->parsed()) return detail::run_fit(fa, out);
    if (e->parsed()) return detail::run_eval(truth_path, pred_path, out);
    if (b->parsed()) return detail::run_baseline(ba, out);
  } catch (const config_error& ce) {
    err << "configuration error: " << ce.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace cortree::cli
