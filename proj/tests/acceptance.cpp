// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset; no arguments runs all of them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "cortree/cortree.hpp"
#include "geweke.hpp"
#include "stats_util.hpp"

using namespace cortree;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

RunConfig replicate_config(std::uint64_t seed, bool ind) {
  RunConfig cfg;
  cfg.depth = 6;
  cfg.cor_layers = 4;
  cfg.clusters = 3;
  cfg.burn_in = 100;
  cfg.n_keep = 50;
  cfg.init = "pam";  // on proportions; raw-count PAM splits low-count data by total count
  cfg.ind_tree = ind;
  cfg.seed = seed;
  return cfg;
}

double baseline_ari(const SimData& d, bool use_pam, bool raw, std::uint64_t seed) {
  const auto x = make_features(d.counts.data, d.counts.rows, d.counts.cols, !raw);
  if (use_pam) return ari(d.truth, pam(x, 3).labels);
  Rng rng = make_substream(seed, 0, 5);
  return ari(d.truth, kmeans(x, 3, rng).labels);
}

Outcome criterion1() {
  const int reps = 10;
  std::vector<double> cor, ind, km, pm, km_norm, pm_norm, secs;
  for (int r = 0; r < reps; ++r) {
    SimSpec spec;
    spec.n = 200;
    spec.seed = 1000 + static_cast<std::uint64_t>(r);
    const auto d = simulate(spec);
    const auto t0 = std::chrono::steady_clock::now();
    cor.push_back(ari(d.truth, run_pipeline(d.counts, replicate_config(spec.seed, false)).fit.labels));
    secs.push_back(seconds_since(t0));
    ind.push_back(ari(d.truth, run_pipeline(d.counts, replicate_config(spec.seed, true)).fit.labels));
    km.push_back(baseline_ari(d, false, true, spec.seed));
    pm.push_back(baseline_ari(d, true, true, spec.seed));
    km_norm.push_back(baseline_ari(d, false, false, spec.seed));
    pm_norm.push_back(baseline_ari(d, true, false, spec.seed));
    std::printf("  rep %d: cor %.3f ind %.3f kmeans %.3f pam %.3f (%.1f s per fit)\n", r, cor.back(), ind.back(),
                km.back(), pm.back(), secs.back());
    std::fflush(stdout);
  }
  const double c = mean_of(cor), i = mean_of(ind), k = mean_of(km), p = mean_of(pm);
  std::printf("  proportion features (for reference): kmeans %.3f pam %.3f\n", mean_of(km_norm), mean_of(pm_norm));
  const bool ok = c >= 0.85 && i >= 0.55 && k <= 0.55 && p <= 0.70 && c >= i && mean_of(secs) < 600.0;
  return {ok, fmt("cor %.3f >= 0.85, ind %.3f >= 0.55, kmeans %.3f <= 0.55, pam %.3f <= 0.70, cor >= ind, "
                  "%.1f s per fit",
                  c, i, k, p, mean_of(secs))};
}

Outcome criterion2() {
  const int reps = 10;
  std::vector<double> qualifying;
  for (int r = 0; r < reps; ++r) {
    SimSpec spec = SimSpec::low_count();
    spec.seed = 2000 + static_cast<std::uint64_t>(r);
    const auto d = simulate(spec);
    const auto fit = run_pipeline(d.counts, replicate_config(spec.seed, false)).fit;
    const double a = ari(d.truth, fit.labels);
    std::printf("  rep %d: ari %.3f, clusters of size >= %d: %d\n", r, a, 10, fit.reported);
    std::fflush(stdout);
    if (fit.reported >= 2) qualifying.push_back(a);
  }
  const double m = mean_of(qualifying);
  return {!qualifying.empty() && m >= 0.80,
          fmt("mean ARI %.3f >= 0.80 over %zu of %d replicates with >= 2 clusters", m, qualifying.size(), reps)};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(31);
  const int draws = 100000;
  double worst = 0.0;
  bool nonneg = true;
  for (std::int64_t b : {1, 2, 50, 1000}) {
    for (double c : {0.0, 0.5, 3.0}) {
      double s = 0.0;
      for (int t = 0; t < draws; ++t) {
        const double w = sample_pg(b, c, rng).value;
        nonneg = nonneg && w >= 0.0;
        s += w;
      }
      const double want = pg_mean(static_cast<double>(b), c);
      worst = std::max(worst, std::abs(s / draws - want) / want);
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 0.01 && nonneg && secs < 30.0,
          fmt("max relative mean error %.4f < 0.01, all draws >= 0: %s, %.1f s < 30 s", worst, nonneg ? "yes" : "no",
              secs)};
}

double multinomial_log_pmf(const std::vector<std::int64_t>& x, const std::vector<double>& p) {
  double ll = 0.0;
  std::int64_t m = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    m += x[j];
    ll -= std::lgamma(static_cast<double>(x[j]) + 1.0);
    if (x[j] > 0) ll += static_cast<double>(x[j]) * std::log(p[j]);
  }
  return ll + std::lgamma(static_cast<double>(m) + 1.0);
}

Outcome criterion4() {
  Rng rng(41);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t p = 1 + rng() % 8;
    const auto layout = build_layout(p, min_depth(p));
    std::vector<std::int64_t> h(p, 0);
    const auto m = static_cast<int>(rng() % 51);
    for (int t = 0; t < m; ++t) ++h[rng() % p];
    const auto counts = propagate_counts(h, layout);
    double first = 0.0;
    for (int draw = 0; draw < 2; ++draw) {
      SplitVector psi(static_cast<Eigen::Index>(layout.internal_count()));
      for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = 2.0 * std_normal(rng);
      const double diff =
          tree_log_likelihood(counts, psi, layout) - multinomial_log_pmf(h, bin_probabilities(psi, layout));
      if (draw == 0) first = diff;
      else worst = std::max(worst, std::abs(diff - first));
      worst = std::max(worst, std::abs(diff));
    }
  }
  return {worst < 1e-10, fmt("max deviation of tree minus multinomial across psi %.2e < 1e-10", worst)};
}

Outcome criterion5() {
  const auto g = testing_util::run_geweke(50000, 20, 51);
  double worst = 0.0;
  for (const auto& m : g.mean) worst = std::max(worst, std::abs(m.z()));
  std::string per;
  for (const auto& m : g.mean) per += fmt(" %.3f/%.3f", m.forward_mean, m.chain_mean);
  return {worst < 3.0, fmt("max |forward - chain| / se over psi means %.2f < 3 (forward/chain:%s)", worst,
                           per.c_str())};
}

Outcome criterion6() {
  const int q = 10, n = 200, sweeps = 2000, burn = 500;
  Eigen::MatrixXd truth = 2.0 * Eigen::MatrixXd::Identity(q, q);
  for (int i = 0; i + 1 < q; ++i) truth(i, i + 1) = truth(i + 1, i) = -1.0;
  const Eigen::MatrixXd cov_factor = Eigen::LLT<Eigen::MatrixXd>(truth.inverse()).matrixL();
  Rng rng(61);
  Eigen::MatrixXd x(n, q);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(q);
    for (int j = 0; j < q; ++j) z[j] = std_normal(rng);
    x.row(i) = (cov_factor * z).transpose();
  }
  const Eigen::MatrixXd scatter = x.transpose() * x;

  GhsState st = GhsState::identity(q);
  Eigen::MatrixXd post = Eigen::MatrixXd::Zero(q, q);
  bool pd = true;
  double inv_err = 0.0;
  for (int s = 0; s < sweeps; ++s) {
    ghs_sweep(st, scatter, n, rng);
    pd = pd && Eigen::LLT<Eigen::MatrixXd>(st.omega).info() == Eigen::Success;
    inv_err = std::max(inv_err, (st.omega * st.sigma - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff());
    if (s >= burn) post += st.omega;
  }
  post /= static_cast<double>(sweeps - burn);

  int tp = 0, fp = 0, pos = 0, neg = 0;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      const bool edge = truth(i, j) != 0.0, found = std::abs(post(i, j)) > 0.1;
      (edge ? pos : neg)++;
      if (found) (edge ? tp : fp)++;
    }
  const double tpr = static_cast<double>(tp) / pos, fpr = static_cast<double>(fp) / neg;
  return {tpr >= 0.8 && fpr <= 0.2 && pd && inv_err < 1e-8,
          fmt("recovered %d/%d edges (%.2f >= 0.8), false positives %d/%d (%.2f <= 0.2), PD every sweep: %s, "
              "max |Omega Sigma - I| %.1e < 1e-8",
              tp, pos, tpr, fp, neg, fpr, pd ? "yes" : "no", inv_err)};
}

Outcome criterion7() {
  const std::vector<int> a{0, 0, 1, 1, 2, 2}, perm{2, 2, 0, 0, 1, 1};
  const double same = ari(a, a), permuted = ari(a, perm);
  const double hand = ari(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1});
  Rng rng(71);
  std::vector<int> x(10000), y(10000);
  for (auto& v : x) v = static_cast<int>(rng() % 3);
  for (auto& v : y) v = static_cast<int>(rng() % 3);
  const double rnd = ari(x, y);
  const bool ok = same == 1.0 && permuted == 1.0 && std::abs(hand + 0.5) < 1e-12 && std::abs(rnd) < 0.05;
  return {ok, fmt("identical %.3f, permuted %.3f, hand-computed %.3f (want -0.5), random %.4f", same, permuted, hand,
                  rnd)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cortree");
  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  std::ostringstream out, err;
  return cortree::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome criterion8() {
  const fs::path dir = fs::temp_directory_path() / "cortree_acceptance_repro";
  fs::remove_all(dir);
  if (cli({"simulate", "--out-dir", (dir / "data").string(), "--n", "60", "--seed", "81"}) != 0)
    return {false, "simulate failed"};
  for (const char* run : {"a", "b"}) {
    const int code = cli({"fit", "--counts", (dir / "data" / "counts.csv").string(), "--out-dir", (dir / run).string(),
                          "--depth", "6", "--cor-layers", "4", "--k", "3", "--burn-in", "20", "--keep", "10",
                          "--seed", "82", "--threads", "1", "--trace-psi"});
    if (code != 0) return {false, fmt("fit exited with %d", code)};
  }
  std::string differ;
  for (const char* f : {"labels.csv", "pi_trace.csv", "psi_trace.csv", "cluster_means.csv", "summary.txt"})
    if (slurp(dir / "a" / f) != slurp(dir / "b" / f) || slurp(dir / "a" / f).empty()) differ += std::string(" ") + f;
  fs::remove_all(dir);
  return {differ.empty(), differ.empty() ? "labels, traces, cluster means and summary byte-identical"
                                         : "differing files:" + differ};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[c]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
