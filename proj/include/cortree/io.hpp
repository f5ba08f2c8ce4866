#pragma once

// CSV and key=value file formats.
//
//   counts      header "bin_0,...,bin_{p-1}" (optional on read), n rows of p integers
//   labels      header "label" (optional on read), one integer per row
//   scores      header "score" (optional on read), one real per row
//   pi trace    header "iteration,pi_0,...,pi_{K-1}"
//   cluster means  header "cluster,bin_0,...", one row per cluster
//   config      flat key=value lines, '#' starts a comment

#include <charconv>
#include <cstdlib>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "config.hpp"
#include "count_matrix.hpp"
#include "error.hpp"

namespace cortree::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Non-empty data lines; a first line that does not parse as numbers is a header.
template <typename T>
std::vector<std::vector<T>> read_numeric_rows(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<T>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t);
    std::vector<T> row(fields.size());
    bool ok = true;
    for (std::size_t j = 0; j < fields.size() && ok; ++j) ok = parse_number(fields[j], row[j]);
    if (!ok) {
      if (first) {
        first = false;
        continue;
      }
      throw input_error(path + ":" + std::to_string(lineno) + ": cannot parse row");
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline CountMatrix read_count_matrix(const std::string& path) {
  const auto rows = detail::read_numeric_rows<std::int64_t>(path);
  if (rows.empty()) throw input_error(path + ": no data rows");
  CountMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols)
      throw input_error(path + ": row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                        " columns, expected " + std::to_string(m.cols));
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (rows[i][j] < 0) throw input_error(path + ": negative count in row " + std::to_string(i + 1));
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

inline void write_count_matrix(std::ostream& out, const CountMatrix& m) {
  for (std::size_t j = 0; j < m.cols; ++j) out << (j ? "," : "") << "bin_" << j;
  out << '\n';
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

inline void write_count_matrix(const std::string& path, const CountMatrix& m) {
  auto out = detail::open_out(path);
  write_count_matrix(out, m);
}

template <typename T>
std::vector<T> read_column(const std::string& path) {
  const auto rows = detail::read_numeric_rows<T>(path);
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) throw input_error(path + ": expected one column at row " + std::to_string(i + 1));
    out.push_back(rows[i][0]);
  }
  return out;
}

inline std::vector<int> read_labels(const std::string& path) { return read_column<int>(path); }
inline std::vector<double> read_scores(const std::string& path) { return read_column<double>(path); }

inline void write_labels(const std::string& path, const std::vector<int>& labels) {
  auto out = detail::open_out(path);
  out << "label\n";
  for (int v : labels) out << v << '\n';
}

inline void write_pi_trace(const std::string& path, const std::vector<std::vector<double>>& pi) {
  auto out = detail::open_out(path);
  out << "iteration";
  const std::size_t K = pi.empty() ? 0 : pi.front().size();
  for (std::size_t k = 0; k < K; ++k) out << ",pi_" << k;
  out << '\n';
  for (std::size_t it = 0; it < pi.size(); ++it) {
    out << it + 1;
    for (double v : pi[it]) out << ',' << detail::format_real(v);
    out << '\n';
  }
}

inline void write_cluster_means(const std::string& path, const std::vector<std::vector<double>>& dens) {
  auto out = detail::open_out(path);
  out << "cluster";
  const std::size_t p = dens.empty() ? 0 : dens.front().size();
  for (std::size_t j = 0; j < p; ++j) out << ",bin_" << j;
  out << '\n';
  for (std::size_t k = 0; k < dens.size(); ++k) {
    out << k;
    for (double v : dens[k]) out << ',' << detail::format_real(v);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// key=value configuration

using KeyValues = std::map<std::string, std::string>;

inline KeyValues read_key_values(std::istream& in, const std::string& source = "config") {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(std::string_view(line).substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw config_error(source + ":" + std::to_string(lineno) + ": expected key=value");
    kv[std::string(detail::trim(t.substr(0, eq)))] = std::string(detail::trim(t.substr(eq + 1)));
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path) {
  auto in = detail::open_in(path);
  return read_key_values(in, path);
}

namespace detail {

template <typename T>
T parse_value(const std::string& key, const std::string& v) {
  T out{};
  if constexpr (std::is_same_v<T, bool>) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw config_error("config key '" + key + "': expected a boolean, got '" + v + "'");
  } else if constexpr (std::is_same_v<T, double>) {
    // from_chars for double is not available everywhere; strtod is enough here
    char* end = nullptr;
    out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
      throw config_error("config key '" + key + "': expected a number, got '" + v + "'");
  } else {
    if (!parse_number(v, out)) throw config_error("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

}  // namespace detail

/// Overlay key=value settings on `cfg`. Unknown keys are rejected.
inline void apply_key_values(RunConfig& cfg, const KeyValues& kv) {
  using detail::parse_value;
  for (const auto& [k, v] : kv) {
    if (k == "depth") cfg.depth = parse_value<int>(k, v);
    else if (k == "cor_layers") cfg.cor_layers = parse_value<int>(k, v);
    else if (k == "k" || k == "clusters") cfg.clusters = parse_value<int>(k, v);
    else if (k == "burn_in") cfg.burn_in = parse_value<int>(k, v);
    else if (k == "keep" || k == "n_keep") cfg.n_keep = parse_value<int>(k, v);
    else if (k == "alpha0" || k == "c") cfg.hyper.alpha0 = parse_value<double>(k, v);
    else if (k == "sigma2_mu") cfg.hyper.sigma2_mu_head = parse_value<double>(k, v);
    else if (k == "sigma2_mu_tail") cfg.hyper.sigma2_mu_tail = parse_value<double>(k, v);
    else if (k == "mu_layer_decay") cfg.hyper.mu_layer_decay = parse_value<bool>(k, v);
    else if (k == "ghs_sweeps") cfg.hyper.ghs_sweeps = parse_value<int>(k, v);
    else if (k == "ghs_diag_rate") cfg.hyper.ghs.diag_rate = parse_value<double>(k, v);
    else if (k == "alpha") cfg.alpha = parse_value<double>(k, v);
    else if (k == "ind_tree") cfg.ind_tree = parse_value<bool>(k, v);
    else if (k == "seed") cfg.seed = parse_value<std::uint64_t>(k, v);
    else if (k == "threads") cfg.threads = parse_value<int>(k, v);
    else if (k == "init") cfg.init = v;
    else if (k == "report_min_size") cfg.report_min_size = parse_value<int>(k, v);
    else if (k == "trace_psi") cfg.trace_psi = parse_value<bool>(k, v);
    else if (k == "raw_features") cfg.raw_features = parse_value<bool>(k, v);
    else throw config_error("unknown config key '" + k + "'");
  }
}

/// Run manifest in the same key=value format `apply_key_values` reads.
inline std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o << "depth=" << c.depth << '\n'
    << "cor_layers=" << c.cor_layers << '\n'
    << "clusters=" << c.clusters << '\n'
    << "burn_in=" << c.burn_in << '\n'
    << "keep=" << c.n_keep << '\n'
    << "alpha0=" << detail::format_real(c.hyper.alpha0) << '\n'
    << "sigma2_mu=" << detail::format_real(c.hyper.sigma2_mu_head) << '\n'
    << "sigma2_mu_tail=" << detail::format_real(c.hyper.sigma2_mu_tail) << '\n'
    << "mu_layer_decay=" << (c.hyper.mu_layer_decay ? "true" : "false") << '\n'
    << "ghs_sweeps=" << c.hyper.ghs_sweeps << '\n'
    << "ghs_diag_rate=" << detail::format_real(c.hyper.ghs.diag_rate) << '\n'
    << "alpha=" << detail::format_real(c.alpha) << '\n'
    << "ind_tree=" << (c.ind_tree ? "true" : "false") << '\n'
    << "seed=" << c.seed << '\n'
    << "init=" << c.init << '\n'
    << "report_min_size=" << c.report_min_size << '\n'
    << "trace_psi=" << (c.trace_psi ? "true" : "false") << '\n'
    << "raw_features=" << (c.raw_features ? "true" : "false") << '\n';
  return o.str();
}

}  // namespace cortree::io
