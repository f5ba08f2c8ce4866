#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"
#include "tree.hpp"

namespace cortree {

/// Row-major n x p matrix of non-negative counts; row order is sample identity.
struct CountMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  CountMatrix() = default;
  CountMatrix(std::size_t n, std::size_t p) : rows(n), cols(p), data(n * p, 0) {}

  std::span<const std::int64_t> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<std::int64_t> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::int64_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::int64_t row_sum(std::size_t i) const {
    std::int64_t s = 0;
    for (auto v : row(i)) s += v;
    return s;
  }

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;
};

inline std::vector<TreeCounts> to_tree_counts(const CountMatrix& m, const DyadicLayout& layout) {
  if (m.cols != layout.bins()) throw input_error("count matrix width does not match layout");
  std::vector<TreeCounts> out;
  out.reserve(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) out.push_back(propagate_counts(m.row(i), layout));
  return out;
}

}  // namespace cortree
