#pragma once

#include <stdexcept>
#include <string>

namespace cortree {

/// Invalid run configuration (depths, cluster counts, iteration counts).
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed data handed to the library (negative counts, broken additivity, length mismatch).
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical invariant the sampler relies on was violated.
class internal_error : public std::logic_error {
 public:
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cortree
