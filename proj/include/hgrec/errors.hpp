#pragma once

#include <stdexcept>
#include <string>

namespace hgrec {

// Numerical failures: shape mismatches, non-finite values, bad tape use.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Graph construction and validation failures; messages carry file/line context
// when the graph came from disk.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data outside the graph files (abstracts, truth, features).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad run configuration (unknown keys, unparsable values, missing paths).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hgrec
