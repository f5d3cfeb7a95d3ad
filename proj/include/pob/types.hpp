#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pob {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised on malformed experiment or trial configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an input file cannot be parsed; the message carries a line number.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pob
