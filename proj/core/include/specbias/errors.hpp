#ifndef SPECBIAS_ERRORS_HPP
#define SPECBIAS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specbias {

/// Raised when an iterative numerical procedure fails to meet its
/// tolerance (quadrature non-convergence, diverging training runs that
/// cannot be reported, ...). The CLI maps this family to exit code 2.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration files, unknown keys, impossible experiment
/// specs. The CLI maps this family to exit code 1.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specbias

#endif  // SPECBIAS_ERRORS_HPP
