#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbmci {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class index_error : public error {
 public:
  using error::error;
};

/// Inputs outside the mathematical domain of an operation.
class domain_error : public error {
 public:
  using error::error;
};

class shape_error : public error {
 public:
  using error::error;
};

/// Request exceeds a configured size limit (dense cutoff, enumeration cap, bit capacity).
class capacity_error : public error {
 public:
  using error::error;
};

class config_error : public error {
 public:
  using error::error;
};

class file_error : public error {
 public:
  using error::error;
};

class convergence_error : public error {
 public:
  convergence_error(const std::string& what, double best_residual)
      : error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace rbmci
