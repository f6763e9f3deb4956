#pragma once

#include <stdexcept>
#include <string>

namespace switchvol {

enum class ErrorKind {
  config,     // bad configuration or invalid input data
  domain,     // parameter outside its mathematical domain
  numerical,  // quadrature non-convergence, filter degeneracy, ...
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit status for an error category (0 is reserved for success).
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::domain:
      return 2;
    case ErrorKind::numerical:
      return 3;
    case ErrorKind::io:
      return 4;
  }
  return 1;
}

}  // namespace switchvol
