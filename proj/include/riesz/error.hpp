#pragma once

#include <stdexcept>
#include <string>

namespace riesz {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: dimension mismatch, degenerate point, diagonal evaluation,
/// precondition violation. Maps to a usage-style failure at the CLI.
class DomainError : public Error {
public:
  using Error::Error;
};

/// An iterative or adaptive numerical procedure failed to reach its target.
class NonConvergence : public Error {
public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

} // namespace riesz
