#pragma once

#include <stdexcept>
#include <string>

namespace gridcert {

/// Malformed or inconsistent case-file input.
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix required to be invertible is singular to working tolerance.
class SingularMatrixError : public std::runtime_error {
  public:
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// A root finder found no root satisfying its constraints.
class NoRootError : public std::runtime_error {
  public:
    explicit NoRootError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gridcert
