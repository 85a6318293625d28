#pragma once

#include <stdexcept>
#include <string>

namespace dlufs {

/// Base class for all library errors. The CLI maps the dynamic type name
/// into its machine-readable error output.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operands whose shapes do not agree, or a non-square matrix where a
/// square one is required.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A matrix fails a symmetry check beyond the accepted tolerance.
class SymmetryError : public Error {
  public:
    using Error::Error;
};

/// A factorization or solve encountered a numerically singular system.
class SingularityError : public Error {
  public:
    using Error::Error;
};

/// An argument violates a documented precondition (ranges, counts).
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// The optimizer produced a non-finite objective value.
class DivergenceError : public Error {
  public:
    DivergenceError(const std::string& msg, std::size_t iteration)
        : Error(msg), iteration_(iteration) {}
    std::size_t iteration() const { return iteration_; }

  private:
    std::size_t iteration_;
};

/// Malformed input file; carries a 1-based row/column location.
class ParseError : public Error {
  public:
    ParseError(const std::string& msg, std::size_t row, std::size_t col)
        : Error(msg), row_(row), col_(col) {}
    std::size_t row() const { return row_; }
    std::size_t col() const { return col_; }

  private:
    std::size_t row_;
    std::size_t col_;
};

/// Filesystem failure; message carries the offending path.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace dlufs
