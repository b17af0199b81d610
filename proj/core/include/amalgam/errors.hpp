#pragma once

#include <stdexcept>
#include <string>

namespace amalgam {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed set partition (overlap, gap, empty block).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A size parameter outside the supported range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Mismatched dimensions, arities or ground-set sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument outside the domain of an operation (e.g. a crossing partition).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Moebius function requested on a pair that is not ordered by refinement.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// A computation needs coefficients beyond the truncation order of its input.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Invalid variable index, grouping, or similar.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of a diagnostic does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Spec-file or rational-literal parse failure.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace amalgam
