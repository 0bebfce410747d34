#pragma once

#include <stdexcept>
#include <string>

namespace mango {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent in-memory raster data (dimension mismatch,
/// empty grids, out-of-range values).
class RasterError : public Error {
 public:
  using Error::Error;
};

/// File-level problems: unreadable files, bad magic, truncated payloads,
/// degenerate header dimensions.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed manifest or report lines; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Per-candidate scoring failures. These are caught by the selection loop and
// turned into candidate status values instead of aborting a region.

/// Fewer than B+1 valid background pixels.
class InsufficientBackgroundError : public Error {
 public:
  using Error::Error;
};

/// Background covariance has zero trace or is not positive definite after
/// regularization.
class DegenerateBackgroundError : public Error {
 public:
  using Error::Error;
};

/// Every reference pixel is invalid in this candidate, or a class is empty
/// after sentinel exclusion.
class SignatureUnobservableError : public Error {
 public:
  using Error::Error;
};

/// Target spectrum has non-positive whitened norm.
class DegenerateSignatureError : public Error {
 public:
  using Error::Error;
};

/// The annual mask has no mangrove pixels; the caller routes the region to
/// the negative-selection path.
class NoTargetClassError : public Error {
 public:
  using Error::Error;
};

}  // namespace mango
