// SPDX-License-Identifier: Apache-2.0
#ifndef ND_ERRORS_HPP_
#define ND_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nd {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Grid/channel dimensions of the inputs do not agree.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

/// A configuration value is outside its admissible range.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(what) {}
};

/// A data value violates the operation's domain (non-finite, out of range).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// The evaluation set is empty; the requested statistic is undefined.
class UndefinedValueError : public Error {
 public:
  explicit UndefinedValueError(const std::string& what) : Error(what) {}
};

/// Too few observations to determine the result.
class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what) : Error(what) {}
};

/// File reading/writing or format decoding failed.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace nd

#endif  // ND_ERRORS_HPP_
