#pragma once

#include <stdexcept>
#include <string>

namespace klext {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad type/rank pair, non-dominant weight where a dominant
// one is required, mismatched dimensions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A query needs group elements (or table rows) beyond the enumerated slice.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// A configured size limit (element count, partition box, ...) was hit.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

// Cache file unreadable, wrong version, or failing its checksum.
class CacheError : public Error {
 public:
  using Error::Error;
};

// A mathematical invariant failed. Always a bug or a finding, never input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace klext
