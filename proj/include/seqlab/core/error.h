#ifndef SEQLAB_CORE_ERROR_H_
#define SEQLAB_CORE_ERROR_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace seqlab {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single problem found while validating input. Line is 1-based; 0 when the
// issue is not tied to a line.
struct Issue {
  std::string file;
  int line = 0;
  std::string record;
  std::string message;

  std::string ToString() const;
};

// Raised when input fails validation. Carries every issue found, so callers
// get a complete report rather than the first failure.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);

  const std::vector<Issue> &issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

// Raised when an operation is called with arguments that violate its
// preconditions (unknown ids, empty queries, bad parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when an operation is not allowed in the current state (resolving
// an id that is not conflicted, snapshotting a future iteration).
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqlab

#endif  // SEQLAB_CORE_ERROR_H_
