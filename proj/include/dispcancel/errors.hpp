#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dispcancel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A physical parameter is outside the family's admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The sampling grid (or a rate/resolution rule derived from it) cannot
// represent the requested computation faithfully.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Semiclassical (Monte Carlo) photodetection was requested for a state that
// has no proper P representation.
class SemiclassicalError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

class DegenerateSourceError : public Error {
 public:
  using Error::Error;
};

class WidthUndefinedError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

struct Issue {
  std::string path;
  std::string message;
};

// Carries every violation found while validating a document.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  ValidationError(std::string path, std::string message);

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

}  // namespace dispcancel
