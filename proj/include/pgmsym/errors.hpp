#ifndef PGMSYM_ERRORS_HPP
#define PGMSYM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pgmsym {

// Bad input, bad configuration, malformed model text. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A configured resource cap was exceeded. CLI exit code 3.
class ResourceCapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ValidationError {
public:
  ParseError(int line, const std::string& msg)
      : ValidationError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class StateSpaceTooLarge : public ResourceCapError {
public:
  using ResourceCapError::ResourceCapError;
};

class OrbitCapExceeded : public ResourceCapError {
public:
  using ResourceCapError::ResourceCapError;
};

class GroupTooLarge : public ResourceCapError {
public:
  using ResourceCapError::ResourceCapError;
};

class SearchBudgetExceeded : public ResourceCapError {
public:
  using ResourceCapError::ResourceCapError;
};

class RenamingSpaceTooLarge : public ResourceCapError {
public:
  using ResourceCapError::ResourceCapError;
};

class SizeMismatch : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class InvalidPermutation : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class DomainMismatch : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class NonBooleanVariable : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ReductionError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// Engine postcondition violations. These indicate bugs, not bad input.
class InvalidLift : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class RatioNotConstant : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace pgmsym

#endif
