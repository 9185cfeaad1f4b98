#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexatlas {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (CoNLL-U, dictionary, config, atlas records).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Persisted or in-memory structures whose cross references do not resolve.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Clique enumeration stopped after exceeding its budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::size_t partial)
      : Error(what), partial_(partial) {}
  std::size_t partial_count() const { return partial_; }

 private:
  std::size_t partial_;
};

}  // namespace lexatlas
