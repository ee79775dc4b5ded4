#ifndef TITLESIM_ERROR_H_
#define TITLESIM_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace titlesim {

// Base class for data-dependent failures (malformed files, empty documents,
// all-OOV titles). Caller mistakes such as k == 0 raise std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; what() already names the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A document has no usable representation under the requested strategy.
class UnrepresentableError : public Error {
 public:
  using Error::Error;
};

}  // namespace titlesim

#endif  // TITLESIM_ERROR_H_
