#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hnn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendMismatch : public Error {
 public:
  using Error::Error;
};

// The GNS projection failed the bimodule test.
class NotAnExpectation : public Error {
 public:
  using Error::Error;
};

// A scenario or one of its structure maps failed load-time validation.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

class TermCapExceeded : public Error {
 public:
  TermCapExceeded(std::size_t cap)
      : Error("normalization exceeded the term cap of " + std::to_string(cap) +
              " words (set HNN_TERM_CAP to raise it)"),
        cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("at byte " + std::to_string(offset) + ": " + message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace hnn
