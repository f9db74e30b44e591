#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pucell {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  explicit OutOfDomain(const std::string& what, std::size_t index = npos)
      : Error(what), index_(index) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Offending point index, or npos when the error concerns a single point.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Raised for coincident nodes, which make the interpolation matrix singular.
class DuplicatePoints : public Error {
 public:
  using Error::Error;
};

class EmptySubdomain : public Error {
 public:
  explicit EmptySubdomain(const std::string& what, std::size_t subdomain = npos)
      : Error(what), subdomain_(subdomain) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t subdomain() const noexcept { return subdomain_; }

 private:
  std::size_t subdomain_;
};

class IllConditioned : public Error {
 public:
  explicit IllConditioned(const std::string& what, std::size_t subdomain = npos)
      : Error(what), subdomain_(subdomain) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t subdomain() const noexcept { return subdomain_; }

 private:
  std::size_t subdomain_;
};

class UncoveredPoint : public Error {
 public:
  using Error::Error;
};

// Malformed input file; line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pucell
