#pragma once

#include <stdexcept>
#include <string>

namespace cutpaste {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Division by zero, mixing elements of different fields, unbound atoms.
class ArithmeticError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Random draws could not be certified generic within the retry limit.
class CertificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace cutpaste
