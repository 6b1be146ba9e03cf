#pragma once

#include <stdexcept>
#include <string>

namespace dpf {

// Root of every exception thrown by the library. Stage runners catch this
// type to map failures onto exit codes; anything else is a bug.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

class LengthMismatch : public Error {
public:
  using Error::Error;
};

}  // namespace dpf
