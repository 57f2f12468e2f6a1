#pragma once

#include <stdexcept>
#include <string>

namespace dfn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The assembled saddle-point system could not be solved reliably.
class SingularSystemError : public Error {
public:
  using Error::Error;
};

/// Invalid or inconsistent configuration document.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Operation requested outside the supported analytic scope (e.g. multi-branch lift).
class ScopeError : public Error {
public:
  using Error::Error;
};

}  // namespace dfn
