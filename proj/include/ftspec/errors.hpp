#pragma once

#include <stdexcept>
#include <string>

namespace ftspec {

//! Base class for all errors raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Operands live on different grids or have incompatible shapes.
class DimensionError : public Error
{
public:
  using Error::Error;
};

//! Invalid estimator / sampling / experiment configuration.
class ConfigError : public Error
{
public:
  using Error::Error;
};

//! An operation was called outside its documented precondition.
class PreconditionError : public Error
{
public:
  using Error::Error;
};

//! Index (lag, frequency index) out of its admissible range.
class RangeError : public Error
{
public:
  using Error::Error;
};

//! Requested resolution is not available from the input.
class ResolutionError : public Error
{
public:
  using Error::Error;
};

//! Malformed input data (CSV, JSON documents).
class ParseError : public Error
{
public:
  using Error::Error;
};

//! Non-finite values encountered in a computation.
class NumericalError : public Error
{
public:
  using Error::Error;
};

} // namespace ftspec
