#pragma once

#include <stdexcept>
#include <string>

namespace isl
{

// Malformed or inadmissible input (bad coefficients, domains, configs).
class InvalidInput : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// A hypothesis of a bound cannot be met at the configured resolution.
class Unsatisfiable : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Numerical failure inside a routine that should not fail on valid input.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace isl
