#pragma once

#include <stdexcept>
#include <string>

namespace hyperfree
{
/// Raised when det F <= 0 (or det J_geo <= 0) at some quadrature point.
class NonPositiveJacobian : public std::runtime_error
{
public:
  NonPositiveJacobian(const std::string &what, const long cell = -1, const int level = -1)
    : std::runtime_error(what)
    , cell(cell)
    , level(level)
  {}

  long cell;
  int  level;
};

class IndefiniteOperator : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Newton or CG did not reach the requested tolerances.
class SolverFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace hyperfree
