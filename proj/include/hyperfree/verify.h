#pragma once

#include <string>
#include <vector>

namespace hyperfree
{
/**
 * One measured quantity of the verification suite. `relation` is one of
 * "<=", "<", ">=" or "info" (reported without a bound).
 */
struct CheckResult
{
  unsigned    group = 0;
  std::string name;
  double      value     = 0;
  std::string relation;
  double      threshold = 0;
  bool        pass      = false;
};

/// Check groups in the order they run:
///  1 operator strategies agree with the assembled matrix
///  2 tangent is the central-difference derivative of the residual
///  3 residual is the energy gradient
///  4 constitutive identities
///  5 sum factorization against naive loops, FLOP growth
///  6 transfer operator adjointness and polynomial reproduction
///  7 multigrid iteration counts across refinements
///  8 Newton convergence on the benchmark
///  9 operator storage ordering and cache payload sizes
std::vector<unsigned> verification_groups();
std::string           group_title(unsigned group);

/// Runs one group. Results are deterministic for a fixed build.
std::vector<CheckResult> run_checks(unsigned group);

/// group,check,value,relation,threshold,status with 17 significant digits.
std::string checks_csv(const std::vector<CheckResult> &checks);

} // namespace hyperfree
