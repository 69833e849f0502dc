#pragma once

#include <hyperfree/multigrid.h>
#include <hyperfree/operators.h>

#include <string>
#include <string_view>
#include <vector>

namespace hyperfree
{
struct CGReport
{
  unsigned            iterations        = 0;
  double              relative_residual = 0;
  bool                converged         = false;
  double              seconds           = 0;
  std::vector<double> preconditioned_residuals; // sqrt(r.z) per iteration, starting with r0
};

/**
 * Preconditioned conjugate gradients for A x = b starting from the given x.
 * Stops when |b - A x| <= relative_tolerance |b| or after max_iterations
 * (0 means 10 n). Throws IndefiniteOperator if p.Ap <= 0.
 */
CGReport cg(const LinearOperator   &A,
            std::span<double>       x,
            std::span<const double> b,
            double                  relative_tolerance,
            const LinearOperator   *preconditioner = nullptr,
            unsigned                max_iterations = 0);

/// Jacobi preconditioner.
class DiagonalPreconditioner final : public LinearOperator
{
public:
  explicit DiagonalPreconditioner(std::span<const double> diagonal);
  std::size_t size() const override { return inverse_.size(); }
  void        vmult(std::span<double> dst, std::span<const double> src) const override;

private:
  Vector inverse_;
};

enum class PreconditionerType
{
  gmg,
  diag,
  none
};

std::string_view   to_string(PreconditionerType p);
PreconditionerType parse_preconditioner(std::string_view name);

struct NewtonSettings
{
  unsigned           load_steps         = 5;
  unsigned           max_iterations     = 30;
  double             update_tolerance   = 1e-5;
  double             residual_tolerance = 1e-8; // relative and absolute
  double             linear_tolerance   = 1e-6;
  unsigned           max_bisections     = 1;
  Strategy           strategy           = Strategy::tensor2;
  PreconditionerType preconditioner     = PreconditionerType::gmg;
  MultigridSettings  multigrid;

  /// Throws ConfigError if a tolerance is not positive.
  void validate() const;
};

/// magnitude * (step / total) * direction / |direction|.
template <int dim>
Point<dim> apply_load_fraction(double step, unsigned total, double magnitude, const Point<dim> &direction);

struct IterationRecord
{
  unsigned step           = 0;
  unsigned iteration      = 0;
  double   load_fraction  = 0;
  double   residual_norm  = 0;
  double   update_norm    = 0;
  unsigned cg_iterations  = 0;
  double   cg_seconds     = 0;
  double   setup_seconds  = 0;
};

struct NewtonResult
{
  Vector                       u;
  std::vector<IterationRecord> log;
  bool                         converged  = false;
  unsigned                     bisections = 0;
  std::string                  message;
  double                       seconds = 0;

  unsigned total_cg_iterations() const;
  double   mean_cg_iterations() const;
  double   cg_seconds() const;
};

/**
 * Incremental Newton solve of the traction benchmark on the finest level of
 * `hierarchy`. Each iteration rebuilds the tangent and the preconditioner at
 * the current displacement and solves A du = -F with zero initial guess.
 * An element inversion during a load step restarts that step with half the
 * increment, at most settings.max_bisections times. Failures are reported
 * through `converged` and `message`, keeping the history.
 */
template <int dim>
NewtonResult newton_solve(const MultigridHierarchy<dim> &hierarchy,
                          const MaterialTable           &materials,
                          const Point<dim>              &full_traction,
                          const NewtonSettings          &settings);

} // namespace hyperfree
