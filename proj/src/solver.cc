#include <hyperfree/errors.h>
#include <hyperfree/solver.h>

#include <chrono>
#include <cmath>
#include <deque>
#include <memory>
#include <numeric>

namespace hyperfree
{
namespace
{
  using Clock = std::chrono::steady_clock;

  double
  seconds_since(const Clock::time_point start)
  {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }
} // namespace

CGReport
cg(const LinearOperator   &A,
   std::span<double>       x,
   std::span<const double> b,
   const double            relative_tolerance,
   const LinearOperator   *preconditioner,
   unsigned                max_iterations)
{
  const auto        start = Clock::now();
  const std::size_t n     = A.size();
  if (max_iterations == 0)
    max_iterations = static_cast<unsigned>(10 * n);

  CGReport     report;
  const double b_norm = norm(b);
  Vector       r(n), z(n), p(n), Ap(n);
  A.vmult(r, x);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = b[i] - r[i];

  auto precondition = [&] {
    if (preconditioner)
      preconditioner->vmult(z, r);
    else
      std::copy(r.begin(), r.end(), z.begin());
  };

  const double target = relative_tolerance * b_norm;
  double       r_norm = norm(r);
  precondition();
  p         = z;
  double rz = dot(r, z);
  report.preconditioned_residuals.push_back(std::sqrt(std::max(rz, 0.0)));

  while (r_norm > target && report.iterations < max_iterations)
    {
      A.vmult(Ap, p);
      const double pAp = dot(p, Ap);
      if (!(pAp > 0.0))
        throw IndefiniteOperator("CG: p.Ap = " + std::to_string(pAp) + " at iteration " +
                                 std::to_string(report.iterations));
      const double alpha = rz / pAp;
      axpy(alpha, p, x);
      axpy(-alpha, Ap, r);
      ++report.iterations;
      r_norm = norm(r);

      precondition();
      const double rz_new = dot(r, z);
      report.preconditioned_residuals.push_back(std::sqrt(std::max(rz_new, 0.0)));
      const double beta = rz_new / rz;
      for (std::size_t i = 0; i < n; ++i)
        p[i] = z[i] + beta * p[i];
      rz = rz_new;
    }

  report.relative_residual = b_norm > 0.0 ? r_norm / b_norm : 0.0;
  report.converged         = r_norm <= target;
  report.seconds           = seconds_since(start);
  return report;
}

DiagonalPreconditioner::DiagonalPreconditioner(std::span<const double> diagonal)
  : inverse_(invert_diagonal(diagonal))
{}

void
DiagonalPreconditioner::vmult(std::span<double> dst, std::span<const double> src) const
{
  for (std::size_t i = 0; i < inverse_.size(); ++i)
    dst[i] = inverse_[i] * src[i];
}

std::string_view
to_string(const PreconditionerType p)
{
  switch (p)
    {
      case PreconditionerType::gmg:
        return "gmg";
      case PreconditionerType::diag:
        return "diag";
      case PreconditionerType::none:
        return "none";
    }
  return "unknown";
}

PreconditionerType
parse_preconditioner(const std::string_view name)
{
  for (const auto p : {PreconditionerType::gmg, PreconditionerType::diag, PreconditionerType::none})
    if (to_string(p) == name)
      return p;
  throw ConfigError("unknown preconditioner '" + std::string(name) + "' (expected gmg, diag or none)");
}

void
NewtonSettings::validate() const
{
  if (load_steps == 0 || max_iterations == 0)
    throw ConfigError("load_steps and max_newton_iterations must be positive");
  if (!(update_tolerance > 0) || !(residual_tolerance > 0) || !(linear_tolerance > 0))
    throw ConfigError("solver tolerances must be positive");
}

template <int dim>
Point<dim>
apply_load_fraction(const double step, const unsigned total, const double magnitude, const Point<dim> &direction)
{
  if (total == 0 || step < 0 || step > total)
    throw std::invalid_argument("apply_load_fraction: need 0 <= step <= total, total > 0");
  const double n = direction.norm();
  if (!(n > 0))
    throw std::invalid_argument("apply_load_fraction: zero traction direction");
  return magnitude * (step / total) * direction / n;
}

unsigned
NewtonResult::total_cg_iterations() const
{
  unsigned n = 0;
  for (const auto &r : log)
    n += r.cg_iterations;
  return n;
}

double
NewtonResult::mean_cg_iterations() const
{
  std::size_t solves = 0;
  for (const auto &r : log)
    solves += r.cg_iterations > 0;
  return solves ? static_cast<double>(total_cg_iterations()) / solves : 0.0;
}

double
NewtonResult::cg_seconds() const
{
  double s = 0;
  for (const auto &r : log)
    s += r.cg_seconds;
  return s;
}

namespace
{
  template <int dim>
  std::unique_ptr<LinearOperator>
  make_preconditioner(const MultigridHierarchy<dim> &hierarchy,
                      const MaterialTable           &materials,
                      std::span<const double>        u,
                      const TangentOperator         &tangent,
                      const NewtonSettings          &settings)
  {
    switch (settings.preconditioner)
      {
        case PreconditionerType::gmg:
          return std::make_unique<MultigridPreconditioner<dim>>(hierarchy, materials, settings.strategy, u, tangent,
                                                                settings.multigrid);
        case PreconditionerType::diag:
          return std::make_unique<DiagonalPreconditioner>(tangent.compute_diagonal());
        default:
          return nullptr;
      }
  }

  struct StepFailure
  {
    std::string message;
  };

  // Newton iterations for one load increment; returns false on inversion.
  template <int dim>
  bool
  solve_increment(const MultigridHierarchy<dim> &hierarchy,
                  const MaterialTable           &materials,
                  const Point<dim>              &traction,
                  const NewtonSettings          &settings,
                  const unsigned                 step,
                  const double                   fraction,
                  Vector                        &u,
                  NewtonResult                  &result)
  {
    const auto &space = hierarchy.finest();
    double      F0    = 0;
    double      du    = std::numeric_limits<double>::infinity();
    Vector      delta(space.n_dofs());
    try
      {
        for (unsigned it = 0;; ++it)
          {
            Vector       F      = compute_residual<dim>(space, materials, u, traction);
            const double F_norm = norm(F);
            if (it == 0)
              F0 = F_norm;
            const bool residual_ok = F_norm <= settings.residual_tolerance &&
                                     (it == 0 || F_norm <= settings.residual_tolerance * F0);
            if (residual_ok && (it == 0 || du <= settings.update_tolerance))
              {
                result.log.push_back({step, it, fraction, F_norm, 0.0, 0, 0.0, 0.0});
                return true;
              }
            if (it == settings.max_iterations)
              throw StepFailure{"load step " + std::to_string(step) + " did not converge in " +
                                std::to_string(settings.max_iterations) + " Newton iterations"};

            const auto setup_start = Clock::now();
            const auto tangent     = make_tangent_operator<dim>(space, materials, settings.strategy, u);
            const auto precond     = make_preconditioner<dim>(hierarchy, materials, u, *tangent, settings);
            const double setup     = seconds_since(setup_start);

            for (auto &f : F)
              f = -f;
            std::fill(delta.begin(), delta.end(), 0.0);
            const CGReport report = cg(*tangent, delta, F, settings.linear_tolerance, precond.get());
            if (!report.converged)
              throw StepFailure{"CG did not converge (relative residual " +
                                std::to_string(report.relative_residual) + ")"};
            space.constraints().set_zero(delta);
            axpy(1.0, delta, u);
            du = norm(delta);
            result.log.push_back({step, it, fraction, F_norm, du, report.iterations, report.seconds, setup});
          }
      }
    catch (const NonPositiveJacobian &)
      {
        return false;
      }
  }
} // namespace

template <int dim>
NewtonResult
newton_solve(const MultigridHierarchy<dim> &hierarchy,
             const MaterialTable           &materials,
             const Point<dim>              &full_traction,
             const NewtonSettings          &settings)
{
  settings.validate();
  const auto start = Clock::now();

  NewtonResult result;
  result.u.assign(hierarchy.finest().n_dofs(), 0.0);

  std::deque<double> targets;
  for (unsigned s = 1; s <= settings.load_steps; ++s)
    targets.push_back(static_cast<double>(s) / settings.load_steps);

  double   reached = 0;
  unsigned step    = 1;
  try
    {
      while (!targets.empty())
        {
          const double     fraction = targets.front();
          const Point<dim> traction = fraction * full_traction;
          Vector           u        = result.u;
          if (solve_increment(hierarchy, materials, traction, settings, step, fraction, u, result))
            {
              result.u = std::move(u);
              reached  = fraction;
              targets.pop_front();
              ++step;
              continue;
            }
          if (result.bisections >= settings.max_bisections)
            throw StepFailure{"element inversion at load fraction " + std::to_string(fraction) +
                              " after bisection"};
          ++result.bisections;
          targets.push_front(0.5 * (reached + fraction));
        }
      result.converged = true;
    }
  catch (const StepFailure &f)
    {
      result.message = f.message;
    }
  catch (const IndefiniteOperator &e)
    {
      result.message = e.what();
    }
  result.seconds = seconds_since(start);
  return result;
}

template Point<2> apply_load_fraction<2>(double, unsigned, double, const Point<2> &);
template Point<3> apply_load_fraction<3>(double, unsigned, double, const Point<3> &);
template NewtonResult newton_solve<2>(const MultigridHierarchy<2> &, const MaterialTable &, const Point<2> &,
                                      const NewtonSettings &);
template NewtonResult newton_solve<3>(const MultigridHierarchy<3> &, const MaterialTable &, const Point<3> &,
                                      const NewtonSettings &);

} // namespace hyperfree
