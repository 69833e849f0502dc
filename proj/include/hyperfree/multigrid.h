#pragma once

#include <hyperfree/fe_space.h>
#include <hyperfree/operators.h>
#include <hyperfree/sparse_matrix.h>

#include <memory>
#include <span>
#include <vector>

namespace hyperfree
{
struct EigenvalueEstimate
{
  double   min = 0;
  double   max = 0;
  unsigned iterations = 0; // CG steps actually taken
};

/**
 * Runs up to `iterations` CG steps on A x = r with a seeded random r
 * (zero on `mask`ed entries) and returns the extreme Ritz values of the
 * Lanczos tridiagonal. With `inverse_diagonal` the estimates are for
 * D^-1 A. Stops early on breakdown and keeps the last valid values.
 */
EigenvalueEstimate estimate_eigenvalues(const LinearOperator        &A,
                                        std::span<const double>      inverse_diagonal,
                                        unsigned                     iterations,
                                        std::span<const std::uint8_t> mask = {},
                                        std::uint64_t                seed = 42);

/**
 * Chebyshev iteration on D^-1 A targeting the eigenvalue interval
 * [lower, upper]. One step applies a polynomial of the given degree, which
 * costs `degree` operator applications.
 */
class ChebyshevSmoother
{
public:
  ChebyshevSmoother() = default;
  ChebyshevSmoother(const LinearOperator &A, Vector inverse_diagonal, double lower, double upper,
                    unsigned degree);

  /// x <- x + p(D^-1 A) D^-1 (b - A x). With zero_initial x is overwritten.
  void step(std::span<double> x, std::span<const double> b, bool zero_initial = false) const;

  unsigned degree() const { return degree_; }
  double   lower() const { return lower_; }
  double   upper() const { return upper_; }

private:
  const LinearOperator *A_ = nullptr;
  Vector                inverse_diagonal_;
  double                lower_ = 0, upper_ = 0;
  unsigned              degree_ = 0;
  mutable Vector        r_, d_;
};

/// Chebyshev damping bound 1 / T_k((b + a) / (b - a)).
double chebyshev_bound(double lower, double upper, unsigned degree);

struct MultigridSettings
{
  unsigned smoother_degree       = 4;
  unsigned smoothing_steps       = 2;
  double   smoothing_range_lower = 0.6;
  double   smoothing_range_upper = 1.2;
  unsigned eigenvalue_iterations = 30;
  double   coarse_reduction      = 1e-3;
  unsigned coarse_max_sweeps     = 100;
  unsigned coarse_max_degree     = 2000;
  std::uint64_t seed             = 42;
};

/**
 * Level spaces and transfer operators of a nested hierarchy. Level l of the
 * mesh hierarchy carries a degree-p space; prolongation(l) maps level l - 1
 * to level l by the embedding of nested spaces.
 */
template <int dim>
class MultigridHierarchy
{
public:
  MultigridHierarchy(const MeshHierarchy<dim> &meshes, unsigned degree, unsigned n_q_points_1d = 0);

  unsigned n_levels() const { return static_cast<unsigned>(spaces_.size()); }

  const FESpace<dim> &space(unsigned l) const { return *spaces_.at(l); }
  const FESpace<dim> &finest() const { return *spaces_.back(); }

  /// Fine rows, coarse columns. Defined for l >= 1.
  const SparseMatrix &prolongation(unsigned l) const { return prolongation_.at(l); }

  /// For every node of level l - 1, the coincident node on level l.
  std::span<const std::uint32_t> coincident_nodes(unsigned l) const { return coincident_.at(l); }

  /// fine = P coarse, zero on constrained fine entries; coarse constrained
  /// entries are ignored.
  void prolongate(unsigned l, std::span<double> fine, std::span<const double> coarse) const;

  /// coarse = P^T fine restricted to unconstrained entries on both levels.
  void restrict_residual(unsigned l, std::span<double> coarse, std::span<const double> fine) const;

  /// Displacement per level by injection at coincident nodes, coarsest
  /// first; the last entry is a copy of u.
  std::vector<Vector> restrict_solution(std::span<const double> u) const;

private:
  std::vector<std::unique_ptr<FESpace<dim>>> spaces_;
  std::vector<SparseMatrix>                  prolongation_;
  std::vector<std::vector<std::uint32_t>>    coincident_;
};

/// Builds the level-(l-1) to level-l prolongation.
template <int dim>
SparseMatrix make_prolongation(const FESpace<dim>            &coarse,
                               const FESpace<dim>            &fine,
                               std::span<const ParentLink>    parents);

/**
 * V-cycle preconditioner. Every level operator is a tangent operator
 * linearized at the restricted displacement of that level; the finest level
 * reuses the given fine operator and the coarsest level (when distinct from
 * the finest) is assembled. Level smoothers are Chebyshev on the
 * diagonally scaled operator. The coarsest level is solved by a fixed number
 * of sweeps of a Chebyshev polynomial; degree and sweep count are chosen at
 * setup from the eigenvalue bounds and random probes so that the residual
 * drops by the configured factor, which keeps the cycle linear.
 */
template <int dim>
class MultigridPreconditioner final : public LinearOperator
{
public:
  MultigridPreconditioner(const MultigridHierarchy<dim> &hierarchy,
                          const MaterialTable           &materials,
                          Strategy                       strategy,
                          std::span<const double>        u,
                          const TangentOperator         &fine_operator,
                          const MultigridSettings       &settings = {});

  std::size_t size() const override { return hierarchy_.finest().n_dofs(); }
  void        vmult(std::span<double> dst, std::span<const double> src) const override;

  const TangentOperator   &level_operator(unsigned l) const { return *operators_.at(l); }
  double                   lambda_max(unsigned l) const { return lambda_max_.at(l); }
  const ChebyshevSmoother &smoother(unsigned l) const { return smoothers_.at(l); }
  const ChebyshevSmoother &coarse_solver() const { return coarse_; }
  unsigned                 coarse_sweeps() const { return coarse_sweeps_; }

  /// The coarse-level solve used at the bottom of the cycle.
  void coarse_solve(std::span<double> x, std::span<const double> b) const;

  /// Relative residual reached by the coarse solver on the setup probes.
  double coarse_probe_reduction() const { return coarse_probe_reduction_; }

  std::size_t memory_bytes() const;

private:
  void v_cycle(unsigned l, std::span<double> x, std::span<const double> b) const;

  const MultigridHierarchy<dim>                 &hierarchy_;
  MultigridSettings                              settings_;
  std::vector<std::unique_ptr<TangentOperator>>  owned_;
  std::vector<const TangentOperator *>           operators_;
  std::vector<double>                            lambda_max_;
  std::vector<ChebyshevSmoother>                 smoothers_;
  ChebyshevSmoother                              coarse_;
  unsigned                                       coarse_sweeps_ = 1;
  double                                         coarse_probe_reduction_ = 0;
  mutable std::vector<Vector>                    x_, b_, r_;
};

/// Entry-wise inverse. Throws IndefiniteOperator on a non-positive entry.
Vector invert_diagonal(std::span<const double> diagonal);

} // namespace hyperfree
