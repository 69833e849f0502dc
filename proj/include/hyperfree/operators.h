#pragma once

#include <hyperfree/fe_space.h>
#include <hyperfree/material.h>
#include <hyperfree/sparse_matrix.h>
#include <hyperfree/vector_ops.h>

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperfree
{
/// How the tangent operator keeps its linearization state between applies.
enum class Strategy
{
  scalar,      // c1 = mu - 2 lambda ln J; tau and F are rebuilt from u each apply
  tensor2,     // c1, c2 and tau
  tensor4,     // tau and the full material tangent J C
  matrix_based // assembled sparse matrix
};

std::string_view to_string(Strategy s);

/// Throws ConfigError for unknown names.
Strategy parse_strategy(std::string_view name);

struct MaterialTable
{
  NeoHookeanParams matrix;
  NeoHookeanParams inclusion;

  const NeoHookeanParams &operator()(MaterialId id) const
  {
    return id == MaterialId::inclusion ? inclusion : matrix;
  }
};

class LinearOperator
{
public:
  virtual ~LinearOperator() = default;

  virtual std::size_t size() const = 0;

  /// dst = A src. dst and src must not alias.
  virtual void vmult(std::span<double> dst, std::span<const double> src) const = 0;
};

/**
 * Tangent of the discrete residual linearized at some displacement u.
 * Constrained DoFs are treated symmetrically: inputs read as zero there and
 * the output equals the input (identity block).
 */
class TangentOperator : public LinearOperator
{
public:
  virtual Strategy    strategy() const = 0;
  virtual Vector      compute_diagonal() const = 0;
  virtual std::size_t memory_bytes() const = 0;
};

/// Number of doubles cached per quadrature point for the linearization state.
template <int dim>
constexpr unsigned
payload_scalars_per_q_point(const Strategy s)
{
  switch (s)
    {
      case Strategy::scalar:
        return 1;
      case Strategy::tensor2:
        return 2 + n_sym<dim>;
      case Strategy::tensor4:
        return n_sym<dim> + n_sym4<dim>;
      default:
        return 0;
    }
}

template <int dim>
class MatrixFreeTangent final : public TangentOperator
{
public:
  /// Builds the quadrature-point cache at u. Throws NonPositiveJacobian.
  MatrixFreeTangent(const FESpace<dim>       &space,
                    const MaterialTable      &materials,
                    Strategy                  strategy,
                    std::span<const double>   u);

  std::size_t size() const override { return space_.n_dofs(); }
  Strategy    strategy() const override { return strategy_; }
  void        vmult(std::span<double> dst, std::span<const double> src) const override;
  Vector      compute_diagonal() const override;
  std::size_t memory_bytes() const override;

  const FESpace<dim> &space() const { return space_; }

  /// Raw cache payload of quadrature point q of a cell.
  std::span<const double> payload(std::size_t cell, unsigned q) const;

  /// Cached inverse of the unit-to-spatial Jacobian (tensor2/tensor4 only).
  const Tensor2<dim> &spatial_inverse_jacobian(std::size_t cell, unsigned q) const
  {
    return spatial_inverse_[cell * space_.n_q_points() + q];
  }

  /// Applies the element tangent of `cell` to a cell-local vector.
  void apply_cell(std::size_t cell, const double *src, double *dst) const;

private:
  template <Strategy s>
  void apply_cell_impl(std::size_t cell, const double *src, double *dst) const;

  const FESpace<dim>       &space_;
  MaterialTable             materials_;
  Strategy                  strategy_;
  unsigned                  payload_size_;
  std::vector<double>       payload_;         // [(cell * n_q + q) * payload_size_ + k]
  std::vector<Tensor2<dim>> spatial_inverse_; // tensor2 and tensor4
  Vector                    linearization_;   // scalar strategy keeps u
};

/// Reference-configuration assembly of the same bilinear form, by plain
/// quadrature loops without sum factorization.
template <int dim>
SparseMatrix assemble_tangent_matrix(const FESpace<dim>      &space,
                                     const MaterialTable     &materials,
                                     std::span<const double>  u);

/// Node-coupling sparsity expanded to all components.
template <int dim>
std::vector<std::vector<std::uint32_t>> make_sparsity_pattern(const FESpace<dim> &space);

template <int dim>
class AssembledTangent final : public TangentOperator
{
public:
  AssembledTangent(const FESpace<dim> &space, const MaterialTable &materials, std::span<const double> u)
    : matrix_(assemble_tangent_matrix<dim>(space, materials, u))
  {}

  std::size_t size() const override { return matrix_.n_rows(); }
  Strategy    strategy() const override { return Strategy::matrix_based; }
  void        vmult(std::span<double> dst, std::span<const double> src) const override
  {
    matrix_.vmult(dst, src);
  }
  Vector      compute_diagonal() const override { return matrix_.diagonal(); }
  std::size_t memory_bytes() const override { return matrix_.memory_bytes(); }

  const SparseMatrix &matrix() const { return matrix_; }

private:
  SparseMatrix matrix_;
};

template <int dim>
std::unique_ptr<TangentOperator> make_tangent_operator(const FESpace<dim>     &space,
                                                       const MaterialTable    &materials,
                                                       Strategy                strategy,
                                                       std::span<const double> u);

/**
 * F_i = sum_K sum_q tau : grad^s N_i JxW - sum_top sum_q T . N_i JxW,
 * with constrained entries zeroed. Throws NonPositiveJacobian.
 */
template <int dim>
Vector compute_residual(const FESpace<dim>     &space,
                        const MaterialTable    &materials,
                        std::span<const double> u,
                        const Point<dim>       &traction);

/// Total potential energy: sum psi JxW - sum_top T . u JxW.
template <int dim>
double energy(const FESpace<dim>     &space,
              const MaterialTable    &materials,
              std::span<const double> u,
              const Point<dim>       &traction);

/// Minimum and maximum of det F over all quadrature points.
template <int dim>
std::pair<double, double> jacobian_range(const FESpace<dim> &space, std::span<const double> u);

} // namespace hyperfree
