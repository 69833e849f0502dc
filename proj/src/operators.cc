#include <hyperfree/errors.h>
#include <hyperfree/flops.h>
#include <hyperfree/operators.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperfree
{
std::string_view
to_string(const Strategy s)
{
  switch (s)
    {
      case Strategy::scalar:
        return "scalar";
      case Strategy::tensor2:
        return "tensor2";
      case Strategy::tensor4:
        return "tensor4";
      case Strategy::matrix_based:
        return "matrix_based";
    }
  return "unknown";
}

Strategy
parse_strategy(const std::string_view name)
{
  for (const auto s : {Strategy::scalar, Strategy::tensor2, Strategy::tensor4, Strategy::matrix_based})
    if (to_string(s) == name)
      return s;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected scalar, tensor2, tensor4 or matrix_based)");
}

namespace
{
  template <int dim>
  constexpr std::uint64_t matmul_flops = dim * dim * (2 * dim - 1);

  // Per-quadrature-point operation tallies of the apply kernels.
  template <int dim>
  constexpr std::uint64_t
  q_point_flops(const Strategy s)
  {
    constexpr std::uint64_t d2     = dim * dim;
    constexpr std::uint64_t common = 3 * matmul_flops<dim> + 4 * d2; // g, g tau, Q M^T, sym, sum, JxW
    switch (s)
      {
        case Strategy::scalar:
          return common + 3 * matmul_flops<dim> + dim + (dim == 2 ? 3 : 14) + (dim == 2 ? 6 : 45) +
                 (d2 + dim) + (2 * d2 + 2 * dim + 2);
        case Strategy::tensor2:
          return common + 2 * d2 + 2 * dim;
        case Strategy::tensor4:
          return common + n_sym<dim> + n_sym<dim> * (2 * n_sym<dim> - 1);
        default:
          return 0;
      }
  }

  // Double contraction of a packed upper-triangular Voigt tangent with a
  // symmetric tensor.
  template <int dim>
  Tensor2<dim>
  contract_packed(const double *packed, const Tensor2<dim> &g_sym)
  {
    constexpr int  n     = n_sym<dim>;
    constexpr auto pairs = voigt_pairs<dim>();
    double         strain[n], stress[n] = {};
    for (int a = 0; a < n; ++a)
      strain[a] = (a < dim ? 1.0 : 2.0) * g_sym(pairs[a][0], pairs[a][1]);
    for (int a = 0, idx = 0; a < n; ++a)
      {
        stress[a] += packed[idx++] * strain[a];
        for (int b = a + 1; b < n; ++b, ++idx)
          {
            stress[a] += packed[idx] * strain[b];
            stress[b] += packed[idx] * strain[a];
          }
      }
    return unpack_symmetric<dim>(stress);
  }

  template <int dim>
  Tensor2<dim>
  gather_gradient(const double *grads, const unsigned n_q, const unsigned q)
  {
    Tensor2<dim> g;
    for (int c = 0; c < dim; ++c)
      for (int k = 0; k < dim; ++k)
        g(c, k) = grads[(c * dim + k) * n_q + q];
    return g;
  }

  template <int dim>
  void
  scatter_gradient(const Tensor2<dim> &g, double *grads, const unsigned n_q, const unsigned q)
  {
    for (int c = 0; c < dim; ++c)
      for (int k = 0; k < dim; ++k)
        grads[(c * dim + k) * n_q + q] = g(c, k);
  }

  template <int dim>
  void
  evaluate_gradients(const FESpace<dim> &space, const double *local, std::vector<double> &grads)
  {
    const unsigned npc = space.dofs().nodes_per_cell, n_q = space.n_q_points();
    grads.resize(dim * dim * n_q);
    for (int c = 0; c < dim; ++c)
      space.kernel().evaluate(local + c * npc, nullptr, grads.data() + c * dim * n_q);
  }

  template <int dim>
  void
  integrate_gradients(const FESpace<dim> &space, const std::vector<double> &grads, double *local)
  {
    const unsigned npc = space.dofs().nodes_per_cell, n_q = space.n_q_points();
    for (int c = 0; c < dim; ++c)
      space.kernel().integrate(nullptr, grads.data() + c * dim * n_q, local + c * npc);
  }

  template <int dim>
  Kinematics<dim>
  kinematics_at(const Tensor2<dim> &grad_u, const std::size_t cell)
  {
    try
      {
        return kinematics_from_displacement_gradient<dim>(grad_u);
      }
    catch (const NonPositiveJacobian &e)
      {
        throw NonPositiveJacobian(std::string(e.what()) + " in cell " + std::to_string(cell),
                                  static_cast<long>(cell));
      }
  }
} // namespace

template <int dim>
MatrixFreeTangent<dim>::MatrixFreeTangent(const FESpace<dim>     &space,
                                          const MaterialTable    &materials,
                                          const Strategy          strategy,
                                          std::span<const double> u)
  : space_(space)
  , materials_(materials)
  , strategy_(strategy)
  , payload_size_(payload_scalars_per_q_point<dim>(strategy))
{
  if (strategy == Strategy::matrix_based)
    throw std::invalid_argument("MatrixFreeTangent: matrix_based is not a matrix-free strategy");
  if (u.size() != space.n_dofs())
    throw std::invalid_argument("MatrixFreeTangent: linearization vector has wrong size");

  const unsigned    n_q     = space.n_q_points();
  const std::size_t n_cells = space.n_cells();
  payload_.resize(n_cells * n_q * payload_size_);
  if (strategy != Strategy::scalar)
    spatial_inverse_.resize(n_cells * n_q);
  else
    linearization_.assign(u.begin(), u.end());

  std::vector<double> local(space.dofs_per_cell()), grads;
  const auto         &geometry = space.geometry();
  for (std::size_t cell = 0; cell < n_cells; ++cell)
    {
      const NeoHookeanParams &p = materials_(space.mesh().cells[cell].material);
      read_cell_values(space.dofs(), cell, u, local);
      evaluate_gradients(space, local.data(), grads);
      for (unsigned q = 0; q < n_q; ++q)
        {
          const std::size_t   idx      = cell * n_q + q;
          const Tensor2<dim> &jac_inv  = geometry.inverse_jacobian[idx];
          const Tensor2<dim>  grad_u   = gather_gradient<dim>(grads.data(), n_q, q) * jac_inv;
          const auto          kin      = kinematics_at<dim>(grad_u, cell);
          double             *data     = payload_.data() + idx * payload_size_;
          const double        ln_J     = std::log(kin.J);
          switch (strategy)
            {
              case Strategy::scalar:
                data[0] = p.mu - 2.0 * p.lambda * ln_J;
                break;
              case Strategy::tensor2:
                data[0] = 2.0 * (p.mu - 2.0 * p.lambda * ln_J);
                data[1] = 2.0 * p.lambda;
                pack_symmetric<dim>(kirchhoff_stress<dim>(kin, p), data + 2);
                break;
              case Strategy::tensor4:
                pack_symmetric<dim>(kirchhoff_stress<dim>(kin, p), data);
                material_tangent_full<dim>(kin.J, p).pack(data + n_sym<dim>);
                break;
              default:
                break;
            }
          if (strategy != Strategy::scalar)
            spatial_inverse_[idx] = jac_inv * kin.F_inv;
        }
    }
}

template <int dim>
std::span<const double>
MatrixFreeTangent<dim>::payload(const std::size_t cell, const unsigned q) const
{
  return {payload_.data() + (cell * space_.n_q_points() + q) * payload_size_, payload_size_};
}

template <int dim>
template <Strategy s>
void
MatrixFreeTangent<dim>::apply_cell_impl(const std::size_t cell, const double *src, double *dst) const
{
  static thread_local std::vector<double> grads, u_local, u_grads;

  const unsigned n_q = space_.n_q_points();
  evaluate_gradients(space_, src, grads);

  [[maybe_unused]] const NeoHookeanParams *p = nullptr;
  if constexpr (s == Strategy::scalar)
    {
      p = &materials_(space_.mesh().cells[cell].material);
      u_local.resize(space_.dofs_per_cell());
      read_cell_values(space_.dofs(), cell, linearization_, u_local);
      evaluate_gradients(space_, u_local.data(), u_grads);
    }

  const auto &geometry = space_.geometry();
  for (unsigned q = 0; q < n_q; ++q)
    {
      const std::size_t   idx  = cell * n_q + q;
      const double       *data = payload_.data() + idx * payload_size_;
      const Tensor2<dim>  G    = gather_gradient<dim>(grads.data(), n_q, q);
      Tensor2<dim>        M, tau, sigma, g;

      if constexpr (s == Strategy::scalar)
        {
          const Tensor2<dim> &jac_inv = geometry.inverse_jacobian[idx];
          const Tensor2<dim>  F =
            Tensor2<dim>::Identity() + gather_gradient<dim>(u_grads.data(), n_q, q) * jac_inv;
          const double c1 = data[0];
          tau             = p->mu * (F * F.transpose()) - c1 * Tensor2<dim>::Identity();
          M               = jac_inv * F.inverse();
          g               = G * M;
          const Tensor2<dim> g_sym = symmetrize<dim>(g);
          sigma = (2.0 * c1) * g_sym + (2.0 * p->lambda * g_sym.trace()) * Tensor2<dim>::Identity();
        }
      else if constexpr (s == Strategy::tensor2)
        {
          M   = spatial_inverse_[idx];
          tau = unpack_symmetric<dim>(data + 2);
          g   = G * M;
          const Tensor2<dim> g_sym = symmetrize<dim>(g);
          sigma = data[0] * g_sym + (data[1] * g_sym.trace()) * Tensor2<dim>::Identity();
        }
      else
        {
          M     = spatial_inverse_[idx];
          tau   = unpack_symmetric<dim>(data);
          g     = G * M;
          sigma = contract_packed<dim>(data + n_sym<dim>, symmetrize<dim>(g));
        }

      const Tensor2<dim> Q = (sigma + g * tau) * M.transpose() * geometry.JxW[idx];
      scatter_gradient<dim>(Q, grads.data(), n_q, q);
    }
  flops::add(q_point_flops<dim>(s) * n_q);

  integrate_gradients(space_, grads, dst);
}

template <int dim>
void
MatrixFreeTangent<dim>::apply_cell(const std::size_t cell, const double *src, double *dst) const
{
  switch (strategy_)
    {
      case Strategy::scalar:
        apply_cell_impl<Strategy::scalar>(cell, src, dst);
        break;
      case Strategy::tensor2:
        apply_cell_impl<Strategy::tensor2>(cell, src, dst);
        break;
      case Strategy::tensor4:
        apply_cell_impl<Strategy::tensor4>(cell, src, dst);
        break;
      default:
        break;
    }
}

template <int dim>
void
MatrixFreeTangent<dim>::vmult(std::span<double> dst, std::span<const double> src) const
{
  static thread_local std::vector<double> local_src, local_dst;
  const unsigned                          dpc = space_.dofs_per_cell();
  local_src.resize(dpc);
  local_dst.resize(dpc);

  std::fill(dst.begin(), dst.end(), 0.0);
  const auto &dofs        = space_.dofs();
  const auto &constraints = space_.constraints();
  for (std::size_t cell = 0; cell < space_.n_cells(); ++cell)
    {
      read_cell_values(dofs, cell, src, local_src, &constraints);
      apply_cell(cell, local_src.data(), local_dst.data());
      distribute_local_to_global(dofs, cell, local_dst, constraints, dst);
    }
  for (const auto i : constraints.dofs)
    dst[i] = src[i];
}

template <int dim>
Vector
MatrixFreeTangent<dim>::compute_diagonal() const
{
  const unsigned      dpc = space_.dofs_per_cell();
  const unsigned      npc = space_.dofs().nodes_per_cell;
  std::vector<double> unit(dpc, 0.0), column(dpc), local_diag(dpc);
  Vector              diag(size(), 0.0);
  const auto         &dofs        = space_.dofs();
  const auto         &constraints = space_.constraints();

  for (std::size_t cell = 0; cell < space_.n_cells(); ++cell)
    {
      const auto nodes = dofs.nodes_of(cell);
      for (unsigned j = 0; j < dpc; ++j)
        {
          local_diag[j] = 0.0;
          if (constraints.is_constrained(dofs.dof(nodes[j % npc], j / npc)))
            continue;
          unit[j] = 1.0;
          apply_cell(cell, unit.data(), column.data());
          unit[j]       = 0.0;
          local_diag[j] = column[j];
        }
      distribute_local_to_global(dofs, cell, local_diag, constraints, diag);
    }
  for (const auto i : constraints.dofs)
    diag[i] = 1.0;
  return diag;
}

template <int dim>
std::size_t
MatrixFreeTangent<dim>::memory_bytes() const
{
  const std::size_t n_points = space_.n_cells() * space_.n_q_points();
  std::size_t       bytes    = payload_.size() * sizeof(double);
  // mapping data: inverse Jacobian (spatial, or referential for the scalar
  // strategy) and JxW per point
  bytes += n_points * (dim * dim + 1) * sizeof(double);
  bytes += linearization_.size() * sizeof(double);
  bytes += space_.dofs().cell_nodes.size() * sizeof(std::uint32_t);
  return bytes;
}

template <int dim>
std::vector<std::vector<std::uint32_t>>
make_sparsity_pattern(const FESpace<dim> &space)
{
  const auto &dofs = space.dofs();
  std::vector<std::vector<std::uint32_t>> node_cells(dofs.n_nodes);
  for (std::size_t cell = 0; cell < dofs.n_cells(); ++cell)
    for (const auto n : dofs.nodes_of(cell))
      if (node_cells[n].empty() || node_cells[n].back() != cell)
        node_cells[n].push_back(static_cast<std::uint32_t>(cell));

  std::vector<std::vector<std::uint32_t>> pattern(dofs.n_dofs());
  std::vector<std::uint32_t>              neighbors;
  for (std::size_t n = 0; n < dofs.n_nodes; ++n)
    {
      neighbors.clear();
      for (const auto cell : node_cells[n])
        for (const auto m : dofs.nodes_of(cell))
          neighbors.push_back(m);
      std::sort(neighbors.begin(), neighbors.end());
      neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());

      std::vector<std::uint32_t> row;
      row.reserve(neighbors.size() * dofs.components);
      for (const auto m : neighbors)
        for (unsigned c = 0; c < dofs.components; ++c)
          row.push_back(static_cast<std::uint32_t>(dofs.dof(m, c)));
      for (unsigned c = 0; c < dofs.components; ++c)
        pattern[dofs.dof(n, c)] = row;
    }
  return pattern;
}

template <int dim>
SparseMatrix
assemble_tangent_matrix(const FESpace<dim> &space, const MaterialTable &materials, std::span<const double> u)
{
  SparseMatrix matrix(make_sparsity_pattern(space));

  const auto    &dofs        = space.dofs();
  const auto    &constraints = space.constraints();
  const auto    &basis       = space.basis();
  const auto    &quad        = space.quadrature();
  const unsigned n = basis.size(), npc = dofs.nodes_per_cell, dpc = space.dofs_per_cell();
  const unsigned n_q = space.n_q_points();

  // Shape values and unit-cell gradients at every quadrature point, formed
  // directly as products of 1D polynomials.
  std::vector<double>       shape_value(n_q * npc);
  std::vector<Point<dim>>   shape_grad(n_q * npc);
  for (unsigned q = 0; q < n_q; ++q)
    {
      const Point<dim> xi = tensor_point<dim>(quad, q);
      for (unsigned a = 0; a < npc; ++a)
        {
          std::array<unsigned, dim> idx;
          unsigned                  rest = a;
          for (int d = 0; d < dim; ++d)
            {
              idx[d] = rest % n;
              rest /= n;
            }
          double     v = 1.0;
          Point<dim> grad;
          for (int d = 0; d < dim; ++d)
            {
              v *= basis.value(idx[d], xi[d]);
              double gd = 1.0;
              for (int e = 0; e < dim; ++e)
                gd *= (e == d) ? basis.derivative(idx[e], xi[e]) : basis.value(idx[e], xi[e]);
              grad[d] = gd;
            }
          shape_value[q * npc + a] = v;
          shape_grad[q * npc + a]  = grad;
        }
    }

  std::vector<double>     local_u(dpc);
  std::vector<Point<dim>> spatial_grad(npc);
  Eigen::MatrixXd         K(dpc, dpc);
  for (std::size_t cell = 0; cell < space.n_cells(); ++cell)
    {
      const NeoHookeanParams &p       = materials(space.mesh().cells[cell].material);
      const auto              corners = space.mesh().cell_vertices(cell);
      read_cell_values(dofs, cell, u, local_u);
      K.setZero();
      for (unsigned q = 0; q < n_q; ++q)
        {
          const Point<dim>   xi      = tensor_point<dim>(quad, q);
          const Tensor2<dim> jac     = mapping_jacobian<dim>(corners, xi);
          const Tensor2<dim> jac_inv = jac.inverse();
          const double       JxW     = jac.determinant() * tensor_weight<dim>(quad, q);

          Tensor2<dim> grad_u = Tensor2<dim>::Zero();
          for (unsigned a = 0; a < npc; ++a)
            {
              const Point<dim> grad_X = jac_inv.transpose() * shape_grad[q * npc + a];
              for (int c = 0; c < dim; ++c)
                grad_u.row(c) += local_u[c * npc + a] * grad_X.transpose();
            }
          const auto               kin = kinematics_at<dim>(grad_u, cell);
          const Tensor2<dim>       tau = kirchhoff_stress<dim>(kin, p);
          const VoigtTangent<dim>  D   = material_tangent_full<dim>(kin.J, p);
          const Tensor2<dim>       to_spatial = jac_inv * kin.F_inv;
          for (unsigned a = 0; a < npc; ++a)
            spatial_grad[a] = to_spatial.transpose() * shape_grad[q * npc + a];

          for (unsigned a = 0; a < npc; ++a)
            for (unsigned b = 0; b < npc; ++b)
              {
                const Point<dim> &ga = spatial_grad[a], &gb = spatial_grad[b];
                const double      geometric = ga.dot(tau * gb);
                for (int i = 0; i < dim; ++i)
                  for (int k = 0; k < dim; ++k)
                    {
                      double material = 0.0;
                      for (int j = 0; j < dim; ++j)
                        for (int l = 0; l < dim; ++l)
                          material += ga[j] * D.component(i, j, k, l) * gb[l];
                      K(i * npc + a, k * npc + b) += (material + (i == k ? geometric : 0.0)) * JxW;
                    }
              }
        }

      const auto nodes = dofs.nodes_of(cell);
      for (unsigned r = 0; r < dpc; ++r)
        {
          const std::size_t row = dofs.dof(nodes[r % npc], r / npc);
          if (constraints.is_constrained(row))
            continue;
          for (unsigned s = 0; s < dpc; ++s)
            {
              const std::size_t col = dofs.dof(nodes[s % npc], s / npc);
              if (!constraints.is_constrained(col))
                matrix.add(row, col, K(r, s));
            }
        }
    }
  for (const auto i : constraints.dofs)
    matrix.set(i, i, 1.0);
  return matrix;
}

template <int dim>
std::unique_ptr<TangentOperator>
make_tangent_operator(const FESpace<dim>     &space,
                      const MaterialTable    &materials,
                      const Strategy          strategy,
                      std::span<const double> u)
{
  if (strategy == Strategy::matrix_based)
    return std::make_unique<AssembledTangent<dim>>(space, materials, u);
  return std::make_unique<MatrixFreeTangent<dim>>(space, materials, strategy, u);
}

template <int dim>
Vector
compute_residual(const FESpace<dim>     &space,
                 const MaterialTable    &materials,
                 std::span<const double> u,
                 const Point<dim>       &traction)
{
  const auto    &dofs        = space.dofs();
  const auto    &constraints = space.constraints();
  const auto    &geometry    = space.geometry();
  const unsigned n_q         = space.n_q_points();
  Vector         residual(space.n_dofs(), 0.0);

  std::vector<double> local(space.dofs_per_cell()), grads;
  for (std::size_t cell = 0; cell < space.n_cells(); ++cell)
    {
      const NeoHookeanParams &p = materials(space.mesh().cells[cell].material);
      read_cell_values(dofs, cell, u, local);
      evaluate_gradients(space, local.data(), grads);
      for (unsigned q = 0; q < n_q; ++q)
        {
          const std::size_t   idx     = cell * n_q + q;
          const Tensor2<dim> &jac_inv = geometry.inverse_jacobian[idx];
          const auto kin = kinematics_at<dim>(gather_gradient<dim>(grads.data(), n_q, q) * jac_inv, cell);
          // tau : grad delta_u = (tau F^-T) : Grad delta_u
          const Tensor2<dim> P = kirchhoff_stress<dim>(kin, p) * kin.F_inv.transpose();
          scatter_gradient<dim>(P * jac_inv.transpose() * geometry.JxW[idx], grads.data(), n_q, q);
        }
      integrate_gradients(space, grads, local.data());
      distribute_local_to_global(dofs, cell, local, constraints, residual);
    }

  const auto &faces = space.top_faces();
  for (std::size_t f = 0; f < faces.size(); ++f)
    {
      const auto nodes = dofs.nodes_of(faces.cells[f]);
      for (unsigned q = 0; q < faces.n_face_points; ++q)
        {
          const double JxW = faces.JxW[f * faces.n_face_points + q];
          for (unsigned k = 0; k < faces.n_face_nodes; ++k)
            {
              const double   N    = faces.shape_values[q * faces.n_face_nodes + k];
              const unsigned node = nodes[faces.local_nodes[f * faces.n_face_nodes + k]];
              for (int c = 0; c < dim; ++c)
                {
                  const std::size_t i = dofs.dof(node, c);
                  if (!constraints.is_constrained(i))
                    residual[i] -= traction[c] * N * JxW;
                }
            }
        }
    }
  return residual;
}

template <int dim>
double
energy(const FESpace<dim>     &space,
       const MaterialTable    &materials,
       std::span<const double> u,
       const Point<dim>       &traction)
{
  const auto    &dofs     = space.dofs();
  const auto    &geometry = space.geometry();
  const unsigned n_q      = space.n_q_points();

  double              total = 0.0;
  std::vector<double> local(space.dofs_per_cell()), grads;
  for (std::size_t cell = 0; cell < space.n_cells(); ++cell)
    {
      const NeoHookeanParams &p = materials(space.mesh().cells[cell].material);
      read_cell_values(dofs, cell, u, local);
      evaluate_gradients(space, local.data(), grads);
      for (unsigned q = 0; q < n_q; ++q)
        {
          const std::size_t idx = cell * n_q + q;
          const auto        kin = kinematics_at<dim>(
            gather_gradient<dim>(grads.data(), n_q, q) * geometry.inverse_jacobian[idx], cell);
          total += strain_energy<dim>(kin.C, p) * geometry.JxW[idx];
        }
    }

  const auto &faces = space.top_faces();
  for (std::size_t f = 0; f < faces.size(); ++f)
    {
      const auto nodes = dofs.nodes_of(faces.cells[f]);
      for (unsigned q = 0; q < faces.n_face_points; ++q)
        {
          Point<dim> u_q = Point<dim>::Zero();
          for (unsigned k = 0; k < faces.n_face_nodes; ++k)
            {
              const double   N    = faces.shape_values[q * faces.n_face_nodes + k];
              const unsigned node = nodes[faces.local_nodes[f * faces.n_face_nodes + k]];
              for (int c = 0; c < dim; ++c)
                u_q[c] += N * u[dofs.dof(node, c)];
            }
          total -= traction.dot(u_q) * faces.JxW[f * faces.n_face_points + q];
        }
    }
  return total;
}

template <int dim>
std::pair<double, double>
jacobian_range(const FESpace<dim> &space, std::span<const double> u)
{
  const unsigned      n_q = space.n_q_points();
  double              lo = std::numeric_limits<double>::max(), hi = -lo;
  std::vector<double> local(space.dofs_per_cell()), grads;
  for (std::size_t cell = 0; cell < space.n_cells(); ++cell)
    {
      read_cell_values(space.dofs(), cell, u, local);
      evaluate_gradients(space, local.data(), grads);
      for (unsigned q = 0; q < n_q; ++q)
        {
          const Tensor2<dim> F =
            Tensor2<dim>::Identity() + gather_gradient<dim>(grads.data(), n_q, q) *
                                         space.geometry().inverse_jacobian[cell * n_q + q];
          const double J = F.determinant();
          lo             = std::min(lo, J);
          hi             = std::max(hi, J);
        }
    }
  return {lo, hi};
}

#define HYPERFREE_INSTANTIATE(dim)                                                                  \
  template class MatrixFreeTangent<dim>;                                                            \
  template class AssembledTangent<dim>;                                                             \
  template SparseMatrix assemble_tangent_matrix<dim>(const FESpace<dim> &, const MaterialTable &,   \
                                                     std::span<const double>);                      \
  template std::vector<std::vector<std::uint32_t>> make_sparsity_pattern<dim>(const FESpace<dim> &); \
  template std::unique_ptr<TangentOperator> make_tangent_operator<dim>(                             \
    const FESpace<dim> &, const MaterialTable &, Strategy, std::span<const double>);                \
  template Vector compute_residual<dim>(const FESpace<dim> &, const MaterialTable &,                 \
                                        std::span<const double>, const Point<dim> &);               \
  template double energy<dim>(const FESpace<dim> &, const MaterialTable &, std::span<const double>, \
                              const Point<dim> &);                                                  \
  template std::pair<double, double> jacobian_range<dim>(const FESpace<dim> &,                      \
                                                         std::span<const double>);

HYPERFREE_INSTANTIATE(2)
HYPERFREE_INSTANTIATE(3)

} // namespace hyperfree
