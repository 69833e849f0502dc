#pragma once

#include <hyperfree/mesh.h>
#include <hyperfree/vector_ops.h>

#include <cstdint>
#include <span>
#include <vector>

namespace hyperfree
{
/**
 * Global numbering of the nodes of a continuous tensor-product Lagrange space.
 *
 * Nodes are numbered in order of first appearance when visiting cells in
 * order and local nodes lexicographically. A vector-valued field with
 * `components` components stores node n, component c at n * components + c.
 */
struct DoFMap
{
  unsigned                   degree         = 0;
  unsigned                   components     = 0;
  unsigned                   nodes_per_cell = 0;
  std::size_t                n_nodes        = 0;
  std::vector<std::uint32_t> cell_nodes; // [cell * nodes_per_cell + local]

  std::size_t n_dofs() const { return n_nodes * components; }
  std::size_t n_cells() const { return cell_nodes.size() / nodes_per_cell; }

  std::span<const std::uint32_t> nodes_of(std::size_t cell) const
  {
    return {cell_nodes.data() + cell * nodes_per_cell, nodes_per_cell};
  }

  std::size_t dof(std::size_t node, unsigned component) const
  {
    return node * components + component;
  }
};

/// Requires a conforming mesh. Throws std::invalid_argument for degree 0.
template <int dim>
DoFMap build_dof_map(const Mesh<dim> &mesh, unsigned degree, unsigned components);

/// Homogeneous Dirichlet constraints.
struct ConstraintSet
{
  std::vector<std::uint8_t> mask; // 1 if constrained
  std::vector<std::size_t>  dofs; // sorted

  bool is_constrained(std::size_t dof) const { return mask[dof] != 0; }

  void set_zero(std::span<double> v) const
  {
    for (const auto i : dofs)
      v[i] = 0.0;
  }
};

/// Every component of every node on a face tagged `boundary`.
template <int dim>
ConstraintSet make_boundary_constraints(const Mesh<dim> &mesh,
                                        const DoFMap    &dofs,
                                        BoundaryId       boundary = BoundaryId::bottom);

/// Local nodes of a cell face, lexicographic in the remaining directions.
template <int dim>
std::vector<unsigned> face_nodes(unsigned degree, unsigned face);

/**
 * Cell-local vectors are component-major: local[c * nodes_per_cell + i].
 * With `constraints`, constrained entries read as zero.
 */
void read_cell_values(const DoFMap            &dofs,
                      std::size_t              cell,
                      std::span<const double>  global,
                      std::span<double>        local,
                      const ConstraintSet     *constraints = nullptr);

/// global += local, dropping constrained rows.
void distribute_local_to_global(const DoFMap           &dofs,
                                std::size_t             cell,
                                std::span<const double> local,
                                const ConstraintSet    &constraints,
                                std::span<double>       global);

} // namespace hyperfree
