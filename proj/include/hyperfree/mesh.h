#pragma once

#include <hyperfree/quadrature.h>
#include <hyperfree/tensor.h>

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <span>
#include <vector>

namespace hyperfree
{
enum class MaterialId : std::uint8_t
{
  matrix    = 0,
  inclusion = 1
};

enum class BoundaryId : std::uint8_t
{
  bottom = 0,
  top    = 1,
  other  = 2
};

/// Side length of the benchmark square/cube in mm.
inline constexpr double benchmark_domain_side = 1e-3;

template <int dim>
inline constexpr unsigned vertices_per_cell = 1u << dim;

template <int dim>
inline constexpr unsigned faces_per_cell = 2 * dim;

/**
 * A quad (2D) or hex (3D). Vertices are in lexicographic order: bit k of the
 * local vertex index is the corner's coordinate along axis k. Faces are
 * numbered -x, +x, -y, +y, -z, +z, so face f lies on axis f / 2, side f % 2.
 */
template <int dim>
struct Cell
{
  std::array<std::uint32_t, vertices_per_cell<dim>> vertices;
  MaterialId                                         material = MaterialId::matrix;
};

struct BoundaryFace
{
  std::uint32_t cell;
  std::uint8_t  face;
  BoundaryId    boundary;
};

template <int dim>
struct Mesh
{
  std::vector<Point<dim>>   vertices;
  std::vector<Cell<dim>>    cells;
  std::vector<BoundaryFace> boundary_faces;

  std::size_t n_cells() const { return cells.size(); }

  std::array<Point<dim>, vertices_per_cell<dim>> cell_vertices(std::size_t cell) const;

  /// Throws std::logic_error if a cell references an out-of-range or
  /// repeated vertex, or if a boundary face is listed twice.
  void check_invariants() const;
};

template <int dim>
using CoarseMesh = Mesh<dim>;

template <int dim>
struct Inclusion
{
  Point<dim> center;
  double     radius;
};

/**
 * Structured n^dim grid of the square/cube [0, side]^dim. A cell is tagged as
 * inclusion iff its centroid lies strictly inside one of the given
 * disks/spheres. Faces on y = 0 are tagged bottom, faces on y = side top,
 * every other outer face "other".
 */
template <int dim>
Mesh<dim> build_benchmark_mesh(unsigned                            n_cells_per_side,
                               std::span<const Inclusion<dim>>     inclusions,
                               double                              side = benchmark_domain_side);

struct ParentLink
{
  std::uint32_t parent;
  std::uint8_t  child;
};

/// 2:1 isotropic refinement. Child c of parent K gets index K * 2^dim + c.
template <int dim>
Mesh<dim> refine(const Mesh<dim> &mesh, std::vector<ParentLink> *parents = nullptr);

template <int dim>
class MeshHierarchy
{
public:
  explicit MeshHierarchy(Mesh<dim> coarse);

  /// Appends `times` globally refined levels.
  void refine_globally(unsigned times);

  unsigned n_levels() const { return static_cast<unsigned>(levels_.size()); }

  const Mesh<dim> &level(unsigned l) const { return levels_.at(l); }
  const Mesh<dim> &finest() const { return levels_.back(); }

  /// Parent of each cell of level l >= 1 on level l - 1.
  std::span<const ParentLink> parents(unsigned l) const { return parents_.at(l); }

  /// Index of the level-0 cell containing cell `cell` of level l.
  std::uint32_t coarse_ancestor(unsigned l, std::uint32_t cell) const;

private:
  // deque: references to levels stay valid when refining further.
  std::deque<Mesh<dim>>                levels_;
  std::vector<std::vector<ParentLink>> parents_;
};

// Multilinear geometry from the cell corners.
template <int dim>
Point<dim> map_to_real(const std::array<Point<dim>, vertices_per_cell<dim>> &corners,
                       const Point<dim>                                       &xi);

/// Jacobian d X_i / d xi_k of the multilinear map.
template <int dim>
Tensor2<dim> mapping_jacobian(const std::array<Point<dim>, vertices_per_cell<dim>> &corners,
                              const Point<dim>                                       &xi);

/// Per-cell, per-quadrature-point inverse mapping Jacobian and JxW.
template <int dim>
struct GeometryCache
{
  unsigned                  n_q_points_per_cell = 0;
  std::vector<Tensor2<dim>> inverse_jacobian; // [cell * n_q + q]
  std::vector<double>       JxW;              // [cell * n_q + q], det(J_geo) * w_q

  std::size_t memory_bytes() const
  {
    return inverse_jacobian.size() * sizeof(Tensor2<dim>) + JxW.size() * sizeof(double);
  }
};

/// Tensor-product quadrature point q of an n^dim rule, lexicographic.
template <int dim>
Point<dim> tensor_point(const Quadrature1D &quad, unsigned q);

template <int dim>
double tensor_weight(const Quadrature1D &quad, unsigned q);

/// Throws NonPositiveJacobian if det(J_geo) <= 0 at any quadrature point.
template <int dim>
GeometryCache<dim> compute_geometry_cache(const Mesh<dim> &mesh, const Quadrature1D &quad);

/// Legacy VTK ASCII unstructured grid with material id as cell data.
template <int dim>
void write_vtk(const Mesh<dim> &mesh, const std::filesystem::path &path);

} // namespace hyperfree
