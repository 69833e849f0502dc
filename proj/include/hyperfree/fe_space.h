#pragma once

#include <hyperfree/dof_map.h>
#include <hyperfree/mesh.h>
#include <hyperfree/quadrature.h>
#include <hyperfree/sum_factorization.h>

#include <vector>

namespace hyperfree
{
/// Surface quadrature data for the faces carrying a given boundary id.
struct FaceData
{
  unsigned                   n_face_nodes  = 0;
  unsigned                   n_face_points = 0;
  std::vector<std::uint32_t> cells;
  std::vector<std::uint8_t>  faces;
  std::vector<unsigned>      local_nodes;  // [face * n_face_nodes + k]
  std::vector<double>        shape_values; // [point * n_face_nodes + k], same for all faces
  std::vector<double>        JxW;          // [face * n_face_points + point]

  std::size_t size() const { return cells.size(); }
};

/**
 * Vector-valued continuous Lagrange space of degree p on one mesh level, with
 * everything the operators need: DoF numbering, bottom-face Dirichlet
 * constraints, the sum-factorization kernel, the geometry cache and traction
 * face data for the top boundary.
 *
 * Holds a reference to the mesh, which must outlive the space.
 */
template <int dim>
class FESpace
{
public:
  static constexpr int dimension = dim;

  FESpace(const Mesh<dim> &mesh, unsigned degree, unsigned n_q_points_1d = 0);

  const Mesh<dim>          &mesh() const { return *mesh_; }
  unsigned                  degree() const { return degree_; }
  const Quadrature1D       &quadrature() const { return quadrature_; }
  const LagrangeBasis1D    &basis() const { return basis_; }
  const ShapeTable1D       &shape() const { return shape_; }
  const TensorProductKernel<dim> &kernel() const { return kernel_; }
  const DoFMap             &dofs() const { return dofs_; }
  const ConstraintSet      &constraints() const { return constraints_; }
  const GeometryCache<dim> &geometry() const { return geometry_; }
  const FaceData           &top_faces() const { return top_faces_; }

  std::size_t n_dofs() const { return dofs_.n_dofs(); }
  std::size_t n_cells() const { return mesh_->n_cells(); }
  unsigned    n_q_points() const { return kernel_.n_points(); }
  unsigned    dofs_per_cell() const { return dofs_.nodes_per_cell * dim; }

  /// Real coordinates of every node, in node numbering.
  std::vector<Point<dim>> node_coordinates() const;

  /// Nodal interpolant of a vector field.
  template <typename Function>
  Vector interpolate(const Function &f) const
  {
    const auto points = node_coordinates();
    Vector     v(n_dofs());
    for (std::size_t n = 0; n < points.size(); ++n)
      {
        const Point<dim> value = f(points[n]);
        for (unsigned c = 0; c < dim; ++c)
          v[dofs_.dof(n, c)] = value[c];
      }
    return v;
  }

private:
  const Mesh<dim>         *mesh_;
  unsigned                 degree_;
  Quadrature1D             quadrature_;
  LagrangeBasis1D          basis_;
  ShapeTable1D             shape_;
  TensorProductKernel<dim> kernel_;
  DoFMap                   dofs_;
  ConstraintSet            constraints_;
  GeometryCache<dim>       geometry_;
  FaceData                 top_faces_;
};

template <int dim>
FaceData compute_face_data(const Mesh<dim>       &mesh,
                           const LagrangeBasis1D &basis,
                           const Quadrature1D    &quad,
                           BoundaryId             boundary);

} // namespace hyperfree
