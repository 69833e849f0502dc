#include <hyperfree/fe_space.h>

namespace hyperfree
{
template <int dim>
FESpace<dim>::FESpace(const Mesh<dim> &mesh, const unsigned degree, const unsigned n_q_points_1d)
  : mesh_(&mesh)
  , degree_(degree)
  , quadrature_(gauss_legendre(n_q_points_1d == 0 ? degree + 1 : n_q_points_1d))
  , basis_(degree)
  , shape_(tabulate(basis_, quadrature_.points))
  , kernel_(shape_)
  , dofs_(build_dof_map<dim>(mesh, degree, dim))
  , constraints_(make_boundary_constraints<dim>(mesh, dofs_, BoundaryId::bottom))
  , geometry_(compute_geometry_cache<dim>(mesh, quadrature_))
  , top_faces_(compute_face_data<dim>(mesh, basis_, quadrature_, BoundaryId::top))
{}

template <int dim>
std::vector<Point<dim>>
FESpace<dim>::node_coordinates() const
{
  std::vector<Point<dim>> points(dofs_.n_nodes);
  const unsigned          n = degree_ + 1;
  for (std::size_t c = 0; c < mesh_->n_cells(); ++c)
    {
      const auto corners = mesh_->cell_vertices(c);
      const auto nodes   = dofs_.nodes_of(c);
      for (unsigned i = 0; i < dofs_.nodes_per_cell; ++i)
        {
          Point<dim> xi;
          unsigned   rest = i;
          for (int d = 0; d < dim; ++d)
            {
              xi[d] = basis_.nodes()[rest % n];
              rest /= n;
            }
          points[nodes[i]] = map_to_real<dim>(corners, xi);
        }
    }
  return points;
}

template <int dim>
FaceData
compute_face_data(const Mesh<dim>       &mesh,
                  const LagrangeBasis1D &basis,
                  const Quadrature1D    &quad,
                  const BoundaryId       boundary)
{
  const unsigned n = basis.size(), m = quad.size();
  FaceData       data;
  data.n_face_nodes  = 1;
  data.n_face_points = 1;
  for (int d = 0; d < dim - 1; ++d)
    {
      data.n_face_nodes *= n;
      data.n_face_points *= m;
    }

  // Face-local shape values: product over the dim - 1 tangential directions.
  data.shape_values.resize(data.n_face_points * data.n_face_nodes);
  for (unsigned q = 0; q < data.n_face_points; ++q)
    for (unsigned k = 0; k < data.n_face_nodes; ++k)
      {
        double   v  = 1.0;
        unsigned qr = q, kr = k;
        for (int d = 0; d < dim - 1; ++d)
          {
            v *= basis.value(kr % n, quad.points[qr % m]);
            qr /= m;
            kr /= n;
          }
        data.shape_values[q * data.n_face_nodes + k] = v;
      }

  for (const auto &f : mesh.boundary_faces)
    {
      if (f.boundary != boundary)
        continue;
      data.cells.push_back(f.cell);
      data.faces.push_back(f.face);
      // face_nodes enumerates lexicographically in the tangential directions,
      // matching the ordering of shape_values.
      const auto local = face_nodes<dim>(basis.degree(), f.face);
      data.local_nodes.insert(data.local_nodes.end(), local.begin(), local.end());

      const unsigned axis    = f.face / 2;
      const auto     corners = mesh.cell_vertices(f.cell);
      for (unsigned q = 0; q < data.n_face_points; ++q)
        {
          Point<dim> xi;
          double     w  = 1.0;
          unsigned   qr = q;
          for (int d = 0; d < dim; ++d)
            {
              if (static_cast<unsigned>(d) == axis)
                {
                  xi[d] = (f.face % 2) ? 1.0 : 0.0;
                  continue;
                }
              xi[d] = quad.points[qr % m];
              w *= quad.weights[qr % m];
              qr /= m;
            }
          const Tensor2<dim> jac = mapping_jacobian<dim>(corners, xi);
          double             area;
          if constexpr (dim == 2)
            area = jac.col(1 - axis).norm();
          else
            {
              const int          t0 = axis == 0 ? 1 : 0;
              const int          t1 = axis == 2 ? 1 : 2;
              const Point<3> a = jac.col(t0), b = jac.col(t1);
              area = a.cross(b).norm();
            }
          data.JxW.push_back(area * w);
        }
    }
  return data;
}

template class FESpace<2>;
template class FESpace<3>;
template FaceData compute_face_data<2>(const Mesh<2> &, const LagrangeBasis1D &, const Quadrature1D &, BoundaryId);
template FaceData compute_face_data<3>(const Mesh<3> &, const LagrangeBasis1D &, const Quadrature1D &, BoundaryId);

} // namespace hyperfree
