#include <hyperfree/errors.h>
#include <hyperfree/mesh.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace hyperfree
{
template <int dim>
std::array<Point<dim>, vertices_per_cell<dim>>
Mesh<dim>::cell_vertices(const std::size_t cell) const
{
  std::array<Point<dim>, vertices_per_cell<dim>> corners;
  for (unsigned v = 0; v < vertices_per_cell<dim>; ++v)
    corners[v] = vertices[cells[cell].vertices[v]];
  return corners;
}

template <int dim>
void
Mesh<dim>::check_invariants() const
{
  for (std::size_t c = 0; c < cells.size(); ++c)
    {
      auto sorted = cells[c].vertices;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::logic_error("cell " + std::to_string(c) + " repeats a vertex");
      if (sorted.back() >= vertices.size())
        throw std::logic_error("cell " + std::to_string(c) + " references a missing vertex");
    }
  std::set<std::pair<std::uint32_t, std::uint8_t>> seen;
  for (const auto &f : boundary_faces)
    {
      if (f.cell >= cells.size() || f.face >= faces_per_cell<dim>)
        throw std::logic_error("boundary face out of range");
      if (!seen.insert({f.cell, f.face}).second)
        throw std::logic_error("boundary face listed twice on cell " + std::to_string(f.cell));
    }
}

template <int dim>
Mesh<dim>
build_benchmark_mesh(const unsigned                  n,
                     std::span<const Inclusion<dim>> inclusions,
                     const double                    side)
{
  if (n < 1)
    throw std::invalid_argument("build_benchmark_mesh: need at least one cell per side");
  for (const auto &inc : inclusions)
    {
      for (int d = 0; d < dim; ++d)
        if (!(inc.center[d] >= 0.0 && inc.center[d] <= side))
          throw std::invalid_argument("build_benchmark_mesh: inclusion center outside the domain");
      if (!(inc.radius > 0.0))
        throw std::invalid_argument("build_benchmark_mesh: inclusion radius must be positive");
    }

  Mesh<dim>      mesh;
  const unsigned nv = n + 1;
  const double   h  = side / n;

  unsigned n_vertices = 1, n_cells = 1;
  for (int d = 0; d < dim; ++d)
    {
      n_vertices *= nv;
      n_cells *= n;
    }

  mesh.vertices.resize(n_vertices);
  for (unsigned v = 0; v < n_vertices; ++v)
    {
      unsigned rest = v;
      for (int d = 0; d < dim; ++d)
        {
          mesh.vertices[v][d] = (rest % nv) * h;
          rest /= nv;
        }
    }
  // Pin the far boundary to exactly `side`.
  for (auto &x : mesh.vertices)
    for (int d = 0; d < dim; ++d)
      if (std::abs(x[d] - side) < 1e-9 * side)
        x[d] = side;

  mesh.cells.resize(n_cells);
  for (unsigned c = 0; c < n_cells; ++c)
    {
      std::array<unsigned, dim> idx;
      unsigned                  rest = c;
      for (int d = 0; d < dim; ++d)
        {
          idx[d] = rest % n;
          rest /= n;
        }
      Point<dim> centroid;
      for (int d = 0; d < dim; ++d)
        centroid[d] = (idx[d] + 0.5) * h;

      for (unsigned v = 0; v < vertices_per_cell<dim>; ++v)
        {
          unsigned vid = 0, stride = 1;
          for (int d = 0; d < dim; ++d)
            {
              vid += (idx[d] + ((v >> d) & 1u)) * stride;
              stride *= nv;
            }
          mesh.cells[c].vertices[v] = vid;
        }
      mesh.cells[c].material = MaterialId::matrix;
      for (const auto &inc : inclusions)
        if ((centroid - inc.center).norm() < inc.radius)
          mesh.cells[c].material = MaterialId::inclusion;

      for (unsigned f = 0; f < faces_per_cell<dim>; ++f)
        {
          const unsigned axis = f / 2, s = f % 2;
          if (idx[axis] != (s == 0 ? 0 : n - 1))
            continue;
          BoundaryId id = BoundaryId::other;
          if (axis == 1)
            id = (s == 0) ? BoundaryId::bottom : BoundaryId::top;
          mesh.boundary_faces.push_back({c, static_cast<std::uint8_t>(f), id});
        }
    }
  return mesh;
}

template <int dim>
Mesh<dim>
refine(const Mesh<dim> &mesh, std::vector<ParentLink> *parents)
{
  constexpr unsigned nvc = vertices_per_cell<dim>;
  Mesh<dim>          fine;
  fine.vertices = mesh.vertices;
  fine.cells.resize(mesh.n_cells() * nvc);
  if (parents)
    parents->resize(fine.cells.size());

  // A new vertex is the mean of a set of parent corners (edge midpoint, face
  // or cell center); the sorted set of corner ids identifies it globally.
  std::map<std::vector<std::uint32_t>, std::uint32_t> created;

  for (std::uint32_t k = 0; k < mesh.n_cells(); ++k)
    {
      const auto &parent = mesh.cells[k];
      for (unsigned child = 0; child < nvc; ++child)
        {
          auto &cell    = fine.cells[k * nvc + child];
          cell.material = parent.material;
          if (parents)
            (*parents)[k * nvc + child] = {k, static_cast<std::uint8_t>(child)};

          for (unsigned v = 0; v < nvc; ++v)
            {
              // Position on the 3^dim sub-grid of the parent.
              std::array<unsigned, dim> s;
              for (int d = 0; d < dim; ++d)
                s[d] = ((child >> d) & 1u) + ((v >> d) & 1u);

              std::vector<std::uint32_t> corners;
              for (unsigned w = 0; w < nvc; ++w)
                {
                  bool contributes = true;
                  for (int d = 0; d < dim; ++d)
                    {
                      const unsigned wd = (w >> d) & 1u;
                      if ((s[d] == 0 && wd != 0) || (s[d] == 2 && wd != 1))
                        contributes = false;
                    }
                  if (contributes)
                    corners.push_back(parent.vertices[w]);
                }
              if (corners.size() == 1)
                {
                  cell.vertices[v] = corners[0];
                  continue;
                }
              std::sort(corners.begin(), corners.end());
              auto [it, inserted] =
                created.try_emplace(corners, static_cast<std::uint32_t>(fine.vertices.size()));
              if (inserted)
                {
                  Point<dim> x = Point<dim>::Zero();
                  for (const auto id : corners)
                    x += mesh.vertices[id];
                  fine.vertices.push_back(x / static_cast<double>(corners.size()));
                }
              cell.vertices[v] = it->second;
            }
        }
    }

  for (const auto &f : mesh.boundary_faces)
    {
      const unsigned axis = f.face / 2, side = f.face % 2;
      for (unsigned child = 0; child < nvc; ++child)
        if (((child >> axis) & 1u) == side)
          fine.boundary_faces.push_back({f.cell * nvc + child, f.face, f.boundary});
    }
  return fine;
}

template <int dim>
MeshHierarchy<dim>::MeshHierarchy(Mesh<dim> coarse)
{
  coarse.check_invariants();
  levels_.push_back(std::move(coarse));
  parents_.emplace_back();
}

template <int dim>
void
MeshHierarchy<dim>::refine_globally(const unsigned times)
{
  for (unsigned i = 0; i < times; ++i)
    {
      std::vector<ParentLink> links;
      levels_.push_back(refine(levels_.back(), &links));
      parents_.push_back(std::move(links));
    }
}

template <int dim>
std::uint32_t
MeshHierarchy<dim>::coarse_ancestor(const unsigned l, std::uint32_t cell) const
{
  for (unsigned level = l; level > 0; --level)
    cell = parents_[level][cell].parent;
  return cell;
}

template <int dim>
Point<dim>
map_to_real(const std::array<Point<dim>, vertices_per_cell<dim>> &corners, const Point<dim> &xi)
{
  Point<dim> x = Point<dim>::Zero();
  for (unsigned v = 0; v < vertices_per_cell<dim>; ++v)
    {
      double w = 1.0;
      for (int d = 0; d < dim; ++d)
        w *= ((v >> d) & 1u) ? xi[d] : 1.0 - xi[d];
      x += w * corners[v];
    }
  return x;
}

template <int dim>
Tensor2<dim>
mapping_jacobian(const std::array<Point<dim>, vertices_per_cell<dim>> &corners, const Point<dim> &xi)
{
  Tensor2<dim> jac = Tensor2<dim>::Zero();
  for (unsigned v = 0; v < vertices_per_cell<dim>; ++v)
    for (int k = 0; k < dim; ++k)
      {
        double dw = 1.0;
        for (int d = 0; d < dim; ++d)
          {
            const bool upper = (v >> d) & 1u;
            if (d == k)
              dw *= upper ? 1.0 : -1.0;
            else
              dw *= upper ? xi[d] : 1.0 - xi[d];
          }
        jac.col(k) += dw * corners[v];
      }
  return jac;
}

template <int dim>
Point<dim>
tensor_point(const Quadrature1D &quad, unsigned q)
{
  const unsigned n = quad.size();
  Point<dim>     xi;
  for (int d = 0; d < dim; ++d)
    {
      xi[d] = quad.points[q % n];
      q /= n;
    }
  return xi;
}

template <int dim>
double
tensor_weight(const Quadrature1D &quad, unsigned q)
{
  const unsigned n = quad.size();
  double         w = 1.0;
  for (int d = 0; d < dim; ++d)
    {
      w *= quad.weights[q % n];
      q /= n;
    }
  return w;
}

template <int dim>
GeometryCache<dim>
compute_geometry_cache(const Mesh<dim> &mesh, const Quadrature1D &quad)
{
  unsigned n_q = 1;
  for (int d = 0; d < dim; ++d)
    n_q *= quad.size();

  GeometryCache<dim> cache;
  cache.n_q_points_per_cell = n_q;
  cache.inverse_jacobian.resize(mesh.n_cells() * n_q);
  cache.JxW.resize(mesh.n_cells() * n_q);

  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    {
      const auto corners = mesh.cell_vertices(c);
      for (unsigned q = 0; q < n_q; ++q)
        {
          const Tensor2<dim> jac = mapping_jacobian<dim>(corners, tensor_point<dim>(quad, q));
          const double       det = jac.determinant();
          if (!(det > 0.0))
            throw NonPositiveJacobian("non-positive mapping Jacobian in cell " + std::to_string(c),
                                      static_cast<long>(c));
          cache.inverse_jacobian[c * n_q + q] = jac.inverse();
          cache.JxW[c * n_q + q]              = det * tensor_weight<dim>(quad, q);
        }
    }
  return cache;
}

template <int dim>
void
write_vtk(const Mesh<dim> &mesh, const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  out << "# vtk DataFile Version 3.0\nhyperfree mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto &x : mesh.vertices)
    out << x[0] << ' ' << x[1] << ' ' << (dim == 3 ? x[dim - 1] : 0.0) << '\n';

  // VTK orders corners counter-clockwise, we order them lexicographically.
  constexpr std::array<unsigned, 8> to_vtk = {0, 1, 3, 2, 4, 5, 7, 6};
  constexpr unsigned                nvc    = vertices_per_cell<dim>;
  out << "CELLS " << mesh.n_cells() << ' ' << mesh.n_cells() * (nvc + 1) << '\n';
  for (const auto &cell : mesh.cells)
    {
      out << nvc;
      for (unsigned v = 0; v < nvc; ++v)
        out << ' ' << cell.vertices[to_vtk[v]];
      out << '\n';
    }
  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    out << (dim == 2 ? 9 : 12) << '\n';
  out << "CELL_DATA " << mesh.n_cells() << "\nSCALARS material_id int 1\nLOOKUP_TABLE default\n";
  for (const auto &cell : mesh.cells)
    out << static_cast<int>(cell.material) << '\n';
  if (!out)
    throw std::runtime_error("failed writing " + path.string());
}

#define HYPERFREE_INSTANTIATE(dim)                                                                 \
  template struct Mesh<dim>;                                                                       \
  template Mesh<dim> build_benchmark_mesh<dim>(unsigned, std::span<const Inclusion<dim>>, double); \
  template Mesh<dim> refine<dim>(const Mesh<dim> &, std::vector<ParentLink> *);                    \
  template class MeshHierarchy<dim>;                                                               \
  template Point<dim> map_to_real<dim>(const std::array<Point<dim>, vertices_per_cell<dim>> &,     \
                                       const Point<dim> &);                                        \
  template Tensor2<dim> mapping_jacobian<dim>(                                                     \
    const std::array<Point<dim>, vertices_per_cell<dim>> &, const Point<dim> &);                   \
  template Point<dim>         tensor_point<dim>(const Quadrature1D &, unsigned);                   \
  template double             tensor_weight<dim>(const Quadrature1D &, unsigned);                  \
  template GeometryCache<dim> compute_geometry_cache<dim>(const Mesh<dim> &, const Quadrature1D &); \
  template void               write_vtk<dim>(const Mesh<dim> &, const std::filesystem::path &);

HYPERFREE_INSTANTIATE(2)
HYPERFREE_INSTANTIATE(3)

} // namespace hyperfree
