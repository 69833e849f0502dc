#include <hyperfree/dof_map.h>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace hyperfree
{
template <int dim>
DoFMap
build_dof_map(const Mesh<dim> &mesh, const unsigned degree, const unsigned components)
{
  if (degree < 1)
    throw std::invalid_argument("build_dof_map: degree must be at least 1");

  const unsigned n = degree + 1;
  DoFMap         map;
  map.degree         = degree;
  map.components     = components;
  map.nodes_per_cell = 1;
  for (int d = 0; d < dim; ++d)
    map.nodes_per_cell *= n;
  map.cell_nodes.resize(mesh.n_cells() * map.nodes_per_cell);

  // A node is identified by its multilinear weights with respect to the cell
  // corners it depends on, scaled to integers by degree^dim. This key does
  // not depend on the orientation of the cells sharing the node.
  using Key = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
  std::map<Key, std::uint32_t> ids;
  Key                          key;

  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    for (unsigned i = 0; i < map.nodes_per_cell; ++i)
      {
        std::array<unsigned, dim> idx;
        unsigned                  rest = i;
        for (int d = 0; d < dim; ++d)
          {
            idx[d] = rest % n;
            rest /= n;
          }
        key.clear();
        for (unsigned v = 0; v < vertices_per_cell<dim>; ++v)
          {
            std::uint32_t w = 1;
            for (int d = 0; d < dim; ++d)
              w *= ((v >> d) & 1u) ? idx[d] : degree - idx[d];
            if (w != 0)
              key.emplace_back(mesh.cells[c].vertices[v], w);
          }
        std::sort(key.begin(), key.end());
        auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(ids.size()));
        map.cell_nodes[c * map.nodes_per_cell + i] = it->second;
      }
  map.n_nodes = ids.size();
  return map;
}

template <int dim>
std::vector<unsigned>
face_nodes(const unsigned degree, const unsigned face)
{
  const unsigned n    = degree + 1;
  const unsigned axis = face / 2;
  const unsigned fix  = (face % 2) * degree;

  unsigned total = 1;
  for (int d = 0; d < dim; ++d)
    total *= n;

  std::vector<unsigned> nodes;
  for (unsigned i = 0; i < total; ++i)
    {
      unsigned stride = 1;
      for (unsigned d = 0; d < axis; ++d)
        stride *= n;
      if ((i / stride) % n == fix)
        nodes.push_back(i);
    }
  return nodes;
}

template <int dim>
ConstraintSet
make_boundary_constraints(const Mesh<dim> &mesh, const DoFMap &dofs, const BoundaryId boundary)
{
  ConstraintSet constraints;
  constraints.mask.assign(dofs.n_dofs(), 0);
  for (const auto &f : mesh.boundary_faces)
    {
      if (f.boundary != boundary)
        continue;
      const auto nodes = dofs.nodes_of(f.cell);
      for (const unsigned i : face_nodes<dim>(dofs.degree, f.face))
        for (unsigned c = 0; c < dofs.components; ++c)
          constraints.mask[dofs.dof(nodes[i], c)] = 1;
    }
  for (std::size_t i = 0; i < constraints.mask.size(); ++i)
    if (constraints.mask[i])
      constraints.dofs.push_back(i);
  return constraints;
}

void
read_cell_values(const DoFMap            &dofs,
                 const std::size_t        cell,
                 std::span<const double>  global,
                 std::span<double>        local,
                 const ConstraintSet     *constraints)
{
  const auto     nodes = dofs.nodes_of(cell);
  const unsigned npc   = dofs.nodes_per_cell;
  for (unsigned c = 0; c < dofs.components; ++c)
    for (unsigned i = 0; i < npc; ++i)
      {
        const std::size_t g = dofs.dof(nodes[i], c);
        local[c * npc + i]  = (constraints && constraints->mask[g]) ? 0.0 : global[g];
      }
}

void
distribute_local_to_global(const DoFMap           &dofs,
                           const std::size_t       cell,
                           std::span<const double> local,
                           const ConstraintSet    &constraints,
                           std::span<double>       global)
{
  const auto     nodes = dofs.nodes_of(cell);
  const unsigned npc   = dofs.nodes_per_cell;
  for (unsigned c = 0; c < dofs.components; ++c)
    for (unsigned i = 0; i < npc; ++i)
      {
        const std::size_t g = dofs.dof(nodes[i], c);
        if (!constraints.mask[g])
          global[g] += local[c * npc + i];
      }
}

template DoFMap build_dof_map<2>(const Mesh<2> &, unsigned, unsigned);
template DoFMap build_dof_map<3>(const Mesh<3> &, unsigned, unsigned);
template std::vector<unsigned> face_nodes<2>(unsigned, unsigned);
template std::vector<unsigned> face_nodes<3>(unsigned, unsigned);
template ConstraintSet make_boundary_constraints<2>(const Mesh<2> &, const DoFMap &, BoundaryId);
template ConstraintSet make_boundary_constraints<3>(const Mesh<3> &, const DoFMap &, BoundaryId);

} // namespace hyperfree
