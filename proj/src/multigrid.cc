#include <hyperfree/errors.h>
#include <hyperfree/multigrid.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

namespace hyperfree
{
Vector
invert_diagonal(std::span<const double> diagonal)
{
  Vector inv(diagonal.size());
  for (std::size_t i = 0; i < diagonal.size(); ++i)
    {
      if (!(diagonal[i] > 0.0))
        throw IndefiniteOperator("non-positive diagonal entry " + std::to_string(diagonal[i]) +
                                 " at row " + std::to_string(i));
      inv[i] = 1.0 / diagonal[i];
    }
  return inv;
}

EigenvalueEstimate
estimate_eigenvalues(const LinearOperator         &A,
                     std::span<const double>       inverse_diagonal,
                     const unsigned                iterations,
                     std::span<const std::uint8_t> mask,
                     const std::uint64_t           seed)
{
  const std::size_t n = A.size();
  Vector            r = random_vector(n, seed);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i])
      r[i] = 0.0;

  auto precondition = [&](const Vector &src, Vector &dst) {
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = inverse_diagonal.empty() ? src[i] : inverse_diagonal[i] * src[i];
  };

  std::size_t n_free = n;
  for (const auto m : mask)
    n_free -= m != 0;
  const unsigned max_steps = static_cast<unsigned>(std::min<std::size_t>(iterations, n_free));

  Vector z(n), p(n), Ap(n);
  precondition(r, z);
  p               = z;
  double       rz = dot(r, z);
  const double rz0 = rz;

  std::vector<double> alphas, betas;
  for (unsigned k = 0; k < max_steps && rz > 0.0; ++k)
    {
      A.vmult(Ap, p);
      const double pAp = dot(p, Ap);
      if (!(pAp > 0.0))
        break;
      const double alpha = rz / pAp;
      axpy(-alpha, Ap, r);
      precondition(r, z);
      const double rz_new = dot(r, z);
      alphas.push_back(alpha);
      if (!(rz_new > 1e-28 * rz0))
        break;
      const double beta = rz_new / rz;
      betas.push_back(beta);
      for (std::size_t i = 0; i < n; ++i)
        p[i] = z[i] + beta * p[i];
      rz = rz_new;
    }

  const std::size_t m = alphas.size();
  if (m == 0)
    return {};
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < m; ++k)
    {
      T(k, k) = 1.0 / alphas[k] + (k > 0 ? betas[k - 1] / alphas[k - 1] : 0.0);
      if (k + 1 < m)
        T(k, k + 1) = T(k + 1, k) = std::sqrt(betas[k]) / alphas[k];
    }
  const Eigen::VectorXd ritz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues();
  return {ritz.minCoeff(), ritz.maxCoeff(), static_cast<unsigned>(m)};
}

double
chebyshev_bound(const double lower, const double upper, const unsigned degree)
{
  const double x = (upper + lower) / (upper - lower);
  return 1.0 / std::cosh(degree * std::acosh(x));
}

ChebyshevSmoother::ChebyshevSmoother(const LinearOperator &A,
                                     Vector                inverse_diagonal,
                                     const double          lower,
                                     const double          upper,
                                     const unsigned        degree)
  : A_(&A)
  , inverse_diagonal_(std::move(inverse_diagonal))
  , lower_(lower)
  , upper_(upper)
  , degree_(degree)
{
  if (!(lower > 0.0 && upper > lower) || degree == 0)
    throw std::invalid_argument("ChebyshevSmoother: need 0 < lower < upper and degree >= 1");
}

void
ChebyshevSmoother::step(std::span<double> x, std::span<const double> b, const bool zero_initial) const
{
  const std::size_t n = A_->size();
  r_.resize(n);
  d_.resize(n);

  const double theta = 0.5 * (upper_ + lower_);
  const double delta = 0.5 * (upper_ - lower_);

  auto residual = [&] {
    A_->vmult(r_, x);
    for (std::size_t i = 0; i < n; ++i)
      r_[i] = b[i] - r_[i];
  };

  if (zero_initial)
    std::copy(b.begin(), b.end(), r_.begin());
  else
    residual();
  for (std::size_t i = 0; i < n; ++i)
    {
      d_[i] = inverse_diagonal_[i] * r_[i] / theta;
      x[i]  = (zero_initial ? 0.0 : x[i]) + d_[i];
    }

  double rho = delta / theta;
  for (unsigned k = 1; k < degree_; ++k)
    {
      residual();
      const double rho_new = 1.0 / (2.0 * theta / delta - rho);
      const double c1 = rho_new * rho, c2 = 2.0 * rho_new / delta;
      for (std::size_t i = 0; i < n; ++i)
        {
          d_[i] = c1 * d_[i] + c2 * inverse_diagonal_[i] * r_[i];
          x[i] += d_[i];
        }
      rho = rho_new;
    }
}

template <int dim>
SparseMatrix
make_prolongation(const FESpace<dim> &coarse, const FESpace<dim> &fine, std::span<const ParentLink> parents)
{
  if (coarse.degree() != fine.degree() || parents.size() != fine.n_cells())
    throw std::invalid_argument("make_prolongation: spaces are not nested");

  const unsigned p = fine.degree(), n = p + 1;
  const auto    &basis = fine.basis();
  const auto    &fd = fine.dofs(), &cd = coarse.dofs();

  std::vector<std::map<std::uint32_t, double>> weights(fd.n_nodes);
  for (std::size_t f = 0; f < fine.n_cells(); ++f)
    {
      const auto fine_nodes   = fd.nodes_of(f);
      const auto coarse_nodes = cd.nodes_of(parents[f].parent);
      const auto bits         = parents[f].child;

      // 1D weights N_j((i + bit p) / 2p) for both halves
      for (unsigned i = 0; i < fd.nodes_per_cell; ++i)
        {
          auto &row = weights[fine_nodes[i]];
          if (!row.empty())
            continue;
          for (unsigned j = 0; j < cd.nodes_per_cell; ++j)
            {
              double   w  = 1.0;
              unsigned ii = i, jj = j;
              for (int d = 0; d < dim; ++d)
                {
                  const unsigned bit = (bits >> d) & 1u;
                  w *= basis.value(jj % n, (ii % n + bit * p) / (2.0 * p));
                  ii /= n;
                  jj /= n;
                }
              if (std::abs(w) > 1e-13)
                row[coarse_nodes[j]] = w;
            }
        }
    }

  const unsigned                          nc = fd.components;
  std::vector<std::vector<std::uint32_t>> pattern(fd.n_dofs());
  for (std::size_t node = 0; node < fd.n_nodes; ++node)
    for (unsigned c = 0; c < nc; ++c)
      for (const auto &[cn, w] : weights[node])
        pattern[fd.dof(node, c)].push_back(static_cast<std::uint32_t>(cd.dof(cn, c)));
  for (auto &row : pattern)
    std::sort(row.begin(), row.end());

  SparseMatrix P(pattern, cd.n_dofs());
  for (std::size_t node = 0; node < fd.n_nodes; ++node)
    for (unsigned c = 0; c < nc; ++c)
      for (const auto &[cn, w] : weights[node])
        P.set(fd.dof(node, c), cd.dof(cn, c), w);
  return P;
}

template <int dim>
MultigridHierarchy<dim>::MultigridHierarchy(const MeshHierarchy<dim> &meshes,
                                            const unsigned            degree,
                                            const unsigned            n_q_points_1d)
{
  const unsigned n = degree + 1;
  for (unsigned l = 0; l < meshes.n_levels(); ++l)
    {
      spaces_.push_back(std::make_unique<FESpace<dim>>(meshes.level(l), degree, n_q_points_1d));
      if (l == 0)
        {
          prolongation_.emplace_back();
          coincident_.emplace_back();
          continue;
        }
      const auto &coarse = *spaces_[l - 1], &fine = *spaces_[l];
      prolongation_.push_back(make_prolongation(coarse, fine, meshes.parents(l)));

      std::vector<std::uint32_t> coincident(coarse.dofs().n_nodes, 0);
      const auto                 parents = meshes.parents(l);
      for (std::size_t f = 0; f < fine.n_cells(); ++f)
        {
          const auto fine_nodes   = fine.dofs().nodes_of(f);
          const auto coarse_nodes = coarse.dofs().nodes_of(parents[f].parent);
          for (unsigned j = 0; j < coarse.dofs().nodes_per_cell; ++j)
            {
              unsigned i = 0, stride = 1, jj = j;
              bool     inside = true;
              for (int d = 0; d < dim; ++d)
                {
                  const int id = 2 * static_cast<int>(jj % n) -
                                 static_cast<int>(((parents[f].child >> d) & 1u) * degree);
                  inside = inside && id >= 0 && id <= static_cast<int>(degree);
                  i += stride * static_cast<unsigned>(std::max(id, 0));
                  stride *= n;
                  jj /= n;
                }
              if (inside)
                coincident[coarse_nodes[j]] = fine_nodes[i];
            }
        }
      coincident_.push_back(std::move(coincident));
    }
}

template <int dim>
void
MultigridHierarchy<dim>::prolongate(const unsigned l, std::span<double> fine, std::span<const double> coarse) const
{
  static thread_local Vector masked;
  masked.assign(coarse.begin(), coarse.end());
  space(l - 1).constraints().set_zero(masked);
  prolongation(l).vmult(fine, masked);
  space(l).constraints().set_zero(fine);
}

template <int dim>
void
MultigridHierarchy<dim>::restrict_residual(const unsigned l, std::span<double> coarse, std::span<const double> fine) const
{
  static thread_local Vector masked;
  masked.assign(fine.begin(), fine.end());
  space(l).constraints().set_zero(masked);
  prolongation(l).Tvmult(coarse, masked);
  space(l - 1).constraints().set_zero(coarse);
}

template <int dim>
std::vector<Vector>
MultigridHierarchy<dim>::restrict_solution(std::span<const double> u) const
{
  std::vector<Vector> levels(n_levels());
  levels.back().assign(u.begin(), u.end());
  for (unsigned l = n_levels() - 1; l > 0; --l)
    {
      const auto &coarse = space(l - 1).dofs();
      Vector     &uc     = levels[l - 1];
      uc.assign(coarse.n_dofs(), 0.0);
      for (std::size_t node = 0; node < coarse.n_nodes; ++node)
        for (unsigned c = 0; c < coarse.components; ++c)
          uc[coarse.dof(node, c)] = levels[l][space(l).dofs().dof(coincident_[l][node], c)];
      space(l - 1).constraints().set_zero(uc);
    }
  return levels;
}

template <int dim>
MultigridPreconditioner<dim>::MultigridPreconditioner(const MultigridHierarchy<dim> &hierarchy,
                                                      const MaterialTable           &materials,
                                                      const Strategy                 strategy,
                                                      std::span<const double>        u,
                                                      const TangentOperator         &fine_operator,
                                                      const MultigridSettings       &settings)
  : hierarchy_(hierarchy)
  , settings_(settings)
{
  const unsigned n_levels = hierarchy.n_levels();
  const auto     levels   = hierarchy.restrict_solution(u);

  operators_.resize(n_levels);
  for (unsigned l = 0; l + 1 < n_levels; ++l)
    {
      // the coarse level only feeds the Chebyshev solver, which needs many
      // applies on a small system: use the assembled tangent there
      const Strategy level_strategy = l == 0 ? Strategy::matrix_based : strategy;
      try
        {
          owned_.push_back(make_tangent_operator<dim>(hierarchy.space(l), materials, level_strategy, levels[l]));
        }
      catch (const NonPositiveJacobian &e)
        {
          throw NonPositiveJacobian(std::string(e.what()) + " on multigrid level " + std::to_string(l), e.cell,
                                    static_cast<int>(l));
        }
      operators_[l] = owned_.back().get();
    }
  operators_.back() = &fine_operator;

  lambda_max_.assign(n_levels, 0.0);
  smoothers_.resize(n_levels);
  for (unsigned l = 1; l < n_levels; ++l)
    {
      const auto  &mask = hierarchy.space(l).constraints().mask;
      Vector       inv  = invert_diagonal(operators_[l]->compute_diagonal());
      const double lmax = estimate_eigenvalues(*operators_[l], inv, settings.eigenvalue_iterations, mask,
                                               settings.seed + l).max;
      lambda_max_[l]    = lmax;
      smoothers_[l]     = ChebyshevSmoother(*operators_[l], std::move(inv), settings.smoothing_range_lower * lmax,
                                            settings.smoothing_range_upper * lmax, settings.smoother_degree);
    }

  // coarse level: Chebyshev over the whole estimated spectrum
  const auto  &coarse_space = hierarchy.space(0);
  const auto  &mask         = coarse_space.constraints().mask;
  Vector       inv          = invert_diagonal(operators_[0]->compute_diagonal());
  const auto   n_free       = coarse_space.n_dofs() - coarse_space.constraints().dofs.size();
  const auto   est          = estimate_eigenvalues(*operators_[0], inv,
                                                   static_cast<unsigned>(std::min<std::size_t>(n_free, 200)), mask,
                                                   settings.seed);
  if (!(est.min > 0.0) || !std::isfinite(est.max))
    throw IndefiniteOperator("coarse level operator is not positive definite (estimated spectrum [" +
                             std::to_string(est.min) + ", " + std::to_string(est.max) + "])");
  lambda_max_[0]            = est.max;
  const double lower        = 0.9 * est.min, upper = settings.smoothing_range_upper * est.max;

  unsigned degree = 1;
  while (degree < settings.coarse_max_degree && chebyshev_bound(lower, upper, degree) > settings.coarse_reduction)
    ++degree;
  coarse_ = ChebyshevSmoother(*operators_[0], std::move(inv), lower, upper, degree);

  // the bound holds in the D-weighted norm; probe the plain residual and add
  // sweeps until every probe meets the target
  std::vector<Vector> probes, iterates;
  for (std::uint64_t s = 0; s < 3; ++s)
    {
      probes.push_back(random_vector(coarse_space.n_dofs(), settings.seed + 1000 + s));
      coarse_space.constraints().set_zero(probes.back());
      iterates.emplace_back(coarse_space.n_dofs(), 0.0);
    }
  Vector r(coarse_space.n_dofs());
  for (coarse_sweeps_ = 1;; ++coarse_sweeps_)
    {
      coarse_probe_reduction_ = 0;
      for (std::size_t k = 0; k < probes.size(); ++k)
        {
          coarse_.step(iterates[k], probes[k], coarse_sweeps_ == 1);
          operators_[0]->vmult(r, iterates[k]);
          coarse_probe_reduction_ = std::max(coarse_probe_reduction_, norm(difference(probes[k], r)) / norm(probes[k]));
        }
      if (!std::isfinite(coarse_probe_reduction_))
        throw IndefiniteOperator("coarse Chebyshev solver diverges; the coarse operator is likely indefinite");
      if (coarse_probe_reduction_ <= settings.coarse_reduction || coarse_sweeps_ >= settings.coarse_max_sweeps)
        break;
    }
  if (coarse_probe_reduction_ > settings.coarse_reduction)
    std::cerr << "warning: coarse Chebyshev solver reaches only " << coarse_probe_reduction_
              << " relative residual after " << coarse_sweeps_ << " sweeps of degree " << degree << '\n';

  x_.resize(n_levels);
  b_.resize(n_levels);
  r_.resize(n_levels);
  for (unsigned l = 0; l < n_levels; ++l)
    {
      x_[l].resize(hierarchy.space(l).n_dofs());
      b_[l].resize(hierarchy.space(l).n_dofs());
      r_[l].resize(hierarchy.space(l).n_dofs());
    }
}

template <int dim>
void
MultigridPreconditioner<dim>::coarse_solve(std::span<double> x, std::span<const double> b) const
{
  for (unsigned s = 0; s < coarse_sweeps_; ++s)
    coarse_.step(x, b, s == 0);
}

template <int dim>
void
MultigridPreconditioner<dim>::v_cycle(const unsigned l, std::span<double> x, std::span<const double> b) const
{
  if (l == 0)
    {
      coarse_solve(x, b);
      return;
    }
  const auto &S = smoothers_[l];
  for (unsigned s = 0; s < settings_.smoothing_steps; ++s)
    S.step(x, b, s == 0);

  Vector &r = r_[l];
  operators_[l]->vmult(r, x);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = b[i] - r[i];
  hierarchy_.restrict_residual(l, b_[l - 1], r);
  v_cycle(l - 1, x_[l - 1], b_[l - 1]);
  hierarchy_.prolongate(l, r, x_[l - 1]);
  axpy(1.0, r, x);

  for (unsigned s = 0; s < settings_.smoothing_steps; ++s)
    S.step(x, b);
}

template <int dim>
void
MultigridPreconditioner<dim>::vmult(std::span<double> dst, std::span<const double> src) const
{
  v_cycle(hierarchy_.n_levels() - 1, dst, src);
}

template <int dim>
std::size_t
MultigridPreconditioner<dim>::memory_bytes() const
{
  std::size_t bytes = 0;
  for (const auto &op : owned_)
    bytes += op->memory_bytes();
  for (unsigned l = 1; l < hierarchy_.n_levels(); ++l)
    bytes += hierarchy_.prolongation(l).memory_bytes();
  for (unsigned l = 0; l < hierarchy_.n_levels(); ++l)
    bytes += 4 * hierarchy_.space(l).n_dofs() * sizeof(double); // inverse diagonal and cycle vectors
  return bytes;
}

template class MultigridHierarchy<2>;
template class MultigridHierarchy<3>;
template class MultigridPreconditioner<2>;
template class MultigridPreconditioner<3>;
template SparseMatrix make_prolongation<2>(const FESpace<2> &, const FESpace<2> &, std::span<const ParentLink>);
template SparseMatrix make_prolongation<3>(const FESpace<3> &, const FESpace<3> &, std::span<const ParentLink>);

} // namespace hyperfree
