#include <hyperfree/bench.h>
#include <hyperfree/errors.h>
#include <hyperfree/flops.h>
#include <hyperfree/material.h>
#include <hyperfree/multigrid.h>
#include <hyperfree/sum_factorization.h>
#include <hyperfree/verify.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>

namespace hyperfree
{
namespace
{
CheckResult
check(unsigned group, std::string name, double value, std::string relation, double threshold)
{
  bool pass = true;
  if (relation == "<=")
    pass = value <= threshold;
  else if (relation == "<")
    pass = value < threshold;
  else if (relation == ">=")
    pass = value >= threshold;
  return {group, std::move(name), value, std::move(relation), threshold, pass && std::isfinite(value)};
}

double
rel_diff(std::span<const double> a, std::span<const double> b)
{
  return norm(difference(a, b)) / std::max(norm(b), 1e-300);
}

template <int dim>
double
rel_diff(const Tensor2<dim> &a, const Tensor2<dim> &b)
{
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

Vector
apply_op(const LinearOperator &op, std::span<const double> x)
{
  Vector y(op.size());
  op.vmult(y, x);
  return y;
}

// Least-squares slope of log y against log x.
double
log_log_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    {
      mx += std::log(x[i]) / x.size();
      my += std::log(y[i]) / y.size();
    }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    {
      sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
      sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
  return sxy / sxx;
}

template <int dim>
Mesh<dim>
benchmark_level(unsigned cells, unsigned refinements)
{
  MeshHierarchy<dim> h(build_benchmark_mesh<dim>(cells, benchmark_inclusions<dim>()));
  h.refine_globally(refinements);
  return h.finest();
}

// Random displacement, zero on the bottom, scaled down until
// 0.8 <= det F <= 1.3 at every quadrature point.
template <int dim>
Vector
random_valid_displacement(const FESpace<dim> &space, std::uint64_t seed)
{
  const Vector base = random_vector(space.n_dofs(), seed);
  for (double amplitude = 0.05;; amplitude *= 0.5)
    {
      Vector u = base;
      for (auto &v : u)
        v *= amplitude * benchmark_domain_side;
      space.constraints().set_zero(u);
      const auto [lo, hi] = jacobian_range<dim>(space, u);
      if (lo >= 0.8 && hi <= 1.3)
        return u;
    }
}

template <int dim>
double
strategy_mismatch(const FESpace<dim> &space, const MaterialTable &materials, std::uint64_t seed)
{
  const Vector                 u = random_valid_displacement(space, seed);
  const AssembledTangent<dim>  assembled(space, materials, u);
  const MatrixFreeTangent<dim> scalar(space, materials, Strategy::scalar, u);
  const MatrixFreeTangent<dim> tensor2(space, materials, Strategy::tensor2, u);
  const MatrixFreeTangent<dim> tensor4(space, materials, Strategy::tensor4, u);
  double                       worst = 0;
  for (std::uint64_t t = 0; t < 10; ++t)
    {
      const Vector x   = random_vector(space.n_dofs(), seed + 100 + t);
      const Vector ref = apply_op(assembled, x);
      for (const LinearOperator *op : {static_cast<const LinearOperator *>(&scalar),
                                       static_cast<const LinearOperator *>(&tensor2),
                                       static_cast<const LinearOperator *>(&tensor4)})
        worst = std::max(worst, rel_diff(apply_op(*op, x), ref));
    }
  return worst;
}

std::vector<CheckResult>
strategies()
{
  const auto               materials = material_preset("benchmark");
  std::vector<CheckResult> out;
  const auto               mesh2 = benchmark_level<2>(4, 0);
  for (unsigned p = 1; p <= 3; ++p)
    out.push_back(check(1, "strategies_vs_matrix_2d_p" + std::to_string(p),
                        strategy_mismatch(FESpace<2>(mesh2, p), materials, 10 + p), "<=", 1e-10));
  const auto mesh3 = benchmark_level<3>(2, 0);
  for (unsigned p = 1; p <= 2; ++p)
    out.push_back(check(1, "strategies_vs_matrix_3d_p" + std::to_string(p),
                        strategy_mismatch(FESpace<3>(mesh3, p), materials, 20 + p), "<=", 1e-10));
  return out;
}

std::vector<CheckResult>
tangent_consistency()
{
  const auto       materials = material_preset("benchmark");
  const auto       mesh      = benchmark_level<2>(4, 0);
  const FESpace<2> space(mesh, 2);
  const Vector     u = random_valid_displacement(space, 31);
  Vector           v = random_vector(space.n_dofs(), 32);
  space.constraints().set_zero(v);
  const Point<2> traction = load_preset<2>("benchmark");

  const MatrixFreeTangent<2> A(space, materials, Strategy::tensor2, u);
  Vector                     Av = apply_op(A, v);
  space.constraints().set_zero(Av);

  // v has nodal amplitude of one cell width over p, i.e. gradients of
  // order one, so eps is the strain amplitude of the perturbation
  const double cell  = benchmark_domain_side / 4 / space.degree();
  const double scale = cell / max_abs(v);
  std::vector<double> eps{1e-3, 1e-4, 1e-5}, errors;
  for (const double e : eps)
    {
      const double h  = e * scale;
      Vector       up = u, um = u;
      axpy(h, v, up);
      axpy(-h, v, um);
      Vector fd = difference(compute_residual<2>(space, materials, up, traction),
                             compute_residual<2>(space, materials, um, traction));
      for (auto &f : fd)
        f /= 2 * h;
      errors.push_back(norm(difference(fd, Av)) / norm(Av));
    }
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < eps.size(); ++i)
    out.push_back(check(2, "fd_error_eps_" + format_double(eps[i]), errors[i], "info", 0));
  out.push_back(check(2, "fd_convergence_slope", log_log_slope(eps, errors), ">=", 1.8));
  return out;
}

template <int dim>
double
energy_gradient_mismatch(const FESpace<dim> &space, const MaterialTable &materials, std::uint64_t seed)
{
  const Point<dim> traction = load_preset<dim>("benchmark");
  const Vector     u        = random_valid_displacement(space, seed);
  Vector           v        = random_vector(space.n_dofs(), seed + 1);
  space.constraints().set_zero(v);
  const double scale = max_abs(u) / max_abs(v);
  for (auto &e : v)
    e *= scale;
  const Vector r  = compute_residual<dim>(space, materials, u, traction);
  const double h  = 1e-4;
  Vector       up = u, um = u;
  axpy(h, v, up);
  axpy(-h, v, um);
  const double fd =
    (energy<dim>(space, materials, up, traction) - energy<dim>(space, materials, um, traction)) / (2 * h);
  return std::abs(fd - dot(r, v)) / std::abs(dot(r, v));
}

std::vector<CheckResult>
energy_consistency()
{
  const auto materials = material_preset("benchmark");
  const auto mesh2     = benchmark_level<2>(4, 0);
  const auto mesh3     = benchmark_level<3>(2, 0);
  return {check(3, "energy_gradient_2d_p2", energy_gradient_mismatch(FESpace<2>(mesh2, 2), materials, 41), "<=", 1e-6),
          check(3, "energy_gradient_3d_p2", energy_gradient_mismatch(FESpace<3>(mesh3, 2), materials, 42), "<=", 1e-6)};
}

template <int dim>
Tensor2<dim>
random_F(std::mt19937 &rng)
{
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  Tensor2<dim>                           F;
  do
    {
      F = Tensor2<dim>::Identity();
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          F(i, j) += dist(rng);
  } while (!(F.determinant() > 0.5 && F.determinant() < 2.0));
  return F;
}

template <int dim>
Tensor2<dim>
random_sym(std::mt19937 &rng)
{
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor2<dim>                           g;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      g(i, j) = dist(rng);
  return symmetrize<dim>(g);
}

std::vector<CheckResult>
constitutive()
{
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double bound) { out.push_back(check(4, std::move(name), value, "<=", bound)); };

  const NeoHookeanParams p{2.0, 3.0};
  const double           l2 = std::log(2.0), l4 = std::log(4.0);

  const auto k0 = kinematics_from_displacement_gradient<3>(Tensor2<3>::Zero());
  add("kinematics_at_rest", (k0.F - Tensor2<3>::Identity()).norm() + std::abs(k0.J - 1) + k0.E.norm() +
                              (k0.b - Tensor2<3>::Identity()).norm() + (k0.C - Tensor2<3>::Identity()).norm(), 0);

  Tensor2<3> g1 = Tensor2<3>::Zero();
  g1(0, 0)      = 1;
  const auto k1 = kinematics_from_displacement_gradient<3>(g1);
  add("kinematics_stretch", std::abs(k1.J - 2) + (k1.b - Tensor2<3>(Eigen::Vector3d(4, 1, 1).asDiagonal())).norm(), 1e-14);

  Tensor2<2> shear, b_ref;
  shear << 0, 0.5, 0, 0;
  b_ref << 1.25, 0.5, 0.5, 1.0;
  const auto k2 = kinematics_from_displacement_gradient<2>(shear);
  add("kinematics_shear", std::abs(k2.J - 1) + (k2.b - b_ref).norm(), 1e-14);

  const Tensor2<3> C_hand = Eigen::Vector3d(4, 1, 1).asDiagonal();
  add("energy_at_rest", std::abs(strain_energy<3>(Tensor2<3>::Identity(), p)), 0);
  add("energy_by_hand", std::abs(strain_energy<3>(C_hand, p) - (3 - 2 * l2 + 3 * l2 * l2)) / (3 - 2 * l2 + 3 * l2 * l2), 1e-14);
  add("pk2_at_rest", second_pk_stress<3>(Tensor2<3>::Identity(), p).norm(), 0);
  add("pk2_by_hand", rel_diff<3>(second_pk_stress<3>(C_hand, p),
                                 Eigen::Vector3d(1.5 + 0.75 * l4, 3 * l4, 3 * l4).asDiagonal().toDenseMatrix()), 1e-14);
  add("kirchhoff_at_rest", kirchhoff_stress<3>(k0, p).norm(), 0);
  add("kirchhoff_by_hand", rel_diff<3>(kirchhoff_stress<3>(k1, p),
                                       Eigen::Vector3d(6 + 6 * l2, 6 * l2, 6 * l2).asDiagonal().toDenseMatrix()), 1e-14);

  std::mt19937 rng(7);
  double       det_err = 0, push_err = 0, fd_psi = 0, fd_pk2 = 0, pushed_tangent = 0, asym = 0;
  for (int t = 0; t < 10; ++t)
    {
      const auto       k = kinematics_from_displacement_gradient<3>(random_F<3>(rng) - Tensor2<3>::Identity());
      const Tensor2<3> S = second_pk_stress<3>(k.C, p);
      det_err            = std::max(det_err, std::abs(k.J * k.J - k.C.determinant()) / k.C.determinant());
      push_err           = std::max(push_err, rel_diff<3>(kirchhoff_stress<3>(k, p), k.F * S * k.F.transpose()));

      const double h = 1e-6;
      Tensor2<3>   fd;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          {
            Tensor2<3> dC = Tensor2<3>::Zero();
            dC(i, j) += 0.5 * h;
            dC(j, i) += 0.5 * h;
            fd(i, j) = (strain_energy<3>(k.C + dC, p) - strain_energy<3>(k.C - dC, p)) / h;
          }
      fd_psi = std::max(fd_psi, rel_diff<3>(fd, S));

      const Tensor2<3> G = random_sym<3>(rng);
      const Tensor2<3> dS = (second_pk_stress<3>(k.C + h * G, p) - second_pk_stress<3>(k.C - h * G, p)) / (2 * h);
      fd_pk2 = std::max(fd_pk2, rel_diff<3>(2.0 * dS, referential_tangent_action<3>(k.C, G, p)));

      const Tensor2<3> g      = random_sym<3>(rng);
      const Tensor2<3> pushed = k.F * referential_tangent_action<3>(k.C, k.F.transpose() * g * k.F, p) * k.F.transpose();
      const Tensor2<3> closed = tangent_action_closed_form<3>(g, k.J, p);
      pushed_tangent          = std::max(pushed_tangent, rel_diff<3>(pushed, closed));
      const Tensor2<3> tau    = kirchhoff_stress<3>(k, p);
      asym = std::max({asym, (tau - tau.transpose()).norm(), (closed - closed.transpose()).norm()});
    }
  add("jacobian_squared_is_det_C", det_err, 1e-12);
  add("kirchhoff_is_pushed_pk2", push_err, 1e-12);
  add("pk2_is_energy_derivative", fd_psi, 1e-7);
  add("pk2_derivative_is_referential_tangent", fd_pk2, 1e-6);
  add("pushed_referential_tangent_is_closed_form", pushed_tangent, 1e-10);
  add("stress_and_tangent_symmetry", asym, 0);

  const Tensor2<3> g = random_sym<3>(rng);
  add("closed_form_at_unit_jacobian",
      rel_diff<3>(tangent_action_closed_form<3>(g, 1.0, p), 2 * p.mu * g + 2 * p.lambda * g.trace() * Tensor2<3>::Identity()),
      1e-14);
  Tensor2<3> traceless = g;
  traceless(2, 2) -= g.trace();
  add("closed_form_traceless",
      rel_diff<3>(tangent_action_closed_form<3>(traceless, 1.7, p), 2 * (p.mu - 2 * p.lambda * std::log(1.7)) * traceless),
      1e-14);
  double full_err = 0;
  for (const double J : {0.6, 1.0, 2.0})
    {
      full_err = std::max(full_err, rel_diff<3>(material_tangent_full<3>(J, p).contract(g), tangent_action_closed_form<3>(g, J, p)));
      const auto g2 = random_sym<2>(rng);
      full_err = std::max(full_err, rel_diff<2>(material_tangent_full<2>(J, p).contract(g2), tangent_action_closed_form<2>(g2, J, p)));
    }
  add("full_tangent_vs_closed_form", full_err, 1e-12);

  const Eigen::Matrix<double, 6, 6> two_S = Eigen::Matrix<double, 6, 1>(2, 2, 2, 1, 1, 1).asDiagonal();
  add("voigt_symmetric_identity", (material_tangent_full<3>(1.0, {1.0, 0.0}).matrix - two_S).norm(), 0);
  const double J = 1.4;
  add("contraction_with_identity",
      rel_diff<3>(material_tangent_full<3>(J, p).contract(Tensor2<3>::Identity()),
                  (2 * (p.mu - 2 * p.lambda * std::log(J)) + 6 * p.lambda) * Tensor2<3>::Identity()),
      1e-14);
  const auto D = material_tangent_full<3>(J, p).matrix;
  add("voigt_major_symmetry", (D - D.transpose()).norm(), 0);
  const double min_eig =
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>>(material_tangent_full<3>(1.0, p).matrix).eigenvalues().minCoeff();
  out.push_back(check(4, "tangent_positive_at_rest", min_eig, ">=", 0));
  return out;
}

// Naive O(n^dim m^dim) evaluate/integrate against the factorized kernel.
template <int dim>
double
sum_factorization_mismatch(unsigned p)
{
  const ShapeTable1D             table = tabulate(LagrangeBasis1D(p), gauss_legendre(p + 1).points);
  const TensorProductKernel<dim> kernel(table);
  const unsigned                 nn = kernel.n_nodes(), nq = kernel.n_points(), n = table.n_dofs;

  auto shape = [&](unsigned i, unsigned q, int deriv) {
    double v = 1;
    for (int d = 0; d < dim; ++d, i /= n, q /= n)
      v *= d == deriv ? table.derivative(q % n, i % n) : table.value(q % n, i % n);
    return v;
  };

  const Vector        x = random_vector(nn, p);
  std::vector<double> val(nq), grad(dim * nq), val_ref(nq, 0.0), grad_ref(dim * nq, 0.0);
  kernel.evaluate(x.data(), val.data(), grad.data());
  for (unsigned q = 0; q < nq; ++q)
    for (unsigned i = 0; i < nn; ++i)
      {
        val_ref[q] += shape(i, q, -1) * x[i];
        for (int d = 0; d < dim; ++d)
          grad_ref[d * nq + q] += shape(i, q, d) * x[i];
      }

  const Vector        yv = random_vector(nq, 100 + p), yg = random_vector(dim * nq, 200 + p);
  std::vector<double> out(nn), out_ref(nn, 0.0);
  kernel.integrate(yv.data(), yg.data(), out.data());
  for (unsigned i = 0; i < nn; ++i)
    for (unsigned q = 0; q < nq; ++q)
      {
        out_ref[i] += shape(i, q, -1) * yv[q];
        for (int d = 0; d < dim; ++d)
          out_ref[i] += shape(i, q, d) * yg[d * nq + q];
      }
  return std::max({max_abs(difference(val, val_ref)) / max_abs(val_ref),
                   max_abs(difference(grad, grad_ref)) / max_abs(grad_ref),
                   max_abs(difference(out, out_ref)) / max_abs(out_ref)});
}

template <int dim>
double
flop_exponent(unsigned max_p)
{
  std::vector<double> n, f;
  for (unsigned p = 1; p <= max_p; ++p)
    {
      const TensorProductKernel<dim> kernel(tabulate(LagrangeBasis1D(p), gauss_legendre(p + 1).points));
      std::vector<double>            x(kernel.n_nodes(), 1.0), grad(dim * kernel.n_points());
      flops::reset();
      kernel.evaluate(x.data(), nullptr, grad.data());
      kernel.integrate(nullptr, grad.data(), x.data());
      n.push_back(p + 1.0);
      f.push_back(static_cast<double>(flops::count()));
    }
  return log_log_slope(n, f);
}

std::vector<CheckResult>
sum_factorization()
{
  double e2 = 0, e3 = 0;
  for (unsigned p = 1; p <= 8; ++p)
    e2 = std::max(e2, sum_factorization_mismatch<2>(p));
  for (unsigned p = 1; p <= 4; ++p)
    e3 = std::max(e3, sum_factorization_mismatch<3>(p));
  std::vector<CheckResult> out{check(5, "naive_mismatch_2d_p1_to_8", e2, "<=", 1e-13),
                               check(5, "naive_mismatch_3d_p1_to_4", e3, "<=", 1e-13)};
  if constexpr (flops::enabled)
    {
      const double s2 = flop_exponent<2>(8), s3 = flop_exponent<3>(4);
      out.push_back(check(5, "flop_exponent_2d", s2, "info", 0));
      out.push_back(check(5, "flop_exponent_2d_minus_3", std::abs(s2 - 3), "<=", 0.3));
      out.push_back(check(5, "flop_exponent_3d", s3, "info", 0));
      out.push_back(check(5, "flop_exponent_3d_minus_4", std::abs(s3 - 4), "<=", 0.3));
    }
  else
    out.push_back(check(5, "flop_counting_enabled", 0, ">=", 1));
  return out;
}

template <int dim>
void
transfer_checks(unsigned p, std::vector<CheckResult> &out)
{
  MeshHierarchy<dim> meshes(build_benchmark_mesh<dim>(2, benchmark_inclusions<dim>()));
  meshes.refine_globally(2);
  const MultigridHierarchy<dim> mg(meshes, p);

  // degree-p polynomial in scaled coordinates
  auto f = [p](const Point<dim> &x) {
    Point<dim> y = x * 1e3, v;
    for (int c = 0; c < dim; ++c)
      {
        v[c] = 1 + c;
        for (int d = 0; d < dim; ++d)
          v[c] += (c + d + 1) * std::pow(y[d], p) - 0.5 * y[d] * std::pow(y[(d + 1) % dim], p - 1);
      }
    return v;
  };

  double adjoint = 0, masked_adjoint = 0, reproduction = 0;
  for (unsigned l = 1; l < mg.n_levels(); ++l)
    {
      const auto &P = mg.prolongation(l);
      for (std::uint64_t t = 0; t < 5; ++t)
        {
          const Vector x = random_vector(P.n_columns(), t), y = random_vector(P.n_rows(), 10 + t);
          Vector       Px(P.n_rows()), Ry(P.n_columns());
          P.vmult(Px, x);
          P.Tvmult(Ry, y);
          adjoint = std::max(adjoint, std::abs(dot(Px, y) - dot(x, Ry)) / (norm(x) * norm(y)));

          Vector xm = x, ym = y;
          mg.space(l - 1).constraints().set_zero(xm);
          mg.space(l).constraints().set_zero(ym);
          mg.prolongate(l, Px, xm);
          mg.restrict_residual(l, Ry, ym);
          masked_adjoint = std::max(masked_adjoint, std::abs(dot(Px, ym) - dot(xm, Ry)) / (norm(xm) * norm(ym)));
        }
      const Vector coarse = mg.space(l - 1).interpolate(f), fine = mg.space(l).interpolate(f);
      Vector       Pc(fine.size());
      P.vmult(Pc, coarse);
      reproduction = std::max(reproduction, max_abs(difference(Pc, fine)) / max_abs(fine));
    }
  const std::string tag = std::to_string(dim) + "d_p" + std::to_string(p);
  out.push_back(check(6, "transpose_identity_" + tag, adjoint, "<=", 1e-12));
  out.push_back(check(6, "masked_transpose_identity_" + tag, masked_adjoint, "<=", 1e-12));
  out.push_back(check(6, "polynomial_reproduction_" + tag, reproduction, "<=", 1e-12));
}

std::vector<CheckResult>
transfer()
{
  std::vector<CheckResult> out;
  for (unsigned p = 1; p <= 3; ++p)
    transfer_checks<2>(p, out);
  for (unsigned p = 1; p <= 3; ++p)
    transfer_checks<3>(p, out);
  return out;
}

RunConfig
benchmark_config(unsigned refinements, PreconditionerType preconditioner)
{
  RunConfig c;
  c.dim            = 2;
  c.p              = 2;
  c.refinements    = refinements;
  c.preconditioner = preconditioner;
  c.timings        = false;
  return c;
}

std::vector<CheckResult>
multigrid_effectiveness()
{
  std::vector<CheckResult> out;
  std::vector<double>      gmg;
  for (unsigned r = 1; r <= 3; ++r)
    {
      const std::string tag = "_r" + std::to_string(r);
      double            g = 0, d = 0;
      try
        {
          g = run_solver_benchmark(benchmark_config(r, PreconditionerType::gmg)).record.cg_iterations_mean;
          d = run_solver_benchmark(benchmark_config(r, PreconditionerType::diag)).record.cg_iterations_mean;
        }
      catch (const SolverFailure &)
        {
          out.push_back(check(7, "solver_failed" + tag, 1, "<=", 0));
          return out;
        }
      gmg.push_back(g);
      out.push_back(check(7, "gmg_mean_cg" + tag, g, "info", 0));
      out.push_back(check(7, "diag_mean_cg" + tag, d, "info", 0));
      out.push_back(check(7, "gmg_over_diag" + tag, g / d, "<", 1));
    }
  const auto [lo, hi] = std::minmax_element(gmg.begin(), gmg.end());
  out.push_back(check(7, "gmg_variation", (*hi - *lo) / *lo, "<=", 0.5));
  return out;
}

std::vector<CheckResult>
newton_behavior()
{
  std::vector<CheckResult> out;
  NewtonResult             result;
  try
    {
      result = run_solver_benchmark(benchmark_config(1, PreconditionerType::gmg)).result;
    }
  catch (const SolverFailure &)
    {
      out.push_back(check(8, "converged", 0, ">=", 1));
      return out;
    }
  out.push_back(check(8, "converged", 1, ">=", 1));

  unsigned steps = 0, most = 0;
  double   best  = 0;
  for (unsigned s = 1;; ++s)
    {
      std::vector<double> du;
      for (const auto &rec : result.log)
        if (rec.step == s && rec.update_norm > 0)
          du.push_back(rec.update_norm);
      if (du.empty())
        break;
      ++steps;
      most = std::max(most, static_cast<unsigned>(du.size()));
      if (du.size() >= 3)
        {
          const std::size_t n = du.size();
          best = std::max(best, std::log(du[n - 1] / du[n - 2]) / std::log(du[n - 2] / du[n - 3]));
        }
    }
  out.push_back(check(8, "load_steps", steps, ">=", 5));
  out.push_back(check(8, "max_iterations_per_step", most, "<=", 30));
  out.push_back(check(8, "best_final_log_slope", best, ">=", 1.7));
  return out;
}

std::vector<CheckResult>
memory_ordering()
{
  std::vector<CheckResult> out;
  for (unsigned p = 2; p <= 4; ++p)
    {
      RunConfig c;
      c.p           = p;
      c.refinements = 1;
      c.timings     = false;
      std::array<double, 4> bytes;
      const Strategy        order[] = {Strategy::scalar, Strategy::tensor2, Strategy::tensor4, Strategy::matrix_based};
      for (int s = 0; s < 4; ++s)
        {
          c.strategy = order[s];
          bytes[s]   = static_cast<double>(run_mv_benchmark(c).memory_bytes);
        }
      const std::string tag = "_2d_p" + std::to_string(p);
      for (int s = 0; s < 3; ++s)
        out.push_back(check(9, std::string(to_string(order[s])) + "_over_" + std::string(to_string(order[s + 1])) + tag,
                            bytes[s] / bytes[s + 1], "<", 1));
    }
  const unsigned expected[] = {1, 8, 27};
  const Strategy order[]    = {Strategy::scalar, Strategy::tensor2, Strategy::tensor4};
  for (int s = 0; s < 3; ++s)
    out.push_back(check(9, "payload_3d_" + std::string(to_string(order[s])),
                        std::abs(double(payload_scalars_per_q_point<3>(order[s])) - expected[s]), "<=", 0));
  return out;
}
} // namespace

std::vector<unsigned>
verification_groups()
{
  return {1, 2, 3, 4, 5, 6, 7, 8, 9};
}

std::string
group_title(const unsigned group)
{
  switch (group)
    {
      case 1: return "operator strategy equivalence";
      case 2: return "tangent consistency";
      case 3: return "energy-residual consistency";
      case 4: return "constitutive identities";
      case 5: return "sum factorization";
      case 6: return "transfer operators";
      case 7: return "multigrid effectiveness";
      case 8: return "Newton convergence";
      case 9: return "memory accounting";
      case 10: return "determinism";
      default: return "unknown";
    }
}

std::vector<CheckResult>
run_checks(const unsigned group)
{
  switch (group)
    {
      case 1: return strategies();
      case 2: return tangent_consistency();
      case 3: return energy_consistency();
      case 4: return constitutive();
      case 5: return sum_factorization();
      case 6: return transfer();
      case 7: return multigrid_effectiveness();
      case 8: return newton_behavior();
      case 9: return memory_ordering();
      default: throw ConfigError("no check group " + std::to_string(group));
    }
}

std::string
checks_csv(const std::vector<CheckResult> &checks)
{
  std::string out = "group,check,value,relation,threshold,status\n";
  for (const auto &c : checks)
    out += std::to_string(c.group) + ',' + c.name + ',' + format_double(c.value) + ',' + c.relation + ',' +
           format_double(c.threshold) + ',' + (c.relation == "info" ? "info" : c.pass ? "pass" : "fail") + '\n';
  return out;
}

} // namespace hyperfree
