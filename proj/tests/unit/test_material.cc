#include <doctest.h>
#include <hyperfree/material.h>

#include <cmath>
#include <random>

using namespace hyperfree;

namespace
{
template <int dim>
Tensor2<dim>
random_F(std::mt19937 &rng, double amplitude = 0.3)
{
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
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

double
rel(double a, double b)
{
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

template <int dim>
double
rel(const Tensor2<dim> &a, const Tensor2<dim> &b)
{
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

const NeoHookeanParams params{2.0, 3.0};

// Direct index-notation contraction with the fourth-order tensor
//   J C_ijkl = c1 (d_ik d_jl + d_il d_jk) / 2 + 2 lambda d_ij d_kl.
template <int dim>
Tensor2<dim>
index_contraction(const Tensor2<dim> &g, double J, const NeoHookeanParams &p)
{
  const double c1 = 2.0 * (p.mu - 2.0 * p.lambda * std::log(J));
  Tensor2<dim> out = Tensor2<dim>::Zero();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          out(i, j) += (c1 * 0.5 * ((i == k) * (j == l) + (i == l) * (j == k)) +
                        2.0 * p.lambda * (i == j) * (k == l)) *
                       g(k, l);
  return out;
}
} // namespace

TEST_CASE("kinematics")
{
  const auto k0 = kinematics_from_displacement_gradient<3>(Tensor2<3>::Zero());
  CHECK(k0.J == 1.0);
  CHECK(k0.F == Tensor2<3>::Identity());
  CHECK(k0.b == Tensor2<3>::Identity());
  CHECK(k0.C == Tensor2<3>::Identity());
  CHECK(k0.E.norm() == 0.0);

  Tensor2<3> g = Tensor2<3>::Zero();
  g(0, 0)      = 1.0;
  const auto k1 = kinematics_from_displacement_gradient<3>(g);
  CHECK(k1.J == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(k1.b(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(k1.b(1, 1) == 1.0);

  Tensor2<2> shear;
  shear << 0, 0.5, 0, 0;
  const auto k2 = kinematics_from_displacement_gradient<2>(shear);
  CHECK(k2.J == doctest::Approx(1.0).epsilon(1e-15));
  Tensor2<2> b_ref;
  b_ref << 1.25, 0.5, 0.5, 1.0;
  CHECK((k2.b - b_ref).norm() < 1e-15);

  CHECK_THROWS_AS(kinematics_from_displacement_gradient<2>(Eigen::Vector2d(-2.0, 0.0).asDiagonal().toDenseMatrix()),
                  NonPositiveJacobian);

  std::mt19937 rng(1);
  for (int t = 0; t < 20; ++t)
    {
      const auto k = kinematics_from_displacement_gradient<3>(random_F<3>(rng) - Tensor2<3>::Identity());
      CHECK(rel(k.J * k.J, k.C.determinant()) < 1e-12);
      CHECK(k.b == k.b.transpose());
      CHECK(k.C == k.C.transpose());
    }
}

TEST_CASE("strain energy and stresses by hand")
{
  CHECK(strain_energy<3>(Tensor2<3>::Identity(), params) == 0.0);
  const Tensor2<3> C = Eigen::Vector3d(4, 1, 1).asDiagonal();
  const double     l2 = std::log(2.0);
  CHECK(rel(strain_energy<3>(C, params), 3.0 - 2.0 * l2 + 3.0 * l2 * l2) < 1e-14);

  const Tensor2<3> S = second_pk_stress<3>(C, params);
  const double     l4 = std::log(4.0);
  CHECK(rel(S(0, 0), 1.5 + 0.75 * l4) < 1e-14);
  CHECK(rel(S(1, 1), 3.0 * l4) < 1e-14);
  CHECK(std::abs(S(0, 1)) == 0.0);
  CHECK(second_pk_stress<3>(Tensor2<3>::Identity(), params).norm() == 0.0);

  Tensor2<3> g = Tensor2<3>::Zero();
  g(0, 0)      = 1.0;
  const auto       k   = kinematics_from_displacement_gradient<3>(g);
  const Tensor2<3> tau = kirchhoff_stress<3>(k, params);
  CHECK(rel(tau(0, 0), 6.0 + 6.0 * l2) < 1e-14);
  CHECK(rel(tau(1, 1), 6.0 * l2) < 1e-14);
  CHECK(kirchhoff_stress<3>(kinematics_from_displacement_gradient<3>(Tensor2<3>::Zero()), params).norm() == 0.0);
}

TEST_CASE("stress derivatives by central differences")
{
  std::mt19937 rng(2);
  for (int t = 0; t < 10; ++t)
    {
      const auto       k = kinematics_from_displacement_gradient<3>(random_F<3>(rng) - Tensor2<3>::Identity());
      const Tensor2<3> S = second_pk_stress<3>(k.C, params);
      const double     h = 1e-6;

      // dpsi/dC along symmetric perturbations
      Tensor2<3> fd_S;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          {
            Tensor2<3> dC = Tensor2<3>::Zero();
            dC(i, j) += 0.5 * h;
            dC(j, i) += 0.5 * h;
            fd_S(i, j) = 2.0 * (strain_energy<3>(k.C + dC, params) - strain_energy<3>(k.C - dC, params)) / (2 * h);
          }
      CHECK(rel<3>(fd_S, S) < 1e-7);

      // tau = F S F^T
      CHECK(rel<3>(kirchhoff_stress<3>(k, params), k.F * S * k.F.transpose()) < 1e-12);

      // dS/dC : G = 1/2 of the referential tangent, and its push-forward
      // equals the closed-form spatial action on g = F^-T G F^-1
      const Tensor2<3> G      = random_sym<3>(rng);
      const Tensor2<3> fd_dS  = (second_pk_stress<3>(k.C + h * G, params) - second_pk_stress<3>(k.C - h * G, params)) / (2 * h);
      const Tensor2<3> ref    = referential_tangent_action<3>(k.C, G, params);
      CHECK(rel<3>(2.0 * fd_dS, ref) < 1e-6);

      const Tensor2<3> g_sym  = random_sym<3>(rng);
      const Tensor2<3> G_pull = k.F.transpose() * g_sym * k.F;
      const Tensor2<3> pushed = k.F * referential_tangent_action<3>(k.C, G_pull, params) * k.F.transpose();
      CHECK(rel<3>(pushed, tangent_action_closed_form<3>(g_sym, k.J, params)) < 1e-10);
    }
}

TEST_CASE("tangent action forms")
{
  std::mt19937 rng(3);
  const auto   g = random_sym<3>(rng);

  CHECK(rel<3>(tangent_action_closed_form<3>(g, 1.0, params),
               2.0 * params.mu * g + 2.0 * params.lambda * g.trace() * Tensor2<3>::Identity()) < 1e-15);

  Tensor2<3> traceless = g;
  traceless(2, 2) -= g.trace();
  const double c1 = 2.0 * (params.mu - 2.0 * params.lambda * std::log(1.7));
  CHECK(rel<3>(tangent_action_closed_form<3>(traceless, 1.7, params), c1 * traceless) < 1e-14);

  for (const double J : {0.6, 1.0, 2.0})
    {
      CHECK(rel<3>(material_tangent_full<3>(J, params).contract(g), tangent_action_closed_form<3>(g, J, params)) < 1e-13);
      CHECK(rel<3>(material_tangent_full<3>(J, params).contract(g), index_contraction<3>(g, J, params)) < 1e-13);
      const auto g2 = random_sym<2>(rng);
      CHECK(rel<2>(material_tangent_full<2>(J, params).contract(g2), index_contraction<2>(g2, J, params)) < 1e-13);
    }

  // component() against the index form
  const auto D = material_tangent_full<3>(1.3, params);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          {
            Tensor2<3> e = Tensor2<3>::Zero();
            e(k, l) += 0.5;
            e(l, k) += 0.5;
            CHECK(std::abs(D.component(i, j, k, l) - index_contraction<3>(e, 1.3, params)(i, j)) < 1e-13);
          }
}

TEST_CASE("Voigt tangent conventions")
{
  const auto S2 = material_tangent_full<3>(1.0, {1.0, 0.0});
  Eigen::Matrix<double, 6, 6> expected = Eigen::Matrix<double, 6, 1>(2, 2, 2, 1, 1, 1).asDiagonal();
  CHECK((S2.matrix - expected).norm() == 0.0);

  const auto S2_2d = material_tangent_full<2>(1.0, {1.0, 0.0});
  CHECK((S2_2d.matrix - Eigen::Matrix3d(Eigen::Vector3d(2, 2, 1).asDiagonal())).norm() == 0.0);

  const double J  = 1.4;
  const auto   D  = material_tangent_full<3>(J, params);
  const double c1 = 2.0 * (params.mu - 2.0 * params.lambda * std::log(J));
  CHECK(rel<3>(D.contract(Tensor2<3>::Identity()), (c1 + 6.0 * params.lambda) * Tensor2<3>::Identity()) < 1e-15);
  CHECK(D.matrix == D.matrix.transpose());

  std::mt19937 rng(4);
  const auto   D1 = material_tangent_full<3>(1.0, params);
  for (int t = 0; t < 20; ++t)
    {
      const auto g = random_sym<3>(rng);
      CHECK((g.cwiseProduct(D1.contract(g))).sum() >= 0.0);
    }
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>>(D1.matrix).eigenvalues().minCoeff() > 0.0);

  double packed[21];
  D.pack(packed);
  CHECK(VoigtTangent<3>::unpack(packed).matrix == D.matrix);
}

TEST_CASE("parameters")
{
  const auto p = NeoHookeanParams::from_poisson(0.4225e6, 0.3);
  CHECK(rel(p.lambda, 0.63375e6) < 1e-14);
  CHECK(p.scaled(100).mu == doctest::Approx(42.25e6));
  CHECK_THROWS(NeoHookeanParams::from_poisson(1.0, 0.5));
  CHECK_THROWS(NeoHookeanParams{-1.0, 1.0}.validate());
}
