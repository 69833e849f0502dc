#pragma once

#include <hyperfree/errors.h>
#include <hyperfree/tensor.h>

#include <cmath>
#include <string>
#include <stdexcept>

// Compressible Neo-Hookean hyperelasticity,
//   psi(C) = mu / 2 [tr C - tr I - 2 ln J] + lambda ln^2 J.
// In 2D the same formulas are used with 2x2 tensors (plane strain).
namespace hyperfree
{
struct NeoHookeanParams
{
  double mu     = 0; // N/mm^2
  double lambda = 0; // N/mm^2

  static NeoHookeanParams from_poisson(double mu, double nu)
  {
    if (!(nu > -1.0 && nu < 0.5))
      throw std::invalid_argument("Poisson ratio must lie in (-1, 0.5)");
    return {mu, 2.0 * mu * nu / (1.0 - 2.0 * nu)};
  }

  NeoHookeanParams scaled(double factor) const { return {mu * factor, lambda * factor}; }

  void validate() const
  {
    if (!(mu > 0.0) || !(lambda > 0.0))
      throw std::invalid_argument("Neo-Hookean parameters must be positive");
  }
};

template <int dim>
struct Kinematics
{
  Tensor2<dim> F, F_inv, b, C, E;
  double       J = 1.0;
};

/// F = I + grad_u. Throws NonPositiveJacobian if det F <= 0.
template <int dim>
Kinematics<dim>
kinematics_from_displacement_gradient(const Tensor2<dim> &grad_u)
{
  Kinematics<dim> k;
  k.F = Tensor2<dim>::Identity() + grad_u;
  k.J = k.F.determinant();
  if (!(k.J > 0.0))
    throw NonPositiveJacobian("det F = " + std::to_string(k.J) + " <= 0");
  k.F_inv = k.F.inverse();
  k.b     = k.F * k.F.transpose();
  k.C     = k.F.transpose() * k.F;
  k.b     = symmetrize<dim>(k.b);
  k.C     = symmetrize<dim>(k.C);
  k.E     = 0.5 * (k.C - Tensor2<dim>::Identity());
  return k;
}

template <int dim>
double
strain_energy(const Tensor2<dim> &C, const NeoHookeanParams &p)
{
  const double ln_J = 0.5 * std::log(C.determinant());
  return 0.5 * p.mu * (C.trace() - dim - 2.0 * ln_J) + p.lambda * ln_J * ln_J;
}

/// S = 2 dpsi/dC = mu (I - C^-1) + 2 lambda ln J C^-1.
template <int dim>
Tensor2<dim>
second_pk_stress(const Tensor2<dim> &C, const NeoHookeanParams &p)
{
  const double       ln_J  = 0.5 * std::log(C.determinant());
  const Tensor2<dim> C_inv = symmetrize<dim>(C.inverse());
  return p.mu * (Tensor2<dim>::Identity() - C_inv) + 2.0 * p.lambda * ln_J * C_inv;
}

/// tau = mu b - [mu - 2 lambda ln J] I.
template <int dim>
Tensor2<dim>
kirchhoff_stress(const Kinematics<dim> &k, const NeoHookeanParams &p)
{
  const double c1 = p.mu - 2.0 * p.lambda * std::log(k.J);
  return p.mu * k.b - c1 * Tensor2<dim>::Identity();
}

/// J C : g_s = 2 [mu - 2 lambda ln J] g_s + 2 lambda tr(g_s) I.
template <int dim>
Tensor2<dim>
tangent_action_closed_form(const Tensor2<dim> &g_sym, const double J, const NeoHookeanParams &p)
{
  const double c1 = 2.0 * (p.mu - 2.0 * p.lambda * std::log(J));
  return c1 * g_sym + (2.0 * p.lambda * g_sym.trace()) * Tensor2<dim>::Identity();
}

/// 4 d^2 psi / dC dC : G = 2 [mu - 2 lambda ln J] C^-1 G C^-1 + 2 lambda (C^-1 : G) C^-1,
/// for symmetric G.
template <int dim>
Tensor2<dim>
referential_tangent_action(const Tensor2<dim> &C, const Tensor2<dim> &G, const NeoHookeanParams &p)
{
  const double       ln_J  = 0.5 * std::log(C.determinant());
  const Tensor2<dim> C_inv = C.inverse();
  return 2.0 * (p.mu - 2.0 * p.lambda * ln_J) * (C_inv * G * C_inv) +
         2.0 * p.lambda * (C_inv.cwiseProduct(G)).sum() * C_inv;
}

/**
 * Fourth-order tensor with minor and major symmetry in Voigt notation,
 * slots ordered as in voigt_pairs(). The matrix maps engineering strains
 * (off-diagonal entries doubled) to stresses, so D(I, J) = C_ijkl with
 * I ~ (ij), J ~ (kl); 2 S (the symmetric identity) has diagonal
 * (2, 2, 2, 1, 1, 1) in 3D and (2, 2, 1) in 2D.
 */
template <int dim>
struct VoigtTangent
{
  static constexpr int n = n_sym<dim>;
  Eigen::Matrix<double, n, n> matrix = Eigen::Matrix<double, n, n>::Zero();

  Tensor2<dim>
  contract(const Tensor2<dim> &g_sym) const
  {
    constexpr auto              pairs = voigt_pairs<dim>();
    Eigen::Matrix<double, n, 1> strain;
    for (int a = 0; a < n; ++a)
      strain[a] = (pairs[a][0] == pairs[a][1] ? 1.0 : 2.0) * g_sym(pairs[a][0], pairs[a][1]);
    const Eigen::Matrix<double, n, 1> stress = matrix * strain;
    return unpack_symmetric<dim>(stress.data());
  }

  double
  component(int i, int j, int k, int l) const
  {
    return matrix(voigt_index<dim>(i, j), voigt_index<dim>(k, l));
  }

  /// Upper triangle, row by row.
  void
  pack(double *out) const
  {
    for (int a = 0, idx = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        out[idx++] = matrix(a, b);
  }

  static VoigtTangent
  unpack(const double *in)
  {
    VoigtTangent t;
    for (int a = 0, idx = 0; a < n; ++a)
      for (int b = a; b < n; ++b, ++idx)
        {
          t.matrix(a, b) = in[idx];
          t.matrix(b, a) = in[idx];
        }
    return t;
  }
};

/// J C = 2 [mu - 2 lambda ln J] S + 2 lambda I (x) I.
template <int dim>
VoigtTangent<dim>
material_tangent_full(const double J, const NeoHookeanParams &p)
{
  VoigtTangent<dim> t;
  const double      c1 = 2.0 * (p.mu - 2.0 * p.lambda * std::log(J));
  for (int a = 0; a < n_sym<dim>; ++a)
    t.matrix(a, a) = a < dim ? c1 : 0.5 * c1;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      t.matrix(a, b) += 2.0 * p.lambda;
  return t;
}

} // namespace hyperfree
