#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>

namespace hyperfree
{
template <int dim>
using Tensor2 = Eigen::Matrix<double, dim, dim>;

template <int dim>
using Point = Eigen::Matrix<double, dim, 1>;

template <int dim>
inline Tensor2<dim>
identity()
{
  return Tensor2<dim>::Identity();
}

template <int dim>
inline Tensor2<dim>
symmetrize(const Tensor2<dim> &t)
{
  return 0.5 * (t + t.transpose());
}

/// Number of independent entries of a symmetric dim x dim tensor.
template <int dim>
constexpr int n_sym = dim * (dim + 1) / 2;

/// Number of independent entries of a major-symmetric Voigt matrix.
template <int dim>
constexpr int n_sym4 = n_sym<dim> * (n_sym<dim> + 1) / 2;

/**
 * Voigt slot ordering. 3D: 11, 22, 33, 23, 13, 12. 2D: 11, 22, 12.
 */
template <int dim>
constexpr std::array<std::array<int, 2>, n_sym<dim>> voigt_pairs()
{
  if constexpr (dim == 2)
    return {{{0, 0}, {1, 1}, {0, 1}}};
  else
    return {{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};
}

template <int dim>
constexpr int
voigt_index(const int i, const int j)
{
  if (i == j)
    return i;
  if constexpr (dim == 2)
    return 2;
  else
    return 6 - i - j;
}

template <int dim>
inline void
pack_symmetric(const Tensor2<dim> &t, double *out)
{
  constexpr auto pairs = voigt_pairs<dim>();
  for (int a = 0; a < n_sym<dim>; ++a)
    out[a] = t(pairs[a][0], pairs[a][1]);
}

template <int dim>
inline Tensor2<dim>
unpack_symmetric(const double *in)
{
  constexpr auto pairs = voigt_pairs<dim>();
  Tensor2<dim>   t;
  for (int a = 0; a < n_sym<dim>; ++a)
    {
      t(pairs[a][0], pairs[a][1]) = in[a];
      t(pairs[a][1], pairs[a][0]) = in[a];
    }
  return t;
}

} // namespace hyperfree
