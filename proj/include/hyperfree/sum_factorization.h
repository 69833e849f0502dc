#pragma once

#include <hyperfree/flops.h>
#include <hyperfree/quadrature.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace hyperfree
{
namespace internal
{
  /**
   * Applies the 1D matrix `m` (rows x cols, row-major) along `axis` of a
   * dim-way tensor. With `transpose` the matrix is applied as m^T, so the
   * axis extent goes from rows to cols. With `add` the result is accumulated
   * into `out`.
   */
  template <int dim, bool transpose, bool add>
  void
  contract(const double                  *m,
           const unsigned                 rows,
           const unsigned                 cols,
           const unsigned                 axis,
           const std::array<unsigned, 3> &extents_in,
           const double                  *in,
           double                        *out)
  {
    const unsigned n_in  = transpose ? rows : cols;
    const unsigned n_out = transpose ? cols : rows;

    unsigned before = 1, after = 1;
    for (unsigned d = 0; d < axis; ++d)
      before *= extents_in[d];
    for (unsigned d = axis + 1; d < dim; ++d)
      after *= extents_in[d];

    for (unsigned b = 0; b < after; ++b)
      for (unsigned i = 0; i < n_out; ++i)
        {
          double *o = out + before * (i + n_out * b);
          if constexpr (!add)
            std::fill(o, o + before, 0.0);
          for (unsigned j = 0; j < n_in; ++j)
            {
              const double  coef = transpose ? m[j * cols + i] : m[i * cols + j];
              const double *src  = in + before * (j + n_in * b);
              for (unsigned a = 0; a < before; ++a)
                o[a] += coef * src[a];
            }
        }
    flops::add(2ull * n_in * n_out * before * after);
  }

  // Two scratch buffers per term (value chain + one per derivative axis).
  struct SumFactorizationScratch
  {
    std::array<std::array<std::vector<double>, 2>, 4> buffers;
    std::array<int, 4>                                current{};

    void reserve(std::size_t size)
    {
      for (auto &pair : buffers)
        for (auto &b : pair)
          if (b.size() < size)
            b.resize(size);
    }

    // Buffer to write the next state of term t into.
    double *next(unsigned t)
    {
      current[t] ^= 1;
      return buffers[t][current[t]].data();
    }
  };

  constexpr int
  ipow(const int base, const int exp)
  {
    return exp == 0 ? 1 : base * ipow(base, exp - 1);
  }

  /**
   * Same contractions as contract() for compile-time sizes, n nodes and m
   * points per direction. Along `axis` the axes below already carry m
   * entries and the axes above n, in both evaluate and integrate.
   */
  template <int dim, int n, int m>
  struct FixedContraction
  {
    template <int axis, bool transpose, bool add>
    static void
    apply(const double *mat, const double *in, double *out)
    {
      constexpr int before = ipow(m, axis);
      constexpr int after  = ipow(n, dim - 1 - axis);
      constexpr int n_in   = transpose ? m : n;
      constexpr int n_out  = transpose ? n : m;
      for (int b = 0; b < after; ++b)
        for (int i = 0; i < n_out; ++i)
          {
            double o[before];
            for (int a = 0; a < before; ++a)
              o[a] = add ? out[a + before * (i + n_out * b)] : 0.0;
            for (int j = 0; j < n_in; ++j)
              {
                const double  coef = transpose ? mat[j * n + i] : mat[i * n + j];
                const double *src  = in + before * (j + n_in * b);
                for (int a = 0; a < before; ++a)
                  o[a] += coef * src[a];
              }
            for (int a = 0; a < before; ++a)
              out[a + before * (i + n_out * b)] = o[a];
          }
      flops::add(2ull * n_in * n_out * before * after);
    }

    static constexpr int buffer = ipow(n > m ? n : m, dim);

    static void
    evaluate(const double *vals, const double *ders, const double *nodal, double *values, double *gradients)
    {
      constexpr int nq = ipow(m, dim);
      if constexpr (dim == 2)
        {
          double t0[buffer], t1[buffer];
          apply<0, false, false>(vals, nodal, t0);
          apply<0, false, false>(ders, nodal, t1);
          if (gradients)
            {
              apply<1, false, false>(vals, t1, gradients);
              apply<1, false, false>(ders, t0, gradients + nq);
            }
          if (values)
            apply<1, false, false>(vals, t0, values);
        }
      else
        {
          double t0[buffer], t1[buffer], v0[buffer], v1[buffer], d0[buffer];
          apply<0, false, false>(vals, nodal, t0);
          apply<0, false, false>(ders, nodal, t1);
          apply<1, false, false>(vals, t0, v0); // value, value
          apply<1, false, false>(vals, t1, v1); // deriv x
          apply<1, false, false>(ders, t0, d0); // deriv y
          if (gradients)
            {
              apply<2, false, false>(vals, v1, gradients);
              apply<2, false, false>(vals, d0, gradients + nq);
              apply<2, false, false>(ders, v0, gradients + 2 * nq);
            }
          if (values)
            apply<2, false, false>(vals, v0, values);
        }
    }

    static void
    integrate(const double *vals, const double *ders, const double *values, const double *gradients, double *nodal)
    {
      constexpr int nq = ipow(m, dim);
      if constexpr (dim == 2)
        {
          double t0[buffer], t1[buffer];
          if (values)
            apply<1, true, false>(vals, values, t0);
          if (gradients)
            {
              if (values)
                apply<1, true, true>(ders, gradients + nq, t0);
              else
                apply<1, true, false>(ders, gradients + nq, t0);
              apply<1, true, false>(vals, gradients, t1);
              apply<0, true, false>(vals, t0, nodal);
              apply<0, true, true>(ders, t1, nodal);
            }
          else
            apply<0, true, false>(vals, t0, nodal);
        }
      else
        {
          double t0[buffer], d0[buffer], d1[buffer], u0[buffer], u1[buffer];
          if (values)
            apply<2, true, false>(vals, values, t0);
          if (gradients)
            {
              if (values)
                apply<2, true, true>(ders, gradients + 2 * nq, t0);
              else
                apply<2, true, false>(ders, gradients + 2 * nq, t0);
              apply<2, true, false>(vals, gradients, d0);
              apply<2, true, false>(vals, gradients + nq, d1);
              apply<1, true, false>(vals, t0, u0);
              apply<1, true, true>(ders, d1, u0);
              apply<1, true, false>(vals, d0, u1);
              apply<0, true, false>(vals, u0, nodal);
              apply<0, true, true>(ders, u1, nodal);
            }
          else
            {
              apply<1, true, false>(vals, t0, u0);
              apply<0, true, false>(vals, u0, nodal);
            }
        }
    }
  };
} // namespace internal

/**
 * Sum-factorized evaluation and integration of one scalar field on a
 * tensor-product cell. Nodal data are lexicographic with n = p + 1 entries per
 * direction; quadrature data are lexicographic with m entries per direction.
 * Gradients are taken with respect to unit-cell coordinates and stored
 * direction-major: grad[d * m^dim + q].
 */
template <int dim>
class TensorProductKernel
{
public:
  TensorProductKernel() = default;

  explicit TensorProductKernel(const ShapeTable1D &table)
    : n_(table.n_dofs)
    , m_(table.n_points)
    , values_(table.values)
    , derivatives_(table.derivatives)
  {
    n_nodes_  = 1;
    n_points_ = 1;
    for (int d = 0; d < dim; ++d)
      {
        n_nodes_ *= n_;
        n_points_ *= m_;
      }
    if (n_ == m_)
      select_fixed(std::make_integer_sequence<int, 8>{});
  }

  unsigned n_nodes() const { return n_nodes_; }
  unsigned n_points() const { return n_points_; }
  unsigned n_nodes_1d() const { return n_; }
  unsigned n_points_1d() const { return m_; }

  /// Either output pointer may be null.
  void
  evaluate(const double *nodal, double *values, double *gradients) const
  {
    if (fixed_evaluate_)
      {
        fixed_evaluate_(values_.data(), derivatives_.data(), nodal, values, gradients);
        return;
      }
    auto &scratch = scratch_buffers();

    std::array<unsigned, 3>       ext{n_, n_, n_};
    const double                 *u = nodal;
    std::array<const double *, 3> d{};

    for (unsigned axis = 0; axis < dim; ++axis)
      {
        const bool last = axis + 1 == dim;
        if (gradients)
          {
            for (unsigned k = 0; k < axis; ++k)
              {
                double *dst = last ? gradients + k * n_points_ : scratch.next(1 + k);
                internal::contract<dim, false, false>(values_.data(), m_, n_, axis, ext, d[k], dst);
                d[k] = dst;
              }
            double *dst = last ? gradients + axis * n_points_ : scratch.next(1 + axis);
            internal::contract<dim, false, false>(derivatives_.data(), m_, n_, axis, ext, u, dst);
            d[axis] = dst;
          }
        if (!last || values)
          {
            double *dst = last ? values : scratch.next(0);
            internal::contract<dim, false, false>(values_.data(), m_, n_, axis, ext, u, dst);
            u = dst;
          }
        ext[axis] = m_;
      }
  }

  /**
   * nodal_i = sum_q N_i(x_q) values_q + sum_q sum_d dN_i/dxi_d(x_q) gradients_{d,q}.
   * Either input may be null; the result overwrites `nodal`.
   */
  void
  integrate(const double *values, const double *gradients, double *nodal) const
  {
    if (!values && !gradients)
      {
        std::fill(nodal, nodal + n_nodes_, 0.0);
        return;
      }
    if (fixed_integrate_)
      {
        fixed_integrate_(values_.data(), derivatives_.data(), values, gradients, nodal);
        return;
      }
    auto &scratch = scratch_buffers();

    std::array<unsigned, 3>       ext{m_, m_, m_};
    const double                 *u = values;
    std::array<const double *, 3> d{};
    if (gradients)
      for (unsigned k = 0; k < dim; ++k)
        d[k] = gradients + k * n_points_;

    for (int axis = dim - 1; axis >= 0; --axis)
      {
        const bool last = axis == 0;
        double    *dst  = last ? nodal : scratch.next(0);
        if (u)
          internal::contract<dim, true, false>(values_.data(), m_, n_, axis, ext, u, dst);
        if (gradients)
          {
            if (u)
              internal::contract<dim, true, true>(derivatives_.data(), m_, n_, axis, ext, d[axis], dst);
            else
              internal::contract<dim, true, false>(derivatives_.data(), m_, n_, axis, ext, d[axis], dst);
            for (int k = 0; k < axis; ++k)
              {
                double *dk = scratch.next(1 + k);
                internal::contract<dim, true, false>(values_.data(), m_, n_, axis, ext, d[k], dk);
                d[k] = dk;
              }
          }
        u         = dst;
        ext[axis] = n_;
      }
  }

  /// True if a kernel with compile-time sizes is used.
  bool is_specialized() const { return fixed_evaluate_ != nullptr; }

private:
  // Specialized kernels for n = m = 2 ... 9.
  template <int... k>
  void
  select_fixed(std::integer_sequence<int, k...>)
  {
    ((n_ == k + 2 ? (fixed_evaluate_  = &internal::FixedContraction<dim, k + 2, k + 2>::evaluate,
                     fixed_integrate_ = &internal::FixedContraction<dim, k + 2, k + 2>::integrate, 0)
                  : 0),
     ...);
  }

  internal::SumFactorizationScratch &
  scratch_buffers() const
  {
    static thread_local internal::SumFactorizationScratch scratch;
    scratch.reserve(std::max(n_nodes_, n_points_) * std::max(1u, std::max(n_, m_)));
    return scratch;
  }

  unsigned            n_ = 0, m_ = 0;
  unsigned            n_nodes_ = 0, n_points_ = 0;
  std::vector<double> values_, derivatives_;

  void (*fixed_evaluate_)(const double *, const double *, const double *, double *, double *)        = nullptr;
  void (*fixed_integrate_)(const double *, const double *, const double *, const double *, double *) = nullptr;
};

} // namespace hyperfree
