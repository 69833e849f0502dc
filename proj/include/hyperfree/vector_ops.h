#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hyperfree
{
using Vector = std::vector<double>;

inline double
dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

inline double
norm(std::span<const double> a)
{
  return std::sqrt(dot(a, a));
}

inline double
max_abs(std::span<const double> a)
{
  double m = 0;
  for (const double v : a)
    m = std::max(m, std::abs(v));
  return m;
}

/// y += alpha * x
inline void
axpy(const double alpha, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += alpha * x[i];
}

inline Vector
difference(std::span<const double> a, std::span<const double> b)
{
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    d[i] = a[i] - b[i];
  return d;
}

/// Uniform entries in [-1, 1] from a fixed seed.
inline Vector
random_vector(const std::size_t n, const std::uint64_t seed)
{
  std::mt19937_64                        rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector                                 v(n);
  for (auto &e : v)
    e = dist(rng);
  return v;
}

} // namespace hyperfree
