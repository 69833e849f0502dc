#include <hyperfree/quadrature.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace hyperfree
{
namespace
{
  // P_n(x) and P_{n-1}(x) by the three-term recurrence.
  std::pair<double, double>
  legendre(const unsigned n, const double x)
  {
    double p_prev = 1.0, p = x;
    for (unsigned k = 2; k <= n; ++k)
      {
        const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev              = p;
        p                   = p_next;
      }
    return {p, p_prev};
  }
} // namespace

Quadrature1D
gauss_legendre(const unsigned n_points)
{
  if (n_points < 1 || n_points > 16)
    throw std::invalid_argument("gauss_legendre: number of points must lie in [1, 16], got " +
                                std::to_string(n_points));

  const unsigned n = n_points;
  Quadrature1D   quad;
  quad.points.resize(n);
  quad.weights.resize(n);

  // Roots of P_n on [-1, 1] by Newton iteration. Only the upper half is
  // computed and mirrored, so the rule is exactly symmetric about 0.5.
  for (unsigned i = 0; i < (n + 1) / 2; ++i)
    {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it)
        {
          const auto [p, p_prev] = legendre(n, x);
          const double dp        = n * (x * p - p_prev) / (x * x - 1.0);
          const double dx        = p / dp;
          x -= dx;
          if (std::abs(dx) < 1e-16)
            break;
        }
      const auto [p, p_prev] = legendre(n, x);
      const double dp        = n * (x * p - p_prev) / (x * x - 1.0);
      const double w         = 2.0 / ((1.0 - x * x) * dp * dp);

      const double t          = 0.5 * (1.0 - x);
      quad.points[i]          = t;
      quad.points[n - 1 - i]  = 1.0 - t;
      quad.weights[i]         = 0.5 * w;
      quad.weights[n - 1 - i] = 0.5 * w;
    }
  if (n % 2 == 1)
    quad.points[n / 2] = 0.5;
  return quad;
}

LagrangeBasis1D::LagrangeBasis1D(const unsigned degree)
  : degree_(degree)
{
  if (degree < 1)
    throw std::invalid_argument("LagrangeBasis1D: degree must be at least 1");
  nodes_.resize(degree + 1);
  for (unsigned i = 0; i <= degree; ++i)
    nodes_[i] = static_cast<double>(i) / degree;
}

double
LagrangeBasis1D::value(const unsigned i, const double x) const
{
  double v = 1.0;
  for (unsigned j = 0; j <= degree_; ++j)
    if (j != i)
      v *= (x - nodes_[j]) / (nodes_[i] - nodes_[j]);
  return v;
}

double
LagrangeBasis1D::derivative(const unsigned i, const double x) const
{
  double sum = 0.0;
  for (unsigned k = 0; k <= degree_; ++k)
    {
      if (k == i)
        continue;
      double term = 1.0 / (nodes_[i] - nodes_[k]);
      for (unsigned j = 0; j <= degree_; ++j)
        if (j != i && j != k)
          term *= (x - nodes_[j]) / (nodes_[i] - nodes_[j]);
      sum += term;
    }
  return sum;
}

ShapeTable1D
tabulate(const LagrangeBasis1D &basis, std::span<const double> points)
{
  ShapeTable1D table;
  table.n_dofs   = basis.size();
  table.n_points = static_cast<unsigned>(points.size());
  table.values.resize(table.n_dofs * table.n_points);
  table.derivatives.resize(table.n_dofs * table.n_points);
  for (unsigned q = 0; q < table.n_points; ++q)
    for (unsigned i = 0; i < table.n_dofs; ++i)
      {
        table.values[q * table.n_dofs + i]      = basis.value(i, points[q]);
        table.derivatives[q * table.n_dofs + i] = basis.derivative(i, points[q]);
      }
  return table;
}

} // namespace hyperfree
