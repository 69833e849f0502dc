#pragma once

#include <span>
#include <vector>

namespace hyperfree
{
/// Gauss-Legendre rule on [0, 1].
struct Quadrature1D
{
  std::vector<double> points;
  std::vector<double> weights;

  unsigned size() const { return static_cast<unsigned>(points.size()); }
};

/// Throws std::invalid_argument unless 1 <= n_points <= 16.
Quadrature1D gauss_legendre(unsigned n_points);

/**
 * Lagrange polynomials of a given degree on [0, 1] with equispaced nodes
 * x_i = i / degree.
 */
class LagrangeBasis1D
{
public:
  explicit LagrangeBasis1D(unsigned degree);

  unsigned degree() const { return degree_; }
  unsigned size() const { return degree_ + 1; }

  const std::vector<double> &nodes() const { return nodes_; }

  double value(unsigned i, double x) const;
  double derivative(unsigned i, double x) const;

private:
  unsigned            degree_;
  std::vector<double> nodes_;
};

/// Values and derivatives of all 1D basis functions at a set of points.
struct ShapeTable1D
{
  unsigned            n_dofs   = 0;
  unsigned            n_points = 0;
  std::vector<double> values;      // [point * n_dofs + i]
  std::vector<double> derivatives; // [point * n_dofs + i]

  double value(unsigned point, unsigned i) const { return values[point * n_dofs + i]; }
  double derivative(unsigned point, unsigned i) const
  {
    return derivatives[point * n_dofs + i];
  }
};

ShapeTable1D tabulate(const LagrangeBasis1D &basis, std::span<const double> points);

} // namespace hyperfree
