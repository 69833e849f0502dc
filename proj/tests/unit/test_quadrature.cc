#include <doctest.h>
#include <hyperfree/quadrature.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace hyperfree;

TEST_CASE("gauss_legendre small rules")
{
  const auto q1 = gauss_legendre(1);
  CHECK(q1.points[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto q2 = gauss_legendre(2);
  CHECK(std::abs(q2.points[0] - (0.5 - 0.5 / std::sqrt(3.0))) < 1e-15);
  CHECK(std::abs(q2.points[1] - (0.5 + 0.5 / std::sqrt(3.0))) < 1e-15);
  CHECK(std::abs(q2.weights[0] - 0.5) < 1e-15);

  double cubic = 0;
  for (unsigned q = 0; q < 2; ++q)
    cubic += q2.weights[q] * std::pow(q2.points[q], 3);
  CHECK(std::abs(cubic - 0.25) < 1e-15);
}

TEST_CASE("gauss_legendre exactness and symmetry")
{
  for (unsigned n = 1; n <= 16; ++n)
    {
      const auto quad = gauss_legendre(n);
      CHECK(std::abs(std::accumulate(quad.weights.begin(), quad.weights.end(), 0.0) - 1.0) < 1e-14);
      for (unsigned q = 0; q < n; ++q)
        {
          CHECK(quad.points[q] > 0.0);
          CHECK(quad.points[q] < 1.0);
          CHECK(quad.points[q] + quad.points[n - 1 - q] == 1.0);
        }
      for (unsigned k = 0; k <= 2 * n - 1; ++k)
        {
          double s = 0;
          for (unsigned q = 0; q < n; ++q)
            s += quad.weights[q] * std::pow(quad.points[q], k);
          CHECK(std::abs(s - 1.0 / (k + 1)) < 1e-13);
        }
    }
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(17), std::invalid_argument);
}

TEST_CASE("Lagrange basis properties")
{
  for (unsigned p = 1; p <= 8; ++p)
    {
      const LagrangeBasis1D basis(p);
      for (unsigned i = 0; i <= p; ++i)
        for (unsigned j = 0; j <= p; ++j)
          CHECK(std::abs(basis.value(i, basis.nodes()[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);

      const auto table = tabulate(basis, gauss_legendre(p + 1).points);
      for (unsigned q = 0; q < table.n_points; ++q)
        {
          double sv = 0, sd = 0;
          for (unsigned i = 0; i < table.n_dofs; ++i)
            {
              sv += table.value(q, i);
              sd += table.derivative(q, i);
            }
          CHECK(std::abs(sv - 1.0) < 1e-13);
          CHECK(std::abs(sd) < 1e-12 * p * p);
        }

      // derivative against central differences
      const double h = 1e-6;
      for (unsigned i = 0; i <= p; ++i)
        {
          const double fd = (basis.value(i, 0.3 + h) - basis.value(i, 0.3 - h)) / (2 * h);
          CHECK(std::abs(fd - basis.derivative(i, 0.3)) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}
