#include <doctest.h>
#include <hyperfree/errors.h>
#include <hyperfree/solver.h>

#include <cmath>
#include <limits>

using namespace hyperfree;

namespace
{
class DenseOperator : public LinearOperator
{
public:
  explicit DenseOperator(Eigen::MatrixXd A)
    : A_(std::move(A))
  {}
  std::size_t size() const override { return A_.rows(); }
  void        vmult(std::span<double> dst, std::span<const double> src) const override
  {
    Eigen::Map<Eigen::VectorXd>(dst.data(), dst.size()) =
      A_ * Eigen::Map<const Eigen::VectorXd>(src.data(), src.size());
  }

private:
  Eigen::MatrixXd A_;
};

const NeoHookeanParams matrix_params = NeoHookeanParams::from_poisson(0.4225e6, 0.3);
const MaterialTable    materials{matrix_params, matrix_params.scaled(100)};

double
log_slope(const std::vector<double> &e)
{
  // slope of log e_{k+1} against log e_k over the last three values
  const std::size_t n = e.size();
  return std::log(e[n - 1] / e[n - 2]) / std::log(e[n - 2] / e[n - 3]);
}

std::vector<double>
updates(const NewtonResult &r, unsigned step)
{
  std::vector<double> du;
  for (const auto &rec : r.log)
    if (rec.step == step && rec.update_norm > 0)
      du.push_back(rec.update_norm);
  return du;
}
} // namespace

TEST_CASE("conjugate gradients")
{
  SUBCASE("identity")
  {
    const DenseOperator I(Eigen::MatrixXd::Identity(7, 7));
    const Vector        b = random_vector(7, 1);
    Vector              x(7, 0.0);
    const auto          rep = cg(I, x, b, 1e-12);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(max_abs(difference(x, b)) < 1e-14);
  }
  SUBCASE("2x2")
  {
    Eigen::MatrixXd A(2, 2);
    A << 4, 1, 1, 3;
    const DenseOperator op(A);
    Vector              x(2, 0.0);
    const Vector        b{1, 2};
    const auto          rep = cg(op, x, b, 1e-14);
    CHECK(rep.iterations <= 2);
    CHECK(x[0] == doctest::Approx(1.0 / 11).epsilon(1e-13));
    CHECK(x[1] == doctest::Approx(7.0 / 11).epsilon(1e-13));
  }
  SUBCASE("k distinct eigenvalues")
  {
    Eigen::VectorXd d(30);
    for (int i = 0; i < 30; ++i)
      d[i] = 1 + i % 4;
    const DenseOperator op(d.asDiagonal().toDenseMatrix());
    Vector              x(30, 0.0);
    const auto          rep = cg(op, x, random_vector(30, 2), 1e-10);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 4);
  }
  SUBCASE("zero right hand side")
  {
    const DenseOperator I(Eigen::MatrixXd::Identity(3, 3));
    Vector              x(3, 0.0);
    const auto          rep = cg(I, x, Vector(3, 0.0), 1e-6);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
  }
  SUBCASE("indefinite")
  {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    A(1, 1)           = -1;
    const DenseOperator op(A);
    Vector              x(3, 0.0);
    CHECK_THROWS_AS(cg(op, x, Vector{0, 1, 0}, 1e-6), IndefiniteOperator);
  }
  SUBCASE("monotone error")
  {
    Eigen::VectorXd d(60);
    for (int i = 0; i < 60; ++i)
      d[i] = 1 + 99.0 * i / 59;
    const Eigen::MatrixXd A = d.asDiagonal().toDenseMatrix();
    const DenseOperator   op(A);
    const Vector          b = random_vector(60, 5);
    Vector                x(60, 0.0);
    const auto            rep = cg(op, x, b, 1e-10);
    const auto           &r   = rep.preconditioned_residuals;
    REQUIRE(r.size() > 10);
    for (std::size_t k = 5; k < r.size(); ++k)
      CHECK(r[k] < r[k - 5]);

    const Eigen::VectorXd x_star = A.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 60));
    double                last   = std::numeric_limits<double>::infinity();
    for (unsigned k = 1; k <= rep.iterations; ++k)
      {
        Vector xk(60, 0.0);
        cg(op, xk, b, 1e-10, nullptr, k);
        const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(xk.data(), 60) - x_star;
        const double          a = std::sqrt(e.dot(A * e));
        CHECK(a <= last);
        last = a;
      }
  }
}

TEST_CASE("Jacobi preconditioner")
{
  Eigen::VectorXd d(5);
  d << 1, 10, 100, 1000, 1e4;
  const DenseOperator          op(d.asDiagonal().toDenseMatrix());
  const Vector                 diag(d.data(), d.data() + 5);
  const DiagonalPreconditioner P(diag);
  Vector                       x(5, 0.0);
  const auto                   rep = cg(op, x, random_vector(5, 1), 1e-12, &P);
  CHECK(rep.iterations == 1);
}

TEST_CASE("settings")
{
  CHECK(parse_preconditioner("gmg") == PreconditionerType::gmg);
  CHECK(parse_preconditioner("diag") == PreconditionerType::diag);
  CHECK(parse_preconditioner("none") == PreconditionerType::none);
  CHECK_THROWS_AS(parse_preconditioner("amg"), ConfigError);
  for (auto p : {PreconditionerType::gmg, PreconditionerType::diag, PreconditionerType::none})
    CHECK(parse_preconditioner(to_string(p)) == p);

  NewtonSettings s;
  CHECK_NOTHROW(s.validate());
  s.update_tolerance = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("load fractions")
{
  const Point<2> t2 = apply_load_fraction<2>(5, 5, 12.5e3, Point<2>(1, 0));
  CHECK(t2[0] == doctest::Approx(12.5e3));
  CHECK(t2[1] == 0.0);
  const Point<2> half = apply_load_fraction<2>(2.5, 5, 12.5e3, Point<2>(2, 0));
  CHECK(half[0] == doctest::Approx(6.25e3));

  const Point<3> t3 = apply_load_fraction<3>(5, 5, 12.5e3 * std::sqrt(2.0), Point<3>(1, 1, 0));
  CHECK(t3[0] == doctest::Approx(12.5e3));
  CHECK(t3[1] == doctest::Approx(12.5e3));
  CHECK(t3[2] == 0.0);
}

TEST_CASE("Newton")
{
  SUBCASE("zero traction")
  {
    MeshHierarchy<2>      h(build_benchmark_mesh<2>(2, {}));
    MultigridHierarchy<2> mg(h, 1);
    const auto            r = newton_solve<2>(mg, materials, Point<2>::Zero(), NewtonSettings{});
    CHECK(r.converged);
    CHECK(r.total_cg_iterations() == 0);
    CHECK(max_abs(r.u) == 0.0);
  }

  SUBCASE("single element converges quadratically")
  {
    MeshHierarchy<2>      h(build_benchmark_mesh<2>(1, {}));
    MultigridHierarchy<2> mg(h, 1);
    NewtonSettings        s;
    s.load_steps       = 1;
    s.preconditioner   = PreconditionerType::none;
    s.linear_tolerance = 1e-12;
    const auto r       = newton_solve<2>(mg, materials, Point<2>(0, 0.2 * matrix_params.mu), s);
    REQUIRE(r.converged);
    const auto du = updates(r, 1);
    REQUIRE(du.size() >= 3);
    CHECK(log_slope(du) >= 1.7);
  }

  SUBCASE("benchmark")
  {
    const double              side = benchmark_domain_side;
    std::vector<Inclusion<2>> inc{{Point<2>(0.375 * side, 0.625 * side), 0.2 * side},
                                  {Point<2>(0.625 * side, 0.375 * side), 0.2 * side}};
    MeshHierarchy<2>          h(build_benchmark_mesh<2>(4, inc));
    h.refine_globally(1);
    MultigridHierarchy<2> mg(h, 2);
    const Point<2>        t = apply_load_fraction<2>(5, 5, 12.5e3, Point<2>(1, 0));

    const auto r = newton_solve<2>(mg, materials, t, NewtonSettings{});
    REQUIRE(r.converged);
    CHECK(r.bisections == 0);
    double best = 0;
    for (unsigned step = 1; step <= 5; ++step)
      {
        const auto du = updates(r, step);
        REQUIRE(du.size() >= 3);
        CHECK(du.size() <= 30);
        best = std::max(best, log_slope(du));
      }
    CHECK(best >= 1.7);

    // constrained dofs stay fixed
    const auto &constraints = mg.finest().constraints();
    for (std::size_t i = 0; i < r.u.size(); ++i)
      if (constraints.is_constrained(i))
        CHECK(r.u[i] == 0.0);

    const auto again = newton_solve<2>(mg, materials, t, NewtonSettings{});
    CHECK(again.u == r.u);
    REQUIRE(again.log.size() == r.log.size());
    for (std::size_t i = 0; i < r.log.size(); ++i)
      CHECK(again.log[i].cg_iterations == r.log[i].cg_iterations);
  }
}
