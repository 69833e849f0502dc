#include <doctest.h>
#include <hyperfree/multigrid.h>

#include <Eigen/Eigenvalues>

#include <cmath>

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
  const Eigen::MatrixXd &matrix() const { return A_; }

private:
  Eigen::MatrixXd A_;
};

Eigen::MatrixXd
laplacian_1d(int n)
{
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    {
      A(i, i) = 2;
      if (i > 0)
        A(i, i - 1) = A(i - 1, i) = -1;
    }
  return A;
}

Eigen::MatrixXd
random_spd(int n, unsigned seed)
{
  const Vector    v = random_vector(n * n, seed);
  Eigen::MatrixXd B = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
  return B * B.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

const MaterialTable materials{NeoHookeanParams::from_poisson(0.4225e6, 0.3),
                              NeoHookeanParams::from_poisson(0.4225e6, 0.3).scaled(100)};

template <int dim>
MeshHierarchy<dim>
hierarchy(unsigned n, unsigned refinements)
{
  const double       s = benchmark_domain_side;
  Inclusion<dim>     inc{Point<dim>::Constant(0.4 * s), 0.3 * s};
  MeshHierarchy<dim> h(build_benchmark_mesh<dim>(n, std::span(&inc, 1)));
  h.refine_globally(refinements);
  return h;
}

Vector
apply_op(const LinearOperator &op, const Vector &x)
{
  Vector y(op.size());
  op.vmult(y, x);
  return y;
}
} // namespace

TEST_CASE("eigenvalue estimates")
{
  const DenseOperator I(Eigen::MatrixXd::Identity(20, 20));
  CHECK(std::abs(estimate_eigenvalues(I, {}, 30).max - 1.0) < 1e-10);

  Eigen::VectorXd d(100);
  for (int i = 0; i < 100; ++i)
    d[i] = i + 1;
  const DenseOperator D(d.asDiagonal().toDenseMatrix());
  const double        lmax = estimate_eigenvalues(D, {}, 30).max;
  CHECK(lmax > 95.0);
  CHECK(lmax <= 100.0 * (1 + 1e-12));

  for (unsigned seed = 0; seed < 5; ++seed)
    {
      const DenseOperator A(random_spd(12, seed));
      const double        true_max = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.matrix()).eigenvalues().maxCoeff();
      const auto          est      = estimate_eigenvalues(A, {}, 30, {}, seed);
      CHECK(est.max <= true_max * (1 + 1e-10));
      CHECK(est.max > 0.9 * true_max);
      CHECK(est.iterations <= 12);
      CHECK(est.min >= Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.matrix()).eigenvalues().minCoeff() * (1 - 1e-10));
    }

  // with a diagonal preconditioner the estimate is for D^-1 A
  const DenseOperator A(random_spd(10, 9));
  Vector              inv(10);
  for (int i = 0; i < 10; ++i)
    inv[i] = 1.0 / A.matrix()(i, i);
  const Eigen::MatrixXd DA = Eigen::Map<const Eigen::VectorXd>(inv.data(), 10).asDiagonal() * A.matrix();
  const double true_max    = DA.eigenvalues().real().maxCoeff();
  CHECK(std::abs(estimate_eigenvalues(A, inv, 30).max - true_max) < 1e-8 * true_max);
}

TEST_CASE("Chebyshev smoother")
{
  SUBCASE("fixed point")
  {
    const DenseOperator A(laplacian_1d(16));
    const ChebyshevSmoother S(A, Vector(16, 0.5), 0.6 * 4, 1.2 * 4, 4);
    const Vector x_star = random_vector(16, 3);
    Vector       x      = x_star;
    S.step(x, apply_op(A, x_star));
    CHECK(max_abs(difference(x, x_star)) < 1e-12);
  }
  SUBCASE("identity against the scalar recurrence")
  {
    const DenseOperator     I(Eigen::MatrixXd::Identity(8, 8));
    const ChebyshevSmoother S(I, Vector(8, 1.0), 0.6, 1.2, 4);
    const Vector            b = random_vector(8, 5);
    Vector                  x(8);
    S.step(x, b, true);
    // x = (1 - p(1)) b with |p(1)| bounded by 1 / T_4(3)
    const double bound = chebyshev_bound(0.6, 1.2, 4);
    CHECK(std::abs(bound - 1.0 / 577.0) < 1e-15);
    CHECK(max_abs(difference(x, b)) <= bound * max_abs(b) * (1 + 1e-12));
  }
  SUBCASE("damps high frequencies of the 1D Laplacian")
  {
    const int           n = 16;
    const DenseOperator A(laplacian_1d(n));
    Vector              inv(n, 0.5);
    const double        lmax = estimate_eigenvalues(A, inv, 30).max;
    const ChebyshevSmoother S(A, inv, 0.6 * lmax, 1.2 * lmax, 4);

    auto damping = [&](int k) {
      Vector e(n);
      for (int i = 0; i < n; ++i)
        e[i] = std::sin(M_PI * k * (i + 1) / (n + 1));
      Vector x = e, zero(n, 0.0);
      S.step(x, zero); // error propagation on e
      return norm(x) / norm(e);
    };
    const double low = damping(1);
    for (int k = 9; k <= n; ++k)
      CHECK(damping(k) * 10 <= low);
  }
}

TEST_CASE("transfer operators")
{
  const auto               meshes = hierarchy<2>(2, 2);
  const MultigridHierarchy<2> mg(meshes, 3);
  for (unsigned l = 1; l < mg.n_levels(); ++l)
    {
      const auto &P = mg.prolongation(l);
      for (std::uint64_t t = 0; t < 20; ++t)
        {
          const Vector x = random_vector(P.n_columns(), t), y = random_vector(P.n_rows(), 50 + t);
          Vector       Px(P.n_rows()), Ry(P.n_columns());
          P.vmult(Px, x);
          P.Tvmult(Ry, y);
          CHECK(std::abs(dot(Px, y) - dot(x, Ry)) < 1e-12 * norm(x) * norm(y) * 10);
        }

      // degree-3 polynomials are reproduced exactly
      auto         f = [](const Point<2> &p) {
        const double x = p[0] * 1e3, y = p[1] * 1e3;
        return Point<2>(1 + x * x * x - 2 * x * y * y, y * y * y + x * x * y - 3 * x);
      };
      const Vector coarse = mg.space(l - 1).interpolate(f), fine = mg.space(l).interpolate(f);
      Vector       Pc(fine.size());
      P.vmult(Pc, coarse);
      CHECK(max_abs(difference(Pc, fine)) < 1e-12 * max_abs(fine));
    }

  const auto               meshes3 = hierarchy<3>(2, 1);
  const MultigridHierarchy<3> mg3(meshes3, 2);
  auto         f3     = [](const Point<3> &p) {
    const Point<3> x = p * 1e3;
    return Point<3>(x[0] * x[1], x[2] * x[2] - x[0], 1 + x[1] * x[2] * x[0]);
  };
  const Vector coarse = mg3.space(0).interpolate(f3), fine = mg3.space(1).interpolate(f3);
  Vector       Pc(fine.size());
  mg3.prolongation(1).vmult(Pc, coarse);
  CHECK(max_abs(difference(Pc, fine)) < 1e-12 * max_abs(fine));
}

TEST_CASE("displacement restriction")
{
  const auto                  meshes = hierarchy<2>(2, 2);
  const MultigridHierarchy<2> mg(meshes, 2);

  const auto zero = mg.restrict_solution(Vector(mg.finest().n_dofs(), 0.0));
  for (const auto &v : zero)
    CHECK(max_abs(v) == 0.0);

  auto         linear = [](const Point<2> &p) { return Point<2>(0.01 * p[1], -0.02 * p[1] + 0.0 * p[0]); };
  const auto   levels = mg.restrict_solution(mg.finest().interpolate(linear));
  for (unsigned l = 0; l < mg.n_levels(); ++l)
    CHECK(max_abs(difference(levels[l], mg.space(l).interpolate(linear))) < 1e-18);

  Vector u = random_vector(mg.finest().n_dofs(), 4);
  mg.finest().constraints().set_zero(u);
  const auto random_levels = mg.restrict_solution(u);
  CHECK(random_levels.back() == u);
  for (unsigned l = 1; l < mg.n_levels(); ++l)
    {
      const auto cx = mg.space(l - 1).node_coordinates(), fx = mg.space(l).node_coordinates();
      for (std::size_t cn = 0; cn < cx.size(); ++cn)
        {
          // brute-force coordinate search for the coincident fine node
          std::size_t match = fx.size();
          for (std::size_t fn = 0; fn < fx.size(); ++fn)
            if ((fx[fn] - cx[cn]).norm() < 1e-12 * benchmark_domain_side)
              match = fn;
          REQUIRE(match < fx.size());
          for (unsigned c = 0; c < 2; ++c)
            CHECK(random_levels[l - 1][mg.space(l - 1).dofs().dof(cn, c)] ==
                  random_levels[l][mg.space(l).dofs().dof(match, c)]);
        }
    }
}

TEST_CASE("V-cycle")
{
  const auto                  meshes = hierarchy<2>(2, 2);
  const MultigridHierarchy<2> mg(meshes, 2);
  Vector                      u = random_vector(mg.finest().n_dofs(), 7);
  for (auto &v : u)
    v *= 0.002 * benchmark_domain_side;
  mg.finest().constraints().set_zero(u);

  for (const Strategy s : {Strategy::tensor2, Strategy::matrix_based})
    {
      const auto fine = make_tangent_operator<2>(mg.finest(), materials, s, u);
      const MultigridPreconditioner<2> V(mg, materials, s, u, *fine);

      CHECK(&V.level_operator(mg.n_levels() - 1) == fine.get());
      CHECK(V.coarse_probe_reduction() <= 1e-3);
      for (unsigned l = 1; l < mg.n_levels(); ++l)
        {
          CHECK(V.smoother(l).degree() == 4);
          CHECK(V.smoother(l).lower() == doctest::Approx(0.6 * V.lambda_max(l)));
          CHECK(V.smoother(l).upper() == doctest::Approx(1.2 * V.lambda_max(l)));
        }

      const Vector zero(V.size(), 0.0);
      CHECK(max_abs(apply_op(V, zero)) == 0.0);

      const Vector b1 = random_vector(V.size(), 1), b2 = random_vector(V.size(), 2);
      const double lhs = dot(apply_op(V, b1), b2), rhs = dot(b1, apply_op(V, b2));
      CHECK(std::abs(lhs - rhs) <= 1e-8 * norm(b1) * norm(b2));
      // linear
      Vector b12 = b1;
      axpy(2.0, b2, b12);
      Vector lin = apply_op(V, b1);
      axpy(2.0, apply_op(V, b2), lin);
      CHECK(norm(difference(apply_op(V, b12), lin)) < 1e-10 * norm(lin));
    }

  // level operators at rest are the small-strain stiffness of each level
  const Vector rest(mg.finest().n_dofs(), 0.0);
  const auto   fine = make_tangent_operator<2>(mg.finest(), materials, Strategy::tensor4, rest);
  const MultigridPreconditioner<2> V(mg, materials, Strategy::tensor4, rest, *fine);
  for (unsigned l = 0; l + 1 < mg.n_levels(); ++l)
    {
      const AssembledTangent<2> K(mg.space(l), materials, Vector(mg.space(l).n_dofs(), 0.0));
      const Vector              x = random_vector(mg.space(l).n_dofs(), l);
      CHECK(norm(difference(apply_op(V.level_operator(l), x), apply_op(K, x))) < 1e-10 * norm(apply_op(K, x)));
    }
}

TEST_CASE("single level hierarchy is the coarse solve")
{
  const auto                  meshes = hierarchy<2>(3, 0);
  const MultigridHierarchy<2> mg(meshes, 2);
  const Vector                rest(mg.finest().n_dofs(), 0.0);
  const auto                  fine = make_tangent_operator<2>(mg.finest(), materials, Strategy::tensor2, rest);
  const MultigridPreconditioner<2> V(mg, materials, Strategy::tensor2, rest, *fine);

  Vector b = random_vector(V.size(), 3);
  mg.finest().constraints().set_zero(b);
  Vector z = apply_op(V, b), expected(V.size());
  V.coarse_solve(expected, b);
  CHECK(z == expected);
  CHECK(norm(difference(b, apply_op(*fine, z))) <= 1e-3 * norm(b));
}

TEST_CASE("coarse solve on small dense systems")
{
  for (unsigned seed = 0; seed < 3; ++seed)
    {
      const DenseOperator A(random_spd(15, seed));
      Vector              inv(15);
      for (int i = 0; i < 15; ++i)
        inv[i] = 1.0 / A.matrix()(i, i);
      const auto est = estimate_eigenvalues(A, inv, 15);
      unsigned   degree = 1;
      while (chebyshev_bound(0.9 * est.min, 1.2 * est.max, degree) > 1e-3)
        ++degree;
      const ChebyshevSmoother S(A, inv, 0.9 * est.min, 1.2 * est.max, degree);
      const Vector            b = random_vector(15, 100 + seed);
      Vector                  x(15);
      S.step(x, b, true);
      // against a direct solve
      const Eigen::VectorXd exact = A.matrix().ldlt().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 15));
      const Eigen::VectorXd xe    = Eigen::Map<const Eigen::VectorXd>(x.data(), 15);
      CHECK((A.matrix() * (xe - exact)).norm() <= 1e-3 * norm(b) * std::sqrt(A.matrix().diagonal().maxCoeff() / A.matrix().diagonal().minCoeff()));
    }

  // identity: one application solves it
  const DenseOperator I(Eigen::MatrixXd::Identity(6, 6));
  const ChebyshevSmoother S(I, Vector(6, 1.0), 0.9, 1.2, 3);
  const Vector            b = random_vector(6, 1);
  Vector                  x(6);
  S.step(x, b, true);
  CHECK(norm(difference(x, b)) <= 1e-3 * norm(b));
}
