#include <doctest.h>
#include <hyperfree/bench.h>
#include <hyperfree/errors.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

using namespace hyperfree;

namespace
{
MetricsRecord
sample_record()
{
  MetricsRecord r;
  r.config.dim            = 3;
  r.config.p              = 4;
  r.config.refinements    = 0;
  r.config.strategy       = Strategy::tensor4;
  r.config.load_scale     = 0.1;
  r.kind                  = "mv";
  r.n_cells               = 64;
  r.n_dofs                = r.config.n_dofs();
  r.mv_seconds            = 1.0 / 3.0;
  r.mv_seconds_per_dof    = r.mv_seconds / r.n_dofs;
  r.flops_per_apply       = 123456789012ull;
  r.flops_per_dof         = 0.1 + 0.2;
  r.memory_bytes          = 4'100'000;
  r.cg_iterations_mean    = 7.25;
  r.cg_iterations_total   = 29;
  r.newton_iterations     = 17;
  r.solver_seconds        = std::nextafter(2.0, 3.0);
  r.converged             = true;
  r.config.q              = r.config.n_q_points_1d();
  return r;
}
} // namespace

TEST_CASE("format_double keeps 17 significant digits")
{
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(0) == "0");
  CHECK(format_double(1e300) == "1.0000000000000001e+300");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("results round trip through JSON")
{
  const std::vector<MetricsRecord> records{sample_record(), MetricsRecord{}};
  const auto                       parsed = parse_results_json(results_json(records));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0] == records[0]);
  CHECK(parsed[0].mv_seconds == records[0].mv_seconds);
  CHECK(parsed[0].solver_seconds == records[0].solver_seconds);
  CHECK(parsed[1].kind.empty());
  CHECK(results_json(parsed) == results_json(records));
  CHECK(parse_results_json(results_json({})).empty());
  CHECK_THROWS(parse_results_json("{not json"));
}

TEST_CASE("CSV layout")
{
  const auto columns = csv_columns();
  REQUIRE(columns.size() > 10);
  CHECK(columns.front() == "dim");

  std::string header;
  for (std::size_t i = 0; i < columns.size(); ++i)
    header += (i ? "," : "") + columns[i];
  CHECK(results_csv({}) == header + "\n");

  const std::string csv = results_csv({sample_record()});
  CHECK(csv.rfind(header + "\n", 0) == 0);
  const std::string row = csv.substr(header.size() + 1);
  CHECK(std::count(row.begin(), row.end(), ',') == static_cast<long>(columns.size()) - 1);
  CHECK(row.find("0.33333333333333331") != std::string::npos);
  CHECK(row.find("tensor4") != std::string::npos);
  CHECK(row.back() == '\n');
}

TEST_CASE("presets")
{
  const auto names = preset_names();
  CHECK(names.size() == 12);
  for (const auto &name : names)
    {
      const RunConfig c = preset(name);
      CHECK_NOTHROW(c.validate());
      CHECK(name == std::to_string(c.dim) + "d-p" + std::to_string(c.p));
    }
  CHECK_THROWS_AS(preset("2d-p9"), ConfigError);

  RunConfig c = preset("2d-p2");
  CHECK(c.refinements == 4);
  CHECK(c.n_cells() == 64 * 64);
  CHECK(c.n_dofs() == 2 * 129 * 129);
  c = preset("3d-p4");
  CHECK(c.n_cells() == 64);
  CHECK(c.n_dofs() == 3 * 17 * 17 * 17);
}

TEST_CASE("configuration JSON")
{
  RunConfig c;
  apply_config_json(c, R"({"preset": "3d-p2", "strategy": "matrix_based", "seed": 7, "timings": false})");
  CHECK(c.dim == 3);
  CHECK(c.p == 2);
  CHECK(c.refinements == 1);
  CHECK(c.strategy == Strategy::matrix_based);
  CHECK(c.seed == 7);
  CHECK_FALSE(c.timings);

  // explicit keys win over the preset regardless of order
  apply_config_json(c, R"({"p": 3, "preset": "2d-p1"})");
  CHECK(c.dim == 2);
  CHECK(c.p == 3);

  RunConfig d;
  CHECK_THROWS_AS(apply_config_json(d, R"({"polynomial_degree": 2})"), ConfigError);
  CHECK_THROWS_AS(apply_config_json(d, R"({"p": "two"})"), ConfigError);
  CHECK_THROWS_AS(apply_config_json(d, R"({"p": -1})"), ConfigError);
  CHECK_THROWS_AS(apply_config_json(d, R"({"strategy": "sparse"})"), ConfigError);
  CHECK_THROWS_AS(apply_config_json(d, R"([1, 2])"), ConfigError);
  CHECK_THROWS_AS(apply_config_json(d, "{"), ConfigError);

  RunConfig e;
  e.p = 3;
  e.q = 3;
  CHECK_THROWS_AS(e.validate(), ConfigError);
  e.reduced_quadrature = true;
  CHECK_NOTHROW(e.validate());

  RunConfig f;
  f.load_scale = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(f.validate(), ConfigError);
  f            = RunConfig{};
  f.load_steps = 0;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  f             = RunConfig{};
  f.refinements = 9;
  CHECK_THROWS_AS(f.validate(), ConfigError);

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("emit_results reports I/O failures")
{
  CHECK_THROWS_AS(emit_results({}, "/nonexistent/dir/out.csv", "csv"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/log.csv", "x"), IoError);

  const auto path = std::filesystem::temp_directory_path() / "hyperfree_test_results.json";
  emit_results({sample_record()}, path.string(), "json");
  CHECK(std::filesystem::exists(path));
  std::filesystem::remove(path);
}

TEST_CASE("matrix-vector benchmark")
{
  RunConfig c;
  c.refinements = 0;
  c.timings     = false;

  SUBCASE("deterministic without timings")
  {
    const auto a = run_mv_benchmark(c);
    const auto b = run_mv_benchmark(c);
    CHECK(a == b);
    CHECK(a.mv_seconds == 0);
    CHECK(a.flops_per_apply > 0);
    CHECK(a.n_dofs == c.n_dofs());
    CHECK(a.flops_per_dof == doctest::Approx(double(a.flops_per_apply) / a.n_dofs));
  }

  SUBCASE("matrix-free storage below the assembled matrix")
  {
    for (const unsigned p : {2u, 3u})
      {
        c.p                = p;
        c.strategy         = Strategy::tensor4;
        const auto free    = run_mv_benchmark(c);
        c.strategy         = Strategy::matrix_based;
        const auto matrix  = run_mv_benchmark(c);
        CHECK(free.memory_bytes < matrix.memory_bytes);
      }
  }

  SUBCASE("FLOPs per DoF grow faster for the assembled matrix")
  {
    auto per_dof = [&](const Strategy s, const unsigned p) {
      c.strategy = s;
      c.p        = p;
      return run_mv_benchmark(c).flops_per_dof;
    };
    const double free_growth   = per_dof(Strategy::tensor2, 4) / per_dof(Strategy::tensor2, 2);
    const double matrix_growth = per_dof(Strategy::matrix_based, 4) / per_dof(Strategy::matrix_based, 2);
    CHECK(matrix_growth > free_growth);
  }
}
