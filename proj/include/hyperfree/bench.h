#pragma once

#include <hyperfree/mesh.h>
#include <hyperfree/operators.h>
#include <hyperfree/solver.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hyperfree
{
/// Coarse cells per side of the benchmark grid.
inline constexpr unsigned benchmark_coarse_cells = 4;

/// Full traction magnitude of the benchmark load (force per reference area).
inline constexpr double benchmark_traction = 12.5e3;

/**
 * Two stiff inclusions on the diagonal of the unit cell, radius 0.2 side.
 * In 3D they are spheres in the mid plane z = side / 2.
 */
template <int dim>
std::vector<Inclusion<dim>> benchmark_inclusions(double side = benchmark_domain_side);

/// "benchmark" (nu = 0.3, mu = 0.4225e6, inclusion 100 times stiffer) or
/// "homogeneous" (matrix material everywhere).
MaterialTable material_preset(std::string_view name);

/// Full traction of a load preset: "benchmark" is 12.5e3 along (1, 0) in 2D
/// and 12.5e3 sqrt(2) along (1, 1, 0) in 3D, "small" is 1% of it and
/// "none" is zero.
template <int dim>
Point<dim> load_preset(std::string_view name);

struct RunConfig
{
  int                dim                = 2;
  unsigned           p                  = 2;
  unsigned           q                  = 0; // 0 selects p + 1
  bool               reduced_quadrature = false;
  unsigned           refinements        = 1;
  Strategy           strategy           = Strategy::tensor2;
  PreconditionerType preconditioner     = PreconditionerType::gmg;
  std::string        material           = "benchmark";
  std::string        load               = "benchmark";
  double             load_scale         = 1; // multiplies the load preset
  unsigned           load_steps         = 5;
  std::uint64_t      seed               = 42;
  bool               timings            = true;
  std::string        output;
  std::string        format; // csv or json, empty picks by extension

  unsigned    n_q_points_1d() const { return q == 0 ? p + 1 : q; }
  std::size_t n_cells() const;
  std::size_t n_dofs() const; // dim (m p + 1)^dim, m cells per side

  /// Throws ConfigError.
  void validate() const;
};

/// Named configurations. "2d-p1" ... "2d-p8" and "3d-p1" ... "3d-p4" keep
/// the degree/refinement pairing of the large sweep at desk size.
RunConfig              preset(std::string_view name);
std::vector<std::string> preset_names();

/**
 * Applies a JSON object to `config`. A "preset" key is applied first, then
 * the remaining keys. Unknown keys and bad values throw ConfigError.
 */
void      apply_config_json(RunConfig &config, std::string_view json_text);
RunConfig load_config(const std::string &path); // IoError if unreadable

struct MetricsRecord
{
  RunConfig     config;
  std::string   kind; // mv or solve
  std::size_t   n_cells                = 0;
  std::size_t   n_dofs                 = 0;
  double        mv_seconds             = 0; // mean of 10 applies
  double        mv_seconds_per_dof     = 0;
  std::uint64_t flops_per_apply        = 0;
  double        flops_per_dof          = 0;
  std::size_t   memory_bytes           = 0;
  double        cg_iterations_mean     = 0;
  unsigned      cg_iterations_total    = 0;
  unsigned      newton_iterations      = 0;
  double        solver_seconds         = 0;
  double        solver_seconds_per_dof = 0;
  bool          converged              = false;
};

bool operator==(const MetricsRecord &a, const MetricsRecord &b);

/**
 * Builds the tangent of config.strategy at the first Newton iterate of load
 * step 1 and times 10 applications to a seeded random vector. FLOPs are
 * counted for one apply.
 */
MetricsRecord run_mv_benchmark(const RunConfig &config);

struct SolverRun
{
  MetricsRecord record;
  NewtonResult  result;
};

/// Full incremental Newton solve. Throws SolverFailure when it does not
/// converge.
SolverRun run_solver_benchmark(const RunConfig &config);

/// Column names of the CSV output, config fields first.
std::vector<std::string> csv_columns();

std::string results_csv(const std::vector<MetricsRecord> &records);
std::string results_json(const std::vector<MetricsRecord> &records);
std::vector<MetricsRecord> parse_results_json(std::string_view text);

/// Writes csv or json; throws IoError.
void emit_results(const std::vector<MetricsRecord> &records, const std::string &path, std::string_view format);

/// Per-iteration Newton history as CSV. Without timings the time columns
/// are written as zero.
std::string newton_log_csv(const NewtonResult &result, bool timings);

/// 17 significant digits.
std::string format_double(double value);

void write_text_file(const std::string &path, std::string_view text);

} // namespace hyperfree
