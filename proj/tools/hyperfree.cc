#include <hyperfree/bench.h>
#include <hyperfree/errors.h>
#include <hyperfree/verify.h>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace hyperfree;

namespace
{
enum ExitCode
{
  ok            = 0,
  checks_failed = 1,
  config_error  = 2,
  solver_error  = 3,
  io_error      = 4
};

struct Overrides
{
  std::string                 config_path;
  std::optional<std::string>  preset_name;
  std::optional<int>          dim;
  std::optional<unsigned>     p, q, refinements, load_steps;
  std::optional<std::string>  strategy, preconditioner, material, load, out, format;
  std::optional<std::uint64_t> seed;
  std::optional<double>        load_scale;
  bool                        no_timings = false, reduced_quadrature = false;
};

void
add_run_options(CLI::App *cmd, Overrides &o)
{
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--preset", o.preset_name, "named configuration, see `hyperfree presets`");
  cmd->add_option("--dim", o.dim, "2 or 3");
  cmd->add_option("--p", o.p, "polynomial degree");
  cmd->add_option("--q", o.q, "1D quadrature points (default p + 1)");
  cmd->add_flag("--reduced-quadrature", o.reduced_quadrature, "allow q < p + 1");
  cmd->add_option("--refinements", o.refinements, "global refinements of the 4^dim coarse grid");
  cmd->add_option("--strategy", o.strategy, "scalar, tensor2, tensor4, matrix_based (bench-mv also: all)");
  cmd->add_option("--preconditioner", o.preconditioner, "gmg, diag or none");
  cmd->add_option("--material", o.material, "benchmark or homogeneous");
  cmd->add_option("--load", o.load, "benchmark, small or none");
  cmd->add_option("--load-scale", o.load_scale, "multiplier on the load preset");
  cmd->add_option("--load-steps", o.load_steps, "number of load increments");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output file (default: CSV on stdout)");
  cmd->add_option("--format", o.format, "csv or json (default from the file extension)");
  cmd->add_flag("--no-timings", o.no_timings, "write zero for all wall-clock fields");
}

RunConfig
resolve(const Overrides &o, bool allow_all_strategies)
{
  RunConfig c;
  if (!o.config_path.empty())
    c = load_config(o.config_path);
  if (o.preset_name)
    {
      const RunConfig from_file = c;
      c                         = preset(*o.preset_name);
      c.output                  = from_file.output;
      c.format                  = from_file.format;
    }
  if (o.dim)
    c.dim = *o.dim;
  if (o.p)
    c.p = *o.p;
  if (o.q)
    c.q = *o.q;
  if (o.reduced_quadrature)
    c.reduced_quadrature = true;
  if (o.refinements)
    c.refinements = *o.refinements;
  if (o.strategy && !(allow_all_strategies && *o.strategy == "all"))
    c.strategy = parse_strategy(*o.strategy);
  if (o.preconditioner)
    c.preconditioner = parse_preconditioner(*o.preconditioner);
  if (o.material)
    c.material = *o.material;
  if (o.load)
    c.load = *o.load;
  if (o.load_scale)
    c.load_scale = *o.load_scale;
  if (o.load_steps)
    c.load_steps = *o.load_steps;
  if (o.seed)
    c.seed = *o.seed;
  if (o.out)
    c.output = *o.out;
  if (o.format)
    c.format = *o.format;
  if (o.no_timings)
    c.timings = false;
  c.validate();
  return c;
}

std::string
output_format(const RunConfig &c)
{
  if (!c.format.empty())
    return c.format;
  const auto &path = c.output;
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
    return "json";
  return "csv";
}

void
write_records(const std::vector<MetricsRecord> &records, const RunConfig &c)
{
  const std::string format = output_format(c);
  if (c.output.empty())
    std::cout << (format == "json" ? results_json(records) : results_csv(records));
  else
    emit_results(records, c.output, format);
}

int
bench_mv(const Overrides &o)
{
  RunConfig                  c = resolve(o, true);
  std::vector<MetricsRecord> records;
  if (o.strategy && *o.strategy == "all")
    for (const auto s : {Strategy::scalar, Strategy::tensor2, Strategy::tensor4, Strategy::matrix_based})
      {
        c.strategy = s;
        records.push_back(run_mv_benchmark(c));
      }
  else
    records.push_back(run_mv_benchmark(c));
  write_records(records, c);
  return ok;
}

int
solve(const Overrides &o, const std::string &log_path)
{
  const RunConfig c   = resolve(o, false);
  const auto      run = run_solver_benchmark(c);
  write_records({run.record}, c);
  if (!log_path.empty())
    write_text_file(log_path, newton_log_csv(run.result, c.timings));
  return ok;
}

int
verify(const std::vector<unsigned> &groups, const std::string &out)
{
  std::vector<CheckResult> all;
  bool                     passed = true;
  for (const unsigned g : groups.empty() ? verification_groups() : groups)
    {
      const auto checks = run_checks(g);
      bool       group_ok = true;
      for (const auto &c : checks)
        group_ok = group_ok && c.pass;
      std::cerr << (group_ok ? "pass " : "FAIL ") << g << ' ' << group_title(g) << '\n';
      passed = passed && group_ok;
      all.insert(all.end(), checks.begin(), checks.end());
    }
  if (out.empty())
    std::cout << checks_csv(all);
  else
    write_text_file(out, checks_csv(all));
  return passed ? ok : checks_failed;
}
} // namespace

int
main(int argc, char **argv)
{
  CLI::App app{"Matrix-free finite-strain elasticity benchmarks"};
  app.require_subcommand(1);

  Overrides mv_options, solve_options;
  auto     *mv_cmd = app.add_subcommand("bench-mv", "time tangent operator applications");
  add_run_options(mv_cmd, mv_options);

  std::string log_path;
  auto       *solve_cmd = app.add_subcommand("solve", "incremental Newton solve of the benchmark");
  add_run_options(solve_cmd, solve_options);
  solve_cmd->add_option("--log", log_path, "per-iteration Newton history (CSV)");

  std::vector<unsigned> groups;
  std::string           verify_out;
  auto                 *verify_cmd = app.add_subcommand("verify", "run the oracle and invariant checks");
  verify_cmd->add_option("--group", groups, "check groups to run (default: all)");
  verify_cmd->add_option("--out", verify_out, "CSV output file (default: stdout)");

  auto *presets_cmd = app.add_subcommand("presets", "list named configurations");

  try
    {
      app.parse(argc, argv);
    }
  catch (const CLI::ParseError &e)
    {
      const int code = app.exit(e);
      return code == 0 ? ok : config_error;
    }

  try
    {
      if (*mv_cmd)
        return bench_mv(mv_options);
      if (*solve_cmd)
        return solve(solve_options, log_path);
      if (*verify_cmd)
        return verify(groups, verify_out);
      if (*presets_cmd)
        {
          for (const auto &name : preset_names())
            {
              const auto c = preset(name);
              std::cout << name << "  dim " << c.dim << "  p " << c.p << "  refinements " << c.refinements
                        << "  dofs " << c.n_dofs() << '\n';
            }
          return ok;
        }
    }
  catch (const ConfigError &e)
    {
      std::cerr << "configuration error: " << e.what() << '\n';
      return config_error;
    }
  catch (const IoError &e)
    {
      std::cerr << "I/O error: " << e.what() << '\n';
      return io_error;
    }
  catch (const SolverFailure &e)
    {
      std::cerr << "solver failure: " << e.what() << '\n';
      return solver_error;
    }
  catch (const NonPositiveJacobian &e)
    {
      std::cerr << "solver failure: " << e.what() << '\n';
      return solver_error;
    }
  catch (const IndefiniteOperator &e)
    {
      std::cerr << "solver failure: " << e.what() << '\n';
      return solver_error;
    }
  return ok;
}
