#include <hyperfree/bench.h>
#include <hyperfree/errors.h>
#include <hyperfree/flops.h>
#include <hyperfree/multigrid.h>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hyperfree
{
namespace
{
using json  = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double
seconds_since(const Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct PresetEntry
{
  const char *name;
  int         dim;
  unsigned    p;
  unsigned    refinements;
};

// Degree/refinement pairs of the large 2D and 3D sweeps, two refinements
// fewer so that every case stays below 10^5 DoFs.
constexpr PresetEntry presets[] = {
  {"2d-p1", 2, 1, 5}, {"2d-p2", 2, 2, 4}, {"2d-p3", 2, 3, 3}, {"2d-p4", 2, 4, 3},
  {"2d-p5", 2, 5, 3}, {"2d-p6", 2, 6, 2}, {"2d-p7", 2, 7, 2}, {"2d-p8", 2, 8, 2},
  {"3d-p1", 3, 1, 2}, {"3d-p2", 3, 2, 1}, {"3d-p3", 3, 3, 0}, {"3d-p4", 3, 4, 0},
};

unsigned
get_unsigned(const json &j, const std::string &key)
{
  if (!j.is_number_unsigned())
    throw ConfigError("config: '" + key + "' must be a non-negative integer");
  return j.get<unsigned>();
}

std::string
get_string(const json &j, const std::string &key)
{
  if (!j.is_string())
    throw ConfigError("config: '" + key + "' must be a string");
  return j.get<std::string>();
}

bool
get_bool(const json &j, const std::string &key)
{
  if (!j.is_boolean())
    throw ConfigError("config: '" + key + "' must be true or false");
  return j.get<bool>();
}

json
record_json(const MetricsRecord &r)
{
  const auto &c = r.config;
  json        j;
  j["dim"]                    = c.dim;
  j["p"]                      = c.p;
  j["q"]                      = c.n_q_points_1d();
  j["refinements"]            = c.refinements;
  j["strategy"]               = std::string(to_string(c.strategy));
  j["preconditioner"]         = std::string(to_string(c.preconditioner));
  j["material"]               = c.material;
  j["load"]                   = c.load;
  j["load_scale"]             = c.load_scale;
  j["load_steps"]             = c.load_steps;
  j["seed"]                   = c.seed;
  j["kind"]                   = r.kind;
  j["n_cells"]                = r.n_cells;
  j["n_dofs"]                 = r.n_dofs;
  j["mv_seconds"]             = r.mv_seconds;
  j["mv_seconds_per_dof"]     = r.mv_seconds_per_dof;
  j["flops_per_apply"]        = r.flops_per_apply;
  j["flops_per_dof"]          = r.flops_per_dof;
  j["memory_bytes"]           = r.memory_bytes;
  j["cg_iterations_mean"]     = r.cg_iterations_mean;
  j["cg_iterations_total"]    = r.cg_iterations_total;
  j["newton_iterations"]      = r.newton_iterations;
  j["solver_seconds"]         = r.solver_seconds;
  j["solver_seconds_per_dof"] = r.solver_seconds_per_dof;
  j["converged"]              = r.converged;
  return j;
}

MetricsRecord
record_from_json(const json &j)
{
  MetricsRecord r;
  auto         &c          = r.config;
  c.dim                    = j.at("dim").get<int>();
  c.p                      = j.at("p").get<unsigned>();
  c.q                      = j.at("q").get<unsigned>();
  c.refinements            = j.at("refinements").get<unsigned>();
  c.strategy               = parse_strategy(j.at("strategy").get<std::string>());
  c.preconditioner         = parse_preconditioner(j.at("preconditioner").get<std::string>());
  c.material               = j.at("material").get<std::string>();
  c.load                   = j.at("load").get<std::string>();
  c.load_scale             = j.at("load_scale").get<double>();
  c.load_steps             = j.at("load_steps").get<unsigned>();
  c.seed                   = j.at("seed").get<std::uint64_t>();
  r.kind                   = j.at("kind").get<std::string>();
  r.n_cells                = j.at("n_cells").get<std::size_t>();
  r.n_dofs                 = j.at("n_dofs").get<std::size_t>();
  r.mv_seconds             = j.at("mv_seconds").get<double>();
  r.mv_seconds_per_dof     = j.at("mv_seconds_per_dof").get<double>();
  r.flops_per_apply        = j.at("flops_per_apply").get<std::uint64_t>();
  r.flops_per_dof          = j.at("flops_per_dof").get<double>();
  r.memory_bytes           = j.at("memory_bytes").get<std::size_t>();
  r.cg_iterations_mean     = j.at("cg_iterations_mean").get<double>();
  r.cg_iterations_total    = j.at("cg_iterations_total").get<unsigned>();
  r.newton_iterations      = j.at("newton_iterations").get<unsigned>();
  r.solver_seconds         = j.at("solver_seconds").get<double>();
  r.solver_seconds_per_dof = j.at("solver_seconds_per_dof").get<double>();
  r.converged              = j.at("converged").get<bool>();
  return r;
}

template <int dim>
MeshHierarchy<dim>
benchmark_hierarchy(const RunConfig &config)
{
  const auto         inclusions = benchmark_inclusions<dim>();
  MeshHierarchy<dim> meshes(build_benchmark_mesh<dim>(benchmark_coarse_cells, inclusions));
  meshes.refine_globally(config.refinements);
  return meshes;
}

NewtonSettings
newton_settings(const RunConfig &config)
{
  NewtonSettings s;
  s.load_steps     = config.load_steps;
  s.strategy       = config.strategy;
  s.preconditioner = config.preconditioner;
  s.multigrid.seed = config.seed;
  return s;
}

// First Newton update of load step 1 from the undeformed state.
template <int dim>
Vector
first_newton_iterate(const MultigridHierarchy<dim> &mg, const MaterialTable &materials, const RunConfig &config)
{
  const auto  &space    = mg.finest();
  const Vector zero(space.n_dofs(), 0.0);
  const auto   traction = (config.load_scale / config.load_steps) * load_preset<dim>(config.load);
  Vector       rhs      = compute_residual<dim>(space, materials, zero, traction);
  for (auto &f : rhs)
    f = -f;
  const MatrixFreeTangent<dim>       A(space, materials, Strategy::tensor2, zero);
  MultigridSettings                  ms;
  ms.seed = config.seed;
  const MultigridPreconditioner<dim> P(mg, materials, Strategy::tensor2, zero, A, ms);
  Vector                             u(space.n_dofs(), 0.0);
  const auto                         report = cg(A, u, rhs, 1e-6, &P);
  if (!report.converged)
    throw SolverFailure("CG did not converge for the first Newton update");
  return u;
}

template <int dim>
MetricsRecord
mv_benchmark(const RunConfig &config)
{
  const auto                    meshes    = benchmark_hierarchy<dim>(config);
  const MultigridHierarchy<dim> mg(meshes, config.p, config.n_q_points_1d());
  const auto                    materials = material_preset(config.material);
  const auto                   &space     = mg.finest();

  const Vector u  = first_newton_iterate(mg, materials, config);
  const auto   op = make_tangent_operator<dim>(space, materials, config.strategy, u);

  const Vector src = random_vector(space.n_dofs(), config.seed);
  Vector       dst(space.n_dofs());
  flops::reset();
  op->vmult(dst, src);

  MetricsRecord r;
  r.config          = config;
  r.config.q        = config.n_q_points_1d();
  r.kind            = "mv";
  r.n_cells         = space.n_cells();
  r.n_dofs          = space.n_dofs();
  r.flops_per_apply = flops::count();
  r.flops_per_dof   = static_cast<double>(r.flops_per_apply) / r.n_dofs;
  r.memory_bytes    = op->memory_bytes();

  constexpr int runs  = 10;
  const auto    start = Clock::now();
  for (int i = 0; i < runs; ++i)
    op->vmult(dst, src);
  if (config.timings)
    {
      r.mv_seconds         = seconds_since(start) / runs;
      r.mv_seconds_per_dof = r.mv_seconds / r.n_dofs;
    }
  return r;
}

template <int dim>
SolverRun
solver_benchmark(const RunConfig &config)
{
  const auto                    meshes    = benchmark_hierarchy<dim>(config);
  const MultigridHierarchy<dim> mg(meshes, config.p, config.n_q_points_1d());
  const auto                    materials = material_preset(config.material);

  SolverRun run;
  run.result = newton_solve<dim>(mg, materials, config.load_scale * load_preset<dim>(config.load),
                                 newton_settings(config));
  if (!run.result.converged)
    throw SolverFailure(run.result.message);

  auto &r               = run.record;
  r.config              = config;
  r.config.q            = config.n_q_points_1d();
  r.kind                = "solve";
  r.n_cells             = mg.finest().n_cells();
  r.n_dofs              = mg.finest().n_dofs();
  r.cg_iterations_mean  = run.result.mean_cg_iterations();
  r.cg_iterations_total = run.result.total_cg_iterations();
  r.converged           = true;
  for (const auto &rec : run.result.log)
    if (rec.update_norm > 0)
      ++r.newton_iterations;
  if (config.timings)
    {
      r.solver_seconds         = run.result.seconds;
      r.solver_seconds_per_dof = r.solver_seconds / r.n_dofs;
    }
  return run;
}
} // namespace

template <int dim>
std::vector<Inclusion<dim>>
benchmark_inclusions(const double side)
{
  Point<dim> a = Point<dim>::Constant(0.5 * side), b = a;
  a[0]         = 0.375 * side;
  a[1]         = 0.625 * side;
  b[0]         = 0.625 * side;
  b[1]         = 0.375 * side;
  return {{a, 0.2 * side}, {b, 0.2 * side}};
}

MaterialTable
material_preset(const std::string_view name)
{
  const auto matrix = NeoHookeanParams::from_poisson(0.4225e6, 0.3);
  if (name == "benchmark")
    return {matrix, matrix.scaled(100)};
  if (name == "homogeneous")
    return {matrix, matrix};
  throw ConfigError("unknown material preset '" + std::string(name) + "'");
}

template <int dim>
Point<dim>
load_preset(const std::string_view name)
{
  Point<dim> direction = Point<dim>::Zero();
  direction[0]         = 1;
  if (dim == 3)
    direction[1] = 1;
  const double magnitude = dim == 3 ? benchmark_traction * std::sqrt(2.0) : benchmark_traction;
  if (name == "benchmark")
    return apply_load_fraction<dim>(1, 1, magnitude, direction);
  if (name == "small")
    return apply_load_fraction<dim>(1, 1, 0.01 * magnitude, direction);
  if (name == "none")
    return Point<dim>::Zero();
  throw ConfigError("unknown load preset '" + std::string(name) + "'");
}

std::size_t
RunConfig::n_cells() const
{
  std::size_t m = benchmark_coarse_cells << refinements, n = 1;
  for (int d = 0; d < dim; ++d)
    n *= m;
  return n;
}

std::size_t
RunConfig::n_dofs() const
{
  const std::size_t m = (benchmark_coarse_cells << refinements) * p + 1;
  std::size_t       n = dim;
  for (int d = 0; d < dim; ++d)
    n *= m;
  return n;
}

void
RunConfig::validate() const
{
  if (dim != 2 && dim != 3)
    throw ConfigError("dim must be 2 or 3");
  if (p < 1 || p > 10)
    throw ConfigError("p must be between 1 and 10");
  if (q != 0 && q < p + 1 && !reduced_quadrature)
    throw ConfigError("q = " + std::to_string(q) + " is below p + 1; set reduced_quadrature to allow it");
  if (refinements > 10)
    throw ConfigError("too many refinements");
  if (!(load_scale >= 0) || !std::isfinite(load_scale))
    throw ConfigError("load_scale must be a non-negative number");
  if (load_steps == 0)
    throw ConfigError("load_steps must be positive");
  if (!format.empty() && format != "csv" && format != "json")
    throw ConfigError("format must be csv or json");
  material_preset(material);
  if (dim == 2)
    load_preset<2>(load);
  else
    load_preset<3>(load);
  if (n_dofs() > 20'000'000)
    throw ConfigError("problem too large: " + std::to_string(n_dofs()) + " DoFs");
}

RunConfig
preset(const std::string_view name)
{
  for (const auto &e : presets)
    if (name == e.name)
      {
        RunConfig c;
        c.dim         = e.dim;
        c.p           = e.p;
        c.refinements = e.refinements;
        return c;
      }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string>
preset_names()
{
  std::vector<std::string> names;
  for (const auto &e : presets)
    names.emplace_back(e.name);
  return names;
}

void
apply_config_json(RunConfig &config, const std::string_view json_text)
{
  json j;
  try
    {
      j = json::parse(json_text);
    }
  catch (const json::parse_error &e)
    {
      throw ConfigError(std::string("config: ") + e.what());
    }
  if (!j.is_object())
    throw ConfigError("config: expected a JSON object");

  if (j.contains("preset"))
    config = preset(get_string(j["preset"], "preset"));

  for (const auto &[key, value] : j.items())
    {
      if (key == "preset")
        continue;
      else if (key == "dim")
        config.dim = static_cast<int>(get_unsigned(value, key));
      else if (key == "p")
        config.p = get_unsigned(value, key);
      else if (key == "q")
        config.q = get_unsigned(value, key);
      else if (key == "reduced_quadrature")
        config.reduced_quadrature = get_bool(value, key);
      else if (key == "refinements")
        config.refinements = get_unsigned(value, key);
      else if (key == "strategy")
        config.strategy = parse_strategy(get_string(value, key));
      else if (key == "preconditioner")
        config.preconditioner = parse_preconditioner(get_string(value, key));
      else if (key == "material")
        config.material = get_string(value, key);
      else if (key == "load")
        config.load = get_string(value, key);
      else if (key == "load_scale")
        {
          if (!value.is_number())
            throw ConfigError("config: 'load_scale' must be a number");
          config.load_scale = value.get<double>();
        }
      else if (key == "load_steps")
        config.load_steps = get_unsigned(value, key);
      else if (key == "seed")
        {
          if (!value.is_number_unsigned())
            throw ConfigError("config: 'seed' must be a non-negative integer");
          config.seed = value.get<std::uint64_t>();
        }
      else if (key == "timings")
        config.timings = get_bool(value, key);
      else if (key == "output")
        config.output = get_string(value, key);
      else if (key == "format")
        config.format = get_string(value, key);
      else
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

RunConfig
load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config file " + path);
  std::stringstream text;
  text << in.rdbuf();
  RunConfig config;
  apply_config_json(config, text.str());
  return config;
}

bool
operator==(const MetricsRecord &a, const MetricsRecord &b)
{
  return record_json(a) == record_json(b);
}

MetricsRecord
run_mv_benchmark(const RunConfig &config)
{
  config.validate();
  return config.dim == 2 ? mv_benchmark<2>(config) : mv_benchmark<3>(config);
}

SolverRun
run_solver_benchmark(const RunConfig &config)
{
  config.validate();
  return config.dim == 2 ? solver_benchmark<2>(config) : solver_benchmark<3>(config);
}

std::string
format_double(const double value)
{
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::vector<std::string>
csv_columns()
{
  std::vector<std::string> names;
  const json row = record_json(MetricsRecord{});
  for (const auto &[key, value] : row.items())
    names.push_back(key);
  return names;
}

std::string
results_csv(const std::vector<MetricsRecord> &records)
{
  std::string out;
  const auto  columns = csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i)
    out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto &r : records)
    {
      bool       first = true;
      const json row   = record_json(r);
      for (const auto &[key, value] : row.items())
        {
          if (!first)
            out += ',';
          first = false;
          if (value.is_string())
            out += value.get<std::string>();
          else if (value.is_boolean())
            out += value.get<bool>() ? "1" : "0";
          else if (value.is_number_float())
            out += format_double(value.get<double>());
          else
            out += value.dump();
        }
      out += '\n';
    }
  return out;
}

std::string
results_json(const std::vector<MetricsRecord> &records)
{
  json array = json::array();
  for (const auto &r : records)
    array.push_back(record_json(r));
  return array.dump(2) + "\n";
}

std::vector<MetricsRecord>
parse_results_json(const std::string_view text)
{
  std::vector<MetricsRecord> records;
  try
    {
      for (const auto &j : json::parse(text))
        records.push_back(record_from_json(j));
    }
  catch (const json::exception &e)
    {
      throw ConfigError(std::string("results: ") + e.what());
    }
  return records;
}

void
write_text_file(const std::string &path, const std::string_view text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out)
    throw IoError("failed writing " + path);
}

void
emit_results(const std::vector<MetricsRecord> &records, const std::string &path, const std::string_view format)
{
  if (format == "csv")
    write_text_file(path, results_csv(records));
  else if (format == "json")
    write_text_file(path, results_json(records));
  else
    throw ConfigError("unknown output format '" + std::string(format) + "'");
}

std::string
newton_log_csv(const NewtonResult &result, const bool timings)
{
  std::string out = "step,iteration,load_fraction,residual_norm,update_norm,cg_iterations,cg_seconds,setup_seconds\n";
  for (const auto &r : result.log)
    {
      out += std::to_string(r.step) + ',' + std::to_string(r.iteration) + ',' + format_double(r.load_fraction) + ',' +
             format_double(r.residual_norm) + ',' + format_double(r.update_norm) + ',' +
             std::to_string(r.cg_iterations) + ',' + format_double(timings ? r.cg_seconds : 0.0) + ',' +
             format_double(timings ? r.setup_seconds : 0.0) + '\n';
    }
  return out;
}

template std::vector<Inclusion<2>> benchmark_inclusions<2>(double);
template std::vector<Inclusion<3>> benchmark_inclusions<3>(double);
template Point<2>                  load_preset<2>(std::string_view);
template Point<3>                  load_preset<3>(std::string_view);

} // namespace hyperfree
