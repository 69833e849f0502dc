"""Matrix-free finite-strain elasticity: operator benchmarks, multigrid-preconditioned
Newton solves and the verification checks."""

from ._core import (
    CheckResult,
    ConfigError,
    IndefiniteOperator,
    IoError,
    MetricsRecord,
    NeoHookean,
    NonPositiveJacobian,
    Preconditioner,
    RunConfig,
    SolverFailure,
    Strategy,
    checks_csv,
    group_title,
    kirchhoff_stress,
    load_config,
    parse_results_json,
    preset,
    preset_names,
    results_csv,
    results_json,
    run_checks,
    run_mv_benchmark,
    run_solver_benchmark,
    second_pk_stress,
    strain_energy,
    tangent_action,
    verification_groups,
)


def config(**keys):
    """RunConfig from keyword arguments, e.g. config(preset="2d-p2", strategy="scalar")."""
    import json

    c = RunConfig()
    if keys:
        c.update(json.dumps(keys))
    c.validate()
    return c


__all__ = [name for name in dir() if not name.startswith("_")]
