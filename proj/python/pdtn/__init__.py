"""Nonlinear boundary-value solvers and boundary-operator norms on graphs.

The heavy lifting lives in the compiled extension ``pdtn._core``; this
package re-exports its public surface.
"""

from ._core import (
    Graph,
    GraphBundle,
    SolveResult,
    besov_seminorm,
    bounds_report,
    dtn_apply,
    dual_norm,
    graph_to_json,
    load_graph_file,
    load_graph_json,
    make_named,
    make_random_graph,
    ntd_apply,
    p_energy,
    roundtrip_check,
    run_cli,
    solve_dirichlet,
    solve_neumann,
)

__all__ = [
    "Graph",
    "GraphBundle",
    "SolveResult",
    "besov_seminorm",
    "bounds_report",
    "dtn_apply",
    "dual_norm",
    "graph_to_json",
    "load_graph_file",
    "load_graph_json",
    "make_named",
    "make_random_graph",
    "ntd_apply",
    "p_energy",
    "roundtrip_check",
    "run_cli",
    "solve_dirichlet",
    "solve_neumann",
]
