"""Warped-cone graph families: nets, warped graphs, spectra and QI checks."""

from ._core import (
    Action,
    ConfigError,
    Graph,
    InputError,
    Net,
    SolverError,
    Space,
    WarpedGraph,
    ball_size,
    build_graph,
    build_net,
    eta,
    kappa_hat,
    lambda2,
    make_space,
    markov_norm,
    pairwise_form_ratio,
    poincare_quotient,
    run_family,
    subdivide,
    transfer_bound,
)

__all__ = [
    "Action",
    "ConfigError",
    "Graph",
    "InputError",
    "Net",
    "SolverError",
    "Space",
    "WarpedGraph",
    "ball_size",
    "build_graph",
    "build_net",
    "eta",
    "kappa_hat",
    "lambda2",
    "make_space",
    "markov_norm",
    "pairwise_form_ratio",
    "poincare_quotient",
    "run_family",
    "subdivide",
    "transfer_bound",
]
