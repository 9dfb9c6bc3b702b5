"""Point annotation probability maps and optimal-transport counting losses.

Thin wrapper over the compiled `_papm` extension: GGD-kernel target maps,
the GGD-L2 transport cost with a log-domain Sinkhorn solver and an exact
small-instance oracle, counting/localization metrics, and the annotation
noise harness.
"""

from ._papm import (  # noqa: F401
    al_papm_loss,
    build_cost_matrix,
    exact_ot,
    fit_map,
    game,
    gen_papm,
    ggd_kernel,
    l2_loss,
    localize_and_match,
    mae_mse,
    ot_gradient,
    perturb,
    read_map,
    read_points,
    similarity_count_loss,
    sinkhorn,
    transport_cost,
    write_map,
    write_points,
    __version__,
)

__all__ = [
    "al_papm_loss",
    "build_cost_matrix",
    "exact_ot",
    "fit_map",
    "game",
    "gen_papm",
    "ggd_kernel",
    "l2_loss",
    "localize_and_match",
    "mae_mse",
    "ot_gradient",
    "perturb",
    "read_map",
    "read_points",
    "similarity_count_loss",
    "sinkhorn",
    "transport_cost",
    "write_map",
    "write_points",
    "__version__",
]
