"""Python bindings for the optimal flexibility design library."""

from ._ofd import (
    HPolytope,
    LiftedPolytope,
    ball_approximation,
    build_G,
    build_reduced_G,
    build_x,
    certify_containment,
    compute_prototype,
    farkas_design,
    fourier_motzkin,
    market_polytope,
    mc_volume,
    membership,
    run_pipeline,
    support,
    volume_scale,
)

__all__ = [
    "HPolytope",
    "LiftedPolytope",
    "ball_approximation",
    "build_G",
    "build_reduced_G",
    "build_x",
    "certify_containment",
    "compute_prototype",
    "farkas_design",
    "fourier_motzkin",
    "market_polytope",
    "mc_volume",
    "membership",
    "run_pipeline",
    "support",
    "volume_scale",
]
