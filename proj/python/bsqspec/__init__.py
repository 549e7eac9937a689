"""Spectral data of the third-order operator y''' + (p y)' + p y' + q y on the circle."""

import json as _json

from ._bsqspec import (
    BlowUp,
    BsqError,
    CountMismatch,
    DomainError,
    InputError,
    NoConvergence,
    TrigSeries,
    ball_norm,
    branch_points,
    discriminant,
    evolve,
    hill_spectra,
    monodromy,
    three_point_eigenvalue,
)
from ._bsqspec import forward_map as _forward_map
from ._bsqspec import invert_map as _invert_map
from ._bsqspec import verify as _verify


def forward_map(p, q, n_max, threads=1):
    """Spectral data as a dict: {"n_max": ..., "data": [{"n", "g_c", "g_s", ...}]}."""
    return _json.loads(_forward_map(p, q, n_max, threads))


def invert_map(spectral, tol=1e-8, max_iter=30, threads=1):
    """Recover (p, q, residual_history) from spectral data (dict or JSON string)."""
    text = spectral if isinstance(spectral, str) else _json.dumps(spectral)
    return _invert_map(text, tol, max_iter, threads)


def verify(p, q, n_max=1, hill_n_max=1):
    return _json.loads(_verify(p, q, n_max, hill_n_max))


__all__ = [
    "BlowUp", "BsqError", "CountMismatch", "DomainError", "InputError", "NoConvergence", "TrigSeries",
    "ball_norm", "branch_points", "discriminant", "evolve", "forward_map", "hill_spectra", "invert_map",
    "monodromy", "three_point_eigenvalue", "verify",
]
