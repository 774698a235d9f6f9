"""Seed handling.

One user-facing seed fans out into independent named streams via
SeedSequence.spawn, so consumers can draw in any order (or not at all)
without perturbing each other.  Stream identity is positional: the name
list is fixed, appending new names keeps old streams reproducible.
"""

from __future__ import annotations

import numpy as np

# Order is load-bearing: stream k of seed s must mean the same thing forever.
STREAM_NAMES = ("data", "latent", "init", "noise", "eval")


def split_streams(seed: int, names=STREAM_NAMES) -> dict[str, np.random.Generator]:
    """Return one independent Generator per name, all derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}
