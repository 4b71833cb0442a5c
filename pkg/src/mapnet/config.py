"""Materialization caps, overridable from the environment.

``MAPNET_SIZE_CAP`` bounds the row count of k-copy permutation operators.
``MAPNET_NETWORK_CAP`` bounds the dimension of dense collective observables
(and hence of synthesized networks, which need a full eigendecomposition).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_SIZE_CAP = 2**20
DEFAULT_NETWORK_CAP = 2048


@dataclass(frozen=True)
class Limits:
    size_cap: int = DEFAULT_SIZE_CAP
    network_cap: int = DEFAULT_NETWORK_CAP


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = int(raw)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {raw!r}")
    return value


def limits() -> Limits:
    """Current caps; re-read from the environment on every call."""
    return Limits(
        size_cap=_env_int("MAPNET_SIZE_CAP", DEFAULT_SIZE_CAP),
        network_cap=_env_int("MAPNET_NETWORK_CAP", DEFAULT_NETWORK_CAP),
    )
