"""Numerical tools for discrete groups acting on a product of two hyperbolic planes.

Points of the upper half plane are complex numbers, boundary points are floats
(None is infinity) and points of the product are pairs. Configs may be given as
a dict, a path to a JSON file, or None for the defaults.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Union

from . import _core
from ._core import (
    HALF_PI,
    AtomBudgetExceeded,
    ConfigError,
    DependencyError,
    DomainError,
    InsufficientData,
    busemann,
    dist_to_chamber,
    dist_to_ray,
    distance_vector,
    directional_distance,
    h_distance,
    p_distance,
    p_ray_point,
    product_busemann,
    ray_point,
    shadow_contains,
    slope_of,
    supporting_line,
)

__version__ = _core.__version__

Config = Union[None, dict, str, os.PathLike]


def _text(config: Config) -> str:
    if config is None:
        return _core.config_defaults()
    if isinstance(config, dict):
        return json.dumps(config)
    return Path(config).read_text()


def load_config(config: Config = None) -> dict[str, Any]:
    """The effective config with every default filled in."""
    return json.loads(_core.config_normalize(_text(config)))


def config_hash(config: Config = None) -> str:
    return _core.config_hash(_text(config))


def certify(config: Config = None) -> tuple[bool, list[tuple[str, bool, str]]]:
    return _core.certify(_text(config))


def orbit_ball(config: Config = None, radius: float | None = None, threads: int = 1) -> dict[str, Any]:
    """Orbit points within `radius` (config orbit radius by default) as numpy columns."""
    return _core.orbit_ball(_text(config), radius, threads)


def factor_exponent(config: Config = None, factor: int = 1, radius: float | None = None) -> dict[str, Any]:
    return _core.factor_exponent(_text(config), factor, radius)


def psi_grid(config: Config = None, radius: float | None = None) -> dict[str, Any]:
    return _core.psi_grid(_text(config), radius)


class Pipeline:
    """The staged run behind the command-line tool; each stage returns its JSON artifact."""

    def __init__(self, config: Config, out: str | os.PathLike, threads: int = 1):
        self._p = _core.Pipeline(_text(config), Path(out), threads)

    @property
    def out(self) -> Path:
        return Path(self._p.out)

    @property
    def config_hash(self) -> str:
        return self._p.config_hash

    def __getattr__(self, stage: str):
        if stage not in ("certify", "orbit", "growth", "density", "shadow", "hausdorff", "report"):
            raise AttributeError(stage)
        fn = getattr(self._p, stage)
        return lambda: json.loads(fn())

    def run(self, stages=("certify", "orbit", "growth", "density", "shadow", "hausdorff", "report")) -> dict:
        return {s: getattr(self, s)() for s in stages}
