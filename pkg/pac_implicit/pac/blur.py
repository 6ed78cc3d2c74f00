from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from pac_implicit.errors import InvalidConfig
from pac_implicit.linarith.expr import Variable
from pac_implicit.pac.constants import COORDINATE_GRID, NOISE_WIDTH_FACTOR
from pac_implicit.pac.interval import PartialInterval
from pac_implicit.utils import clamp, quantise


@dataclass(frozen=True)
class BlurConfig:
    """
    :param domain: per-variable ``(lo, hi)`` box; noise and intervals are capped to it
    :param mask_probability: chance that a variable is hidden entirely
    :param sigma: standard deviation of the Gaussian noise added to each value
    :param grid: noisy values and interval ends are snapped to multiples of ``1 / grid``
    """

    domain: Mapping[Variable, tuple[Fraction, Fraction]]
    mask_probability: float = 0.0
    sigma: float = 0.0
    grid: int = COORDINATE_GRID

    def __post_init__(self):
        if not 0 <= self.mask_probability <= 1:
            raise InvalidConfig(f"mask_probability must be in [0, 1], got {self.mask_probability}")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise InvalidConfig(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.grid < 1:
            raise InvalidConfig(f"grid must be positive, got {self.grid}")
        for variable, (lo, hi) in self.domain.items():
            if lo > hi:
                raise InvalidConfig(f"Empty domain for {variable.name}: [{lo}, {hi}]")

    @property
    def dims(self) -> int:
        return len(self.domain)

    @property
    def interval_width(self) -> float:
        return noise_interval_width(self.sigma, self.dims)


def noise_interval_width(sigma: float, dims: int) -> float:
    """
    ``4·ln(d)·σ``, covering roughly 95% of the noise density. ln(d) vanishes
    at d = 1 and is small at d = 2, so those get ``4σ``.
    """
    if dims <= 2:
        return NOISE_WIDTH_FACTOR * sigma
    return NOISE_WIDTH_FACTOR * math.log(dims) * sigma


def box_muller(rng: np.random.Generator) -> float:
    """
    One standard normal draw by the Box–Muller transform over two uniforms
    from ``rng``, so the stream is reproducible from the generator's state alone.
    """
    u1 = 1.0 - rng.random()  # (0, 1]
    u2 = rng.random()
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def blur(
    point: Mapping[Variable, Fraction],
    config: BlurConfig,
    rng: np.random.Generator,
) -> PartialInterval:
    """
    Produce an interval observation of ``point``.

    Each variable is, independently, masked with probability
    ``mask_probability``; otherwise its value gets Gaussian noise (capped to
    the domain) and an interval of ``config.interval_width`` is centred on
    the noisy value and capped to the domain. With ``sigma = 0`` the
    interval is the exact point.
    """
    if set(point) - set(config.domain):
        missing = sorted(var.name for var in set(point) - set(config.domain))
        raise InvalidConfig(f"No domain given for {', '.join(missing)}")

    half_width = config.interval_width / 2
    bounds = {}
    for variable in sorted(point, key=lambda var: var.index):
        value = point[variable]
        lo, hi = config.domain[variable]

        if config.mask_probability > 0 and rng.random() < config.mask_probability:
            bounds[variable] = (None, None)
            continue

        if config.sigma == 0:
            bounds[variable] = (value, value)
            continue

        noisy_float = float(value) + config.sigma * box_muller(rng)
        noisy = clamp(quantise(noisy_float, config.grid), lo, hi)
        lower = max(quantise(float(noisy) - half_width, config.grid, "down"), lo)
        upper = min(quantise(float(noisy) + half_width, config.grid, "up"), hi)
        # float(noisy) may round; keep the observation inside its interval
        bounds[variable] = (min(lower, noisy), max(upper, noisy))

    return PartialInterval(bounds)
