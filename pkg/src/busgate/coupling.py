"""Waveguide-to-bus couplings as functions of propagation distance.

Units are dimensionless: ``omega_max`` sets the rate scale and ``z`` is
measured in units of 1/omega_max. Lateral position ``x`` is measured in the
units that make ``beta0 * x`` the phase of the bus standing wave.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

CouplingFn = Callable[[np.ndarray], np.ndarray]

# tolerated overshoot of |target| / omega_max from floating-point rounding
_REACH_SLACK = 1e-12


class UnreachableCouplingError(ValueError):
    pass


@dataclass(frozen=True)
class SlabParams:
    beta0: float = 1.0
    omega_max: float = 1.0

    def __post_init__(self):
        if not self.beta0 > 0:
            raise ValueError(f"beta0 must be positive, got {self.beta0}")
        if not self.omega_max > 0:
            raise ValueError(f"omega_max must be positive, got {self.omega_max}")


@dataclass(frozen=True)
class WaveguidePath:
    z: np.ndarray
    x: np.ndarray

    def __call__(self, z):
        return np.interp(z, self.z, self.x)


@dataclass(frozen=True)
class CouplingSchedule:
    """Signed couplings ``omega_i(z)`` for a set of waveguides over ``[0, z_max]``.

    ``couplings[i]`` is a vectorised callable; evaluate all of them at once
    with :meth:`evaluate`.
    """

    z_max: float
    couplings: tuple[CouplingFn, ...]
    omega_max: float = 1.0

    def __post_init__(self):
        if not self.z_max > 0:
            raise ValueError(f"z_max must be positive, got {self.z_max}")

    @property
    def n_waveguides(self) -> int:
        return len(self.couplings)

    def evaluate(self, z) -> np.ndarray:
        """Couplings at ``z``; shape ``(n_waveguides,)`` for scalar z, else ``(len(z), n_waveguides)``."""
        z_arr = np.asarray(z, dtype=float)
        out = np.stack([np.broadcast_to(f(z_arr), z_arr.shape) for f in self.couplings], axis=-1)
        return out.astype(float)

    def sample(self, n_points: int = 1001) -> tuple[np.ndarray, np.ndarray]:
        z = np.linspace(0.0, self.z_max, n_points)
        return z, self.evaluate(z)


def _zero(z):
    return np.zeros_like(np.asarray(z, dtype=float))


def zero_schedule(z_max: float, n_waveguides: int, omega_max: float = 1.0) -> CouplingSchedule:
    return CouplingSchedule(z_max, (_zero,) * n_waveguides, omega_max)


def coupling_from_position(x, slab: SlabParams):
    return slab.omega_max * np.sin(slab.beta0 * np.asarray(x, dtype=float))


def position_for_coupling(target, slab: SlabParams, period: int = 0):
    """Lateral position giving coupling ``target`` inside standing-wave period ``period``.

    Period ``k`` covers ``beta0 * x`` in ``[k*pi - pi/2, k*pi + pi/2]``, centred
    on the node at ``k*pi``, so every signed coupling is reachable in every
    period and a path can change sign without leaving it.
    """
    u = np.asarray(target, dtype=float) / slab.omega_max
    if np.any(np.abs(u) > 1.0 + _REACH_SLACK):
        worst = float(np.max(np.abs(u)))
        raise UnreachableCouplingError(
            f"|coupling| reaches {worst:.6g} * omega_max; waveguide cannot exceed omega_max")
    phase = period * np.pi + (-1) ** period * np.arcsin(np.clip(u, -1.0, 1.0))
    return phase / slab.beta0


def divider_schedule(z_max: float, slab: SlabParams = SlabParams()) -> CouplingSchedule:
    """Counter-intuitive 1:1 power divider: input on waveguide 3, outputs on 1 and 2."""
    if not z_max > 0:
        raise ValueError(f"z_max must be positive, got {z_max}")
    om = slab.omega_max

    def om12(z):
        return om * np.cos(np.pi * np.asarray(z) / (2 * z_max))

    def om3(z):
        return om * np.sin(np.pi * np.asarray(z) / (2 * z_max))

    return CouplingSchedule(z_max, (om12, om12, om3), om)


def usb_gate_schedule(alpha: float, z_max: float, slab: SlabParams = SlabParams(),
                      sign: int = 1) -> CouplingSchedule:
    """Couplings for one USB gate on qubit waveguides 1, 2 with auxiliary waveguide 3.

    Waveguide 3 couples first and changes sign at ``z_max / 2``. ``sign``
    flips waveguide 2 into the opposite standing-wave sign.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive (sign is a separate flag), got {alpha}")
    if not z_max > 0:
        raise ValueError(f"z_max must be positive, got {z_max}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    om = slab.omega_max
    ratio = sign * alpha

    def om1(z):
        return om * np.sin(np.pi * np.asarray(z) / z_max)

    def om2(z):
        return ratio * om1(z)

    def om3(z):
        return om * np.cos(np.pi * np.asarray(z) / z_max)

    return CouplingSchedule(z_max, (om1, om2, om3), om)


def schedule_to_paths(schedule: CouplingSchedule, slab: SlabParams,
                      periods: Sequence[int] | None = None,
                      n_points: int = 1001) -> list[WaveguidePath]:
    """Invert a schedule into lateral trajectories ``x_i(z)``.

    Waveguide ``i`` sits in standing-wave period ``periods[i]`` (default ``i``)
    so neighbouring waveguides stay a period apart. Sign changes pass through
    the node at the centre of the period, which keeps ``x`` continuous.
    """
    if periods is None:
        periods = range(schedule.n_waveguides)
    periods = list(periods)
    if len(periods) != schedule.n_waveguides:
        raise ValueError("one period per waveguide required")
    z, omegas = schedule.sample(n_points)
    return [WaveguidePath(z, position_for_coupling(omegas[:, i], slab, periods[i]))
            for i in range(schedule.n_waveguides)]


def write_schedule_csv(path: Path, schedule: CouplingSchedule, n_points: int = 1001) -> None:
    z, omegas = schedule.sample(n_points)
    header = ["z"] + [f"omega_{i + 1}" for i in range(schedule.n_waveguides)]
    _write_columns(path, header, np.column_stack([z, omegas]))


def write_geometry_csv(path: Path, paths: Sequence[WaveguidePath]) -> None:
    header = ["z"] + [f"x_{i + 1}" for i in range(len(paths))]
    _write_columns(path, header, np.column_stack([paths[0].z] + [p.x for p in paths]))


def _write_columns(path: Path, header: list[str], table: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in table:
            writer.writerow([repr(float(v)) for v in row])
