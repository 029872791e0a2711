"""Integrate i d(psi)/dz = H(z) psi along a device.

Two independent integrators share one interface:

``rk4``
    classical fixed-step 4th-order Runge-Kutta, matrix-free.
``expm``
    piecewise-constant H sampled at interval midpoints, each step applied
    exactly through a Hermitian eigendecomposition.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .hamiltonian import NULL_EIGENVALUE_CUTOFF, HamiltonianModel

log = logging.getLogger(__name__)

METHODS = ("rk4", "expm")
MIN_STEPS = 100
DEFAULT_MIN_STEPS = 4000
# steps per unit of omega_max * z used when step_count is left automatic
STEPS_PER_COUPLING_UNIT = 160


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    step_count: int | None = None
    record_points: int = 1001
    norm_tolerance: float = 1e-6

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.step_count is not None and self.step_count < MIN_STEPS:
            raise ValueError(f"step_count must be >= {MIN_STEPS}, got {self.step_count}")
        if self.record_points < 2:
            raise ValueError("record_points must be >= 2")

    def steps_for(self, model: HamiltonianModel) -> int:
        if self.step_count is not None:
            return self.step_count
        scale = model.schedule.omega_max * model.z_max
        return max(DEFAULT_MIN_STEPS, math.ceil(STEPS_PER_COUPLING_UNIT * scale))


@dataclass
class EvolutionTrace:
    labels: list[str]
    z: np.ndarray
    amplitudes: np.ndarray
    norm: np.ndarray
    bus_population: np.ndarray
    peak_bus_population: float
    peak_norm_drift: float
    method: str = "rk4"
    step_count: int = 0

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def final(self) -> np.ndarray:
        return self.amplitudes[-1]

    def population(self, label: str) -> np.ndarray:
        return self.populations[:, self.labels.index(label)]

    def shifted(self, dz: float) -> "EvolutionTrace":
        return EvolutionTrace(self.labels, self.z + dz, self.amplitudes, self.norm,
                              self.bus_population, self.peak_bus_population,
                              self.peak_norm_drift, self.method, self.step_count)

    @classmethod
    def concatenate(cls, traces: Sequence["EvolutionTrace"]) -> "EvolutionTrace":
        """Join consecutive segments, placing each after the previous one in z."""
        zs, amps, norms, buses = [], [], [], []
        offset = 0.0
        for k, tr in enumerate(traces):
            keep = slice(0 if k == 0 else 1, None)
            zs.append(tr.z[keep] + offset)
            amps.append(tr.amplitudes[keep])
            norms.append(tr.norm[keep])
            buses.append(tr.bus_population[keep])
            offset += tr.z[-1]
        first = traces[0]
        return cls(first.labels, np.concatenate(zs), np.concatenate(amps), np.concatenate(norms),
                   np.concatenate(buses), max(t.peak_bus_population for t in traces),
                   max(t.peak_norm_drift for t in traces), first.method,
                   sum(t.step_count for t in traces))

    def write_csv(self, path: Path, amplitudes: bool = False) -> None:
        header = ["z"] + [f"P_{lab}" for lab in self.labels] + ["norm", "bus_pop"]
        if amplitudes:
            for lab in self.labels:
                header += [f"re_{lab}", f"im_{lab}"]
        pops = self.populations
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for j in range(self.z.size):
                row = [self.z[j], *pops[j], self.norm[j], self.bus_population[j]]
                if amplitudes:
                    for a in self.amplitudes[j]:
                        row += [a.real, a.imag]
                writer.writerow([repr(float(v)) for v in row])


def _record_steps(n_steps: int, n_points: int) -> np.ndarray:
    n_points = min(n_points, n_steps + 1)
    return np.unique(np.round(np.linspace(0, n_steps, n_points)).astype(np.int64))


def _propagate(model: HamiltonianModel, psi0: np.ndarray, config: IntegratorConfig):
    n_steps = config.steps_for(model)
    h = model.z_max / n_steps
    records = _record_steps(n_steps, config.record_points)
    if config.method == "rk4":
        nodes = model.schedule.evaluate(np.linspace(0.0, model.z_max, 2 * n_steps + 1))
        hop = model.hopping
        out = kernels.rk4_propagate(psi0, np.ascontiguousarray(nodes), model.diagonal,
                                    hop.rows, hop.cols, hop.amps, hop.waveguide, h, records,
                                    model.bus_occupation)
    else:
        mids = model.schedule.evaluate((np.arange(n_steps) + 0.5) * h)
        out = kernels.expm_propagate(psi0, mids, model.coupling_operators, model.diagonal, h,
                                     records, model.bus_occupation)
    psi, snaps, peak_bus, peak_drift = out
    return n_steps, records * h, psi, snaps, peak_bus, peak_drift


def _check_drift(peak_drift, config: IntegratorConfig, n_steps: int) -> None:
    worst = float(np.max(peak_drift)) if np.size(peak_drift) else 0.0
    if worst > config.norm_tolerance:
        raise IntegrationError(
            f"norm drifted by {worst:.3e} with {n_steps} {config.method} steps "
            f"(tolerance {config.norm_tolerance:.1e}); increase step_count")


def evolve(model: HamiltonianModel, psi0, config: IntegratorConfig = IntegratorConfig()) -> EvolutionTrace:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (model.dim,):
        raise ValueError(f"initial state has shape {psi0.shape}, basis dimension is {model.dim}")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-12:
        raise ValueError(f"initial state must be normalised, |psi0| = {np.linalg.norm(psi0):.15g}")
    n_steps, z, psi, snaps, peak_bus, peak_drift = _propagate(model, psi0[:, None].copy(), config)
    _check_drift(peak_drift, config, n_steps)
    amps = snaps[:, :, 0]
    pops = np.abs(amps) ** 2
    log.debug("evolve %s: %d steps, peak bus %.2e", config.method, n_steps, peak_bus[0])
    return EvolutionTrace(
        labels=model.basis.labels(), z=z, amplitudes=amps, norm=np.sqrt(pops.sum(axis=1)),
        bus_population=pops @ model.bus_occupation, peak_bus_population=float(peak_bus[0]),
        peak_norm_drift=float(peak_drift[0]), method=config.method, step_count=n_steps)


def endpoint_map(model: HamiltonianModel, config: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Matrix whose column j is the device output for basis state j."""
    cfg = IntegratorConfig(config.method, config.step_count, 2, config.norm_tolerance)
    n_steps, _, psi, _, _, peak_drift = _propagate(model, np.eye(model.dim, dtype=complex), cfg)
    _check_drift(peak_drift, config, n_steps)
    return psi


def unitarity_residual(u: np.ndarray) -> float:
    """Largest deviation of a singular value from 1."""
    return float(np.max(np.abs(np.linalg.svd(u, compute_uv=False) - 1.0)))


@dataclass
class AdiabaticityReport:
    max_bus_population: float
    max_excited_overlap: float
    final_leakage: float
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"max_bus_population": self.max_bus_population,
                "max_excited_overlap": self.max_excited_overlap,
                "final_leakage": self.final_leakage, **self.details}


def adiabaticity_report(trace: EvolutionTrace, model: HamiltonianModel,
                        target_modes: Sequence[int] | None = None) -> AdiabaticityReport:
    """How far a run strayed from the zero-energy (dark) manifold.

    ``max_excited_overlap`` is the largest weight the recorded state puts on
    eigenvectors of H(z) with nonzero eigenvalue. ``final_leakage`` is the
    end population on states with photons outside ``target_modes`` (default:
    every non-bus mode).
    """
    if target_modes is None:
        target_modes = [m for m in range(model.basis.mode_count) if m != model.bus_index]
    outside = [m for m in range(model.basis.mode_count) if m not in set(target_modes)]
    occ = model.basis.occupations()
    leaky = occ[:, outside].sum(axis=1) > 0 if outside else np.zeros(model.dim, dtype=bool)

    omegas = model.schedule.evaluate(np.clip(trace.z, 0.0, model.z_max))
    hams = model.matrix_from_couplings(omegas)
    w, v = np.linalg.eigh(hams)
    proj = np.einsum("kij,ki->kj", v.conj(), trace.amplitudes)
    excited = np.where(np.abs(w) >= NULL_EIGENVALUE_CUTOFF, np.abs(proj) ** 2, 0.0).sum(axis=1)
    final_pops = np.abs(trace.final) ** 2
    return AdiabaticityReport(
        max_bus_population=max(trace.peak_bus_population, float(np.max(trace.bus_population))),
        max_excited_overlap=float(np.max(excited)) if excited.size else 0.0,
        final_leakage=float(final_pops[leaky].sum()),
        details={"outside_modes": outside})
