"""Tight-binding bus Hamiltonian in a fixed-photon-number sector.

    H(z) = sum_i delta_i n_i + sum_i omega_i(z) (a0† a_i + a_i† a0)

with mode 0 the bus. Matrices are real symmetric because every coupling
and detuning is real.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import sqrt
from typing import Sequence

import numpy as np

from .coupling import CouplingSchedule
from .fock import FockBasis, apply_hopping, enumerate_basis

_Z_SLACK = 1e-9
NULL_EIGENVALUE_CUTOFF = 1e-10


@dataclass(frozen=True)
class HoppingTerms:
    """Sparse list of matrix elements ``H[row, col] += omega[waveguide] * amp``."""

    rows: np.ndarray
    cols: np.ndarray
    amps: np.ndarray
    waveguide: np.ndarray


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    basis: FockBasis
    schedule: CouplingSchedule
    coupled_modes: tuple[int, ...] | None = None
    detunings: tuple[float, ...] | None = None
    bus_index: int = 0

    def __post_init__(self):
        m = self.basis.mode_count
        modes = self.coupled_modes
        if modes is None:
            modes = tuple(range(1, m))
            if len(modes) != self.schedule.n_waveguides:
                raise ValueError(
                    f"schedule has {self.schedule.n_waveguides} waveguides but the basis "
                    f"has {m - 1} non-bus modes; pass coupled_modes explicitly")
        modes = tuple(int(k) for k in modes)
        if len(modes) != self.schedule.n_waveguides:
            raise ValueError("coupled_modes must name one mode per scheduled waveguide")
        if len(set(modes)) != len(modes):
            raise ValueError(f"coupled_modes repeats a mode: {modes}")
        if any(k == self.bus_index or not 0 <= k < m for k in modes):
            raise ValueError(f"coupled_modes {modes} must be non-bus modes below {m}")
        object.__setattr__(self, "coupled_modes", modes)
        det = (0.0,) * m if self.detunings is None else tuple(float(d) for d in self.detunings)
        if len(det) != m:
            raise ValueError(f"need {m} detunings, got {len(det)}")
        object.__setattr__(self, "detunings", det)

    @property
    def dim(self) -> int:
        return self.basis.size

    @property
    def z_max(self) -> float:
        return self.schedule.z_max

    @cached_property
    def diagonal(self) -> np.ndarray:
        return self.basis.occupations() @ np.asarray(self.detunings)

    @cached_property
    def bus_occupation(self) -> np.ndarray:
        return self.basis.occupations()[:, self.bus_index].astype(float)

    @cached_property
    def hopping(self) -> HoppingTerms:
        rows, cols, amps, wgs = [], [], [], []
        index = self.basis.index
        for w, mode in enumerate(self.coupled_modes):
            for col, state in enumerate(self.basis.states):
                hit = apply_hopping(state, self.bus_index, mode)
                if hit is None:
                    continue
                row = index[hit[0]]
                # a0† a_i and its Hermitian conjugate
                rows += [row, col]
                cols += [col, row]
                amps += [hit[1], hit[1]]
                wgs += [w, w]
        return HoppingTerms(np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                            np.array(amps, dtype=float), np.array(wgs, dtype=np.int64))

    @cached_property
    def coupling_operators(self) -> np.ndarray:
        """Dense ``(n_waveguides, dim, dim)`` stack; H = diag + sum_w omega_w * K_w."""
        h = self.hopping
        stack = np.zeros((self.schedule.n_waveguides, self.dim, self.dim))
        np.add.at(stack, (h.waveguide, h.rows, h.cols), h.amps)
        return stack

    def matrix_from_couplings(self, omegas) -> np.ndarray:
        omegas = np.asarray(omegas, dtype=float)
        return np.tensordot(omegas, self.coupling_operators, axes=(-1, 0)) + np.diag(self.diagonal)


def assemble(model: HamiltonianModel, z: float) -> np.ndarray:
    if not -_Z_SLACK <= z <= model.z_max + _Z_SLACK:
        raise ValueError(f"z = {z} lies outside the device [0, {model.z_max}]")
    omegas = model.schedule.evaluate(float(z))
    upper = np.triu(model.matrix_from_couplings(omegas))
    return upper + np.triu(upper, 1).T


def dump_matrix(matrix: np.ndarray) -> str:
    """Plain-text rows of complex entries written as ``re+imi``."""
    lines = []
    for row in np.asarray(matrix, dtype=complex):
        lines.append(" ".join(f"{v.real:.17g}{v.imag:+.17g}i" for v in row))
    return "\n".join(lines) + "\n"


def dark_bright_one_photon(omega1: float, omega2: float) -> tuple[np.ndarray, np.ndarray]:
    """Dark and bright combinations of waveguides 1 and 2 as length-2 vectors."""
    norm = np.hypot(omega1, omega2)
    if norm == 0:
        raise ValueError("dark/bright states are undefined when both couplings vanish")
    dark = np.array([omega2, -omega1]) / norm
    bright = np.array([omega1, omega2]) / norm
    return dark, bright


TWO_PHOTON_BASIS = enumerate_basis(4, 2)


def two_photon_null_vectors(omega1: float, omega2: float, omega3: float) -> np.ndarray:
    """The four closed-form zero-energy vectors of the 4-mode, 2-photon sector.

    Rows are unnormalised vectors in ``TWO_PHOTON_BASIS`` order, anchored on
    |2000>, |0200>, |0020> and |0002> respectively.
    """
    o1, o2, o3 = float(omega1), float(omega2), float(omega3)
    if o1 == 0 or o2 == 0 or o3 == 0:
        raise ZeroDivisionError(
            "closed-form null vectors need all three couplings nonzero; "
            "use numeric_null_space instead")
    r2 = sqrt(2.0)
    rows = [
        {"0011": -(-o1**2 + o2**2 + o3**2) / (r2 * o2 * o3),
         "0101": -(o1**2 - o2**2 + o3**2) / (r2 * o1 * o3),
         "0110": -(o1**2 + o2**2 - o3**2) / (r2 * o1 * o2),
         "2000": 1.0},
        {"0011": o1**2 / (r2 * o2 * o3),
         "0101": -o1 / (r2 * o3),
         "0110": -o1 / (r2 * o2),
         "0200": 1.0},
        {"0011": -o2 / (r2 * o3),
         "0101": o2**2 / (r2 * o1 * o3),
         "0110": -o2 / (r2 * o1),
         "0020": 1.0},
        {"0011": -o3 / (r2 * o2),
         "0101": -o3 / (r2 * o1),
         "0110": o3**2 / (r2 * o1 * o2),
         "0002": 1.0},
    ]
    out = np.zeros((4, TWO_PHOTON_BASIS.size))
    for k, coeffs in enumerate(rows):
        for label, c in coeffs.items():
            out[k, TWO_PHOTON_BASIS.position(tuple(int(ch) for ch in label))] = c
    return out


def numeric_null_space(matrix: np.ndarray, cutoff: float = NULL_EIGENVALUE_CUTOFF) -> np.ndarray:
    """Orthonormal columns spanning eigenvalues with ``|lambda| < cutoff``."""
    w, v = np.linalg.eigh(matrix)
    return v[:, np.abs(w) < cutoff]


def one_photon_model(schedule: CouplingSchedule, **kwargs) -> HamiltonianModel:
    return HamiltonianModel(enumerate_basis(schedule.n_waveguides + 1, 1), schedule, **kwargs)


def two_photon_model(schedule: CouplingSchedule, **kwargs) -> HamiltonianModel:
    return HamiltonianModel(enumerate_basis(schedule.n_waveguides + 1, 2), schedule, **kwargs)


def embed_mode_vector(values: Sequence[float], modes: Sequence[int], basis: FockBasis) -> np.ndarray:
    """One-photon state with amplitude ``values[k]`` on mode ``modes[k]``."""
    if basis.total_photons != 1:
        raise ValueError("mode vectors only embed into the one-photon sector")
    psi = np.zeros(basis.size, dtype=complex)
    for v, mode in zip(values, modes):
        occ = [0] * basis.mode_count
        occ[mode] = 1
        psi[basis.position(occ)] += v
    return psi
