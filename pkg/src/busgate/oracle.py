"""Reference linear optics: lift mode unitaries to Fock sectors with permanents.

Everything here is closed form. It never touches the Hamiltonian or the
integrators, so it can be used to check them.
"""

from __future__ import annotations

from itertools import permutations
from math import factorial, prod, sqrt
from typing import Sequence

import numpy as np

from .fock import FockBasis, enumerate_basis
from .kernels import permanent_kernel

MAX_PERMANENT_SIZE = 8
UNITARY_TOL = 1e-10


def permanent(matrix) -> complex:
    """Ryser permanent of a square matrix (at most 8x8); the empty matrix gives 1."""
    a = np.asarray(matrix, dtype=complex)
    if a.size == 0:
        return 1.0 + 0j
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_PERMANENT_SIZE:
        raise ValueError(f"permanent limited to {MAX_PERMANENT_SIZE}x{MAX_PERMANENT_SIZE}")
    return permanent_kernel(a)


def permanent_naive(matrix) -> complex:
    """Sum over all n! permutations. Only for cross-checking small matrices."""
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    return complex(sum(prod(a[i, p[i]] for i in range(n)) for p in permutations(range(n))))


def _repeat(occupation: Sequence[int]) -> list[int]:
    return [mode for mode, n in enumerate(occupation) for _ in range(n)]


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and \
        np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=tol, rtol=0)


def lift_unitary(u, total_photons: int, basis: FockBasis | None = None) -> np.ndarray:
    """Transfer matrix of mode unitary ``u`` on the ``total_photons`` sector.

    Entry ``[out, in]`` is Per(u[rows(out), cols(in)]) / sqrt(prod n_in! prod n_out!).
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("lift_unitary needs a unitary mode matrix")
    m = u.shape[0]
    if basis is None:
        basis = enumerate_basis(m, total_photons)
    elif basis.mode_count != m or basis.total_photons != total_photons:
        raise ValueError("basis does not match the unitary size / photon number")
    rows = [_repeat(s) for s in basis.states]
    norms = [sqrt(prod(factorial(n) for n in s)) for s in basis.states]
    out = np.empty((basis.size, basis.size), dtype=complex)
    for j, cols in enumerate(rows):
        sub = u[:, cols]
        for i, r in enumerate(rows):
            out[i, j] = permanent(sub[r, :]) / (norms[i] * norms[j])
    return out


def fidelity(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("fidelity is undefined for zero vectors")
    return float(abs(np.vdot(a, b)) ** 2 / (na * nb) ** 2)


def embed_two_mode(g, modes: Sequence[int], mode_count: int) -> np.ndarray:
    """Identity on ``mode_count`` modes with the 2x2 block ``g`` on ``modes``."""
    u = np.eye(mode_count, dtype=complex)
    idx = np.array(modes)
    u[np.ix_(idx, idx)] = g
    return u
