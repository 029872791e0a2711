"""Occupation-number states for a fixed number of photons.

Mode 0 is the bus by convention. States are plain tuples of ints so they
hash, compare and sort without ceremony.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, sqrt
from typing import Iterator, Sequence

import numpy as np

FockState = tuple[int, ...]


def _compositions(total: int, modes: int) -> Iterator[FockState]:
    # descending lexicographic: the first mode takes as many photons as possible first
    if modes == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, modes - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class FockBasis:
    """Indexed enumeration of all states with ``total_photons`` spread over ``mode_count`` modes."""

    mode_count: int
    total_photons: int
    states: tuple[FockState, ...]
    index: dict[FockState, int] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, k: int) -> FockState:
        return self.states[k]

    @property
    def size(self) -> int:
        return len(self.states)

    def position(self, state: Sequence[int]) -> int:
        try:
            return self.index[tuple(state)]
        except KeyError:
            raise KeyError(f"{tuple(state)} is not in the {self.mode_count}-mode, "
                           f"{self.total_photons}-photon sector") from None

    def occupations(self) -> np.ndarray:
        """(size, mode_count) integer array of occupation numbers."""
        return np.array(self.states, dtype=np.int64).reshape(self.size, self.mode_count)

    def labels(self) -> list[str]:
        return [state_label(s) for s in self.states]

    def basis_vector(self, state: Sequence[int] | str) -> np.ndarray:
        if isinstance(state, str):
            state = parse_label(state)
        psi = np.zeros(self.size, dtype=complex)
        psi[self.position(state)] = 1.0
        return psi


def enumerate_basis(mode_count: int, total_photons: int) -> FockBasis:
    if mode_count < 1:
        raise ValueError(f"mode_count must be >= 1, got {mode_count}")
    if total_photons < 0:
        raise ValueError(f"total_photons must be >= 0, got {total_photons}")
    states = tuple(_compositions(total_photons, mode_count))
    assert len(states) == comb(mode_count + total_photons - 1, total_photons)
    return FockBasis(mode_count, total_photons, states, {s: k for k, s in enumerate(states)})


def apply_hopping(state: Sequence[int], dest: int, src: int) -> tuple[FockState, float] | None:
    """Apply ``a†_dest a_src`` to a single occupation state.

    Returns ``None`` when the source mode is empty, otherwise the new state
    and the bosonic amplitude sqrt(n_dest + 1) * sqrt(n_src).
    """
    m = len(state)
    for idx in (dest, src):
        if not 0 <= idx < m:
            raise IndexError(f"mode index {idx} out of range for {m} modes")
    if dest == src:
        raise ValueError("dest and src must differ")
    n_src = state[src]
    if n_src == 0:
        return None
    n_dest = state[dest]
    out = list(state)
    out[src] -= 1
    out[dest] += 1
    return tuple(out), sqrt(n_dest + 1) * sqrt(n_src)


def hopping_matrix(basis: FockBasis, dest: int, src: int) -> np.ndarray:
    """Dense matrix of ``a†_dest a_src`` over the basis (columns are inputs)."""
    mat = np.zeros((basis.size, basis.size))
    for col, state in enumerate(basis.states):
        hit = apply_hopping(state, dest, src)
        if hit is not None:
            mat[basis.index[hit[0]], col] = hit[1]
    return mat


def state_label(state: Sequence[int]) -> str:
    if any(n > 9 for n in state):
        raise ValueError(f"occupation above 9 cannot be written as a digit label: {tuple(state)}")
    if any(n < 0 for n in state):
        raise ValueError(f"negative occupation in {tuple(state)}")
    return "".join(str(n) for n in state)


def parse_label(label: str) -> FockState:
    label = label.strip().strip("|>⟩")
    if not label.isdigit():
        raise ValueError(f"not a digit-string state label: {label!r}")
    return tuple(int(ch) for ch in label)
