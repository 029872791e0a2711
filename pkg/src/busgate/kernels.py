"""Inner loops: RK4 stepping, eigen-step application and the Ryser permanent.

Each kernel has a numba version and a numpy version with the same
signature. The public names at the bottom pick one according to
``busgate._accel.USE_NUMBA``. Tests and the benchmark call both directly.

Propagation kernels take ``psi`` as a ``(dim, ncols)`` complex array so a
whole endpoint map propagates in one call. They return the final state,
snapshots at ``record_steps`` and, per column, the peak bus population and
peak ``| ||psi|| - 1 |`` seen over every step.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------- RK4, numba


@njit(cache=True)
def _apply_h_nb(psi, omega, diag, rows, cols, amps, wg, out):
    d, k = psi.shape
    for i in range(d):
        for c in range(k):
            out[i, c] = diag[i] * psi[i, c]
    for t in range(rows.size):
        coef = omega[wg[t]] * amps[t]
        r = rows[t]
        s = cols[t]
        for c in range(k):
            out[r, c] += coef * psi[s, c]


@njit(cache=True)
def _track_nb(psi, bus_occ, peak_bus, peak_drift):
    d, k = psi.shape
    for c in range(k):
        nrm = 0.0
        bus = 0.0
        for i in range(d):
            p = psi[i, c].real ** 2 + psi[i, c].imag ** 2
            nrm += p
            bus += bus_occ[i] * p
        drift = abs(np.sqrt(nrm) - 1.0)
        if bus > peak_bus[c]:
            peak_bus[c] = bus
        if drift > peak_drift[c]:
            peak_drift[c] = drift


@njit(cache=True)
def rk4_propagate_numba(psi0, omega_nodes, diag, rows, cols, amps, wg, h, record_steps, bus_occ):
    n_steps = (omega_nodes.shape[0] - 1) // 2
    d, k = psi0.shape
    psi = psi0.copy()
    snaps = np.empty((record_steps.size, d, k), dtype=np.complex128)
    peak_bus = np.zeros(k)
    peak_drift = np.zeros(k)
    k1 = np.empty_like(psi)
    k2 = np.empty_like(psi)
    k3 = np.empty_like(psi)
    k4 = np.empty_like(psi)
    tmp = np.empty_like(psi)
    mi = -1j
    nxt = 0
    _track_nb(psi, bus_occ, peak_bus, peak_drift)
    if nxt < record_steps.size and record_steps[nxt] == 0:
        snaps[nxt] = psi
        nxt += 1
    for step in range(n_steps):
        o0 = omega_nodes[2 * step]
        o1 = omega_nodes[2 * step + 1]
        o2 = omega_nodes[2 * step + 2]
        _apply_h_nb(psi, o0, diag, rows, cols, amps, wg, k1)
        for i in range(d):
            for c in range(k):
                k1[i, c] *= mi
                tmp[i, c] = psi[i, c] + 0.5 * h * k1[i, c]
        _apply_h_nb(tmp, o1, diag, rows, cols, amps, wg, k2)
        for i in range(d):
            for c in range(k):
                k2[i, c] *= mi
                tmp[i, c] = psi[i, c] + 0.5 * h * k2[i, c]
        _apply_h_nb(tmp, o1, diag, rows, cols, amps, wg, k3)
        for i in range(d):
            for c in range(k):
                k3[i, c] *= mi
                tmp[i, c] = psi[i, c] + h * k3[i, c]
        _apply_h_nb(tmp, o2, diag, rows, cols, amps, wg, k4)
        for i in range(d):
            for c in range(k):
                psi[i, c] += h / 6.0 * (k1[i, c] + 2.0 * k2[i, c] + 2.0 * k3[i, c] + mi * k4[i, c])
        _track_nb(psi, bus_occ, peak_bus, peak_drift)
        if nxt < record_steps.size and record_steps[nxt] == step + 1:
            snaps[nxt] = psi
            nxt += 1
    return psi, snaps, peak_bus, peak_drift


# ---------------------------------------------------------------- RK4, numpy


def _dense_operators(rows, cols, amps, wg, n_waveguides, dim):
    stack = np.zeros((n_waveguides, dim, dim))
    np.add.at(stack, (wg, rows, cols), amps)
    return stack


def _track_np(psi, bus_occ, peak_bus, peak_drift):
    p = np.abs(psi) ** 2
    np.maximum(peak_bus, bus_occ @ p, out=peak_bus)
    np.maximum(peak_drift, np.abs(np.sqrt(p.sum(axis=0)) - 1.0), out=peak_drift)


def rk4_propagate_numpy(psi0, omega_nodes, diag, rows, cols, amps, wg, h, record_steps, bus_occ):
    n_steps = (omega_nodes.shape[0] - 1) // 2
    d, k = psi0.shape
    stack = _dense_operators(rows, cols, amps, wg, omega_nodes.shape[1], d)
    dmat = np.diag(diag)
    psi = psi0.astype(np.complex128, copy=True)
    snaps = np.empty((record_steps.size, d, k), dtype=np.complex128)
    peak_bus = np.zeros(k)
    peak_drift = np.zeros(k)
    records = {int(s): j for j, s in enumerate(record_steps)}
    _track_np(psi, bus_occ, peak_bus, peak_drift)
    if 0 in records:
        snaps[records[0]] = psi
    h_next = np.tensordot(omega_nodes[0], stack, axes=1) + dmat
    for step in range(n_steps):
        h0 = h_next
        h1 = np.tensordot(omega_nodes[2 * step + 1], stack, axes=1) + dmat
        h_next = np.tensordot(omega_nodes[2 * step + 2], stack, axes=1) + dmat
        k1 = -1j * (h0 @ psi)
        k2 = -1j * (h1 @ (psi + 0.5 * h * k1))
        k3 = -1j * (h1 @ (psi + 0.5 * h * k2))
        k4 = -1j * (h_next @ (psi + h * k3))
        psi = psi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _track_np(psi, bus_occ, peak_bus, peak_drift)
        j = records.get(step + 1)
        if j is not None:
            snaps[j] = psi
    return psi, snaps, peak_bus, peak_drift


# ------------------------------------------------- piecewise exponential steps


@njit(cache=True)
def expm_apply_numba(psi, vecs, phases, bus_occ, step_offset, record_steps, snaps, nxt,
                     peak_bus, peak_drift):
    """Apply ``V diag(phase) V†`` for each step of a chunk, in order, in place."""
    n, d, _ = vecs.shape
    k = psi.shape[1]
    tmp = np.empty((d, k), dtype=np.complex128)
    for s in range(n):
        v = vecs[s]
        for a in range(d):
            for c in range(k):
                acc = 0j
                for b in range(d):
                    acc += np.conj(v[b, a]) * psi[b, c]
                tmp[a, c] = acc * phases[s, a]
        for a in range(d):
            for c in range(k):
                acc = 0j
                for b in range(d):
                    acc += v[a, b] * tmp[b, c]
                psi[a, c] = acc
        _track_nb(psi, bus_occ, peak_bus, peak_drift)
        if nxt < record_steps.size and record_steps[nxt] == step_offset + s + 1:
            snaps[nxt] = psi
            nxt += 1
    return nxt


def expm_apply_numpy(psi, vecs, phases, bus_occ, step_offset, record_steps, snaps, nxt,
                     peak_bus, peak_drift):
    for s in range(vecs.shape[0]):
        v = vecs[s]
        psi[:] = v @ (phases[s][:, None] * (v.conj().T @ psi))
        _track_np(psi, bus_occ, peak_bus, peak_drift)
        if nxt < record_steps.size and record_steps[nxt] == step_offset + s + 1:
            snaps[nxt] = psi
            nxt += 1
    return nxt


def expm_propagate(psi0, omega_mid, stack, diag, h, record_steps, bus_occ,
                   apply=None, chunk: int = 1024):
    """Midpoint piecewise-constant propagation via batched Hermitian eigendecomposition."""
    apply = expm_apply if apply is None else apply
    d, k = psi0.shape
    psi = np.array(psi0, dtype=np.complex128, order="C")
    snaps = np.empty((record_steps.size, d, k), dtype=np.complex128)
    peak_bus = np.zeros(k)
    peak_drift = np.zeros(k)
    _track_np(psi, bus_occ, peak_bus, peak_drift)
    nxt = 0
    if record_steps.size and record_steps[0] == 0:
        snaps[0] = psi
        nxt = 1
    dmat = np.diag(diag)
    n_steps = omega_mid.shape[0]
    for start in range(0, n_steps, chunk):
        ham = np.tensordot(omega_mid[start:start + chunk], stack, axes=1) + dmat
        w, v = np.linalg.eigh(ham)
        phases = np.exp(-1j * h * w)
        nxt = apply(psi, np.ascontiguousarray(v.astype(np.complex128)), phases, bus_occ,
                    start, record_steps, snaps, nxt, peak_bus, peak_drift)
    return psi, snaps, peak_bus, peak_drift


# ---------------------------------------------------------------- permanent


@njit(cache=True)
def permanent_numba(a):
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0j
    gray = 0
    for k in range(1, 1 << n):
        # flip the lowest set bit of k in the Gray code
        j = 0
        while not (k >> j) & 1:
            j += 1
        bit = 1 << j
        if gray & bit:
            gray ^= bit
            for i in range(n):
                rowsum[i] -= a[i, j]
        else:
            gray |= bit
            for i in range(n):
                rowsum[i] += a[i, j]
        prod = 1.0 + 0j
        for i in range(n):
            prod *= rowsum[i]
        size = 0
        g = gray
        while g:
            size += g & 1
            g >>= 1
        if (n - size) % 2:
            total -= prod
        else:
            total += prod
    return total


def permanent_numpy(a):
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    subsets = (np.arange(1, 1 << n)[:, None] >> np.arange(n)) & 1
    prods = np.prod(subsets @ a.T, axis=1)
    signs = np.where((n - subsets.sum(axis=1)) % 2, -1.0, 1.0)
    return complex(np.sum(signs * prods))


if USE_NUMBA:
    rk4_propagate = rk4_propagate_numba
    expm_apply = expm_apply_numba
    _permanent = permanent_numba
else:
    rk4_propagate = rk4_propagate_numpy
    expm_apply = expm_apply_numpy
    _permanent = permanent_numpy


def permanent_kernel(a) -> complex:
    return complex(_permanent(np.ascontiguousarray(a, dtype=np.complex128)))
