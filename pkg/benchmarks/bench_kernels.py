"""Time the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths are imported directly, so the BUSGATE_DISABLE_NUMBA flag does not
matter here. Each row also reports the max deviation between the two results.
"""

import argparse
import time

import numpy as np

from busgate import kernels
from busgate.coupling import usb_gate_schedule
from busgate.gates import alpha_for_reflectivity
from busgate.hamiltonian import HamiltonianModel
from busgate.fock import enumerate_basis
from busgate.propagator import IntegratorConfig, _record_steps


def best_of(fn, repeat):
    out = fn()  # warm-up (numba compiles here)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def rk4_case(modes, photons, z_max=500.0):
    basis = enumerate_basis(modes, photons)
    sched = usb_gate_schedule(alpha_for_reflectivity(0.5), z_max)
    model = HamiltonianModel(basis, sched, coupled_modes=(1, 2, modes - 1))
    n = IntegratorConfig().steps_for(model)
    nodes = np.ascontiguousarray(sched.evaluate(np.linspace(0, z_max, 2 * n + 1)))
    hop = model.hopping
    psi0 = np.eye(basis.size, dtype=complex)[:, :4].copy()
    args = (psi0, nodes, model.diagonal, hop.rows, hop.cols, hop.amps, hop.waveguide,
            z_max / n, _record_steps(n, 1001), model.bus_occupation)
    return f"rk4  M={modes} N={photons} d={basis.size} steps={n}", args


def expm_case(modes, photons, z_max=500.0):
    basis = enumerate_basis(modes, photons)
    sched = usb_gate_schedule(alpha_for_reflectivity(0.5), z_max)
    model = HamiltonianModel(basis, sched, coupled_modes=(1, 2, modes - 1))
    n = IntegratorConfig().steps_for(model)
    h = z_max / n
    mids = sched.evaluate((np.arange(n) + 0.5) * h)
    psi0 = np.eye(basis.size, dtype=complex)[:, :4].copy()
    args = (psi0, mids, model.coupling_operators, model.diagonal, h, _record_steps(n, 1001),
            model.bus_occupation)
    return f"expm M={modes} N={photons} d={basis.size} steps={n}", args


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rows = []
    for m, n in ((4, 1), (4, 2), (8, 2)):
        name, a = rk4_case(m, n)
        t_nb, r_nb = best_of(lambda: kernels.rk4_propagate_numba(*a), args.repeat)
        t_np, r_np = best_of(lambda: kernels.rk4_propagate_numpy(*a), args.repeat)
        rows.append((name, t_nb, t_np, np.max(np.abs(r_nb[0] - r_np[0]))))
        name, a = expm_case(m, n)
        t_nb, r_nb = best_of(lambda: kernels.expm_propagate(*a, apply=kernels.expm_apply_numba),
                             args.repeat)
        t_np, r_np = best_of(lambda: kernels.expm_propagate(*a, apply=kernels.expm_apply_numpy),
                             args.repeat)
        rows.append((name, t_nb, t_np, np.max(np.abs(r_nb[0] - r_np[0]))))
    rng = np.random.default_rng(7)
    for size in (4, 6, 8):
        mat = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
        reps = 2000 // size
        t_nb, v_nb = best_of(lambda: [kernels.permanent_numba(mat) for _ in range(reps)], args.repeat)
        t_np, v_np = best_of(lambda: [kernels.permanent_numpy(mat) for _ in range(reps)], args.repeat)
        rows.append((f"permanent {size}x{size} x{reps}", t_nb, t_np, abs(v_nb[0] - v_np[0])))

    print(f"{'case':42s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max diff':>9s}")
    for name, t_nb, t_np, diff in rows:
        print(f"{name:42s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
