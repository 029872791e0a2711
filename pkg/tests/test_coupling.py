import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st

from busgate.coupling import (SlabParams, UnreachableCouplingError, coupling_from_position,
                              divider_schedule, position_for_coupling, schedule_to_paths,
                              usb_gate_schedule, write_geometry_csv, write_schedule_csv,
                              zero_schedule)

slabs = st.builds(SlabParams, st.floats(0.1, 5.0), st.floats(0.1, 5.0))


@given(slabs, st.floats(-1.0, 1.0), st.integers(0, 4))
def test_position_inverts_coupling(slab, u, period):
    x = position_for_coupling(u * slab.omega_max, slab, period)
    assert coupling_from_position(x, slab) == pytest.approx(u * slab.omega_max, abs=1e-12)
    # stays inside its own period
    assert abs(slab.beta0 * x - period * np.pi) <= np.pi / 2 + 1e-12


def test_unreachable_coupling():
    with pytest.raises(UnreachableCouplingError):
        position_for_coupling(1.5, SlabParams())


def test_adjacent_period_flips_sign():
    slab = SlabParams()
    x0, x1 = position_for_coupling(0.3, slab, 0), position_for_coupling(0.3, slab, 1)
    assert coupling_from_position(x0, slab) == pytest.approx(0.3)
    assert coupling_from_position(x1, slab) == pytest.approx(0.3)
    # same lateral offset into the next period gives the opposite sign
    assert coupling_from_position(x0 + np.pi, slab) == pytest.approx(-0.3)


def test_divider_endpoints():
    s = divider_schedule(200.0)
    np.testing.assert_allclose(s.evaluate(0.0), [1, 1, 0], atol=1e-15)
    np.testing.assert_allclose(s.evaluate(200.0), [0, 0, 1], atol=1e-15)
    assert s.evaluate(np.linspace(0, 200, 7)).shape == (7, 3)


@pytest.mark.parametrize("sign", [1, -1])
def test_gate_schedule_ratio_and_sign_change(sign):
    alpha = 0.4142
    s = usb_gate_schedule(alpha, 100.0, sign=sign)
    z = np.linspace(1, 99, 50)
    om = s.evaluate(z)
    np.testing.assert_allclose(om[:, 1], sign * alpha * om[:, 0])
    assert om[0, 2] > 0 > om[-1, 2]
    assert s.evaluate(50.0)[2] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("kwargs", [dict(alpha=0.0, z_max=1.0), dict(alpha=1.0, z_max=0.0),
                                    dict(alpha=1.0, z_max=1.0, sign=2)])
def test_gate_schedule_rejects(kwargs):
    with pytest.raises(ValueError):
        usb_gate_schedule(**kwargs)


def test_bad_slab():
    with pytest.raises(ValueError):
        SlabParams(beta0=0)
    with pytest.raises(ValueError):
        zero_schedule(0.0, 2)


def test_paths_reconstruct_schedule(tmp_path):
    slab = SlabParams(beta0=2.0, omega_max=1.0)
    sched = usb_gate_schedule(1.0, 50.0, slab)
    paths = schedule_to_paths(sched, slab, n_points=201)
    z, om = sched.sample(201)
    for i, p in enumerate(paths):
        np.testing.assert_allclose(coupling_from_position(p.x, slab), om[:, i], atol=1e-12)
        # continuous trajectory, no jumps between samples
        assert np.max(np.abs(np.diff(p.x))) < 0.1
    write_schedule_csv(tmp_path / "s.csv", sched, 11)
    write_geometry_csv(tmp_path / "g.csv", paths)
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert rows[0] == ["z", "omega_1", "omega_2", "omega_3"] and len(rows) == 12
    assert list(csv.reader(open(tmp_path / "g.csv")))[0] == ["z", "x_1", "x_2", "x_3"]


def test_paths_need_one_period_each():
    with pytest.raises(ValueError):
        schedule_to_paths(divider_schedule(10.0), SlabParams(), periods=[0, 1])
