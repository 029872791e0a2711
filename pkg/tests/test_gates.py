import numpy as np
import pytest
from hypothesis import given, strategies as st

from busgate.gates import (CNOT_INPUTS, CNOT_ROLES, CircuitNetwork, DeviceContext, GateSpec,
                           ProtocolError, alpha_for_reflectivity, classify_outcome, cnot_input,
                           default_cnot_network, dump_network, gate_matrix, load_network,
                           oracle_network, propagate_gate, reflectivity, run_gate, run_network)
from busgate.fock import parse_label
from busgate.oracle import fidelity, lift_unitary
from busgate.propagator import IntegratorConfig


@pytest.mark.parametrize("alpha,expected", [
    (1.0, [[0, -1], [-1, 0]]),
    (np.tan(np.pi / 8), -np.array([[1, 1], [1, -1]]) / np.sqrt(2)),
])
def test_gate_matrix_closed_form(alpha, expected):
    np.testing.assert_allclose(gate_matrix(alpha), expected, atol=1e-12)


@given(st.floats(0.01, 100.0), st.sampled_from([1, -1]))
def test_gate_matrix_is_real_reflection(alpha, sign):
    g = gate_matrix(alpha, sign)
    np.testing.assert_allclose(g @ g, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(g, g.T)
    assert np.linalg.det(g) == pytest.approx(-1.0)


@given(st.floats(0.0, 0.999))
def test_reflectivity_round_trip(r):
    alpha = alpha_for_reflectivity(r)
    assert reflectivity(alpha) == pytest.approx(r, abs=1e-12)
    assert gate_matrix(alpha)[0, 0] ** 2 == pytest.approx(r, abs=1e-12)


def test_named_ratios():
    assert alpha_for_reflectivity(0.0) == pytest.approx(1.0)
    assert alpha_for_reflectivity(0.5) == pytest.approx(np.tan(np.pi / 8))
    assert alpha_for_reflectivity(1 / 3) == pytest.approx(np.sqrt(2 - np.sqrt(3)))
    with pytest.raises(ValueError):
        alpha_for_reflectivity(1.0)


@pytest.mark.parametrize("kwargs", [dict(alpha=-1.0), dict(alpha=1.0, sign=0),
                                    dict(alpha=1.0, modes=(1, 1)),
                                    dict(alpha=1.0, modes=(1, 3), aux_mode=3)])
def test_gate_spec_validation(kwargs):
    with pytest.raises(ValueError):
        GateSpec(**kwargs)


def test_short_gate_matches_oracle_one_photon():
    gate = GateSpec.from_ratio(0.5, z_max=300.0)
    ctx = DeviceContext()
    psi0 = ctx.basis.basis_vector("0100")
    ideal = lift_unitary(gate.mode_unitary(4), 1, ctx.basis) @ psi0
    assert fidelity(ideal, run_gate(psi0, gate, ctx)) > 0.999


def test_gate_refuses_occupied_aux():
    ctx = DeviceContext()
    with pytest.raises(ProtocolError):
        propagate_gate(ctx.basis.basis_vector("0001"), GateSpec(1.0, z_max=50.0), ctx)


def test_gate_beyond_device():
    with pytest.raises(ValueError):
        run_gate(np.eye(4)[1], GateSpec(1.0, modes=(1, 5), aux_mode=3), DeviceContext())


def test_network_requires_shared_bus_and_aux():
    g1 = GateSpec(1.0, modes=(1, 2), aux_mode=3)
    g2 = GateSpec(1.0, modes=(1, 2), aux_mode=4)
    with pytest.raises(ValueError):
        CircuitNetwork(5, (g1, g2))
    with pytest.raises(ValueError):
        CircuitNetwork(3, (g1,))


PAPER_ROWS = {
    "C1T0": {"00100010": 1 / 9, "00101000": 1 / 9, "00110000": 1 / 9,
             "01000010": 2 / 9, "01001000": 2 / 9, "01010000": 2 / 9},
    "C0T0": {"00000110": 1 / 9, "00001010": 1 / 9, "00001100": 1 / 9, "00002000": 2 / 9,
             "00010010": 1 / 9, "00010100": 1 / 9, "00020000": 2 / 9},
}


@pytest.mark.parametrize("name", sorted(PAPER_ROWS))
def test_default_network_oracle_table(name):
    res = oracle_network(cnot_input(name), default_cnot_network())
    got = {k: v for k, v in res.probabilities.items() if v > 1e-12}
    assert set(got) == set(PAPER_ROWS[name])
    for k, p in PAPER_ROWS[name].items():
        assert got[k] == pytest.approx(p, abs=1e-12)


def test_cnot_inputs():
    assert {n: "".join(map(str, cnot_input(n))) for n in CNOT_INPUTS} == {
        "C0T0": "00010100", "C0T1": "00011000", "C1T0": "00100100", "C1T1": "00101000"}


@pytest.mark.parametrize("inp,outcome,designation", [
    ("00101000", "00100100", "success"),
    ("00100100", "00101000", "success"),
    ("00010100", "00010100", "success"),
    ("00010100", "00020000", "failure"),
    ("00010100", "00011000", "failure"),   # coincidence but wrong target
    ("00100100", "01001000", "failure"),   # photon in the control vacuum
    ("00011000", "00000200", "failure"),
])
def test_classify_outcome(inp, outcome, designation):
    assert classify_outcome(parse_label(outcome), CNOT_ROLES, parse_label(inp)) == designation


def test_network_file_round_trip(tmp_path):
    net = default_cnot_network(321.0)
    path = tmp_path / "net.ini"
    path.write_text(dump_network(net))
    back = load_network(path)
    assert back.mode_count == 8 and dict(back.roles) == CNOT_ROLES
    assert [g.modes for g in back.gates] == [g.modes for g in net.gates]
    assert [g.z_max for g in back.gates] == [321.0] * 5
    np.testing.assert_allclose(back.mode_unitary(), net.mode_unitary(), atol=1e-15)


def test_shipped_network_matches_default():
    import pathlib

    shipped = load_network(pathlib.Path(__file__).parents[1] / "configs" / "cnot_default.ini")
    np.testing.assert_allclose(shipped.mode_unitary(), default_cnot_network().mode_unitary(),
                               atol=1e-14)
    assert dict(shipped.roles) == CNOT_ROLES


def test_network_file_errors(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[network]\nmode_count = 4\n[gate A]\nratio = 0.5\nmodes = 1\n")
    with pytest.raises(ValueError):
        load_network(bad)


def test_run_network_matches_oracle_on_small_circuit():
    # two gates sharing a bus on five modes, two photons
    gates = (GateSpec.from_ratio(0.5, modes=(1, 2), aux_mode=4, z_max=300.0),
             GateSpec.from_ratio(1 / 3, modes=(2, 3), aux_mode=4, z_max=300.0))
    net = CircuitNetwork(5, gates)
    sim = run_network((0, 1, 1, 0, 0), net)
    ref = oracle_network((0, 1, 1, 0, 0), net)
    assert fidelity(ref.final, sim.final) > 0.999
    assert len(sim.traces) == 2 and sim.trace().z[-1] == pytest.approx(600.0)


def test_run_network_context_mismatch():
    net = default_cnot_network()
    with pytest.raises(ValueError):
        run_network((1, 0, 0), net)
    with pytest.raises(ValueError):
        run_network(cnot_input("C0T0"), net, DeviceContext(8, 1))
