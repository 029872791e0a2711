"""Adiabatic bus-coupled photonic gates: Fock-space simulator and linear-optics oracle."""

from ._accel import HAVE_NUMBA, USE_NUMBA
from .coupling import (CouplingSchedule, SlabParams, UnreachableCouplingError, WaveguidePath,
                       coupling_from_position, divider_schedule, position_for_coupling,
                       schedule_to_paths, usb_gate_schedule)
from .fock import FockBasis, apply_hopping, enumerate_basis, parse_label, state_label
from .gates import (CNOT_ROLES, CircuitNetwork, DeviceContext, GateSpec, ProtocolError,
                    alpha_for_reflectivity, classify_outcome, default_cnot_network, gate_matrix,
                    load_network, oracle_network, run_gate, run_network)
from .hamiltonian import HamiltonianModel, assemble, two_photon_null_vectors
from .oracle import fidelity, lift_unitary, permanent
from .propagator import (EvolutionTrace, IntegrationError, IntegratorConfig, adiabaticity_report,
                         endpoint_map, evolve)

__version__ = "0.1.0"
