import json
import math

import numpy as np
import pytest

from qwalkgates.engine import ReturnKind, classify_return
from qwalkgates.graphs import connected_components, format_label
from qwalkgates.solvers import InfeasibleError
from qwalkgates.synthesis import (
    THREE_PULSE_ROWS,
    GateName,
    GateSpec,
    Pulse,
    PulseSequence,
    Synthesis,
    ccz_single_pulse_amplitudes,
    next_nearest_amplitudes,
    synth_ccz_single_pulse,
    synth_ccz_three_pulse,
    synth_cz_adjacent,
    synth_cz_next_nearest,
    synth_cz_pi_pulses,
    synth_single_qubit,
)
from qwalkgates.verify import gate_unitary


def test_gate_spec_validation():
    assert GateSpec(3, "CCZ").minus_states == ("111",)
    assert GateSpec(1, "Hadamard").minus_states == ()
    with pytest.raises(ValueError):
        GateSpec(2, "CCZ")
    with pytest.raises(ValueError):
        GateSpec(1, "CZ")
    with pytest.raises(ValueError):
        GateSpec(2, "CZ", ("12",))
    with pytest.raises(ValueError):
        GateSpec(4, "Z")


def test_gate_spec_matrices():
    np.testing.assert_allclose(GateSpec(2, "CZ").matrix(), np.diag([1, 1, 1, -1]))
    sp = GateSpec(1, "SwapPhase", phi=0.3).matrix()
    np.testing.assert_allclose(sp @ sp.conj().T, np.eye(2), atol=1e-15)


def test_pulse_validation_and_peak():
    p = Pulse({"a": 1 + 1j, "b": -2.0})
    assert p.peak == pytest.approx(2.0)
    with pytest.raises(ValueError):
        Pulse({"a": 1}, fraction=1.5)
    with pytest.raises(ValueError):
        PulseSequence(())


@pytest.mark.parametrize("phi", np.linspace(0, 2 * np.pi, 8, endpoint=False))
def test_swap_phase(phi):
    s = synth_single_qubit(GateSpec(1, "SwapPhase", phi=phi))
    r = gate_unitary(s)
    assert r.leakage <= 1e-9 and r.fidelity >= 1 - 1e-9
    # |x0|^2 + |x1|^2 = 1 closes the three-chain
    acts = s.sequence.pulses[0].activations
    assert sum(abs(v) ** 2 for v in acts.values()) == pytest.approx(1.0)


def test_hadamard_amplitude_ratio():
    s = synth_single_qubit(GateSpec(1, "Hadamard"))
    acts = s.sequence.pulses[0].activations
    x0, x1 = acts["s0:0-2"], acts["s0:1-2"]
    assert abs(x1) / abs(x0) == pytest.approx(1 / (math.sqrt(2) - 1))
    assert (x0 * x1).real < 0


def test_z_gate():
    r = gate_unitary(synth_single_qubit(GateSpec(1, "Z")))
    assert r.fidelity >= 1 - 1e-9


def test_single_qubit_rejects_multi():
    with pytest.raises(ValueError):
        synth_single_qubit(GateSpec(2, "CZ"))


def test_cz_square_components():
    s = synth_cz_adjacent("square")
    driven = s.graph.with_amplitudes(s.sequence.pulses[0].activations)
    for comp in connected_components(driven):
        (b,) = comp.boolean_nodes
        kind = classify_return(comp, b).kind
        want = ReturnKind.RPI if format_label(b) == "11" else ReturnKind.R0
        assert kind is want
    assert s.sequence.phase_locked


@pytest.mark.parametrize("phi_i,phi_ii", [(0.0, 0.0), (1.0, 2.5), (4.0, 0.3)])
def test_cz_square_free_phases(phi_i, phi_ii):
    r = gate_unitary(synth_cz_adjacent("square", phi_i=phi_i, phi_ii=phi_ii))
    assert r.fidelity >= 1 - 1e-9


def test_cz_square_bad_params():
    with pytest.raises(ValueError):
        synth_cz_adjacent("square", n1=3)
    with pytest.raises(ValueError):
        synth_cz_adjacent("square", m=2, n=4)
    with pytest.raises(ValueError):
        synth_cz_adjacent("triangle")


def test_cz_chain_variant():
    s = synth_cz_adjacent("chain", n1=3, m=2, n=4)
    r = gate_unitary(s)
    assert r.leakage <= 1e-9
    assert r.dressing == [0]
    assert r.dressed_fidelity >= 1 - 1e-9
    assert not s.sequence.phase_locked
    with pytest.raises(ValueError):
        synth_cz_adjacent("chain", n1=2, m=2, n=4)


def test_cz_pi_pulses():
    s = synth_cz_pi_pulses()
    r = gate_unitary(s)
    assert len(s.sequence.pulses) == 4
    assert r.dressed_fidelity >= 1 - 1e-9
    assert r.time_units == pytest.approx(2.0)


def test_next_nearest_amplitudes():
    a2, b3, c1 = next_nearest_amplitudes()
    assert a2 == pytest.approx(math.sqrt(6))
    assert c1 == pytest.approx(math.sqrt(1.5))
    assert b3 == pytest.approx(math.sqrt(2.5))
    with pytest.raises(InfeasibleError):
        next_nearest_amplitudes(1, 3, 4)
    with pytest.raises(ValueError):
        next_nearest_amplitudes(2, 3, 2)


def test_next_nearest_gate():
    r = gate_unitary(synth_cz_next_nearest())
    assert r.fidelity >= 1 - 1e-9
    # a CZ between qubits 0 and 2, dressed by single-qubit Z
    assert (0, 2) in r.phase_terms and (0, 1) not in r.phase_terms


def test_ccz_single_pulse_reference_values():
    amps = ccz_single_pulse_amplitudes()
    assert amps["bIII"].real == pytest.approx((3 + math.sqrt(17)) / 2)
    assert amps["cIII"].real == pytest.approx((3 - math.sqrt(17)) / 2)
    assert amps["bII"] == pytest.approx(math.sqrt(3))


@pytest.mark.parametrize("free", [(0.0, math.pi), (0.4, 1.3), (2.0, 5.0)])
def test_ccz_single_pulse(free):
    r = gate_unitary(synth_ccz_single_pulse(free_phases=free))
    assert r.leakage <= 1e-9
    assert r.fidelity >= 1 - 1e-9


def test_ccz_single_pulse_bad_params():
    with pytest.raises(ValueError):
        ccz_single_pulse_amplitudes(n=2)
    with pytest.raises(InfeasibleError):
        ccz_single_pulse_amplitudes(n=3, m=2)


@pytest.mark.parametrize("state", sorted(THREE_PULSE_ROWS))
def test_ccz_three_pulse_rows(state):
    s = synth_ccz_three_pulse(state)
    r = gate_unitary(s)
    assert r.leakage <= 1e-9
    diag = np.real(np.diag(r.subspace_matrix))
    want = -np.ones(8)
    want[int(state, 2)] = 1
    np.testing.assert_allclose(diag, want, atol=1e-9)


def test_ccz_three_pulse_bad_state():
    with pytest.raises(ValueError):
        synth_ccz_three_pulse("12")


def test_synthesis_round_trip():
    s = synth_ccz_single_pulse()
    text = s.to_json()
    back = Synthesis.from_dict(json.loads(text))
    assert back.to_json() == text
    assert gate_unitary(back).fidelity == pytest.approx(gate_unitary(s).fidelity)
    assert back.spec.name is GateName.CCZ
