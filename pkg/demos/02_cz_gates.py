"""
Controlled-Z from one multicolor pulse
======================================

Two neighboring qubits share a cavity, so the auxiliary transition of one
qubit shifts depending on whether the other sits in its auxiliary state.
One pulse, colored to address several transitions at once, sends each
computational state on its own walk. Picking the walks so that only
``|11>`` returns with a sign flip gives a CZ.
"""

import numpy as np

from qwalkgates.graphs import connected_components, format_label
from qwalkgates.engine import classify_return
from qwalkgates.synthesis import synth_cz_adjacent, synth_cz_next_nearest, synth_cz_pi_pulses
from qwalkgates.verify import gate_unitary

np.set_printoptions(precision=4, suppress=True)

# Square walk for |11>: the two middle states couple to both ends.
syn = synth_cz_adjacent("square")
pulse = syn.sequence.pulses[0]
print("square CZ amplitudes:")
for name, amp in pulse.activations.items():
    print(f"  {name:>3} = {amp.real:+.6f}")
driven = syn.graph.with_amplitudes(pulse.activations)
for comp in connected_components(driven):
    (b,) = comp.boolean_nodes
    print(f"  |{format_label(b)}> walks {comp.size} nodes -> {classify_return(comp, b).kind.value}")
rep = gate_unitary(syn)
print("subspace matrix diagonal:", np.diag(rep.subspace_matrix).real)
print(f"fidelity {rep.fidelity:.12f}, leakage {rep.leakage:.1e}, time {rep.time_units:.3f}")
print("loop in the |11> graph, so the colors must be phase-locked:", syn.sequence.phase_locked)

# Chain walk instead: |10> picks up the sign, so a Z on qubit 0 is needed.
rep = gate_unitary(synth_cz_adjacent("chain", n1=3, m=2, n=4))
print("\nchain CZ phase terms:", rep.phase_terms, "dressing:", rep.dressing,
      f"dressed fidelity {rep.dressed_fidelity:.12f}")

# The textbook construction: four sequential pi-pulses.
rep = gate_unitary(synth_cz_pi_pulses())
print(f"\nfour pi-pulses: time {rep.time_units}, dressing {rep.dressing}")

# Qubits 0 and 2 of three, with no direct coupling: the walk goes through
# the middle qubit's auxiliary state.
syn = synth_cz_next_nearest()
rep = gate_unitary(syn)
print("\nnext-nearest CZ, -1 on", syn.spec.minus_states, "phase terms", rep.phase_terms,
      f"time {rep.time_units:.4f}")
