"""
Return walks on small graphs
============================

A pulse drives a continuous-time walk ``exp(-i pi Xi)`` on the graph of
states it couples. The walk is useful for gates when all amplitude comes
back to the start node, either unchanged (R0) or with a sign flip (Rpi).
Whether that happens is read off the spectrum of ``Xi``.
"""

import numpy as np

from qwalkgates.engine import classify_return, integer_spectrum_report, trajectory
from qwalkgates.graphs import chain_graph, reduce_fan
from qwalkgates.solvers import chain3_integer_solutions, chain4_integer, chain4_solve, star_graph

# Two nodes: amplitude k returns with phase (-1)^k.
for k in (1, 2, 1.5):
    rc = classify_return(chain_graph([k]), (0,))
    print(f"two nodes, xi = {k}: {rc.kind.value}, leak {rc.leak:.3f}")

# Three nodes return when |a|^2 + |b|^2 = (2n)^2; integer choices are
# Pythagorean triples.
print("\ninteger three-chains with n = 5:", chain3_integer_solutions(5))
g = chain_graph([6, 8])
print("spectrum of (6, 8):", integer_spectrum_report(g).eigenvalues.round(12))

# Watch the population leave node 0 and come back.
fr, amps = trajectory(g, (0,), samples=9)
for f, row in zip(fr, np.abs(amps) ** 2):
    print(f"  f = {f:.3f}  " + "  ".join(f"{p:.3f}" for p in row))

# Four nodes: spectrum +-n, +-m. One free magnitude remains after fixing (n, m).
fam = chain4_solve(3, 1)
amps = fam.evaluate(a=2.0, phi_a=0.0, phi_b=0.0, phi_c=0.0)
print("\nfour-chain (n, m) = (3, 1), |a| = 2:", np.abs(amps).round(6),
      classify_return(fam.graph(a=2.0, phi_a=0, phi_b=0, phi_c=0), (0,)).kind.value)
print("integer four-chain from |a| = 5:", chain4_integer(5))

# A fan reduces to a single edge with amplitude equal to the spoke norm.
fan = star_graph([1, 2, 2])
print("\nfan (1, 2, 2) -> effective amplitude", round(reduce_fan(fan, (0,)).amplitude, 12),
      "->", classify_return(fan, (0,)).kind.value)
print("full spectrum parity:", integer_spectrum_report(fan).parity.value,
      "| seen from the hub:", integer_spectrum_report(fan, start=(0,)).parity.value)
