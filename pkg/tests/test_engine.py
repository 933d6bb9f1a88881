import csv
import io

import numpy as np
import pytest

from oracles import expm_series
from qwalkgates.engine import (
    Parity,
    ReturnKind,
    classify_all,
    classify_amplitude,
    classify_return,
    evolve,
    integer_spectrum_report,
    trajectory,
    trajectory_csv,
    walk_operator,
)
from qwalkgates.graphs import WalkGraph, adjacency, chain_graph
from qwalkgates.solvers import chain4_integer, square_graph


@pytest.mark.parametrize("k,kind", [(1, ReturnKind.RPI), (2, ReturnKind.R0),
                                    (3, ReturnKind.RPI), (4, ReturnKind.R0)])
def test_two_node_integer_amplitudes(k, kind):
    assert classify_return(chain_graph([k]), (0,)).kind is kind


def test_two_node_non_integer():
    rc = classify_return(chain_graph([1.3]), (0,))
    assert rc.kind is ReturnKind.NOT_RETURN
    assert rc.leak > 0.1


def test_three_four_chain():
    g = chain_graph([6, 8])
    assert classify_return(g, (0,)).kind is ReturnKind.R0
    assert integer_spectrum_report(g).parity is Parity.ALL_EVEN


def test_self_loop_free_isolated_node():
    g = WalkGraph([(0,)])
    assert classify_return(g, (0,)).kind is ReturnKind.R0


def test_classify_amplitude_boundaries():
    assert classify_amplitude(1.0).kind is ReturnKind.R0
    assert classify_amplitude(-1.0).kind is ReturnKind.RPI
    assert classify_amplitude(1j).kind is ReturnKind.NOT_RETURN
    assert classify_amplitude(0.9).kind is ReturnKind.NOT_RETURN
    assert classify_amplitude(np.exp(1e-11j)).kind is ReturnKind.R0


def test_walk_operator_matches_series():
    g = square_graph(1 + 0.2j, 0.7, -0.4j, 1.1)
    ref = expm_series(adjacency(g), np.pi * 0.6)
    assert np.abs(walk_operator(g, 0.6) - ref).max() <= 1e-10


def test_evolve_checks_fraction():
    with pytest.raises(ValueError):
        evolve(chain_graph([1]), (0,), 1.5)
    st = evolve(chain_graph([1]), (0,), 0.5)
    np.testing.assert_allclose(st.probabilities, [0, 1], atol=1e-14)


def test_classify_all_chain4_integer():
    g = chain_graph(chain4_integer(3))
    kinds = {k.kind for k in classify_all(g).values()}
    assert kinds == {ReturnKind.RPI}


def test_spectrum_report_parities():
    assert integer_spectrum_report(chain_graph([1])).parity is Parity.ALL_ODD
    assert integer_spectrum_report(chain_graph([2, 0])).parity is Parity.ALL_EVEN
    assert integer_spectrum_report(chain_graph([1, 0])).parity is Parity.MIXED
    assert integer_spectrum_report(chain_graph([1.1])).parity is Parity.NON_INTEGER
    # zero modes count as even
    rep = integer_spectrum_report(chain_graph([3, 4]))
    assert rep.is_integer and rep.parity is Parity.MIXED


def test_trajectory_endpoints_and_norm():
    g = chain_graph([1, np.sqrt(2), 1])
    fr, amps = trajectory(g, (1,), 33)
    assert fr[0] == 0 and fr[-1] == 1
    np.testing.assert_allclose(amps[0], np.eye(4)[1], atol=1e-14)
    np.testing.assert_allclose(np.linalg.norm(amps, axis=1), 1, atol=1e-12)
    np.testing.assert_allclose(amps[-1], walk_operator(g)[:, 1], atol=1e-12)
    with pytest.raises(ValueError):
        trajectory(g, (0,), 1)


def test_trajectory_csv_columns():
    g = chain_graph([2])
    rows = list(csv.DictReader(io.StringIO(trajectory_csv(g, (0,), 5))))
    assert len(rows) == 5
    assert list(rows[0]) == ["fraction", "norm", "p_0", "p_1", "phase_0", "phase_1"]
    assert float(rows[-1]["p_0"]) == pytest.approx(1.0, abs=1e-12)
    assert all(float(r["norm"]) == pytest.approx(1.0) for r in rows)


def test_local_spectrum_of_fan():
    from qwalkgates.solvers import star_graph
    g = star_graph([1, 2, 2])  # hub amplitude 3
    assert integer_spectrum_report(g).parity is Parity.MIXED
    local = integer_spectrum_report(g, start=(0,))
    assert local.parity is Parity.ALL_ODD
    np.testing.assert_allclose(local.eigenvalues, [-3, 3], atol=1e-12)
    assert classify_return(g, (0,)).kind is ReturnKind.RPI
