import math

import numpy as np
import pytest

from activeflux.mesh import FarField, Grid1D, Grid2D, Periodic, project_initial
from activeflux.problems import (
    PROBLEM_IDS,
    barenblatt,
    barenblatt_support_edge,
    convergence_study,
    error_norms,
    exact_heat_1d,
    exact_heat_2d,
    get_problem,
    rate,
    ring_field,
    ring_variation,
    run_problem,
    two_boxes_unequal,
    two_hills_initial,
    waiting_time_initial,
)
from activeflux.semidiscrete import FieldMatrix, PmePower


def test_exact_heat_examples():
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(exact_heat_1d(x, 0.0), np.sin(2 * np.pi * x))
    assert exact_heat_1d(0.25, 1.0) == pytest.approx(math.exp(-0.2 * math.pi**2))
    assert exact_heat_2d(0.125, 0.125, 1.0) == pytest.approx(math.exp(-4 * math.pi**2 * 0.08))


@pytest.mark.parametrize("m", [2, 3, 5, 8])
def test_barenblatt_center(m):
    assert barenblatt(1.0, m, 0.0, 1.0) == 1.0


def test_barenblatt_examples():
    assert barenblatt(1.0, 2, 2.0, 1.0) == pytest.approx(2 / 3)
    assert barenblatt_support_edge(1.0, 2, 1.0) == pytest.approx(math.sqrt(12))
    assert barenblatt(1.0, 2, math.sqrt(12) + 1e-9, 1.0) == 0.0
    assert barenblatt(1.0, 2, math.sqrt(12) - 1e-3, 1.0) > 0.0


@pytest.mark.parametrize("m", [2, 3, 5])
def test_barenblatt_mass_is_time_invariant(m):
    x = np.linspace(-12, 12, 200001)
    dx = x[1] - x[0]
    masses = [np.sum(barenblatt(1.0, m, x, t)) * dx for t in (1.0, 1.5, 2.0)]
    np.testing.assert_allclose(masses, masses[0], rtol=1e-5)


def test_initial_data_examples():
    assert two_boxes_unequal(1.5) == 2.0
    assert waiting_time_initial(0.0) == 1.0 and waiting_time_initial(2.0) == 0.0
    assert two_hills_initial(2.0, -2.0) == pytest.approx(math.exp(-1 / 6))
    assert two_hills_initial(0.0, 0.0) == 0.0


def test_ring_field_is_tangential_projector():
    A = ring_field(np.array([0.3]), np.array([0.4]))[0]
    np.testing.assert_allclose(A @ np.array([0.3, 0.4]), 0.0, atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(A), [0.0, 1.0], atol=1e-15)
    assert np.all(ring_field(np.array([0.0]), np.array([0.0])) == 0)


@pytest.mark.parametrize("pid", PROBLEM_IDS)
def test_registry(pid):
    p = get_problem(pid)
    g = p.grid(8)
    s = p.initial_state(g)
    s.check(g, p.bc)
    assert (p.coefficient.__class__ is PmePower) == (pid in {"barenblatt", "two_boxes_equal", "two_boxes_unequal",
                                                             "waiting_time", "two_hills"})
    assert p.limiter == isinstance(p.coefficient, PmePower)
    if pid == "ring":
        assert isinstance(p.bc, FarField) and isinstance(p.coefficient, FieldMatrix)


def test_registry_rejects_unknown():
    with pytest.raises(ValueError):
        get_problem("three_hills")
    assert get_problem("barenblatt", m=5).coefficient == PmePower(5)


def test_error_norms_exact_and_offset():
    g = Grid1D(0, 2, 16)
    exact = lambda x, t: np.cos(np.pi * x) * 0 + 0.5 * np.asarray(x) ** 2
    s = project_initial(g, lambda x: exact(x, 0.0), Periodic())
    e = error_norms(s, exact, g, 0.0)
    assert e.l2_avg == 0 and e.linf_pnt == 0
    delta = 1e-3
    e = error_norms(s + 0 * s + AFState(g, delta), exact, g, 0.0)
    assert e.linf_avg == pytest.approx(delta) and e.linf_pnt == pytest.approx(delta)
    assert e.l2_avg == pytest.approx(delta * math.sqrt(2.0))
    assert e.l2_pnt == pytest.approx(delta * math.sqrt(2.0))
    g2 = Grid2D(0, 1, 0, 3, 4, 6)
    ex2 = lambda x, y, t: np.sin(x) * np.cos(y)
    s2 = project_initial(g2, lambda x, y: ex2(x, y, 0), Periodic())
    e2 = error_norms(s2 + AFState(g2, delta), ex2, g2, 0.0)
    assert e2.l2_avg == pytest.approx(delta * math.sqrt(3.0))
    assert e2.l2_pnt == pytest.approx(delta * math.sqrt(3.0))


def AFState(grid, value):
    from activeflux.mesh import AFState1D, AFState2D

    if isinstance(grid, Grid1D):
        return AFState1D(np.full(grid.n_cells, value), np.full(grid.n_cells, value))
    shape = (grid.n_x, grid.n_y)
    return AFState2D(*(np.full(shape, value) for _ in range(4)))


def test_rate():
    assert rate(16.0, 1.0) == 4.0
    assert math.isnan(rate(0.0, 1.0))


def test_convergence_study_small():
    table = convergence_study(get_problem("accuracy1d"), [20, 40, 80])
    ra, rp = table.finest_rates()
    assert 3.7 <= ra <= 4.3 and 3.7 <= rp <= 4.3
    with pytest.raises(ValueError):
        convergence_study(get_problem("accuracy1d"), [20, 30])
    with pytest.raises(ValueError):
        convergence_study(get_problem("two_hills"), [10, 20])


def test_convergence_study_flags_instability():
    table = convergence_study(get_problem("accuracy1d"), [80, 160], cfl=0.35)
    assert any(r.status == "unstable" for r in table.rows)


def test_ring_variation_decays():
    p = get_problem("ring")
    times = (0.05, 0.1, 0.15, 0.2, 0.25)
    g, res = run_problem(p, n=31, t_final=0.25, snapshot_times=times)
    for radius in (0.5, 0.6, 0.7):
        v = [ring_variation(res.snapshots[t], g, radius) for t in times]
        assert all(b < a for a, b in zip(v, v[1:])), (radius, v)
    # the far field keeps its value and the solution stays bounded by the data
    assert res.state.min() > 0.09


def test_ring_variation_of_constant_is_zero():
    g = Grid2D(-1, 1, -1, 1, 9, 9)
    s = project_initial(g, lambda x, y: 0.1 + 0 * x, FarField(0.1))
    assert ring_variation(s, g, 0.5) < 1e-15
