import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from iontrap_dfs.analysis import analytic_total_population
from iontrap_dfs.codes import leakage, standard_code
from iontrap_dfs.dynamics import (
    LindbladModel,
    PulseSchedule,
    PulseSegment,
    alternation_schedule,
    collective_dephasing,
    evolve_closed,
    fidelity,
    fidelity_nested,
    initial_state,
    integrate_lindblad,
    liouvillian,
    lindblad_rhs,
    rk4_propagator,
    rk4_step,
    run_alternation_experiment,
    sweep_alternations,
    xy_schedule,
)
from iontrap_dfs.errors import DimensionMismatch, NotPSD, StepTooLarge
from iontrap_dfs.hamiltonians import SIGMA, collective_sz, h_xx, h_xy, h_yy
from iontrap_dfs.linalg import dagger, ket, max_abs, projector

from conftest import random_density, random_hermitian, seeds

C_I = standard_code("C_I")
RHO_001 = projector(ket("001"))
# coherence decay constant for L = sigma_z: (Z rho Z - rho)_01 = -2 rho_01
SINGLE_QUBIT_DEPHASING_FACTOR = 2.0


def test_alternation_schedule_shape():
    s1 = alternation_schedule(0, 1, 1.0, 2.0, 1, 3)
    assert len(s1.segments) == 2 and all(s.duration == 2.0 for s in s1.segments)
    s4 = alternation_schedule(0, 1, 1.0, math.pi, 4, 3)
    assert len(s4.segments) == 8
    assert all(s.duration == pytest.approx(math.pi / 4) for s in s4.segments)
    assert s4.total_duration == pytest.approx(2 * math.pi)
    assert np.array_equal(s4.segments[0].hamiltonian, h_xx(0, 1, 1.0, 3))
    assert np.array_equal(s4.segments[1].hamiltonian, h_yy(0, 1, 1.0, 3))


@pytest.mark.parametrize("n", [1, 2, 3, 8, 32])
@pytest.mark.parametrize("pair", [(0, 1), (1, 2), (0, 2)])
def test_alternation_product_equals_exchange_unitary(n, pair):
    sched = alternation_schedule(*pair, 1.0, math.pi, n, 3)
    oracle = scipy.linalg.expm(-1j * math.pi * h_xy(*pair, 1.0, 3))
    assert max_abs(sched.unitary() - oracle) <= 1e-12


def test_segment_validation():
    with pytest.raises(ValueError):
        PulseSegment(np.eye(2), -1.0)
    with pytest.raises(Exception):
        PulseSegment(np.array([[0, 1], [0, 0]]), 1.0)
    with pytest.raises(ValueError):
        LindbladModel(PulseSchedule(()), (np.eye(2),), ())
    with pytest.raises(ValueError):
        LindbladModel(PulseSchedule(()), (np.eye(2),), (-1.0,))


def test_evolve_closed_empty_schedule():
    out = evolve_closed(RHO_001, PulseSchedule(()))
    assert np.array_equal(out, RHO_001)


@pytest.mark.parametrize("t", [0.1, 0.7, 1.3, 2.9])
def test_evolve_closed_single_segment_leakage(t):
    sched = alternation_schedule(0, 1, 1.0, t, 1, 3)
    first = PulseSchedule(sched.segments[:1])
    psi = evolve_closed(ket("001"), first)
    assert leakage(projector(psi), C_I) == pytest.approx(math.sin(t) ** 2, abs=1e-12)
    back = evolve_closed(ket("001"), sched)
    assert leakage(projector(back), C_I) <= 1e-12


def test_evolve_closed_dimension_check():
    with pytest.raises(DimensionMismatch):
        evolve_closed(np.eye(4) / 4, alternation_schedule(0, 1, 1, 1, 1, 3))


def test_rhs_dark_code_states(rng):
    sz = collective_sz(3)
    for _ in range(5):
        rho = C_I.embed(random_density(rng, 3))
        for gamma in (0.1, 1.0, 10.0):
            assert max_abs(lindblad_rhs(rho, np.zeros((8, 8)), [sz], [gamma])) <= 1e-13


@pytest.mark.parametrize("gamma", [0.25, 1.0, 3.0])
def test_rhs_single_qubit_dephasing_constant(gamma):
    rho = np.array([[0.6, 0.3 - 0.2j], [0.3 + 0.2j, 0.4]])
    d = lindblad_rhs(rho, np.zeros((2, 2)), [SIGMA["z"]], [gamma])
    assert d[0, 1] == pytest.approx(-SINGLE_QUBIT_DEPHASING_FACTOR * gamma * rho[0, 1], abs=1e-15)
    assert abs(d[0, 0]) <= 1e-15 and abs(d[1, 1]) <= 1e-15


def test_rhs_zero_rate_is_commutator(rng):
    h = random_hermitian(rng, 4)
    rho = random_density(rng, 4)
    out = lindblad_rhs(rho, h, [random_hermitian(rng, 4)], [0.0])
    assert max_abs(out - (-1j) * (h @ rho - rho @ h)) <= 1e-14


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_rhs_traceless_and_hermitian(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 8)
    out = lindblad_rhs(rho, random_hermitian(rng, 8), [collective_sz(3), random_hermitian(rng, 8)], [1.0, 0.5])
    assert abs(np.trace(out)) <= 1e-12
    assert max_abs(out - dagger(out)) <= 1e-12


def test_rhs_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        lindblad_rhs(np.eye(2) / 2, np.zeros((4, 4)))


@given(seeds, st.floats(1e-3, 0.1))
@settings(max_examples=20, deadline=None)
def test_propagator_matches_stage_form_rk4(seed, h):
    rng = np.random.default_rng(seed)
    ham = random_hermitian(rng, 4)
    jumps, rates = [random_hermitian(rng, 4)], [0.7]
    rho = random_density(rng, 4)
    stage = rk4_step(lambda r: lindblad_rhs(r, ham, jumps, rates), rho, h)
    poly = (rk4_propagator(liouvillian(ham, jumps, rates), h) @ rho.ravel()).reshape(4, 4)
    assert max_abs(stage - poly) <= 1e-13


def test_liouvillian_matches_rhs(rng):
    ham, l = random_hermitian(rng, 8), collective_sz(3)
    rho = random_density(rng, 8)
    vec = liouvillian(ham, [l], [1.3]) @ rho.ravel()
    assert max_abs(vec.reshape(8, 8) - lindblad_rhs(rho, ham, [l], [1.3])) <= 1e-12


def test_rk4_fourth_order_convergence():
    # error ratio under step halving should approach 2^4
    ham = h_xx(0, 1, 1.0, 3)
    jumps, rates = collective_dephasing(3, 1.0)
    sched = PulseSchedule((PulseSegment(ham, 2.0),))
    exact = (scipy.linalg.expm(2.0 * liouvillian(ham, jumps, rates)) @ RHO_001.ravel()).reshape(8, 8)
    errs = []
    for step in (0.1, 0.05, 0.025):
        res = integrate_lindblad(RHO_001, LindbladModel(sched, jumps, rates), step)
        errs.append(max_abs(res.final_rho - exact))
    assert 12 < errs[0] / errs[1] < 20
    assert 12 < errs[1] / errs[2] < 20


def test_integrate_noiseless_matches_closed():
    sched = alternation_schedule(0, 1, 1.0, math.pi, 3, 3)
    rho0 = initial_state("plus")
    res = integrate_lindblad(rho0, LindbladModel(sched), step=math.pi / 3 / 200, code=C_I)
    assert max_abs(res.final_rho - evolve_closed(rho0, sched)) <= 1e-8
    assert res.times[0] == 0 and res.times[-1] == pytest.approx(2 * math.pi)
    assert len(res.times) == len(res.leakage_series) == 2 * 3 * 200 + 1


def test_integrate_records_leakage_on_grid():
    sched = alternation_schedule(0, 1, 1.0, 1.0, 1, 3)
    res = integrate_lindblad(RHO_001, LindbladModel(sched), step=0.01, code=C_I)
    first = res.times <= 1.0 + 1e-12
    assert np.allclose(res.leakage_series[first], np.sin(res.times[first]) ** 2, atol=1e-9)
    assert np.isnan(integrate_lindblad(RHO_001, LindbladModel(sched), 0.01).leakage_series).all()


def test_integrate_exchange_under_dephasing_stays_dark():
    sched = xy_schedule(0, 1, 1.0, math.pi, 3)
    jumps, rates = collective_dephasing(3, 1.0)
    rho0 = initial_state("plus")
    # a single length-pi segment of the full exchange needs a finer grid than
    # the alternation pulses to keep RK4 phase error below the PSD floor
    res = integrate_lindblad(rho0, LindbladModel(sched, jumps, rates), step=math.pi / 800, code=C_I)
    assert fidelity(res.final_rho, evolve_closed(rho0, sched)) == pytest.approx(1, abs=1e-8)
    assert np.max(res.leakage_series) <= 1e-12


def test_integrate_step_too_large():
    sched = PulseSchedule((PulseSegment(h_xx(0, 1, 1.0, 3), 5.0),))
    jumps, rates = collective_dephasing(3, 1.0)
    rho = initial_state("001")
    with pytest.raises(StepTooLarge):
        integrate_lindblad(rho, LindbladModel(sched, jumps, rates), step=2.5)


def test_integrate_rejects_bad_inputs():
    sched = alternation_schedule(0, 1, 1.0, 1.0, 1, 3)
    with pytest.raises(ValueError):
        integrate_lindblad(RHO_001, LindbladModel(sched), step=0)
    with pytest.raises(DimensionMismatch):
        integrate_lindblad(np.eye(4) / 4, LindbladModel(sched), step=0.1)


def test_fidelity_examples():
    rho = random_density(np.random.default_rng(3), 4)
    assert fidelity(rho, rho) == pytest.approx(1, abs=1e-12)
    zero, one = projector(ket("0")), projector(ket("1"))
    assert fidelity(zero, one) == pytest.approx(0, abs=1e-15)
    assert fidelity(zero, np.eye(2) / 2) == pytest.approx(1 / math.sqrt(2), abs=1e-14)
    with pytest.raises(DimensionMismatch):
        fidelity(zero, np.eye(4) / 4)
    with pytest.raises(NotPSD):
        fidelity(zero, np.diag([1.1, -0.1]))


@given(seeds, st.integers(1, 8), st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_fidelity_symmetric_bounded_and_matches_nested_form(seed, ra, rb):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, 8, ra), random_density(rng, 8, rb)
    f_ab, f_ba = fidelity(a, b), fidelity(b, a)
    assert abs(f_ab - f_ba) <= 1e-9
    assert 0 <= f_ab <= 1 + 1e-9
    if min(ra, rb) == 8:
        assert f_ab == pytest.approx(fidelity_nested(a, b), abs=1e-9)


def test_fidelity_pure_states_is_overlap(rng):
    for _ in range(10):
        u = rng.normal(size=8) + 1j * rng.normal(size=8)
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        assert fidelity(projector(u), projector(v)) == pytest.approx(abs(np.vdot(u, v)), abs=1e-12)


def test_initial_states():
    assert np.array_equal(initial_state("001"), RHO_001)
    plus = initial_state("plus")
    assert plus[1, 2] == pytest.approx(0.5) and np.trace(plus) == pytest.approx(1)
    with pytest.raises(ValueError):
        initial_state("01", 3)


@pytest.mark.parametrize("n", [1, 3, 16])
def test_experiment_noiseless_limit(n):
    res = run_alternation_experiment(n, 0.0, 1.0, math.pi, RHO_001, (0, 1), C_I)
    assert res.one_minus_f <= 1e-8
    assert res.integrated_leakage == pytest.approx(analytic_total_population(math.pi, n), rel=0.01)


def test_experiment_more_alternations_help():
    r1 = run_alternation_experiment(1, 1.0, 1.0, math.pi, RHO_001, (0, 1), C_I)
    r32 = run_alternation_experiment(32, 1.0, 1.0, math.pi, RHO_001, (0, 1), C_I)
    assert r1.one_minus_f > r32.one_minus_f > 0
    assert r1.n == 1 and r32.n == 32


def test_experiment_nontrivial_target():
    # on pair (1, 2) the exchange moves |001> to |010> and back within T = pi
    res = run_alternation_experiment(8, 0.0, 1.0, math.pi / 4, RHO_001, (1, 2), C_I)
    target = projector(ket("010"))
    assert fidelity(res.final_rho, target) == pytest.approx(1, abs=1e-8)


def test_sweep_sorted_and_parallel_identical():
    kw = dict(gamma=1.0, g=1.0, T=math.pi, rho0=RHO_001, pair=(0, 1), code=C_I, steps_per_segment=50)
    serial = sweep_alternations([5, 2, 3], **kw)
    parallel = sweep_alternations([3, 5, 2], workers=2, **kw)
    assert [r.n for r in serial] == [2, 3, 5]
    assert [r.one_minus_f for r in serial] == [r.one_minus_f for r in parallel]
