import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import expm

from sgdl import dynamics as dy
from sgdl import engine as qe
from sgdl.errors import GridTooCoarse, InvalidParameter, NormDrift, NotClosedShell

SMALL = dy.GridSpec(n_points=512, z_min=-32.0, z_max=32.0, dt=0.01, n_steps=200)
TINY = dy.GridSpec(n_points=256, z_min=-16.0, z_max=16.0, dt=0.01, n_steps=150)


def recorder(dim=4, **kw):
    return dy.HamiltonianSpec(environment=dy.EnvironmentSpec("linear_recorder", dim=dim, **kw))


def moments(prob, x):
    prob = prob / prob.sum()
    mean = prob @ x
    return mean, math.sqrt(prob @ x ** 2 - mean ** 2)


# -- recorder algebra ------------------------------------------------------------

@pytest.mark.parametrize("d", [2, 5, 8])
def test_shift_generator_generates_cyclic_shift(d):
    U = expm(-2j * np.pi * dy.shift_generator(d) / d)
    assert np.allclose(U, np.roll(np.eye(d), 1, axis=0), atol=1e-12)
    F = dy.recorder_fourier(d)
    assert np.allclose(F @ F.conj().T, np.eye(d), atol=1e-14)


def test_orthogonalizing_coupling_zeroes_the_record_overlap():
    ham = recorder(8)
    t = 2.0
    lam = dy.orthogonalizing_coupling(ham, t, 8)
    # branches accumulate opposite phases lambda * I * g_k on the ground record
    I = dy.branch_integral(ham, t)
    g = dy.shift_generator_levels(8)
    phases = np.exp(2j * lam * I * g)
    assert abs(phases.mean()) <= 1e-14


def test_branch_integral_from_trajectory():
    ham = dy.HamiltonianSpec()
    t = np.linspace(0, 3, 300001)
    z = 0.5 * (ham.force / 2 / ham.mass) * t ** 2
    assert dy.branch_integral(ham, 3.0) == pytest.approx(np.trapezoid(z, t), rel=1e-9)


def test_potential_derived_coupling_is_curvature_times_offset():
    from sgdl.potentials import effective_potential_quadrature

    env = dy.EnvironmentSpec("potential_derived")
    h = 1e-2
    v = [effective_potential_quadrature(10, 1.0 + s * h) for s in (-1, 0, 1)]
    curvature = (v[0] - 2 * v[1] + v[2]) / h ** 2
    assert dy.potential_derived_coupling(env) == pytest.approx(abs(curvature) * 1e-4, rel=1e-3)


def test_potential_derived_needs_closed_shell():
    ham = dy.HamiltonianSpec(environment=dy.EnvironmentSpec("potential_derived", Z=11))
    with pytest.raises(NotClosedShell):
        dy.run_sg(TINY, ham)


# -- propagation against analytic results --------------------------------------

def test_free_packet_spreads_like_the_analytic_gaussian():
    grid = dy.GridSpec(n_points=1024, z_min=-40, z_max=40, dt=0.01, n_steps=200)
    ham = dy.HamiltonianSpec(environment=dy.EnvironmentSpec(dim=1))
    prop = dy.build_hamiltonian(grid, ham, spin=False)
    cm = qe.QState([qe.SpaceLabel("CM", grid.n_points)], "pure", dy.gaussian_packet(grid, 1.0))
    _, final = dy.propagate(qe.tensor(cm, qe.basis_ket(0, 1, "R")), prop)
    _, width = moments(np.abs(final.data) ** 2, grid.z)
    assert width == pytest.approx(dy.free_width(1.0, grid.duration), rel=1e-6)


def test_branch_momenta_follow_the_force():
    run = dy.run_sg(SMALL, dy.HamiltonianSpec())
    t = run.final_state.tensor_array()[:, :, 0]  # (s, z) with R in its ground state
    k = SMALL.k
    t_end = SMALL.duration
    for s, sign in ((0, -1), (1, 1)):
        pk = np.abs(np.fft.fft(t[s])) ** 2
        p_mean = (pk @ k) / pk.sum()
        assert p_mean == pytest.approx(sign * 0.5 * run.propagator.ham.force * t_end, abs=1e-6)
        mean, _ = moments(np.abs(t[s]) ** 2, SMALL.z)
        assert mean == pytest.approx(sign * 0.25 * run.propagator.ham.force * t_end ** 2, abs=1e-6)


def test_zero_coupling_recorder_matches_no_environment():
    base = dy.run_sg(SMALL, dy.HamiltonianSpec(environment=dy.EnvironmentSpec(dim=4)))
    zero = dy.run_sg(SMALL, recorder(4, coupling=0.0))
    assert np.max(np.abs(base.final_state.data - zero.final_state.data)) <= 1e-12
    assert zero.record.summary["r_fidelity_initial"] == pytest.approx(1.0, abs=1e-12)


def test_zero_steps_returns_initial_state():
    grid = replace(TINY, n_steps=0)
    ham = recorder(4, coupling=0.3)
    prop = dy.build_hamiltonian(grid, ham, coupling=0.3)
    init = dy.initial_state(grid, ham, dy.PacketSpec())
    rec, final = dy.propagate(init, prop)
    assert len(rec) == 1 and rec.times == [0.0]
    assert np.allclose(final.data, init.data, atol=1e-14)


def test_coarse_grid_rejected():
    with pytest.raises(GridTooCoarse) as info:
        dy.run_sg(TINY, dy.HamiltonianSpec(), dy.PacketSpec(width=0.5))
    assert info.value.module == "dynamics"


def test_norm_drift_detected():
    prop = dy.build_hamiltonian(TINY, recorder(4), coupling=0.1)
    leaky = prop.step
    prop.step = lambda psi: 1.001 * leaky(psi)
    with pytest.raises(NormDrift):
        dy.propagate(dy.initial_state(TINY, recorder(4), dy.PacketSpec()), prop)


def test_unitarity_over_many_steps():
    grid = replace(TINY, n_steps=1000)
    ham = recorder(4, coupling=0.2, self_energy=(0.0, 0.5, 1.0, 1.5))
    rec = dy.sg_scenario(grid, ham, record_every=100)
    assert max(abs(n - 1) for n in rec.norm) <= 1e-8


def test_grid_validation():
    with pytest.raises(InvalidParameter):
        dy.GridSpec(n_points=100)
    with pytest.raises(InvalidParameter):
        dy.GridSpec(z_min=1.0, z_max=0.0)


# -- diagnostics against dense reductions -----------------------------------------

def test_diagnostics_match_dense_partial_traces():
    ham = recorder(4)
    run = dy.run_sg(TINY, ham)
    s = run.record.summary
    rho_scm = qe.partial_trace(run.final_state, ["S", "CM"]).data
    n = TINY.n_points
    block = rho_scm[:n, n:]  # <up| rho |down>
    assert s["offdiag_norm"] == pytest.approx(2 * np.linalg.svd(block, compute_uv=False).sum(), abs=1e-10)
    assert s["cm_purity"] == pytest.approx(np.real(np.vdot(rho_scm, rho_scm)), abs=1e-10)
    # record overlap is the fidelity of the two conditional record states
    t = run.final_state.tensor_array()
    r_up = t[0].T @ t[0].conj() / np.sum(np.abs(t[0]) ** 2)
    r_down = t[1].T @ t[1].conj() / np.sum(np.abs(t[1]) ** 2)
    f = qe.fidelity(qe.density_matrix(r_up, "R"), qe.density_matrix(r_down, "R"))
    assert s["record_overlap"] == pytest.approx(f, abs=1e-6)
    assert s["offdiag_norm"] == pytest.approx(s["record_overlap"], abs=1e-6)


def test_recorder_drives_branches_apart():
    rec = dy.sg_scenario(TINY, recorder(4))
    assert rec.record_overlap[0] == pytest.approx(1.0)
    assert np.all(np.diff(rec.record_overlap) <= 1e-12)
    assert rec.record_overlap[-1] < 0.7
    assert rec.cm_purity[-1] < rec.cm_purity[0]


def test_erasure_complementarity():
    rep = dy.erasure_scenario(TINY, recorder(4, coupling=0.05))
    assert rep.p_plus == pytest.approx(0.5, abs=1e-6)
    # which-path knowledge bounds the fringes: V <= record fidelity, so V^2 + D^2 <= 1
    assert rep.visibility_conditioned <= rep.record_overlap + 1e-9
    assert 0.05 < rep.visibility_conditioned < 0.99


def test_shift_invariant_records_nothing():
    rep = dy.erasure_scenario(TINY, recorder(4, coupling=0.5, preparation="shift_invariant"))
    assert rep.visibility_conditioned >= 0.99
    assert rep.record_overlap == pytest.approx(1.0, abs=1e-10)


# -- pointer sieve --------------------------------------------------------------------

SIEVE_SMALL = dy.GridSpec(n_points=1024, z_min=-30, z_max=30, dt=0.01, n_steps=0)


def test_sieve_prefers_minimal_uncertainty():
    env = dy.EnvironmentSpec("linear_recorder", dim=8, coupling=dy.SIEVE_COUPLING)
    ranked = dy.pointer_sieve(dy.standard_candidates(SIEVE_SMALL), env, 2.0, grid=SIEVE_SMALL)
    assert ranked[0].label == "minimal_uncertainty"
    assert not dy.ranking_tied(ranked)


def test_sieve_ties_without_coupling():
    env = dy.EnvironmentSpec("linear_recorder", dim=4, coupling=0.0)
    ranked = dy.pointer_sieve(dy.standard_candidates(SIEVE_SMALL), env, 1.0, grid=SIEVE_SMALL)
    assert dy.ranking_tied(ranked)
    assert all(abs(e.production) <= 1e-12 for e in ranked)


def test_sieve_single_candidate():
    env = dy.EnvironmentSpec("linear_recorder", dim=4, coupling=0.02)
    cand = dy.standard_candidates(SIEVE_SMALL)["two_packet"]
    ranked = dy.pointer_sieve([cand], env, 1.0, grid=SIEVE_SMALL)
    assert len(ranked) == 1 and ranked[0].production > 0


def test_sieve_needs_environment():
    with pytest.raises(InvalidParameter):
        dy.pointer_sieve([], dy.EnvironmentSpec(), 1.0)
