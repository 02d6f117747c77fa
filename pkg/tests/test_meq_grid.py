import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qbm import meq_grid as mg
from qbm import moments
from qbm.bath import BathSpec, DomainError, NumericalError
from qbm.coefficients import DiffusionSet, diffusion_constants


def setup(theta):
    b = BathSpec.from_theta(theta)
    return b, diffusion_constants(b)


def small_state(n=65, sigma0=1.0, p0=0.5):
    return mg.gaussian_pure_state(0.2, p0, sigma0, n, 9.0, n, 14.0)


@pytest.mark.parametrize("mq,mp,sqq,spp,sqp", [(0, 0, 1, 0.25, 0), (0.5, -0.3, 2.0, 1.0, 0.6),
                                               (-1, 1, 0.7, 3.0, -0.4)])
def test_gaussian_state_moments(mq, mp, sqq, spp, sqp):
    def errors(n):
        ob = mg.observables(mg.gaussian_state(mq, mp, sqq, spp, sqp, n, 10.0, n, 14.0))
        assert ob.trace == pytest.approx(1.0, abs=1e-12)
        assert ob.hermiticity < 1e-15
        return np.abs([ob.mean_q - mq, ob.mean_p - mp, ob.sigma_qq - sqq,
                       ob.sigma_pp - spp, ob.sigma_qp - sqp])

    coarse, fine = errors(257), errors(513)
    assert fine.max() < 1e-4
    # r-derivative stencils are 4th order
    big = coarse > 1e-8
    assert np.all(coarse[big] / fine[big] > 12)


def test_pure_state_purity_one_and_mixed_less():
    assert mg.observables(small_state(129)).purity == pytest.approx(1.0, abs=1e-6)
    mixed = mg.gaussian_state(0, 0, 1.0, 1.0, 0.0, 129, 9.0, 129, 9.0)
    # purity of a Gaussian is hbar / (2 sqrt(det))
    assert mg.observables(mixed).purity == pytest.approx(0.5, abs=1e-6)


def test_gaussian_state_axis_checks():
    with pytest.raises(DomainError, match="centre axis"):
        mg.gaussian_state(0, 0, 4.0, 1.0, 0.0, 65, 5.0, 65, 10.0)
    with pytest.raises(DomainError, match="relative axis"):
        mg.gaussian_state(0, 0, 1.0, 0.01, 0.0, 65, 9.0, 65, 10.0)
    with pytest.raises(DomainError):
        mg.DensityGrid(np.zeros((65, 64), complex), 1.0, 1.0)


@given(st.integers(0, 2**31 - 1), st.floats(0.05, 20.0))
def test_numba_rhs_matches_numpy_reference(seed, theta):
    b, d = setup(theta)
    rng = np.random.default_rng(seed)
    data = rng.normal(size=(33, 41)) + 1j * rng.normal(size=(33, 41))
    rho = mg.DensityGrid(data, 4.0, 6.0)
    ref = mg.me_rhs_reference(rho, d, b)
    got = mg.me_rhs(rho, d, b)
    assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_step_matches_reference_step():
    b, d = setup(1.0)
    rho = small_state()
    dt = mg.stable_dt(rho, d, b)
    a = mg.step(rho, d, b, dt).data
    r = mg.step_reference(rho, d, b, dt).data
    assert np.max(np.abs(a - r)) < 1e-14


def test_rhs_preserves_trace_and_hermiticity():
    b, d = setup(0.5)
    rho = small_state(129)
    k = mg.me_rhs(rho, d, b)
    # trace is conserved: d/dt sum rho(R, 0) vanishes up to boundary leakage
    assert abs(rho.h_R * k[:, rho.j0].sum()) < 1e-10
    assert np.max(np.abs(k - np.conj(k[:, ::-1]))) < 1e-12


@pytest.mark.parametrize("sigma0", [0.6, 1.0, 1.5])
def test_free_schrodinger_spreading(sigma0):
    b = BathSpec(T=1.0)
    d = DiffusionSet.free(b)
    m0 = moments.GaussianMoments.minimum_uncertainty(0.0, 0.3, sigma0)
    LR, Lr = mg.auto_grid(m0, d, b, 1.0, margin=7.0)
    rho = mg.gaussian_pure_state(0.0, 0.3, sigma0, 193, LR, 193, Lr)
    ob = mg.evolve(rho, d, b, 1.0, cfl=1.0).observables[-1]
    assert ob.sigma_qq == pytest.approx(sigma0**2 + (1.0 / (2 * sigma0)) ** 2, rel=3e-4)
    assert ob.mean_q == pytest.approx(0.3, abs=1e-4)
    assert ob.purity == pytest.approx(1.0, abs=1e-9)


def test_rk4_temporal_order():
    b, d = setup(1.0)
    rho = small_state()
    dt0 = mg.stable_dt(rho, d, b, cfl=1.0)
    t_end = 8 * dt0

    def run(n):
        x = rho
        for _ in range(n):
            x = mg.step(x, d, b, t_end / n)
        return x.data

    a, bb, c = run(8), run(16), run(32)
    ratio = np.max(np.abs(a - bb)) / np.max(np.abs(bb - c))
    assert ratio == pytest.approx(16, rel=0.15)


def test_spatial_convergence():
    # same physical box, halve both spacings: error vs exact moments drops >= 8x
    b, d = setup(1.0)
    m0 = moments.GaussianMoments.minimum_uncertainty(0.0, 0.5, 1.0)
    t_end = 0.5
    exact = moments.evolve_exact(m0, d, b, [t_end]).y[-1]
    errs = []
    LR, Lr = mg.auto_grid(m0, d, b, t_end, margin=7.0)
    fine = mg.gaussian_state(m0.mq, m0.mp, m0.sqq, m0.spp, m0.sqp, 193, LR, 193, Lr)
    dt = mg.stable_dt(fine, d, b, 0.5)
    for n in (49, 97):
        rho = mg.gaussian_state(m0.mq, m0.mp, m0.sqq, m0.spp, m0.sqp, n, LR, n, Lr)
        ob = mg.evolve(rho, d, b, t_end, dt=dt).observables[-1]
        errs.append(max(abs(ob.sigma_qq - exact[2]), abs(ob.sigma_pp - exact[3]),
                        abs(ob.sigma_qp - exact[4])))
    assert errs[0] / errs[1] >= 8


def test_cross_diffusion_sign_pinned_by_grid():
    # grid moments agree with s_pq = -2 and disagree with +2
    b, d = setup(0.5)
    m0 = moments.GaussianMoments.minimum_uncertainty(0.0, 0.5, 0.7)
    t_end = 1.0
    LR, Lr = mg.auto_grid(m0, d, b, t_end, margin=6.5)
    rho = mg.gaussian_state(m0.mq, m0.mp, m0.sqq, m0.spp, m0.sqp, 129, LR, 129, Lr)
    ob = mg.evolve(rho, d, b, t_end, cfl=2.0).observables[-1]
    right = moments.evolve_exact(m0, d, b, [t_end], s_pq=-2.0).y[-1]
    wrong = moments.evolve_exact(m0, d, b, [t_end], s_pq=+2.0).y[-1]
    assert ob.sigma_qp == pytest.approx(right[4], abs=1e-3)
    assert abs(ob.sigma_qp - wrong[4]) > 0.1


def test_evolve_diagnostics_and_sampling():
    b, d = setup(1.0)
    rho = small_state()
    run = mg.evolve(rho, d, b, 0.2, cfl=2.0, sample_every=0.05, snapshot_times=[0.1])
    assert run.final.t == pytest.approx(0.2)
    assert [round(o.t, 6) for o in run.observables] == [0.0, 0.05, 0.1, 0.15, 0.2]
    assert len(run.snapshots) == 1 and run.snapshots[0].t == pytest.approx(0.1)
    assert run.diagnostics.hermiticity_drift < 1e-12
    assert run.diagnostics.trace_drift < 1e-8


def test_blowup_raises_with_last_good():
    b, d = setup(1.0)
    rho = small_state()
    dt = 50 * mg.stable_dt(rho, d, b)
    with pytest.raises(NumericalError) as exc:
        for _ in range(500):
            rho = mg.step(rho, d, b, dt)
    assert isinstance(exc.value.last_good, mg.DensityGrid)


def test_boundary_warning():
    rho = mg.gaussian_state(0, 0, 1.0, 1.0, 0.0, 65, 4.0, 65, 4.0, edge_tol=1e-3)
    assert mg.observables(rho).boundary_warning is not None
    assert mg.observables(small_state(129)).boundary_warning is None


def test_binary_roundtrip(tmp_path):
    rho = small_state(33).with_data(small_state(33).data, t=0.125)
    mg.write_binary(rho, tmp_path / "r.bin")
    back = mg.read_binary(tmp_path / "r.bin")
    assert back.t == 0.125
    assert back.half_width_R == rho.half_width_R
    np.testing.assert_array_equal(back.data, rho.data)
    size = (tmp_path / "r.bin").stat().st_size
    assert size == 4 + 8 + 24 + 16 * 33 * 33


def test_csv_export(tmp_path):
    rho = small_state(33)
    mg.write_csv(rho, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[2] == "x,y,re_rho,im_rho"
    assert len(lines) == 3 + 33 * 33
    x, y, re, im = map(float, lines[3 + 16 * 33 + 16].split(","))
    assert x == pytest.approx(0.0) and y == pytest.approx(0.0)


def test_xy_mapping():
    rho = small_state(33)
    x, y = rho.xy()
    Rg, rg = np.meshgrid(rho.R, rho.r, indexing="ij")
    np.testing.assert_allclose((x + y) / 2, Rg)
    np.testing.assert_allclose(x - y, rg)


def test_evolve_flags_unstable_time_step():
    b, d = setup(1.0)
    rho = small_state()
    with pytest.raises(NumericalError, match="cfl") as exc:
        mg.evolve(rho, d, b, 1.0, cfl=50.0)
    assert exc.value.last_good.t < 1.0
