import math

import pytest

import walkdrift as wd


def test_dominance_and_realisation():
    d1 = wd.FiniteDist.delta(1.0)
    d0 = wd.FiniteDist.delta(0.0)
    assert wd.dominates(d1, d0)
    assert not wd.dominates(d0, d1)

    u = wd.FiniteDist.uniform([-1.0, 1.0])
    r = wd.standard_realisation(u)
    assert r(0.3) == 1.0
    assert r(0.7) == -1.0
    assert r.measure_above(0.0) == u.tail_gt(0.0)


def test_build_dominating_pair():
    spec = wd.build_dominating_pair(wd.FiniteDist.delta(1.0), 10.0, 0.5, 0.1)
    assert spec.lambda1 == pytest.approx(0.35, abs=1e-12)
    assert spec.Z1.mean() == pytest.approx(-0.35, abs=1e-12)
    with pytest.raises(wd.WalkdriftError):
        wd.build_dominating_pair(wd.FiniteDist.delta(1.0), 10.0, 0.5, 0.9)


def test_chain_simulation_is_seeded():
    a = wd.simulate("reflected_uniform", increments=[-2.0, 1.0], x0=20.0, n=200, seed=7)
    b = wd.simulate("reflected_uniform", increments=[-2.0, 1.0], x0=20.0, n=200, seed=7)
    c = wd.simulate("reflected_uniform", increments=[-2.0, 1.0], x0=20.0, n=200, seed=8)
    assert a == b
    assert a != c
    assert a[0] == 20.0

    t, censored = wd.first_return_time("translation", [], -1.0, 10.0, 15.0, 3, 100)
    assert (t, censored) == (5, False)


def test_counterexample_values():
    assert wd.stay_probability(0.01, 10.0) == pytest.approx(0.99**90, rel=1e-12)
    sched = wd.build_mass_escape_schedule(depth=3, validation_trials=1000, seed=5)
    assert sched.alpha[1] == pytest.approx(1.0 / 1000.125, rel=1e-12)
    assert sched.x[2] == 0.125
    assert wd.moment_bound_m1(1.0, 1.0, 0.0, 1.0, 2.0) == pytest.approx(15.0)


def test_lattice_operations():
    z2 = wd.LatticeBasis.identity(2)
    assert len(wd.short_vectors(z2, math.sqrt(2.0))) == 4
    assert wd.hnf_canonicalize([[-1, -1]]) == [[1, 1]]
    kind, sub = wd.saturate([[2, 0]], 2)
    assert kind == "proper"
    assert sub.coeffs == [[1, 0]]

    e = math.exp(1.0)
    deep = wd.LatticeBasis.from_columns([[e**-4, 0.0], [0.0, e**4]])
    params = wd.QuasiNormParams.make(2, 1.0, [1.0])
    assert wd.f_A(deep, params) == pytest.approx(3.0, abs=1e-9)
    assert wd.f_A(z2, params) == 0.0
    assert wd.variation_constant(wd.QuasiNormParams.make(3, 1.0, [1.0, 1.0])) == 4.0


def test_lyapunov_and_siegel():
    mu = wd.sl2_unipotent_measure()
    assert mu.is_symmetric()
    value, ci = wd.estimate_lyapunov(mu, 1, 200, 50, 3)
    assert 0.05 < value < 0.2
    assert ci >= 0.0
    assert wd.siegel_reference_d2(1.0) == pytest.approx(6.0 / math.pi, rel=1e-12)

    x0 = wd.LatticeBasis.from_columns([[1.0, math.sqrt(2.0)], [0.0, 1.0]])
    cesaro, reference, rel_err = wd.siegel_equidistribution(mu, x0, 5000, 1.0, 2, 11)
    assert reference == pytest.approx(6.0 / math.pi, rel=1e-12)
    assert rel_err < 0.25
