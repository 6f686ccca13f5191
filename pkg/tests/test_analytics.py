import math

import numpy as np
import pytest

from rigidity_lab import analytics as A


def test_psi_basics():
    assert A.psi(0, 3.7) == 1.0
    assert A.psi(2, 1.0) == pytest.approx(1 - 2 / math.e, abs=1e-14)
    assert A.psi(3, 0.0) == 0.0
    with pytest.raises(ValueError):
        A.psi(2, -1.0)
    with pytest.raises(ValueError):
        A.poisson_pmf(2, -0.5)


@pytest.mark.parametrize("mu", [0.01, 0.5, 1.0, 3.3, 10.0, 27.0, 50.0])
def test_psi_recurrence_and_monotonicity(mu):
    vals = [A.psi(j, mu) for j in range(60)]
    for j in range(59):
        assert abs(vals[j + 1] - (vals[j] - A.poisson_pmf(j, mu))) < 1e-14
        assert vals[j + 1] <= vals[j]


def test_lambda_k():
    lam3, arg = A.lambda_k(3)
    assert abs(lam3 - 3.351) < 1e-3
    lams = [A.lambda_k(k)[0] for k in range(3, 7)]
    assert all(a < b for a, b in zip(lams, lams[1:]))
    assert A.mu_k(3, lam3 + 1e-6) > 0
    with pytest.raises(A.RegimeError):
        A.mu_k(3, lam3 - 1e-6)
    assert abs(A.core_fraction(lam3 + 1e-6) - 0.27) < 0.005
    assert A.core_fraction(3.0) == 0.0


def test_mu_k_increasing():
    vals = [A.mu_k(3, c) for c in np.linspace(3.36, 6.0, 30)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_c2():
    c2 = A.c2_solve()
    assert abs(c2 - 3.58804) < 1e-3
    assert A.core_avg_degree(3.5) < 4 < A.core_avg_degree(3.7)


def test_q_and_tau():
    q, tau = A.q_32core(3.58804)
    assert abs(q - 0.749154) < 1e-5 and abs(tau - 2.688) < 1e-3
    assert abs(1 - math.exp(-tau) * (1 + tau) - q) < 1e-9
    with pytest.raises(A.RegimeError):
        A.q_32core(3.2)
    qs = [A.q_32core(c)[0] for c in np.linspace(3.6, 6, 25)]
    assert all(a < b for a, b in zip(qs, qs[1:]))


def test_fixed_point_identity_is_lambda0_denominator():
    for c in np.linspace(3.6, 6.0, 49):
        q, tau = A.q_32core(c)
        assert abs(A.psi(2, tau) - q) < 1e-9
        assert abs(1 - math.exp(-tau) * (1 + tau) - q) < 1e-9


def test_lambda0():
    assert abs(A.lambda0(2.688) - 0.656) < 1e-3
    assert abs(A.lambda0_critical() - 1.794) < 1e-3
    assert A.lambda0(40.0) < 1e-12
    with pytest.raises(ValueError):
        A.lambda0(0.0)


def test_subcritical_above_c2():
    c2 = A.c2_solve()
    for c in np.linspace(c2 + 1e-3, 10.0, 200):
        assert A.lambda0(A.q_32core(c)[1]) < 1


@pytest.mark.parametrize("tau", [2.688, 3.0, 3.5])
def test_phase3_curve(tau):
    cur = A.phase3_curve(tau)
    assert cur.a3(0.0) == pytest.approx(math.exp(-tau) * tau ** 3 / 6, abs=1e-15)
    assert abs(cur.lam(0.0) - A.lambda0(tau)) < 1e-12
    assert abs(cur.a3(cur.s_star)) < 1e-12
    s = np.linspace(0, cur.s_star, 1002)[1:-1]
    lam = cur.lam(s)
    assert np.all(np.diff(lam) < 0)
    assert np.allclose(cur.delta(s), tau * np.exp(-s))


def test_phase3_curve_errors():
    with pytest.raises(ValueError):
        A.phase3_curve(-1.0)


@pytest.mark.parametrize("tau", [2.688, 3.0])
def test_ode_oracle_self_consistency(tau):
    cur = A.phase3_curve(tau)
    sol = A.ode_oracle(tau, cur.s_star)
    assert sol.a3[0] == pytest.approx(math.exp(-tau) * tau ** 3 / 6, abs=1e-15)
    assert np.max(np.abs(sol.delta - tau * np.exp(-sol.s))) < 1e-8
    assert np.max(np.abs(sol.a3 - cur.a3(sol.s))) < 1e-8
    assert np.all(np.diff(sol.lam[1:-1]) < 0)


def test_ode_oracle_guards():
    with pytest.raises(ValueError):
        A.ode_oracle(2.688, 1.0, cap=30)
    with pytest.raises(ValueError):
        A.ode_oracle(2.688, 1.0, h=0.01)
    with pytest.raises(ValueError):
        A.ode_oracle(45.0, 1.0, cap=40)


def test_root_spec_without_sign_change():
    with pytest.raises(A.RegimeError):
        A._bisect(lambda x: x * x + 1, A.RootFindSpec(-1.0, 1.0))
