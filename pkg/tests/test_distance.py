import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idemkit import linalg as la
from idemkit.distance import (distance_report, lambda_mu, max_distance, min_distance,
                              min_distance_formula, null_padding_probe, projection_at_distance,
                              s_norm_formula, sqp_invariant)
from idemkit.errors import IsProjection, OutOfRange
from idemkit.idempotent import (block_form, matched_projection, random_idempotent,
                                random_projection, range_projection)

from conftest import Q2, R2, random_cases


def padded_example(a):
    """Q = [[I2, diag(a, 0)], [0, 0]] in M_4; N(Q) & N(Q*) is spanned by e4."""
    Q = np.zeros((4, 4), dtype=complex)
    Q[:2, :2] = np.eye(2)
    Q[0, 2] = a
    return Q


def test_closed_forms_at_norm_sqrt2():
    assert np.isclose(min_distance(Q2), R2 / 2, atol=1e-15)
    assert np.isclose(max_distance(Q2), 1 + R2 / 2, atol=1e-15)
    P = np.diag([1.0, 0.0, 1.0])
    assert min_distance(P) == pytest.approx(0.0, abs=1e-15)
    assert max_distance(P) == pytest.approx(1.0, abs=1e-15)


def test_s_norm_examples():
    assert np.isclose(s_norm_formula(1.0), 2 + R2)
    assert np.isclose(s_norm_formula(0.5), 1.25 + 0.5 * np.sqrt(1.25))
    P = np.diag([1.0, 0.0])
    assert np.allclose(sqp_invariant(P), np.eye(2))
    S = sqp_invariant(Q2)
    assert np.isclose(la.op_norm(S), 2 + R2)


@pytest.mark.parametrize("a", [0.25, 1.0, 1.3])
def test_null_padding_counterexample(a):
    Q = padded_example(a)
    probe = null_padding_probe(Q)
    lo = min_distance_formula(np.sqrt(1 + a * a))
    assert probe["dim_H4"] == 1
    assert probe["P_minus_Q"] == pytest.approx(1.0, abs=1e-12)
    assert probe["P_minus_Q"] > lo
    assert probe["I_minus_P_minus_Q"] == pytest.approx(1 + lo, abs=1e-12)
    expected = matched_projection(Q) + np.diag([0, 0, 0, 1.0])
    assert np.allclose(probe["projection"], expected)


def test_null_padding_regression_at_a1():
    probe = null_padding_probe(padded_example(1.0))
    assert probe["P_minus_Q"] == pytest.approx(1.0, abs=1e-12)
    assert probe["I_minus_P_minus_Q"] == pytest.approx(1 + R2 / 2, abs=1e-12)


def test_null_padding_absent_without_h4():
    assert null_padding_probe(Q2) is None


@pytest.mark.parametrize("n,k,a,Q", random_cases(10, seed=2, n_max=8))
def test_monte_carlo_extremality(n, k, a, Q, rng):
    lo, hi = min_distance(Q), max_distance(Q)
    for _ in range(200):
        d = la.op_norm(random_projection(n, rng) - Q.Q)
        assert lo - 1e-9 <= d <= hi + 1e-9


@pytest.mark.parametrize("n,k,a,Q", random_cases(15, seed=3))
def test_lambda_mu(n, k, a, Q):
    r = distance_report(Q)
    A = block_form(Q).A
    assert r.min_dist <= r.lambda_Q + 1e-12
    assert r.lambda_Q < r.mu_Q <= r.max_dist + 1e-12
    assert r.lambda_Q == pytest.approx(la.op_norm(A), abs=1e-9)
    assert r.mu_Q >= np.sqrt(1 + la.op_norm(A) ** 2) - 1e-9
    assert r.max_dist == pytest.approx(1 + r.min_dist, abs=1e-12)


@settings(max_examples=25)
@given(st.integers(2, 8), st.floats(0.1, 4.0), st.integers(0, 2**16), st.integers(0, 2**16))
def test_sqp_invariant_property(n, a, seed, probe_seed):
    Q = random_idempotent(n, max(1, n // 2), a, seed=seed)
    sqp_invariant(Q, np.random.default_rng(probe_seed), probes=5)


def test_projection_at_distance_endpoints():
    Q = random_idempotent(6, 2, 1.7, seed=8)
    P = projection_at_distance(Q, min_distance(Q))
    assert la.op_norm(P - matched_projection(Q)) <= 1e-6
    lam, _ = lambda_mu(Q)
    P = projection_at_distance(Q, lam)
    assert abs(la.op_norm(P - Q.Q) - lam) <= 1e-6
    assert la.op_norm(P - range_projection(Q)) <= 1e-6


def test_projection_at_distance_example():
    P = projection_at_distance(Q2, 0.9)
    assert abs(la.op_norm(P - Q2) - 0.9) <= 1e-6
    assert la.op_norm(P @ P - P) <= 1e-9 and la.op_norm(P - P.conj().T) <= 1e-9


@pytest.mark.parametrize("n,k,a,Q", random_cases(4, seed=4, n_max=7))
def test_projection_at_distance_sweep(n, k, a, Q):
    lo, hi = min_distance(Q), max_distance(Q)
    for alpha in np.linspace(lo, hi, 7):
        P = projection_at_distance(Q, alpha)
        assert abs(la.op_norm(P - Q.Q) - alpha) <= 1e-6
        assert la.op_norm(P @ P - P) <= 1e-9 and la.op_norm(P - P.conj().T) <= 1e-9


def test_projection_at_distance_errors():
    with pytest.raises(IsProjection):
        projection_at_distance(np.diag([1.0, 0.0]), 0.5)
    with pytest.raises(OutOfRange):
        projection_at_distance(Q2, 2.0)
    with pytest.raises(OutOfRange):
        projection_at_distance(Q2, 0.5)
