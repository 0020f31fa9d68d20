import numpy as np
import pytest

from padicrd.expressions import EvaluationError
from padicrd.kinetics import SteadyStateError, brusselator, cima, parse_kinetics, steady_state


def fd_jacobian(model, u, v, h=1e-6):
    return np.array(
        [
            [(model.f(u + h, v) - model.f(u - h, v)) / (2 * h),
             (model.f(u, v + h) - model.f(u, v - h)) / (2 * h)],
            [(model.g(u + h, v) - model.g(u - h, v)) / (2 * h),
             (model.g(u, v + h) - model.g(u, v - h)) / (2 * h)],
        ]
    )


def test_brusselator_steady_and_jacobian():
    m = brusselator(2.0, 4.5)
    u0, v0 = steady_state(m)
    assert (u0, v0) == (2.0, 2.25)
    assert abs(m.f(u0, v0)) <= 1e-12 and abs(m.g(u0, v0)) <= 1e-12
    J = m.jacobian(u0, v0)
    assert np.allclose(J, [[3.5, 4.0], [-4.5, -4.0]])
    assert np.abs(J - fd_jacobian(m, u0, v0)).max() <= 1e-6
    # trace and determinant formulas at the steady state
    A, B = 2.0, 4.5
    assert np.trace(J) == pytest.approx(B - 1 - A**2)
    assert np.linalg.det(J) == pytest.approx(A**2)


def test_brusselator_random_parameters_zero_reaction():
    rng = np.random.default_rng(0)
    for _ in range(20):
        A, B = rng.uniform(0.5, 4.0), rng.uniform(0.5, 6.0)
        m = brusselator(A, B)
        u0, v0 = steady_state(m)
        assert abs(m.f(u0, v0)) <= 1e-12
        assert abs(m.g(u0, v0)) <= 1e-12


def test_brusselator_rejects_nonpositive():
    with pytest.raises(ValueError):
        brusselator(0.0, 1.0)
    with pytest.raises(ValueError):
        cima(1.0, -2.0, 1.0)


def test_cima_steady_state_and_jacobian():
    m = cima(10.0, 2.0, 1.0)
    u0, v0 = steady_state(m)
    assert u0 == pytest.approx(10.0 / 9.0, abs=1e-15)
    assert v0 == pytest.approx(2.0 * (1.0 + 100.0 / 81.0), abs=1e-12)
    assert abs(m.f(u0, v0)) <= 1e-12 and abs(m.g(u0, v0)) <= 1e-12
    J = m.jacobian(u0, v0)
    fd = fd_jacobian(m, u0, v0)
    assert np.abs((J - fd) / np.where(np.abs(fd) > 1, fd, 1.0)).max() <= 1e-6


def test_jacobians_match_finite_differences_in_box():
    rng = np.random.default_rng(1)
    models = [brusselator(2.0, 4.5), cima(10.0, 2.0, 1.0),
              parse_kinetics("A - (B+1)*u + u^2*v", "B*u - u^2*v",
                             {"A": 2.0, "B": 4.5}, box=(-8.0, 12.0))]
    for m in models:
        u0, v0 = m.closed_form_steady or (2.0, 2.25)
        for _ in range(100):
            u = u0 + rng.uniform(-1.0, 1.0)
            v = v0 + rng.uniform(-1.0, 1.0)
            J = np.asarray(m.jacobian(u, v), dtype=float)
            fd = fd_jacobian(m, u, v)
            denom = np.where(np.abs(fd) > 1.0, np.abs(fd), 1.0)
            assert (np.abs(J - fd) / denom).max() <= 1e-6


def test_parsed_model_matches_builtin():
    m_ref = brusselator(2.0, 4.5)
    m = parse_kinetics("A - (B+1)*u + u^2*v", "B*u - u^2*v", {"A": 2.0, "B": 4.5})
    rng = np.random.default_rng(2)
    for _ in range(100):
        u, v = rng.uniform(0.1, 4.0, 2)
        assert m.f(u, v) == pytest.approx(m_ref.f(u, v), abs=1e-12)
        assert m.g(u, v) == pytest.approx(m_ref.g(u, v), abs=1e-12)
    assert m.f(2.0, 2.25) == pytest.approx(0.0, abs=1e-12)


def test_parse_kinetics_rejects_unknown_names():
    with pytest.raises(EvaluationError):
        parse_kinetics("a*u", "v", {"A": 1.0})


def test_custom_steady_state_newton():
    m = parse_kinetics("v - u", "u*v - 1", {})
    u0, v0 = steady_state(m, guess=(0.5, 2.0))
    assert u0 == pytest.approx(1.0, abs=1e-10)
    assert v0 == pytest.approx(1.0, abs=1e-10)
    # the solve installs a default validity box around the solution
    assert m.box[0] == pytest.approx(-9.0, abs=1e-9)
    assert m.box[1] == pytest.approx(11.0, abs=1e-9)
    # oracle: bisection on the reduced scalar equation u*u - 1 = 0 (v = u)
    lo, hi = 0.5, 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid * mid - 1.0 > 0:
            hi = mid
        else:
            lo = mid
    assert u0 == pytest.approx(0.5 * (lo + hi), abs=1e-9)


def test_custom_steady_state_requires_guess():
    m = parse_kinetics("v - u", "u*v - 1", {})
    with pytest.raises(SteadyStateError):
        steady_state(m)


def test_gradient_nonvanishing_report():
    m = brusselator(2.0, 4.5)
    assert m.gradients_nonvanishing_at(*steady_state(m)) == (True, True)


def test_cima_activator_inhibitor_signs():
    m = cima(10.0, 2.0, 1.0)
    J = m.jacobian(*steady_state(m))
    assert J[0, 1] < 0  # inhibitor suppresses the activator
    assert J[1, 0] > 0  # activator feeds the inhibitor
