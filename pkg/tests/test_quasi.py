import math
import random
import warnings

import numpy as np
import pytest

from ermakov.errors import ConfigError, NumericalError, SingularConfigurationError
from ermakov.expr import constant, parse
from ermakov.ode import IntegratorConfig, State, integrate, uniform_grid
from ermakov.quasi import (
    oscillator_path, quasi_inverse, quasi_transform, sl2_chain_residuals, sl2_residual, sl2_residuals,
    solve_tdho, transform_trajectory,
)
from ermakov.systems import (
    F_VARS, OMEGA2_VARS, TIME_VARS, GeneralizedErmakov, g_VARS, rhs_generalized, traditional_system,
)

W = lambda src: parse(src, TIME_VARS)
ZERO_f = constant(0.0, F_VARS)
ZERO_g = constant(0.0, g_VARS)
EDGE = 1.4


@pytest.fixture(scope="module")
def cos_path():
    return solve_tdho(W("1"), math.cos(-EDGE), math.sin(EDGE), -EDGE, EDGE)


def _sho_traj(s0, t0=-EDGE, t1=EDGE, n=281):
    sho = GeneralizedErmakov(constant(0.0, F_VARS), constant(1.0, OMEGA2_VARS))
    return integrate(lambda s: rhs_generalized(sho, s), s0, t1, IntegratorConfig(rtol=1e-11, atol=1e-13),
                     uniform_grid(t0, t1, n))


def test_free_oscillator_constant():
    path = solve_tdho(W("0"), 1.0, 0.0, 0.0, 5.0)
    assert all(path.value(t) == pytest.approx(1.0, abs=1e-14) for t in np.linspace(0, 5, 11))


def test_unit_oscillator_cosine(cos_path):
    ts = np.linspace(-EDGE, EDGE, 57)
    assert np.max(np.abs([cos_path.value(t) - math.cos(t) for t in ts])) <= 1e-10
    assert cos_path.window == (-EDGE, EDGE)
    assert min(cos_path.value(t) for t in ts) > 0


def test_tdho_residual():
    path = solve_tdho(W("1 + 0.3*sin(2*t)"), 1.0, 0.2, 0.0, 1.0)
    assert np.max(np.abs(path.residuals(np.linspace(0.05, 0.95, 30)))) <= 1e-8


def test_zero_crossing_truncates():
    with pytest.warns(RuntimeWarning, match="changes sign"):
        path = solve_tdho(W("1"), 1.0, 0.0, 0.0, 3.0)
    lo, hi = path.window
    assert lo == 0.0 and 1.3 < hi < math.pi / 2
    assert path.value(hi) > 0


def test_no_warning_without_crossing():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve_tdho(W("1"), 1.0, 0.0, 0.0, 1.5)


def test_start_conditions():
    with pytest.raises(ConfigError):
        solve_tdho(W("1"), 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(SingularConfigurationError):
        solve_tdho(W("1"), 0.0, 1.0, 0.0, 1.0)
    # a general oscillator solution may start at a node
    assert oscillator_path(W("1"), 0.0, 1.0, 0.0, 1.0).value(1.0) == pytest.approx(math.sin(1.0), abs=1e-10)


def test_dynamical_frequency_rejected():
    with pytest.raises(ConfigError, match="dynamical"):
        solve_tdho(parse("1 + x^2", ["t", "x"]), 1.0, 0.0, 0.0, 1.0)


# --- the transformation ---------------------------------------------------------------


def test_identity_for_unit_C():
    path = solve_tdho(W("0"), 1.0, 0.0, 0.0, 5.0)
    s = State(2.0, 0.3, -1.0, 0.5, 0.25)
    sb = quasi_transform(path, s, 0.5)
    assert sb.as_tuple() == pytest.approx((1.5, 0.3, -1.0, 0.5, 0.25), abs=1e-13)


def test_tan_time(cos_path):
    for t in np.linspace(-1.3, 1.3, 11):
        sb = quasi_transform(cos_path, State(t, 1, 1, 0, 0), 0.0)
        assert sb.t == pytest.approx(math.tan(t), abs=1e-8)


def test_comoving_point(cos_path):
    t = 0.9
    sb = quasi_transform(cos_path, State(t, math.cos(t), 0.5, -math.sin(t), 0.0), 0.0)
    assert sb.x == pytest.approx(1.0, abs=1e-10)
    assert sb.xdot == pytest.approx(0.0, abs=1e-10)


def test_inverse_round_trip(cos_path):
    rng = random.Random(4)
    for _ in range(50):
        s = State(rng.uniform(-1.3, 1.3), *(rng.uniform(-2, 2) for _ in range(4)))
        back = quasi_inverse(cos_path, quasi_transform(cos_path, s, 0.0), 0.0)
        assert max(abs(a - b) for a, b in zip(back.as_tuple(), s.as_tuple())) <= 1e-10


def test_transformed_time_increasing(cos_path):
    traj = _sho_traj(State(-EDGE, 1, 0.5, 0, 1))
    tb = [s.t for s in transform_trajectory(cos_path, traj, 0.0)]
    assert np.all(np.diff(tb) > 0)


# --- residual of the autonomous pair ------------------------------------------------------


def test_sho_straightens(cos_path):
    traj = _sho_traj(State(-EDGE, 1.0, 0.5, 0.2, 1.0))
    assert sl2_residual(ZERO_f, ZERO_g, transform_trajectory(cos_path, traj, 0.0)) <= 1e-6


def test_free_motion_trivial():
    path = solve_tdho(W("0"), 1.0, 0.0, 0.0, 4.0)
    states = [State(t, 1 + t, 2 - 0.5 * t, 1, -0.5) for t in np.linspace(0, 3, 31)]
    assert sl2_residual(ZERO_f, ZERO_g, transform_trajectory(path, states, 0.0)) <= 1e-13


def test_coupled_pair_with_time_dependent_frequency():
    omega = W("1 + 0.2*t")
    f, g = parse("0.1", F_VARS), parse("0.1", g_VARS)
    sys_ = traditional_system(omega, f, g)
    rtol = 1e-11
    traj = integrate(lambda s: rhs_generalized(sys_, s), State(0, 1.0, 1.2, 0.0, 0.1), 1.0,
                     IntegratorConfig(rtol=rtol, atol=1e-13), uniform_grid(0, 1.0, 201))
    path = solve_tdho(omega, 1.0, 0.0, 0.0, 1.0)
    # differentiating the samples amplifies integrator error (measured 200-1200 x rtol)
    assert sl2_residual(f, g, transform_trajectory(path, traj, 0.0)) <= 1e-6
    assert np.max(sl2_chain_residuals(f, g, path, list(traj), 0.0)) <= 100 * rtol


def test_negative_control(cos_path):
    # W2 = 1 + x^2 is not a function of t alone; the rescaled curve is not free motion
    sys_ = GeneralizedErmakov(ZERO_f, parse("1 + x^2", OMEGA2_VARS))
    traj = integrate(lambda s: rhs_generalized(sys_, s), State(-EDGE, 1.0, 0.5, 0.2, 1.0), EDGE,
                     IntegratorConfig(rtol=1e-11, atol=1e-13), uniform_grid(-EDGE, EDGE, 281))
    assert sl2_residual(ZERO_f, ZERO_g, transform_trajectory(cos_path, traj, 0.0)) > 1e-2


def test_residual_needs_samples(cos_path):
    states = transform_trajectory(cos_path, _sho_traj(State(0, 1, 0, 0, 1), 0, 0.5, 5), 0.0)
    with pytest.raises(NumericalError):
        sl2_residuals(ZERO_f, ZERO_g, states)


def test_singular_transformed_state(cos_path):
    with pytest.raises(SingularConfigurationError):
        sl2_residual(parse("1", F_VARS), ZERO_g, [State(t, 0.0, 1.0, 0, 0) for t in range(7)])
