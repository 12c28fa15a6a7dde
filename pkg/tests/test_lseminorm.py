import numpy as np
import pytest

from matprox import (
    ApproximationPair,
    FiniteMetricSpace,
    identity,
    kernel_check,
    kernel_dimension,
    l_seminorm,
    l_seminorms,
    lipschitz_seminorm,
    min_separation,
    operator_norm,
    quasi_leibniz_residual,
    random_hermitian,
    sample_unit_ball,
    trace_state,
    unit_ball_radius_bound,
)
from matprox.errors import (
    ConfigError,
    CorollaryModeViolation,
    SelfAdjointnessError,
)
from matprox.metric_core import Circle, TAU, diameter, epsilon_net


def two_point_pair(beta: float = 1.0) -> ApproximationPair:
    space = FiniteMetricSpace(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    return ApproximationPair(space, beta)


def cloud_pair(n: int, seed: int = 0, ratio: float = 1.0) -> ApproximationPair:
    rng = np.random.default_rng(seed)
    space = FiniteMetricSpace.from_points(rng.normal(size=(n, 3)))
    return ApproximationPair(
        space, ratio * min_separation(space), corollary_mode=ratio <= 1.0
    )


# ---------------------------------------------------------------------------
# Construction.
# ---------------------------------------------------------------------------


def test_pair_requires_positive_beta():
    with pytest.raises(ConfigError):
        two_point_pair(beta=0.0)


def test_corollary_mode_rejects_large_beta():
    with pytest.raises(CorollaryModeViolation):
        two_point_pair(beta=1.5)
    pair = ApproximationPair(
        two_point_pair().space, 1.5, corollary_mode=False
    )
    assert pair.leibniz_constant == pytest.approx(2.5)


def test_leibniz_constant_is_two_in_corollary_mode():
    for n in (2, 5, 9):
        pair = cloud_pair(n)
        assert pair.leibniz_constant == 2.0


# ---------------------------------------------------------------------------
# Seminorm values.
# ---------------------------------------------------------------------------


def test_identity_is_in_the_kernel():
    pair = cloud_pair(5)
    assert l_seminorm(pair, identity(5)) == 0.0


def test_diagonal_elements_recover_lipschitz_exactly():
    rng = np.random.default_rng(20)
    for n in (2, 4, 8):
        pair = cloud_pair(n, seed=n)
        for _ in range(100):
            f = rng.uniform(-3, 3, size=n)
            assert l_seminorm(pair, pair.rho.embed(f)) == lipschitz_seminorm(
                pair.space, f
            )


def test_offdiagonal_element_scaled_by_beta():
    beta = 0.5
    pair = two_point_pair(beta=beta)
    hollow = beta * np.array([[0, 1], [1, 0]], dtype=complex)
    assert l_seminorm(pair, hollow) == pytest.approx(1.0, abs=1e-15)


def test_seminorm_rejects_non_self_adjoint_by_default():
    pair = two_point_pair()
    skew = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(SelfAdjointnessError):
        l_seminorm(pair, skew)
    assert l_seminorm(pair, skew, extend_complex=True) > 0.0


def test_homogeneity_exact_for_binary_scales():
    pair = cloud_pair(4, seed=3)
    rng = np.random.default_rng(21)
    a = random_hermitian(rng, 4)
    base = l_seminorm(pair, a)
    for scale in (2.0, -4.0, 0.5):
        assert l_seminorm(pair, scale * a) == abs(scale) * base
    assert l_seminorm(pair, 3.7 * a) == pytest.approx(3.7 * base, rel=1e-12)


def test_subadditivity_residual_nonnegative():
    pair = cloud_pair(5, seed=4)
    rng = np.random.default_rng(22)
    for _ in range(200):
        a = random_hermitian(rng, 5)
        b = random_hermitian(rng, 5)
        residual = l_seminorm(pair, a) + l_seminorm(pair, b) - l_seminorm(pair, a + b)
        assert residual >= -1e-12


def test_batch_seminorms_match_single_evaluations():
    pair = cloud_pair(6, seed=5)
    rng = np.random.default_rng(23)
    stack = np.stack([random_hermitian(rng, 6) for _ in range(40)])
    batched = l_seminorms(pair, stack)
    singles = [l_seminorm(pair, a) for a in stack]
    assert np.allclose(batched, singles, atol=1e-13)


# ---------------------------------------------------------------------------
# Quasi-Leibniz residuals.
# ---------------------------------------------------------------------------


def test_residuals_vanish_on_identity_pair():
    pair = cloud_pair(3, seed=6)
    jres, lres = quasi_leibniz_residual(pair, identity(3), identity(3))
    assert jres == 0.0 and lres == 0.0


def test_diagonal_pairs_satisfy_classical_leibniz_at_constant_one():
    pair = cloud_pair(5, seed=7)
    rng = np.random.default_rng(24)
    for _ in range(100):
        f = rng.uniform(-1, 1, size=5)
        g = rng.uniform(-1, 1, size=5)
        df, dg = pair.rho.embed(f), pair.rho.embed(g)
        classical = (
            operator_norm(df) * l_seminorm(pair, dg)
            + operator_norm(dg) * l_seminorm(pair, df)
            - l_seminorm(pair, pair.rho.embed(f * g))
        )
        assert classical >= -1e-12


@pytest.mark.parametrize("ratio,expected_d", [(1.0, 2.0), (3.0, 4.0)])
def test_random_residual_suite(ratio, expected_d):
    rng = np.random.default_rng(25)
    for n in range(2, 9):
        pair = cloud_pair(n, seed=100 + n, ratio=ratio)
        assert pair.leibniz_constant == pytest.approx(expected_d, abs=1e-12)
        for _ in range(60):
            a = random_hermitian(rng, n)
            b = random_hermitian(rng, n)
            jres, lres = quasi_leibniz_residual(pair, a, b)
            assert jres >= -1e-9 and lres >= -1e-9


# ---------------------------------------------------------------------------
# Kernel.
# ---------------------------------------------------------------------------


def test_kernel_check_accepts_scalars_and_rejects_distance_function():
    pair = cloud_pair(4, seed=8)
    assert kernel_check(pair, 3.0 * identity(4))
    f = pair.space.dist[0]
    assert not kernel_check(pair, pair.rho.embed(f))


def test_kernel_dimension_is_one():
    for n in (2, 3, 5, 8):
        assert kernel_dimension(cloud_pair(n, seed=9 + n)) == 1


# ---------------------------------------------------------------------------
# Unit-ball radius bound and sampling.
# ---------------------------------------------------------------------------


def test_radius_bound_two_points():
    pair = two_point_pair(beta=0.25)
    assert unit_ball_radius_bound(pair) == pytest.approx(0.25 + 0.5, abs=1e-9)


def test_radius_bound_dominated_by_diameter():
    for n in (3, 5, 8):
        pair = cloud_pair(n, seed=30 + n)
        bound = unit_ball_radius_bound(pair)
        assert bound - pair.beta <= diameter(pair.space) + 1e-9


def test_circle_net_radius_bound_is_half_diameter_for_two_points():
    net, _ = epsilon_net(Circle(TAU), 2)
    pair = ApproximationPair(net, 0.1)
    assert unit_ball_radius_bound(pair) == pytest.approx(
        0.1 + diameter(net) / 2, abs=1e-9
    )


def test_samples_live_in_the_unit_ball_and_are_deterministic():
    pair = cloud_pair(5, seed=11)
    first = sample_unit_ball(pair, 50, seed=42)
    second = sample_unit_ball(pair, 50, seed=42)
    assert len(first) == 50
    for a, b in zip(first, second):
        assert np.array_equal(a, b)
    values = l_seminorms(pair, np.stack(first))
    assert np.max(values) <= 1.0 + 1e-12


def test_single_sample_and_count_validation():
    pair = cloud_pair(3, seed=12)
    assert len(sample_unit_ball(pair, 1, seed=0)) == 1
    with pytest.raises(ConfigError):
        sample_unit_ball(pair, 0, seed=0)


def test_centered_samples_respect_radius_bound():
    pair = cloud_pair(4, seed=13)
    bound = unit_ball_radius_bound(pair)
    for a in sample_unit_ball(pair, 200, seed=7):
        centered = a - trace_state(a) * identity(4)
        assert operator_norm(centered) <= bound + 1e-9


def test_extreme_sample_attains_seminorm_one():
    pair = two_point_pair(beta=0.5)
    f = pair.space.dist[0]
    hollow = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
    extreme = pair.rho.embed(f) + hollow
    assert l_seminorm(pair, extreme) == pytest.approx(1.0, abs=1e-15)
