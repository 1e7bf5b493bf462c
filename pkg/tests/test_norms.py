import math

import numpy as np
import pytest

from sphere_strichartz.grids import (
    CoefficientTable,
    build_sphere_grid,
    forward_sht,
    grid_for,
    inverse_sht,
)
from sphere_strichartz.norms import (
    TimeResolutionError,
    l2t_profile_exact,
    lp_norm,
    mixed_norm,
    sobolev_norm,
    triebel_lizorkin_norm,
)
from sphere_strichartz.spectral import (
    SpaceTimeField,
    TimeGrid,
    nyquist_time_grid,
    random_field,
    synthesize_history,
)

TWO_PI = 2.0 * math.pi


def test_lp_norm_constants():
    g = build_sphere_grid(4)
    ones = np.ones(g.shape)
    assert lp_norm(ones, g, 2.0) == pytest.approx(math.sqrt(4 * math.pi), rel=1e-14)
    y00 = inverse_sht(CoefficientTable.unit_mode(4, 0, 0), g)
    for p in (1.0, 2.0, 3.0, 6.0):
        want = (4 * math.pi) ** (1 / p) / math.sqrt(4 * math.pi)
        assert lp_norm(y00, g, p) == pytest.approx(want, rel=1e-13)
    assert lp_norm(y00, g, 2.0) == pytest.approx(1.0, rel=1e-13)


def test_lp_norm_refinement_oracle():
    # p=4 norm of Y_{10,0} against a 4x oversampled quadrature
    f = CoefficientTable.unit_mode(10, 10, 0)
    g2 = grid_for(10, 2, 2.0)
    g8 = grid_for(10, 2, 8.0)
    a = lp_norm(inverse_sht(f, g2), g2, 4.0)
    b = lp_norm(inverse_sht(f, g8), g8, 4.0)
    assert a == pytest.approx(b, abs=1e-9)


def test_lp_norm_validation():
    g = build_sphere_grid(2)
    with pytest.raises(ValueError):
        lp_norm(np.ones(g.shape), g, 0.5)
    with pytest.raises(ValueError):
        lp_norm(np.ones((1, 1)), g, 2.0)


def test_lp_norm_monotone_on_probability_space():
    rng = np.random.default_rng(0)
    f = random_field(8, 2, rng)
    g = grid_for(8, 2, 4.0)
    vals = inverse_sht(f, g)
    normalized = [
        lp_norm(vals, g, p) / (4 * math.pi) ** (1 / p) for p in (1.0, 2.0, 3.0, 4.0, 6.0)
    ]
    assert all(b >= a - 1e-12 for a, b in zip(normalized, normalized[1:]))


def test_sobolev_norm_examples():
    y00 = CoefficientTable.unit_mode(4, 0, 0)
    for s in (-1.0, 0.0, 2.5):
        assert sobolev_norm(y00, s) == pytest.approx(1.0, rel=1e-15)
    y31 = CoefficientTable.unit_mode(8, 3, 1)
    assert sobolev_norm(y31, 1.0) == pytest.approx(4.0, rel=1e-15)
    two = CoefficientTable.zeros(4, 2)
    two.a[1, 4] = 1.0
    two.a[3, 4] = 1.0
    assert sobolev_norm(two, 0.5) == pytest.approx(math.sqrt(6.0), rel=1e-14)


def test_sobolev_is_l2_at_zero():
    rng = np.random.default_rng(1)
    f = random_field(10, 2, rng, unit_norm=False)
    assert sobolev_norm(f, 0.0) == pytest.approx(f.l2_norm(), rel=1e-14)


def test_triebel_lizorkin_f022_is_l2():
    rng = np.random.default_rng(2)
    f = random_field(16, 2, rng)
    g = grid_for(16, 2, 2.0)
    assert triebel_lizorkin_norm(f, g, 2.0, 2.0, 0.0) == pytest.approx(
        f.l2_norm(), abs=1e-12
    )


def test_triebel_lizorkin_single_mode():
    f = CoefficientTable.unit_mode(6, 5, 2)
    g = grid_for(6, 2, 2.0)
    vals = inverse_sht(f, g)
    for p, q, r in [(4.0, 2.0, 0.7), (2.0, 7.0, -0.3), (math.inf, 2.0, 1.0)]:
        want = (1 + 5) ** r * lp_norm(vals, g, p)
        assert triebel_lizorkin_norm(f, g, p, q, r) == pytest.approx(want, rel=1e-12)


def test_triebel_lizorkin_q_monotone():
    rng = np.random.default_rng(3)
    f = random_field(12, 2, rng)
    g = grid_for(12, 2, 2.0)
    for p in (2.0, 4.0):
        a = triebel_lizorkin_norm(f, g, p, 2.0, 0.3)
        b = triebel_lizorkin_norm(f, g, p, 4.0, 0.3)
        c = triebel_lizorkin_norm(f, g, p, math.inf, 0.3)
        assert b <= a + 1e-12
        assert c <= b + 1e-12


def test_inner_lq_sum_monotone_pointwise():
    # the inner weighted ell^q sum decreases in q at every grid point
    from sphere_strichartz.spectral import synthesize_by_degree

    rng = np.random.default_rng(30)
    f = random_field(10, 2, rng)
    g = grid_for(10, 2, 2.0)
    weighted = (1.0 + np.arange(11.0))[:, None, None] ** 0.3 * np.abs(
        synthesize_by_degree(f, g)
    )
    inner2 = np.sum(weighted**2, axis=0) ** 0.5
    inner4 = np.sum(weighted**4, axis=0) ** 0.25
    assert np.all(inner4 <= inner2 + 1e-12)


def test_triebel_lizorkin_r_monotone_constant_one():
    rng = np.random.default_rng(4)
    f = random_field(10, 2, rng)
    g = grid_for(10, 2, 2.0)
    assert triebel_lizorkin_norm(f, g, 3.0, 2.0, 0.5) >= triebel_lizorkin_norm(
        f, g, 3.0, 2.0, 0.2
    )


def test_l2t_profile_constants():
    y00 = CoefficientTable.unit_mode(2, 0, 0)
    g = build_sphere_grid(2)
    prof = l2t_profile_exact(y00, g)
    np.testing.assert_allclose(prof, 1 / math.sqrt(2.0), atol=1e-14)


def test_l2t_profile_single_mode():
    f = CoefficientTable.unit_mode(6, 4, 1)
    g = build_sphere_grid(6)
    prof = l2t_profile_exact(f, g)
    np.testing.assert_allclose(
        prof, math.sqrt(TWO_PI) * np.abs(inverse_sht(f, g)), atol=1e-13
    )


def test_l2t_profile_matches_time_sampling():
    # the exact-identity oracle: sampled L^2_t norm on the Nyquist grid
    rng = np.random.default_rng(5)
    f = random_field(8, 2, rng)
    g = grid_for(8, 2, 2.0)
    tg = nyquist_time_grid(8, 2)
    u = synthesize_history(f, tg, g).materialize()
    acc = np.zeros(g.shape)
    for j in range(tg.M):
        acc += np.abs(u.samples_at(j)) ** 2
    sampled = np.sqrt(acc * TWO_PI / tg.M)
    np.testing.assert_allclose(sampled, l2t_profile_exact(f, g), atol=1e-10)


def test_mixed_norm_q2_equals_profile_norm():
    rng = np.random.default_rng(6)
    f = random_field(8, 2, rng)
    g = grid_for(8, 2, 2.0)
    u = synthesize_history(f, nyquist_time_grid(8, 2), g)
    prof = l2t_profile_exact(f, g)
    for p in (2.0, 4.0, math.inf):
        assert mixed_norm(u, p, 2.0) == pytest.approx(
            lp_norm(prof, g, p), rel=1e-10
        )


def test_mixed_norm_explicit_history_path():
    rng = np.random.default_rng(7)
    f = random_field(6, 2, rng)
    g = grid_for(6, 2, 2.0)
    u = synthesize_history(f, nyquist_time_grid(6, 2), g)
    assert mixed_norm(u.materialize(), 4.0, 2.0) == pytest.approx(
        mixed_norm(u, 4.0, 2.0), rel=1e-12
    )


def test_mixed_norm_p4_q4_footnote_identity():
    # ||u||_4^4 over the product space equals ||u^2||_2^2 computed by
    # per-time spatial Parseval of the squared samples
    rng = np.random.default_rng(8)
    N = 8
    f = random_field(N, 2, rng)
    g = grid_for(N, 2, 2.0)
    tg = nyquist_time_grid(N, 2)
    u = synthesize_history(f, tg, g)
    path1 = mixed_norm(u, 4.0, 4.0) ** 4
    acc = 0.0
    for j in range(tg.M):
        sq = u.samples_at(j) ** 2
        coeffs = forward_sht(sq, g, 2 * N)
        acc += float(np.sum(np.abs(coeffs.a) ** 2))
    path2 = acc * TWO_PI / tg.M
    assert path1 == pytest.approx(path2, rel=1e-10)


def test_mixed_norm_constants():
    y00 = CoefficientTable.unit_mode(2, 0, 0)
    g = build_sphere_grid(2)
    u = synthesize_history(y00, TimeGrid(16), g)
    for p in (2.0, 4.0):
        want = math.sqrt(TWO_PI) * (4 * math.pi) ** (1 / p - 0.5)
        assert mixed_norm(u, p, 2.0) == pytest.approx(want, rel=1e-13)


def test_mixed_norm_stable_under_time_doubling():
    rng = np.random.default_rng(9)
    f = random_field(6, 2, rng)
    g = grid_for(6, 2, 2.0)
    u = synthesize_history(f, nyquist_time_grid(6, 2), g)
    for q in (2.0, 4.0):
        a = mixed_norm(u, 4.0, q, check_resolution=True, rtol=1e-10)
        assert a > 0


def test_mixed_norm_resolution_error_fires_when_underresolved():
    # q=3 with M=40 aliases the beat frequency of |u|^3 (lambda gap 20);
    # doubling to 80 strips half the alias set and moves the value by ~0.1
    f = CoefficientTable.zeros(4, 2)
    f.a[0, 4] = 1.0
    f.a[4, 4] = 1.0
    g = grid_for(4, 2, 2.0)
    u = synthesize_history(f, TimeGrid(40), g)
    with pytest.raises(TimeResolutionError):
        mixed_norm(u, 2.0, 3.0, check_resolution=True, rtol=1e-6)


def test_mixed_norm_rejects_bad_q():
    f = CoefficientTable.unit_mode(2, 1, 0)
    g = build_sphere_grid(2)
    u = synthesize_history(f, TimeGrid(8), g)
    with pytest.raises(ValueError):
        mixed_norm(u, 2.0, math.inf)
