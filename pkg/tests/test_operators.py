from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activeflux.operators import (
    D3_CENTRAL,
    D3_MINUS,
    D3_PLUS,
    D4_CENTRAL,
    D4_MINUS,
    D4_PLUS,
    SchemeVariant,
    apply_on_half_grid,
    d3_variant,
    d4_central,
    d4_minus,
    d4_plus,
    variant_stencils,
)

ALL = [D4_PLUS, D4_MINUS, D4_CENTRAL, D3_PLUS, D3_MINUS, D3_CENTRAL]
vals = st.floats(-1e3, 1e3, allow_nan=False)


@pytest.mark.parametrize("stencil", ALL, ids=lambda s: s.name)
def test_weights_sum_to_zero_exactly(stencil):
    assert sum(stencil.exact) == Fraction(0)


@pytest.mark.parametrize("plus,minus", [(D4_PLUS, D4_MINUS), (D3_PLUS, D3_MINUS)])
def test_minus_tables_mirror_plus(plus, minus):
    assert tuple(-o for o in reversed(plus.offsets)) == minus.offsets
    assert tuple(-w for w in reversed(plus.exact)) == minus.exact


def test_examples():
    h = 0.1
    assert d4_plus([2, 2, 2, 2], h) == 0
    assert d4_plus([-h, -h / 2, 0, h / 2], h) == pytest.approx(1.0, rel=1e-14)
    assert d4_plus([-h**3, -h**3 / 8, 0, h**3 / 8], h) == pytest.approx(0.0, abs=1e-15)
    assert d4_minus([3, 3, 3, 3], h) == 0
    assert d4_minus([-h / 2, 0, h / 2, h], h) == pytest.approx(1.0, rel=1e-14)
    assert d4_central([-1, -1, -1, -1], h) == 0
    assert d4_central([-h, -h / 2, h / 2, h], h) == pytest.approx(1.0, rel=1e-14)
    assert d4_central([h**4, h**4 / 16, h**4 / 16, h**4], h) == 0.0
    for side, n in (("plus", 3), ("minus", 3), ("central", 4)):
        assert d3_variant(side, [5.0] * n, h) == 0
    assert d3_variant("plus", [-h, -h / 2, 0], h) == pytest.approx(1.0, rel=1e-14)
    assert d3_variant("central", [h**2, h**2 / 4, h**2 / 4, h**2], h) == 0.0
    with pytest.raises(ValueError):
        d3_variant("left", [0, 0, 0], h)
    with pytest.raises(ValueError):
        d4_plus([0, 0, 0], h)


@given(a=vals, b=vals, c=vals, d=vals, h=st.floats(1e-3, 10))
@settings(max_examples=200)
def test_mirror_identity(a, b, c, d, h):
    assert d4_minus([a, b, c, d], h) == -d4_plus([d, c, b, a], h)
    assert d3_variant("minus", [a, b, c], h) == -d3_variant("plus", [c, b, a], h)


@given(z=st.lists(vals, min_size=5, max_size=5), h=st.floats(1e-2, 10))
@settings(max_examples=200)
def test_central_is_mean_of_one_sided(z, h):
    # five half-grid samples at offsets -2..2; each operator picks its own subset
    z = np.array(z)
    plus = sum(float(w) * z[o + 2] for o, w in zip(D4_PLUS.offsets, D4_PLUS.exact))
    minus = sum(float(w) * z[o + 2] for o, w in zip(D4_MINUS.offsets, D4_MINUS.exact))
    cen = sum(float(w) * z[o + 2] for o, w in zip(D4_CENTRAL.offsets, D4_CENTRAL.exact))
    assert cen == pytest.approx((plus + minus) / 2, rel=1e-12, abs=1e-9)
    exact_sum = {o: Fraction(0) for o in range(-2, 3)}
    for s, f in ((D4_PLUS, Fraction(1, 2)), (D4_MINUS, Fraction(1, 2))):
        for o, w in zip(s.offsets, s.exact):
            exact_sum[o] += f * w
    for o, w in zip(D4_CENTRAL.offsets, D4_CENTRAL.exact):
        assert exact_sum[o] == w
    assert exact_sum[0] == 0


@pytest.mark.parametrize(
    "stencil,degree", [(D4_PLUS, 3), (D4_MINUS, 3), (D4_CENTRAL, 3), (D3_PLUS, 2), (D3_MINUS, 2), (D3_CENTRAL, 2)],
    ids=lambda p: getattr(p, "name", str(p)),
)
@given(x0=st.floats(-5, 5), h=st.floats(0.01, 1.0), coeffs=st.lists(st.floats(-3, 3), min_size=4, max_size=4))
@settings(max_examples=50)
def test_polynomial_exactness_at_arbitrary_points(stencil, degree, x0, h, coeffs):
    c = np.array(coeffs[: degree + 1])
    p = np.polynomial.Polynomial(c)
    samples = [p(x0 + o * h / 2) for o in stencil.offsets]
    scale = sum(abs(ci) * (abs(x0) + h) ** k for k, ci in enumerate(c)) / h
    assert stencil.apply(samples, h) == pytest.approx(p.deriv()(x0), abs=1e-12 * max(scale, 1.0))


@pytest.mark.parametrize("stencil", [D3_PLUS, D3_MINUS, D3_CENTRAL], ids=lambda s: s.name)
def test_third_order_not_exact_on_cubics(stencil):
    h = 0.5
    samples = [(o * h / 2) ** 3 for o in stencil.offsets]
    assert abs(stencil.apply(samples, h)) > 1e-3


def test_variant_tables():
    assert variant_stencils("central4") == (D4_CENTRAL, D4_CENTRAL)
    assert variant_stencils(SchemeVariant.ALTERNATING4) == (D4_MINUS, D4_PLUS)
    assert variant_stencils("Alternating3") == (D3_MINUS, D3_PLUS)
    assert variant_stencils("central3") == (D3_CENTRAL, D3_CENTRAL)
    with pytest.raises(ValueError):
        SchemeVariant.parse("upwind")


@pytest.mark.parametrize("stencil", ALL, ids=lambda s: s.name)
def test_apply_on_half_grid_matches_windowed_kernel(stencil):
    rng = np.random.default_rng(3)
    z = rng.normal(size=20)
    h = 0.2
    full = apply_on_half_grid(stencil, z, h)
    for k in (0, 5, 13):
        window = [z[(k + o) % z.size] for o in stencil.offsets]
        assert full[k] == pytest.approx(stencil.apply(window, h), rel=1e-14)
    z2 = rng.normal(size=(6, 8))
    along1 = apply_on_half_grid(stencil, z2, h, axis=1)
    np.testing.assert_allclose(along1, apply_on_half_grid(stencil, z2.T, h, axis=0).T, rtol=1e-14)
