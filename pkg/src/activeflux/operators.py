"""Finite difference kernels for the point value update.

All stencils live on the *half grid*: offset ``k`` means ``k * dx / 2`` away
from the evaluation point, so even offsets land on other point values and odd
offsets land on cell centers.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class SchemeVariant(str, enum.Enum):
    CENTRAL4 = "central4"
    ALTERNATING4 = "alternating4"
    CENTRAL3 = "central3"
    ALTERNATING3 = "alternating3"

    @classmethod
    def parse(cls, value: "str | SchemeVariant") -> "SchemeVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown scheme variant {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class StencilWeights:
    """Half-grid offsets and weights of a first-derivative stencil.

    The derivative is ``sum(w * z[offset]) / dx``.
    """

    name: str
    offsets: tuple[int, ...]
    exact: tuple[Fraction, ...]

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.exact)

    def apply(self, samples, dx: float):
        samples = np.asarray(samples)
        if samples.shape[0] != len(self.offsets):
            raise ValueError(f"{self.name} needs {len(self.offsets)} samples, got {samples.shape[0]}")
        # weights sum to zero, so differencing against one sample annihilates constants exactly
        ref = samples[0]
        return sum(w * (s - ref) for w, s in zip(self.weights, samples)) / dx


def _stencil(name, offsets, numerators, denominator):
    return StencilWeights(name, tuple(offsets), tuple(Fraction(n, denominator) for n in numerators))


D4_PLUS = _stencil("d4_plus", (-2, -1, 0, 1), (1, -6, 3, 2), 3)
D4_MINUS = _stencil("d4_minus", (-1, 0, 1, 2), (-2, -3, 6, -1), 3)
D4_CENTRAL = _stencil("d4_central", (-2, -1, 1, 2), (1, -8, 8, -1), 6)
D3_PLUS = _stencil("d3_plus", (-2, -1, 0), (1, -4, 3), 1)
D3_MINUS = _stencil("d3_minus", (0, 1, 2), (-3, 4, -1), 1)
D3_CENTRAL = _stencil("d3_central", (-2, -1, 1, 2), (1, -4, 4, -1), 2)

# (operator for q = u_x, operator for d/dt u = (a q)_x)
VARIANT_STENCILS: dict[SchemeVariant, tuple[StencilWeights, StencilWeights]] = {
    SchemeVariant.CENTRAL4: (D4_CENTRAL, D4_CENTRAL),
    SchemeVariant.ALTERNATING4: (D4_MINUS, D4_PLUS),
    SchemeVariant.CENTRAL3: (D3_CENTRAL, D3_CENTRAL),
    SchemeVariant.ALTERNATING3: (D3_MINUS, D3_PLUS),
}


def variant_stencils(variant) -> tuple[StencilWeights, StencilWeights]:
    return VARIANT_STENCILS[SchemeVariant.parse(variant)]


def d4_plus(samples, dx):
    """Samples at offsets (-1, -1/2, 0, +1/2) * dx from the evaluation point."""
    return D4_PLUS.apply(samples, dx)


def d4_minus(samples, dx):
    """Samples at offsets (-1/2, 0, +1/2, +1) * dx from the evaluation point.

    Evaluated as the mirror image of ``d4_plus`` so the identity holds bitwise.
    """
    return -D4_PLUS.apply(np.asarray(samples)[::-1], dx)


def d4_central(samples, dx):
    """Samples at offsets (-1, -1/2, +1/2, +1) * dx from the evaluation point."""
    return D4_CENTRAL.apply(samples, dx)


def d3_variant(side: str, samples, dx):
    """Third-order operators; ``side`` is ``"plus"``, ``"minus"`` or ``"central"``."""
    if side == "minus":
        return -D3_PLUS.apply(np.asarray(samples)[::-1], dx)
    table = {"plus": D3_PLUS, "central": D3_CENTRAL}
    try:
        stencil = table[side]
    except KeyError:
        raise ValueError(f"unknown side {side!r}") from None
    return stencil.apply(samples, dx)


def apply_on_half_grid(stencil: StencilWeights, values: np.ndarray, dx: float, axis: int = 0) -> np.ndarray:
    """Evaluate ``stencil`` at every half-grid node of a periodic array.

    Non-periodic callers pad ``values`` first and crop afterwards; the wrapped
    entries only pollute the outermost ``max(|offset|)`` nodes.
    """
    out = np.zeros_like(values)
    for off, w in zip(stencil.offsets, stencil.weights):
        out = out + w * (np.roll(values, -off, axis=axis) - values)
    return out / dx
