"""Quasi-spin states: normalized two-component vectors over {K0, K0bar}.

The short/long mass eigenstates K_S, K_L are built from p = 1 + epsilon and
q = 1 - epsilon and are *not* orthogonal once epsilon != 0; the CP
eigenstates K1, K2 are their epsilon -> 0 limits.  States are stored
normalized, so downstream probability formulas never need convention
prefactors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import PhysicalConstants

_NORM_TOL = 1e-12

NAMED_STATE_KINDS = ("K0", "K0bar", "KS", "KL", "K1", "K2")


@dataclass(frozen=True)
class QuasiSpinState:
    """Normalized superposition c_k0 |K0> + c_k0bar |K0bar|>."""

    c_k0: complex
    c_k0bar: complex
    label: str | None = None

    def __post_init__(self) -> None:
        norm_sq = abs(self.c_k0) ** 2 + abs(self.c_k0bar) ** 2
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(
                f"state must be normalized: |c|^2 = {norm_sq!r} (label={self.label})"
            )

    @classmethod
    def normalized(
        cls, c_k0: complex, c_k0bar: complex, label: str | None = None
    ) -> "QuasiSpinState":
        """Build a state from arbitrary coefficients, normalizing them."""
        norm = math.sqrt(abs(c_k0) ** 2 + abs(c_k0bar) ** 2)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(c_k0 / norm, c_k0bar / norm, label)

    def orthogonal(self, label: str | None = None) -> "QuasiSpinState":
        """The state orthogonal to this one (unique up to phase in 2 dims)."""
        return QuasiSpinState(
            -self.c_k0bar.conjugate(), self.c_k0.conjugate(), label
        )


def inner_product(a: QuasiSpinState, b: QuasiSpinState) -> complex:
    """Hermitian inner product <a|b> over the strangeness basis."""
    return (
        a.c_k0.conjugate() * b.c_k0 + a.c_k0bar.conjugate() * b.c_k0bar
    )


def named_state(kind: str, constants: PhysicalConstants) -> QuasiSpinState:
    """One of the physically distinguished quasi-spin states.

    ``kind`` is one of K0, K0bar (strangeness eigenstates), KS, KL (mass
    eigenstates, epsilon-dependent) or K1, K2 (CP eigenstates).
    """
    sqrt_half = 1.0 / math.sqrt(2.0)
    if kind == "K0":
        return QuasiSpinState(1.0, 0.0, "K0")
    if kind == "K0bar":
        return QuasiSpinState(0.0, 1.0, "K0bar")
    if kind == "K1":
        return QuasiSpinState(sqrt_half, -sqrt_half, "K1")
    if kind == "K2":
        return QuasiSpinState(sqrt_half, sqrt_half, "K2")
    if kind in ("KS", "KL"):
        p = 1.0 + constants.epsilon
        q = 1.0 - constants.epsilon
        norm = math.sqrt(abs(p) ** 2 + abs(q) ** 2)
        if kind == "KS":
            return QuasiSpinState(p / norm, -q / norm, "KS")
        return QuasiSpinState(p / norm, q / norm, "KL")
    raise ValueError(
        f"unknown state kind {kind!r}; expected one of {NAMED_STATE_KINDS}"
    )
