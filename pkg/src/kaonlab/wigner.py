"""Wigner-type Bell inequality and its CP-violation consequences.

At t = 0 the three-probability inequality

    P(K_S, K0bar) <= P(K_S, K1) + P(K1, K0bar)

reduces, for the antisymmetric pair state, to Re(eps) <= |eps|^2 up to
O(eps^3) corrections, so the measured CP parameter decides it: with
|eps| ~ 1e-3 at ~45 deg phase the inequality is violated.

Away from t = 0 the no-detection outcomes acquire decay-product
contributions; the equal-time form keeps an extra term h(t) built from the
four (N, N) probabilities, which grows on the K_S lifetime scale and closes
the violation window near t ~ 8e-4 tau_S.  Choosing asymmetric times
(t_a = t_c = t_d small, t_b free) instead keeps h small and stretches the
violation out to several tau_S.

All probabilities come from the unitary pair engine; nothing here is
hand-simplified, so the eps-inequality reduction is checked rather than
assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .bell import s_generalized_batch
from .constants import PhysicalConstants
from .evolution import pair_probabilities
from .states import QuasiSpinState, named_state


@dataclass(frozen=True)
class WignerEvaluation:
    """One evaluation of a Wigner-type inequality: violated iff lhs > rhs."""

    lhs: float
    rhs: float
    violated: bool
    times: tuple[float, ...]
    h_value: float | None = None
    epsilon_route_violated: bool | None = None

    def __post_init__(self) -> None:
        if self.violated != (self.lhs > self.rhs):
            raise ValueError("violated flag inconsistent with lhs/rhs")

    @property
    def routes_agree(self) -> bool | None:
        if self.epsilon_route_violated is None:
            return None
        return self.violated == self.epsilon_route_violated


def _p_yy(
    left: QuasiSpinState,
    t_l: float | np.ndarray,
    right: QuasiSpinState,
    t_r: float | np.ndarray,
    constants: PhysicalConstants,
) -> np.ndarray:
    return pair_probabilities(left, t_l, right, t_r, constants)[0]


def _p_nn(
    left: QuasiSpinState,
    t_l: float | np.ndarray,
    right: QuasiSpinState,
    t_r: float | np.ndarray,
    constants: PhysicalConstants,
) -> np.ndarray:
    return pair_probabilities(left, t_l, right, t_r, constants)[3]


def wigner_t0(constants: PhysicalConstants) -> WignerEvaluation:
    """The t = 0 inequality, evaluated through probabilities and through eps.

    The probability route uses the CP-violating pair state directly; the
    epsilon route checks Re(eps) > |eps|^2.  The two verdicts agree except
    within O(|eps|^3) of the boundary.
    """
    ks = named_state("KS", constants)
    k0bar = named_state("K0bar", constants)
    k1 = named_state("K1", constants)
    lhs = float(_p_yy(ks, 0.0, k0bar, 0.0, constants))
    rhs = float(
        _p_yy(ks, 0.0, k1, 0.0, constants) + _p_yy(k1, 0.0, k0bar, 0.0, constants)
    )
    eps = constants.epsilon
    return WignerEvaluation(
        lhs=lhs,
        rhs=rhs,
        violated=lhs > rhs,
        times=(0.0, 0.0, 0.0),
        epsilon_route_violated=eps.real > abs(eps) ** 2,
    )


def h_correction(t: float | np.ndarray, constants: PhysicalConstants) -> float | np.ndarray:
    """Unitarity correction: signed sum of the four equal-time (N,N) terms.

    h(t) = -P_{KS,K0bar}(N,N) + P_{KS,K1}(N,N) + P_{K1,K0bar}(N,N)
           + P_{K1,K1}(N,N), all at (t, t).  Without it the damping factors
    of the equal-time inequality would cancel and the t = 0 violation would
    (wrongly) appear to persist forever.  At t = 0 it equals minus the
    t = 0 violation gap, an O(eps) quantity; for t much larger than tau_L
    every (N,N) probability approaches 1 and h approaches 2.
    """
    t = np.asarray(t, dtype=float)
    if (t < 0).any():
        raise ValueError("time must be nonnegative")
    ks = named_state("KS", constants)
    k0bar = named_state("K0bar", constants)
    k1 = named_state("K1", constants)
    value = (
        -_p_nn(ks, t, k0bar, t, constants)
        + _p_nn(ks, t, k1, t, constants)
        + _p_nn(k1, t, k0bar, t, constants)
        + _p_nn(k1, t, k1, t, constants)
    )
    return float(value) if value.ndim == 0 else value


def _equal_times_gap(
    t: float | np.ndarray, constants: PhysicalConstants
) -> tuple[np.ndarray, np.ndarray]:
    """(lhs, rhs) of the h-corrected equal-time inequality, vectorized."""
    t = np.asarray(t, dtype=float)
    base = wigner_t0(constants)
    damping = np.exp(-2.0 * constants.gamma_hat * t)
    lhs = damping * base.lhs
    rhs = damping * base.rhs + h_correction(t, constants)
    return lhs, rhs


def wigner_equal_times(t: float, constants: PhysicalConstants) -> WignerEvaluation:
    """The inequality with all detections at the same time t.

    Equal-time (Y,Y) probabilities scale exactly as exp(-2*gamma*t) times
    their t = 0 values, so this is the t = 0 inequality damped on both
    sides plus the h correction on the right.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    lhs, rhs = _equal_times_gap(float(t), constants)
    lhs_f, rhs_f = float(lhs), float(rhs)
    eps = constants.epsilon
    return WignerEvaluation(
        lhs=lhs_f,
        rhs=rhs_f,
        violated=lhs_f > rhs_f,
        times=(float(t),) * 3,
        h_value=float(h_correction(float(t), constants)),
        epsilon_route_violated=eps.real > abs(eps) ** 2,
    )


def violation_threshold(constants: PhysicalConstants, tol: float = 1e-6) -> float:
    """Time where the equal-time inequality stops being violated.

    Brackets the sign change of lhs - rhs starting from t = 0 and bisects
    to ``tol`` (tau_S units).  Raises if there is no violation at t = 0
    (nothing to bracket).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    def gap(t: float) -> float:
        lhs, rhs = _equal_times_gap(t, constants)
        return float(lhs - rhs)

    if gap(0.0) <= 0.0:
        raise ValueError(
            "no violation at t = 0 (Re eps <= |eps|^2); no threshold exists"
        )
    hi = 1e-4
    while gap(hi) > 0.0:
        hi *= 2.0
        if hi > 1e3:
            raise ValueError("no sign change found up to t = 1e3 tau_S")
    return float(optimize.brentq(gap, hi / 2.0 if gap(hi / 2.0) > 0 else 0.0, hi, xtol=tol))


def wigner_two_times(
    t_a: float, t_b: float, constants: PhysicalConstants
) -> WignerEvaluation:
    """Asymmetric-time inequality: three detections at t_a, one at t_b.

    Uses the generalized CHSH combination (probability form, bound 1) in
    the CP-sensitive configuration (K_S, K0bar, K1, K1) with times
    (t_a, t_b, t_a, t_a); requires 0 <= t_a <= t_b.  Keeping t_a small
    suppresses h and the violation survives up to t_b of a few tau_S.
    """
    if not 0 <= t_a <= t_b:
        raise ValueError(f"need 0 <= t_a <= t_b, got t_a={t_a}, t_b={t_b}")
    k1 = named_state("K1", constants)
    states = (named_state("KS", constants), named_state("K0bar", constants), k1, k1)
    times = np.array([t_a, t_b, t_a, t_a], dtype=float)
    value = float(s_generalized_batch(states, times, constants))
    return WignerEvaluation(
        lhs=value, rhs=1.0, violated=value > 1.0, times=(t_a, t_b, t_a, t_a)
    )


def two_times_scan(
    t_a_values: np.ndarray, t_b_values: np.ndarray, constants: PhysicalConstants
) -> list[tuple[float, float, float, float, bool]]:
    """Rows (t_a, t_b, lhs, rhs, violated) over the grid with t_a <= t_b."""
    k1 = named_state("K1", constants)
    states = (named_state("KS", constants), named_state("K0bar", constants), k1, k1)
    ta_grid, tb_grid = np.meshgrid(
        np.asarray(t_a_values, float), np.asarray(t_b_values, float), indexing="ij"
    )
    mask = ta_grid <= tb_grid
    ta = ta_grid[mask]
    tb = tb_grid[mask]
    times = np.stack([ta, tb, ta, ta], axis=-1)
    values = s_generalized_batch(states, times, constants)
    return [
        (float(a), float(b), float(v), 1.0, bool(v > 1.0))
        for a, b, v in zip(ta, tb, values)
    ]


def two_times_boundary(
    t_a: float,
    constants: PhysicalConstants,
    t_b_max: float = 8.0,
    resolution: float = 0.05,
) -> float:
    """Largest scanned t_b (step ``resolution``) still violating at fixed t_a."""
    t_b = np.arange(t_a, t_b_max + resolution / 2, resolution)
    rows = two_times_scan(np.array([t_a]), t_b, constants)
    violated = [b for _, b, _, _, flag in rows if flag]
    if not violated:
        raise ValueError(f"no violation anywhere on the scan at t_a={t_a}")
    return max(violated)


@dataclass(frozen=True)
class ZetaBound:
    """Lower bound on the decoherence parameter implied by the inequality."""

    value: float | None
    vacuous: bool
    re_epsilon: float
    abs_epsilon_sq: float


def zeta_lower_bound(constants: PhysicalConstants) -> ZetaBound:
    """(Re eps - |eps|^2) / (Re eps + 4 Re^2 eps + |eps|^2), or no constraint.

    When the t = 0 inequality is violated (Re eps > |eps|^2), local realism
    forces the decoherence parameter up to this value (~0.987 for the
    default eps); otherwise the bound is vacuous and flagged as such.
    """
    re_eps = constants.epsilon.real
    abs_sq = abs(constants.epsilon) ** 2
    if re_eps <= abs_sq:
        return ZetaBound(None, True, re_eps, abs_sq)
    value = (re_eps - abs_sq) / (re_eps + 4.0 * re_eps**2 + abs_sq)
    return ZetaBound(float(value), False, re_eps, abs_sq)
