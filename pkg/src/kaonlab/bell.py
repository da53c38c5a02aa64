"""Bell-CHSH machinery: photon and kaon S-functions plus maximization.

The photon S-function is the textbook CHSH combination of polarizer-angle
cosines, bounded by 2 for local realistic models and reaching 2*sqrt(2)
quantum mechanically.  The kaon analogue replaces angle differences by
delta_m * (time differences) while every term also picks up decay damping;
the interplay of oscillation and decay (x = 2*delta_m/gamma_S ~ 1) keeps the
kaon function below 2 everywhere.

Two equivalent normalizations are implemented: the expectation-value form
with bound 2 (``s_kaon_strangeness``, all four detected states K0bar) and
the probability form with bound 1 (``s_generalized``, arbitrary quasi-spin
states and times); s_generalized == s_kaon/2 for the strangeness choice.

Angle arguments label time differences only up to sign, because the
correlation is even in each angle while detection times must stay
nonnegative.  ``s_kaon_strangeness`` therefore evaluates every sign
realization of the requested angles, anchored so the earliest detection
happens at ``t_a``, and reports the largest value; with decays switched off
the anchored all-plus realization reduces to the photon function.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .constants import PhysicalConstants
from .evolution import joint_outcome_table, pair_probabilities, singlet_coefficients
from .states import QuasiSpinState, inner_product, named_state


def s_photon(
    phi_ab: np.ndarray | float,
    phi_ac: np.ndarray | float,
    phi_db: np.ndarray | float,
) -> np.ndarray | float:
    """CHSH combination for photon polarization angles, LRT bound 2."""
    phi_ab = np.asarray(phi_ab, dtype=float)
    phi_ac = np.asarray(phi_ac, dtype=float)
    phi_db = np.asarray(phi_db, dtype=float)
    value = np.abs(np.cos(phi_ab) - np.cos(phi_ac)) + np.abs(
        np.cos(phi_db) + np.cos(-phi_ab + phi_ac + phi_db)
    )
    return float(value) if value.ndim == 0 else value


def expectation_qm(
    k_n: QuasiSpinState,
    t_a: float,
    k_m: QuasiSpinState,
    t_b: float,
    constants: PhysicalConstants,
) -> float:
    """Correlation -1 + 2*(P_yy + P_nn) of the +/-1 detection observables."""
    table = joint_outcome_table(k_n, t_a, k_m, t_b, constants)
    return -1.0 + 2.0 * (table.p_yy + table.p_nn)


def _m_batch(
    left: QuasiSpinState,
    t_left: np.ndarray,
    right: QuasiSpinState,
    t_right: np.ndarray,
    constants: PhysicalConstants,
) -> np.ndarray:
    p_yy, _, _, p_nn = pair_probabilities(left, t_left, right, t_right, constants)
    return -1.0 + 2.0 * (p_yy + p_nn)


def s_kaon_times(
    times: np.ndarray, constants: PhysicalConstants, state_kind: str = "K0bar"
) -> np.ndarray:
    """Kaon CHSH value at explicit detection times, LRT bound 2.

    ``times`` has shape (..., 4) holding (t_a, t_b, t_c, t_d); the same
    quasi-spin state (default K0bar) is detected in all four pairings.
    """
    times = np.asarray(times, dtype=float)
    state = named_state(state_kind, constants)
    t_a, t_b, t_c, t_d = (times[..., i] for i in range(4))
    m_ab = _m_batch(state, t_a, state, t_b, constants)
    m_ac = _m_batch(state, t_a, state, t_c, constants)
    m_db = _m_batch(state, t_d, state, t_b, constants)
    m_dc = _m_batch(state, t_d, state, t_c, constants)
    return np.abs(m_ab - m_ac) + np.abs(m_dc + m_db)


def s_kaon_times_closed_form(
    times: np.ndarray, constants: PhysicalConstants
) -> np.ndarray:
    """Damped-cosine closed form of the strangeness CHSH combination.

    Exact rewrite of ``s_kaon_times`` when gamma_L = 0 and CP violation is
    neglected; kept as the independently coded cross-check and as the
    documented general-gamma variant of the printed inequality.
    """
    times = np.asarray(times, dtype=float)
    g = constants.gamma_hat
    dm = constants.delta_m_hat
    t_a, t_b, t_c, t_d = (times[..., i] for i in range(4))

    def term(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        return np.cos(dm * (t1 - t2)) * np.exp(-g * (t1 + t2))

    return np.abs(term(t_a, t_b) - term(t_a, t_c)) + np.abs(
        term(t_d, t_b) + term(t_d, t_c)
    )


_SIGN_PATTERNS = tuple(itertools.product((1.0, -1.0), repeat=3))

#: Two detections of the same state on the same side closer than this (in
#: tau_S) count as a single setting; the CHSH combination is then the
#: local-realistic tautology |M| + |M| and is excluded from maximization.
COINCIDENCE_WINDOW = 1e-6


def angle_time_realizations(
    t_a: float,
    phi_ab: float,
    phi_ac: float,
    phi_db: float,
    constants: PhysicalConstants,
) -> np.ndarray:
    """All nonnegative time quadruples realizing the given angle magnitudes.

    Each angle fixes |delta_m * (time difference)|; the returned array (shape
    (8, 4)) enumerates the sign choices, each shifted so its earliest
    detection time equals ``t_a``.
    """
    if t_a < 0:
        raise ValueError(f"anchor time must be nonnegative, got {t_a}")
    dm = constants.delta_m_hat
    if dm <= 0:
        raise ValueError("the angle chart needs a positive mass splitting")
    realizations = []
    for s1, s2, s3 in _SIGN_PATTERNS:
        o_a = 0.0
        o_b = s1 * phi_ab / dm
        o_c = s2 * phi_ac / dm
        o_d = o_b - s3 * phi_db / dm
        offsets = np.array([o_a, o_b, o_c, o_d])
        realizations.append(offsets - offsets.min() + t_a)
    return np.array(realizations)


def s_kaon_strangeness(
    t_a: float,
    phi_ab: float,
    phi_ac: float,
    phi_db: float,
    constants: PhysicalConstants,
    closed_form: bool = False,
) -> float:
    """Kaon CHSH value for an angle triple, earliest detection at ``t_a``.

    Evaluates the unitary expectation-value combination on every sign
    realization of the angles and returns the largest; ``closed_form=True``
    uses the damped-cosine rewrite instead (identical for gamma_L = 0 and
    no CP violation).
    """
    times = angle_time_realizations(t_a, phi_ab, phi_ac, phi_db, constants)
    if closed_form:
        values = s_kaon_times_closed_form(times, constants)
    else:
        values = s_kaon_times(times, constants)
    return float(values.max())


@dataclass(frozen=True)
class ChshSetting:
    """Four quasi-spin states and four detection times (tau_S units).

    Pairings follow the generalized inequality: (k_n t_a, k_m t_b),
    (k_n t_a, k_n' t_c), (k_m' t_d, k_m t_b), (k_m' t_d, k_n' t_c).
    """

    k_n: QuasiSpinState
    k_m: QuasiSpinState
    k_n_prime: QuasiSpinState
    k_m_prime: QuasiSpinState
    t_a: float
    t_b: float
    t_c: float
    t_d: float

    def __post_init__(self) -> None:
        for name in ("t_a", "t_b", "t_c", "t_d"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def _yy_nn_batch(
    left: QuasiSpinState,
    t_left: np.ndarray,
    right: QuasiSpinState,
    t_right: np.ndarray,
    constants: PhysicalConstants,
) -> np.ndarray:
    p_yy, _, _, p_nn = pair_probabilities(left, t_left, right, t_right, constants)
    return p_yy + p_nn


def s_generalized_batch(
    states: tuple[QuasiSpinState, QuasiSpinState, QuasiSpinState, QuasiSpinState],
    times: np.ndarray,
    constants: PhysicalConstants,
) -> np.ndarray:
    """Probability-form CHSH combination (LRT bound 1), vectorized over times."""
    k_n, k_m, k_np, k_mp = states
    times = np.asarray(times, dtype=float)
    t_a, t_b, t_c, t_d = (times[..., i] for i in range(4))
    nm = _yy_nn_batch(k_n, t_a, k_m, t_b, constants)
    nnp = _yy_nn_batch(k_n, t_a, k_np, t_c, constants)
    mpm = _yy_nn_batch(k_mp, t_d, k_m, t_b, constants)
    mpnp = _yy_nn_batch(k_mp, t_d, k_np, t_c, constants)
    return np.abs(nm - nnp) + np.abs(-1.0 + mpm + mpnp)


def s_generalized(setting: ChshSetting, constants: PhysicalConstants) -> float:
    """Generalized Bell-CHSH value of a setting; values above 1 violate LRT."""
    states = (setting.k_n, setting.k_m, setting.k_n_prime, setting.k_m_prime)
    times = np.array([setting.t_a, setting.t_b, setting.t_c, setting.t_d])
    return float(s_generalized_batch(states, times, constants))


# -- deterministic maximization ----------------------------------------------

@dataclass(frozen=True)
class MaximizationReport:
    """Outcome of a coarse-grid scan plus local simplex refinement."""

    function: str
    best_value: float
    best_params: tuple[float, ...]
    param_names: tuple[str, ...]
    grid_best_value: float
    grid_steps: int
    refine_iterations: int
    evaluations: int
    seed_values: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "function": self.function,
            "best_value": self.best_value,
            "best_params": dict(zip(self.param_names, self.best_params)),
            "grid_best_value": self.grid_best_value,
            "grid_steps": self.grid_steps,
            "refine_iterations": self.refine_iterations,
            "evaluations": self.evaluations,
            "seed_values": list(self.seed_values),
        }


def _photon_batch(points: np.ndarray, constants: PhysicalConstants) -> np.ndarray:
    return s_photon(points[:, 0], points[:, 1], points[:, 2])


def _antikaon_m_closed(constants: PhysicalConstants):
    """Closed antikaon correlation M(t_x, t_y), specialized from the engine.

    For K0bar detected on both sides the 2x2 contractions collapse to a few
    exponentials; this is what makes million-point grid scans affordable.
    Kept numerically identical to the engine route (tested).
    """
    ks = named_state("KS", constants)
    kl = named_state("KL", constants)
    coeff = abs(singlet_coefficients(constants)[0, 1]) ** 2
    q_s = abs(inner_product(named_state("K0bar", constants), ks)) ** 2
    g_sl = inner_product(ks, kl).real
    w_yy = coeff * q_s * q_s
    w_marg = coeff * q_s
    gs, gl, g = constants.gamma_s_hat, constants.gamma_l_hat, constants.gamma_hat
    dm = constants.delta_m_hat

    def marginal(t: np.ndarray) -> np.ndarray:
        return w_marg * (
            np.exp(-gs * t)
            + np.exp(-gl * t)
            + 2.0 * g_sl * np.cos(dm * t) * np.exp(-g * t)
        )

    def m_value(t_x: np.ndarray, t_y: np.ndarray, marg_x: np.ndarray, marg_y: np.ndarray) -> np.ndarray:
        p_yy = w_yy * (
            np.exp(-gs * t_x - gl * t_y)
            + np.exp(-gl * t_x - gs * t_y)
            - 2.0 * np.cos(dm * (t_x - t_y)) * np.exp(-g * (t_x + t_y))
        )
        return 1.0 + 4.0 * p_yy - 2.0 * marg_x - 2.0 * marg_y

    return marginal, m_value


def _kaon_batch(points: np.ndarray, constants: PhysicalConstants) -> np.ndarray:
    """Best CHSH value over the sign realizations of each angle point.

    Realizations where the two settings on one side coincide (t_b ~ t_c or
    t_a ~ t_d within COINCIDENCE_WINDOW, all states being K0bar) are
    skipped: there the combination equals the local-realistic bound
    identically for every theory, so they test nothing.
    """
    dm = constants.delta_m_hat
    if dm <= 0:
        raise ValueError("the angle chart needs a positive mass splitting")
    t0 = points[:, 0]
    best = np.full(points.shape[0], -np.inf)
    marginal, m_value = _antikaon_m_closed(constants)
    for s1, s2, s3 in _SIGN_PATTERNS:
        o_b = s1 * points[:, 1] / dm
        o_c = s2 * points[:, 2] / dm
        o_d = o_b - s3 * points[:, 3] / dm
        offsets = np.stack([np.zeros_like(o_b), o_b, o_c, o_d], axis=-1)
        times = offsets - offsets.min(axis=-1, keepdims=True) + t0[:, None]
        t_a, t_b, t_c, t_d = (times[:, i] for i in range(4))
        marg = [marginal(times[:, i]) for i in range(4)]
        m_ab = m_value(t_a, t_b, marg[0], marg[1])
        m_ac = m_value(t_a, t_c, marg[0], marg[2])
        m_db = m_value(t_d, t_b, marg[3], marg[1])
        m_dc = m_value(t_d, t_c, marg[3], marg[2])
        value = np.abs(m_ab - m_ac) + np.abs(m_dc + m_db)
        degenerate = (np.abs(t_b - t_c) < COINCIDENCE_WINDOW) | (
            np.abs(t_a - t_d) < COINCIDENCE_WINDOW
        )
        np.maximum(best, np.where(degenerate, -np.inf, value), out=best)
    return best


def _wigner_states(
    constants: PhysicalConstants,
) -> tuple[QuasiSpinState, QuasiSpinState, QuasiSpinState, QuasiSpinState]:
    k1 = named_state("K1", constants)
    return (named_state("KS", constants), named_state("K0bar", constants), k1, k1)


_FUNCTIONS = {
    "photon": {
        "names": ("phi_ab", "phi_ac", "phi_db"),
        "bounds": ((0.0, 2.0 * math.pi),) * 3,
    },
    "kaon_strangeness": {
        "names": ("t_a", "phi_ab", "phi_ac", "phi_db"),
        "bounds": ((0.0, 4.0),) + ((0.0, 2.0 * math.pi),) * 3,
    },
    "generalized_restricted": {
        "names": ("t_a", "t_b", "t_c", "t_d"),
        "bounds": ((0.0, 4.0),) * 4,
    },
}

_CHUNK = 1 << 16


def maximize_s(
    function: str,
    constants: PhysicalConstants,
    bounds: tuple[tuple[float, float], ...] | None = None,
    grid_steps: int = 32,
    refine_iters: int = 2000,
    seeds: int = 5,
    states: tuple[QuasiSpinState, ...] | None = None,
) -> MaximizationReport:
    """Deterministic maximization: dense grid scan, then simplex refinement.

    ``function`` is one of photon, kaon_strangeness or generalized_restricted
    (the latter optimizes the four times of ``s_generalized`` at fixed
    states, defaulting to the CP-sensitive choice).  The top ``seeds`` grid
    points seed Nelder-Mead runs clipped to the bounds; results are
    reproducible because nothing is randomized.
    """
    if function not in _FUNCTIONS:
        raise ValueError(f"unknown function {function!r}")
    if grid_steps < 2:
        raise ValueError("grid_steps must be at least 2")
    entry = _FUNCTIONS[function]
    names: tuple[str, ...] = entry["names"]
    if bounds is None:
        bounds = entry["bounds"]
    if len(bounds) != len(names):
        raise ValueError(f"{function} needs {len(names)} bounds, got {len(bounds)}")
    for lo, hi in bounds:
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ValueError(f"invalid bounds ({lo}, {hi})")

    if function == "photon":
        batch = _photon_batch
    elif function == "kaon_strangeness":
        batch = _kaon_batch
    else:
        fixed_states = states if states is not None else _wigner_states(constants)
        if len(fixed_states) != 4:
            raise ValueError("generalized_restricted needs exactly 4 states")

        def batch(points: np.ndarray, consts: PhysicalConstants) -> np.ndarray:
            return s_generalized_batch(fixed_states, points, consts)

    axes = [np.linspace(lo, hi, grid_steps) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)

    values = np.empty(points.shape[0])
    for start in range(0, points.shape[0], _CHUNK):
        chunk = points[start : start + _CHUNK]
        values[start : start + _CHUNK] = batch(chunk, constants)
    evaluations = points.shape[0]

    order = np.lexsort((np.arange(values.size), -values))
    seed_idx = order[: max(1, seeds)]
    grid_best = float(values[seed_idx[0]])

    lows = np.array([b[0] for b in bounds])
    highs = np.array([b[1] for b in bounds])
    nfev = 0

    def negated(x: np.ndarray) -> float:
        nonlocal nfev
        nfev += 1
        clipped = np.clip(x, lows, highs)
        penalty = float(np.sum(np.abs(x - clipped)))
        value = float(batch(clipped[None, :], constants)[0])
        return -value + 1e3 * penalty

    best_value = grid_best
    best_params = tuple(float(v) for v in points[seed_idx[0]])
    seed_values = []
    for idx in seed_idx:
        result = optimize.minimize(
            negated,
            points[idx],
            method="Nelder-Mead",
            options={
                "maxiter": refine_iters,
                "xatol": 1e-10,
                "fatol": 1e-13,
            },
        )
        refined = -float(result.fun)
        seed_values.append(refined)
        if refined > best_value:
            best_value = refined
            best_params = tuple(float(v) for v in np.clip(result.x, lows, highs))

    return MaximizationReport(
        function=function,
        best_value=best_value,
        best_params=best_params,
        param_names=names,
        grid_best_value=grid_best,
        grid_steps=grid_steps,
        refine_iterations=refine_iters,
        evaluations=evaluations + nfev,
        seed_values=tuple(seed_values),
    )
