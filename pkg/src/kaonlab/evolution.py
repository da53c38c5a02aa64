"""Unitary time evolution of single kaons and of the entangled pair.

The non-Hermitian two-level Hamiltonian gives exponential evolution of the
mass eigenstates, exp(-i*lambda*t) with lambda = m - (i/2)*gamma.  That alone
is not unitary: the lost norm goes into decay-product components living in a
sector orthogonal to the kaon space.  We never construct that sector
explicitly; unitarity fixes every overlap we need,

    <Omega_a(t)|Omega_b(t)> = <K_a|K_b> * (1 - exp(i(conj(lambda_a)-lambda_b)t)),

and the full evolved basis vectors V_a(t) = exp(-i lambda_a t)|K_a> + |Omega_a(t)>
then satisfy <V_a(t)|V_b(t)> = <K_a|K_b> identically.  Joint yes/no detection
probabilities for the antisymmetric pair state reduce to 2x2 contractions
over {S, L} coefficients, which is what this module implements (vectorized
over times).

Only the mass difference is physical here, so m_S = 0 and m_L = delta_m.
Times are multiples of tau_S throughout.  All functions are pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants
from .states import QuasiSpinState, inner_product, named_state

#: Probabilities are clipped to zero above this floor; anything more negative
#: signals a formula bug rather than float noise and raises.
NEGATIVE_PROBABILITY_FLOOR = -1e-12

_SUM_TOL = 1e-9


class EigenLabel(enum.Enum):
    """Mass eigenstate label: short-lived (S) or long-lived (L)."""

    S = "S"
    L = "L"


@dataclass(frozen=True)
class ComplexEigenvalue:
    """Eigenvalue lambda = m - (i/2)*gamma of the effective Hamiltonian."""

    mass: float
    width: float

    def __post_init__(self) -> None:
        if self.width < 0:
            raise ValueError(f"width must be nonnegative, got {self.width}")

    @property
    def value(self) -> complex:
        return self.mass - 0.5j * self.width


def eigenvalue(label: EigenLabel, constants: PhysicalConstants) -> ComplexEigenvalue:
    """Eigenvalue for the requested eigenstate, in units of 1/tau_S."""
    if label is EigenLabel.S:
        return ComplexEigenvalue(0.0, constants.gamma_s_hat)
    return ComplexEigenvalue(constants.delta_m_hat, constants.gamma_l_hat)


def _lambdas(constants: PhysicalConstants) -> np.ndarray:
    return np.array(
        [
            eigenvalue(EigenLabel.S, constants).value,
            eigenvalue(EigenLabel.L, constants).value,
        ]
    )


def survival_amplitude(
    label: EigenLabel, t: float, constants: PhysicalConstants
) -> complex:
    """Amplitude exp(-i*lambda*t) for the eigenstate surviving to time t."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    lam = eigenvalue(label, constants).value
    return complex(np.exp(-1j * lam * t))


def kaon_gram(constants: PhysicalConstants) -> np.ndarray:
    """Gram matrix G[a,b] = <K_a|K_b> over the (S, L) eigenstates."""
    ks = named_state("KS", constants)
    kl = named_state("KL", constants)
    g_sl = inner_product(ks, kl)
    return np.array([[1.0, g_sl], [g_sl.conjugate(), 1.0]])


def omega_overlap(
    a: EigenLabel, b: EigenLabel, t: float, constants: PhysicalConstants
) -> complex:
    """Overlap <Omega_a(t)|Omega_b(t)> of the decay-product components.

    This is the unique value compatible with unitary evolution given that
    the decay products are orthogonal to the kaon space.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    lam_a = eigenvalue(a, constants).value
    lam_b = eigenvalue(b, constants).value
    gram = kaon_gram(constants)
    idx = {EigenLabel.S: 0, EigenLabel.L: 1}
    g_ab = gram[idx[a], idx[b]]
    return complex(g_ab * (1.0 - np.exp(1j * (lam_a.conjugate() - lam_b) * t)))


def singlet_coefficients(constants: PhysicalConstants) -> np.ndarray:
    """Antisymmetric pair state expanded over K_S (x) K_L products.

    The strangeness-basis singlet (|K0>|K0bar> - |K0bar>|K0>)/sqrt(2) equals
    c*(K_S (x) K_L - K_L (x) K_S) with c = N^2 / (2*sqrt(2)*p*q); the
    returned matrix C[a,b] holds those coefficients, left index first.  The
    expansion is exact and keeps the state normalized for any epsilon.
    """
    p = 1.0 + constants.epsilon
    q = 1.0 - constants.epsilon
    n_sq = abs(p) ** 2 + abs(q) ** 2
    c = n_sq / (2.0 * math.sqrt(2.0) * p * q)
    return np.array([[0.0, c], [-c, 0.0]])


def _projection_amplitudes(
    state: QuasiSpinState, t: np.ndarray, constants: PhysicalConstants
) -> np.ndarray:
    """pi_a(t) = exp(-i*lambda_a*t) <state|K_a>, shape t.shape + (2,)."""
    lam = _lambdas(constants)
    ks = named_state("KS", constants)
    kl = named_state("KL", constants)
    overlaps = np.array([inner_product(state, ks), inner_product(state, kl)])
    return np.exp(-1j * lam * np.asarray(t)[..., None]) * overlaps


def _evolved_gram(t: np.ndarray, constants: PhysicalConstants) -> np.ndarray:
    """<V_a(t)|V_b(t)>: kaon-sector part plus the decay-product overlap.

    Analytically this collapses to the static kaon Gram matrix; evaluating
    both pieces keeps the unitarity bookkeeping explicit (and tested).
    """
    lam = _lambdas(constants)
    gram = kaon_gram(constants)
    phase = np.exp(
        1j
        * (lam.conjugate()[:, None] - lam[None, :])
        * np.asarray(t)[..., None, None]
    )
    omega = gram * (1.0 - phase)
    return gram * phase + omega


def _clip(values: np.ndarray, what: str) -> np.ndarray:
    """Clip float-noise negatives to zero; reject anything worse."""
    values = np.asarray(values)
    worst = values.min() if values.size else 0.0
    if worst < NEGATIVE_PROBABILITY_FLOOR:
        raise ValueError(f"{what} is negative beyond tolerance: {worst}")
    return np.where(values < 0.0, 0.0, values)


def pair_probabilities(
    left: QuasiSpinState,
    t_l: np.ndarray | float,
    right: QuasiSpinState,
    t_r: np.ndarray | float,
    constants: PhysicalConstants,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized joint (Y,Y), (Y,N), (N,Y), (N,N) probabilities.

    The initial state is always the antisymmetric singlet produced in the
    pair creation.  ``left``/``right`` are the detected quasi-spin states;
    t_l and t_r broadcast together.
    """
    t_l = np.asarray(t_l, dtype=float)
    t_r = np.asarray(t_r, dtype=float)
    if (t_l < 0).any() or (t_r < 0).any():
        raise ValueError("detection times must be nonnegative")

    coeff = singlet_coefficients(constants)
    pi_l = _projection_amplitudes(left, t_l, constants)
    pi_r = _projection_amplitudes(right, t_r, constants)
    gram_l = _evolved_gram(t_l, constants)
    gram_r = _evolved_gram(t_r, constants)

    # Both sides projected: plain amplitude.
    amp = np.einsum("...a,ab,...b->...", pi_l, coeff, pi_r)
    p_yy = np.abs(amp) ** 2

    # Left projected, right summed over the full evolved sector.
    v = np.einsum("ab,...a->...b", coeff, pi_l)
    p_y_any = np.einsum("...i,...ij,...j->...", v.conjugate(), gram_r, v).real

    w = np.einsum("ab,...b->...a", coeff, pi_r)
    p_any_y = np.einsum("...i,...ij,...j->...", w.conjugate(), gram_l, w).real

    norm_sq = np.einsum(
        "ab,AB,...Aa,...Bb->...", coeff, coeff.conjugate(), gram_l, gram_r
    ).real

    p_yy = _clip(p_yy, "P(Y,Y)")
    p_yn = _clip(p_y_any - p_yy, "P(Y,N)")
    p_ny = _clip(p_any_y - p_yy, "P(N,Y)")
    p_nn = _clip(norm_sq - p_y_any - p_any_y + p_yy, "P(N,N)")
    return p_yy, p_yn, p_ny, p_nn


@dataclass(frozen=True)
class JointOutcomeTable:
    """The four outcome probabilities of a two-sided quasi-spin detection."""

    p_yy: float
    p_yn: float
    p_ny: float
    p_nn: float
    left: QuasiSpinState
    t_l: float
    right: QuasiSpinState
    t_r: float

    def __post_init__(self) -> None:
        total = self.p_yy + self.p_yn + self.p_ny + self.p_nn
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"outcome table must sum to 1, got {total!r}")
        for name in ("p_yy", "p_yn", "p_ny", "p_nn"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of [0, 1]: {value!r}")

    @property
    def total(self) -> float:
        return self.p_yy + self.p_yn + self.p_ny + self.p_nn


def joint_outcome_table(
    left: QuasiSpinState,
    t_l: float,
    right: QuasiSpinState,
    t_r: float,
    constants: PhysicalConstants,
) -> JointOutcomeTable:
    """Full (Y/N x Y/N) detection table, CP violation included."""
    p_yy, p_yn, p_ny, p_nn = pair_probabilities(left, t_l, right, t_r, constants)
    return JointOutcomeTable(
        float(p_yy), float(p_yn), float(p_ny), float(p_nn),
        left, float(t_l), right, float(t_r),
    )


# -- closed forms (CP violation neglected) -----------------------------------

def joint_like_probability(
    t_l: np.ndarray | float, t_r: np.ndarray | float, constants: PhysicalConstants
) -> np.ndarray | float:
    """P(K0 at t_l, K0 at t_r) = P(K0bar at t_l, K0bar at t_r).

    Single-ordering value; the total like-strangeness probability is twice
    this.  Vanishes at t_l = t_r: equal-time like-strangeness detection is
    the perfect EPR anticorrelation.
    """
    t_l = np.asarray(t_l, dtype=float)
    t_r = np.asarray(t_r, dtype=float)
    if (t_l < 0).any() or (t_r < 0).any():
        raise ValueError("detection times must be nonnegative")
    gs, gl, g = constants.gamma_s_hat, constants.gamma_l_hat, constants.gamma_hat
    dm = constants.delta_m_hat
    dt = t_l - t_r
    value = (
        np.exp(-gs * t_l - gl * t_r)
        + np.exp(-gl * t_l - gs * t_r)
        - 2.0 * np.cos(dm * dt) * np.exp(-g * (t_l + t_r))
    ) / 8.0
    value = _clip(value, "like-strangeness probability")
    return float(value) if value.ndim == 0 else value


def joint_unlike_probability(
    t_l: np.ndarray | float, t_r: np.ndarray | float, constants: PhysicalConstants
) -> np.ndarray | float:
    """P(K0 at t_l, K0bar at t_r): interference term with flipped sign."""
    t_l = np.asarray(t_l, dtype=float)
    t_r = np.asarray(t_r, dtype=float)
    if (t_l < 0).any() or (t_r < 0).any():
        raise ValueError("detection times must be nonnegative")
    gs, gl, g = constants.gamma_s_hat, constants.gamma_l_hat, constants.gamma_hat
    dm = constants.delta_m_hat
    dt = t_l - t_r
    value = (
        np.exp(-gs * t_l - gl * t_r)
        + np.exp(-gl * t_l - gs * t_r)
        + 2.0 * np.cos(dm * dt) * np.exp(-g * (t_l + t_r))
    ) / 8.0
    value = _clip(value, "unlike-strangeness probability")
    return float(value) if value.ndim == 0 else value


def asymmetry_qm(
    delta_t: np.ndarray | float, constants: PhysicalConstants
) -> np.ndarray | float:
    """Strangeness asymmetry cos(dm*dt)/cosh(dgamma*dt/2); even, in [-1, 1]."""
    delta_t = np.asarray(delta_t, dtype=float)
    value = np.cos(constants.delta_m_hat * delta_t) / np.cosh(
        0.5 * constants.delta_gamma_hat * delta_t
    )
    return float(value) if value.ndim == 0 else value
