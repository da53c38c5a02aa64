"""Decoherence-modified probabilities, asymmetries and the zeta fit.

The decoherence hypothesis multiplies the interference term of the joint
detection probabilities by (1 - zeta): zeta = 0 is quantum mechanics,
zeta = 1 is a spontaneously factorized pair.  The modification depends on
the basis the factorization is written in -- K_S/K_L products (MASS) and
K0/K0bar products (STRANGENESS) give genuinely different predictions -- so
the basis is always an explicit argument.

CP violation is neglected throughout this module (it is three orders of
magnitude below the experimental accuracy of the asymmetry data).

The fit compares measured strangeness asymmetries against the modified
model by chi-square minimization; for the MASS basis the asymmetry is
exactly linear in (1 - zeta), which lets published detector-corrected
predictions stand in for the zeta = 0 model.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize

from .constants import PhysicalConstants
from .evolution import asymmetry_qm, joint_like_probability, joint_unlike_probability

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Basis(enum.Enum):
    """Product basis the spontaneous factorization refers to."""

    MASS = "mass"
    STRANGENESS = "strangeness"


class FitMode(enum.Enum):
    """How the zeta = 0 prediction for each data point is obtained."""

    CORRECTED_THEORY_SCALING = "corrected_theory_scaling"
    RAW_MODEL = "raw_model"


def _check_zeta(zeta: float, allow_extended: bool) -> None:
    if allow_extended:
        return
    if not 0.0 <= zeta <= 1.0:
        raise ValueError(
            f"zeta must lie in [0, 1] (got {zeta}); pass allow_extended=True "
            "to evaluate outside the physical range"
        )


def _single_kaon_amplitudes(
    t: np.ndarray, constants: PhysicalConstants
) -> tuple[np.ndarray, np.ndarray]:
    """(<K0|K0(t)>, <K0|K0bar(t)>) with CP violation neglected.

    By CP symmetry the same pair serves as (<K0bar|K0bar(t)>, <K0bar|K0(t)>).
    """
    lam_s = -0.5j * constants.gamma_s_hat
    lam_l = constants.delta_m_hat - 0.5j * constants.gamma_l_hat
    e_s = np.exp(-1j * lam_s * np.asarray(t))
    e_l = np.exp(-1j * lam_l * np.asarray(t))
    return 0.5 * (e_s + e_l), 0.5 * (e_l - e_s)


def modified_like_probability(
    basis: Basis,
    t_l: float,
    t_r: float,
    zeta: float,
    constants: PhysicalConstants,
    allow_extended: bool = False,
) -> float:
    """P(K0 at t_l, K0 at t_r) with the interference term scaled by (1-zeta).

    MASS basis: the damped-cosine closed form with the cosine term scaled.
    STRANGENESS basis: the interference of the single-kaon transition
    amplitudes is scaled instead; the two choices agree only at zeta = 0.
    """
    if t_l < 0 or t_r < 0:
        raise ValueError("detection times must be nonnegative")
    _check_zeta(zeta, allow_extended)
    if basis is Basis.MASS:
        gs, gl, g = constants.gamma_s_hat, constants.gamma_l_hat, constants.gamma_hat
        dm = constants.delta_m_hat
        value = (
            math.exp(-gs * t_l - gl * t_r)
            + math.exp(-gl * t_l - gs * t_r)
            - 2.0
            * (1.0 - zeta)
            * math.cos(dm * (t_l - t_r))
            * math.exp(-g * (t_l + t_r))
        ) / 8.0
        return value
    g_pl, g_ml = _single_kaon_amplitudes(np.asarray(t_l), constants)
    g_pr, g_mr = _single_kaon_amplitudes(np.asarray(t_r), constants)
    interference = (g_pl * g_mr).conjugate() * (g_ml * g_pr)
    value = 0.5 * (
        abs(g_pl) ** 2 * abs(g_mr) ** 2
        + abs(g_ml) ** 2 * abs(g_pr) ** 2
        - 2.0 * (1.0 - zeta) * interference.real
    )
    return float(value)


def modified_unlike_probability(
    basis: Basis,
    t_l: float,
    t_r: float,
    zeta: float,
    constants: PhysicalConstants,
    allow_extended: bool = False,
) -> float:
    """P(K0 at t_l, K0bar at t_r) under the same modification."""
    if t_l < 0 or t_r < 0:
        raise ValueError("detection times must be nonnegative")
    _check_zeta(zeta, allow_extended)
    if basis is Basis.MASS:
        gs, gl, g = constants.gamma_s_hat, constants.gamma_l_hat, constants.gamma_hat
        dm = constants.delta_m_hat
        return (
            math.exp(-gs * t_l - gl * t_r)
            + math.exp(-gl * t_l - gs * t_r)
            + 2.0
            * (1.0 - zeta)
            * math.cos(dm * (t_l - t_r))
            * math.exp(-g * (t_l + t_r))
        ) / 8.0
    g_pl, g_ml = _single_kaon_amplitudes(np.asarray(t_l), constants)
    g_pr, g_mr = _single_kaon_amplitudes(np.asarray(t_r), constants)
    interference = (g_pl * g_pr).conjugate() * (g_ml * g_mr)
    value = 0.5 * (
        abs(g_pl) ** 2 * abs(g_pr) ** 2
        + abs(g_ml) ** 2 * abs(g_mr) ** 2
        - 2.0 * (1.0 - zeta) * interference.real
    )
    return float(value)


def modified_asymmetry(
    basis: Basis,
    t_l: float,
    t_r: float,
    zeta: float,
    constants: PhysicalConstants,
    allow_extended: bool = False,
) -> float:
    """(unlike - like)/(unlike + like) under the zeta modification.

    MASS basis: exactly (1 - zeta) times the unmodified asymmetry of the
    time difference.  STRANGENESS basis: a ratio mixing the time difference
    and the time sum, nonlinear in zeta,

        [cos(dm*dt) - (z/2){cos(dm*dt) - cos(dm*ts)}] /
        [cosh(dg*dt/2) - (z/2){cosh(dg*dt/2) - cosh(dg*ts/2)}].
    """
    if t_l < 0 or t_r < 0:
        raise ValueError("detection times must be nonnegative")
    _check_zeta(zeta, allow_extended)
    if basis is Basis.MASS:
        return (1.0 - zeta) * float(asymmetry_qm(t_l - t_r, constants))
    dm = constants.delta_m_hat
    dg = constants.delta_gamma_hat
    dt = t_l - t_r
    ts = t_l + t_r
    num = math.cos(dm * dt) - 0.5 * zeta * (math.cos(dm * dt) - math.cos(dm * ts))
    den = math.cosh(0.5 * dg * dt) - 0.5 * zeta * (
        math.cosh(0.5 * dg * dt) - math.cosh(0.5 * dg * ts)
    )
    return num / den


# -- data points and fitting ---------------------------------------------------

@dataclass(frozen=True)
class AsymmetryPoint:
    """One measured asymmetry: configuration label, times, value, error."""

    label: str
    t_l: float
    t_r: float
    measured: float
    sigma: float
    corrected_theory: float | None = None

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"{self.label}: sigma must be positive, got {self.sigma}")
        if not -1.5 <= self.measured <= 1.5:
            raise ValueError(
                f"{self.label}: measured asymmetry {self.measured} outside [-1.5, 1.5]"
            )
        if self.t_l < 0 or self.t_r < 0:
            raise ValueError(f"{self.label}: times must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    """Best-fit decoherence parameter with an asymmetric 1-sigma interval."""

    zeta_hat: float
    sigma_minus: float
    sigma_plus: float
    chi2_min: float
    ndf: int
    basis: Basis
    mode: FitMode

    def __post_init__(self) -> None:
        if self.sigma_minus <= 0 or self.sigma_plus <= 0:
            raise ValueError("interval half-widths must be positive")
        if self.chi2_min < 0:
            raise ValueError("chi2_min cannot be negative")

    def as_dict(self) -> dict:
        return {
            "zeta_hat": self.zeta_hat,
            "sigma_minus": self.sigma_minus,
            "sigma_plus": self.sigma_plus,
            "chi2_min": self.chi2_min,
            "ndf": self.ndf,
            "basis": self.basis.value,
            "mode": self.mode.value,
        }


CSV_COLUMNS = ("label", "t_l", "t_r", "measured", "sigma", "corrected_theory")


def read_asymmetry_csv(path: str | Path) -> list[AsymmetryPoint]:
    """Load asymmetry points from a comma-separated file.

    Header row with the columns label, t_l, t_r, measured, sigma,
    corrected_theory is required (times in tau_S units, decimal points);
    ``corrected_theory`` may be left empty.  Lines starting with ``#`` are
    ignored.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        rows = [line for line in handle if not line.lstrip().startswith("#")]
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
        raise ValueError(
            f"{path}: expected header {','.join(CSV_COLUMNS)}, got "
            f"{','.join(reader.fieldnames or ())}"
        )
    points = []
    for lineno, row in enumerate(reader, start=2):
        try:
            corrected = row["corrected_theory"].strip()
            points.append(
                AsymmetryPoint(
                    label=row["label"].strip(),
                    t_l=float(row["t_l"]),
                    t_r=float(row["t_r"]),
                    measured=float(row["measured"]),
                    sigma=float(row["sigma"]),
                    corrected_theory=float(corrected) if corrected else None,
                )
            )
        except (TypeError, ValueError, AttributeError, KeyError) as exc:
            raise ValueError(f"{path}:{lineno}: bad data row: {exc}") from exc
    if not points:
        raise ValueError(f"{path}: no data rows")
    return points


def _golden_section_minimum(
    objective, lo: float, hi: float, tol: float = 1e-10
) -> float:
    """Deterministic golden-section minimization on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)
    return 0.5 * (a + b)


def _linear_scaling_fit(points: list[AsymmetryPoint]) -> tuple[float, float]:
    """Closed-form weighted least squares for model = theory * (1 - zeta)."""
    num = sum(p.corrected_theory * p.measured / p.sigma**2 for p in points)
    den = sum(p.corrected_theory**2 / p.sigma**2 for p in points)
    u_hat = num / den
    return 1.0 - u_hat, 1.0 / math.sqrt(den)


def fit_zeta(
    points: list[AsymmetryPoint],
    basis: Basis,
    mode: FitMode,
    constants: PhysicalConstants,
    zeta_range: tuple[float, float] = (0.0, 1.5),
) -> FitResult:
    """Chi-square fit of the decoherence parameter to asymmetry data.

    ``CORRECTED_THEORY_SCALING`` (MASS basis only) models each point as
    corrected_theory * (1 - zeta), so detector corrections cancel out of the
    fit; every point must then carry a corrected_theory value.  ``RAW_MODEL``
    evaluates the modified asymmetry at each point's times -- for the
    STRANGENESS basis this is a qualitative comparison, since the proper
    times are configuration inputs rather than measured quantities.

    The minimum is located by golden-section search over ``zeta_range``
    (cross-checked against the closed form in the linear mode) and the
    asymmetric interval comes from chi2 = chi2_min + 1 on each side.
    """
    if not points:
        raise ValueError("need at least one data point")
    if mode is FitMode.CORRECTED_THEORY_SCALING:
        if basis is not Basis.MASS:
            raise ValueError(
                "corrected-theory scaling relies on the linearity of the MASS-basis "
                "asymmetry; use RAW_MODEL for the strangeness basis"
            )
        if any(p.corrected_theory is None for p in points):
            raise ValueError("every point needs corrected_theory in scaling mode")

        def model(zeta: float) -> np.ndarray:
            return np.array([p.corrected_theory * (1.0 - zeta) for p in points])

    else:

        def model(zeta: float) -> np.ndarray:
            return np.array(
                [
                    modified_asymmetry(
                        basis, p.t_l, p.t_r, zeta, constants, allow_extended=True
                    )
                    for p in points
                ]
            )

    measured = np.array([p.measured for p in points])
    sigma = np.array([p.sigma for p in points])

    def chi2(zeta: float) -> float:
        residuals = (measured - model(zeta)) / sigma
        return float(residuals @ residuals)

    lo, hi = zeta_range
    zeta_hat = _golden_section_minimum(chi2, lo, hi)
    chi2_min = chi2(zeta_hat)

    target = chi2_min + 1.0

    def crossing(direction: int) -> float:
        """Distance from zeta_hat to the chi2_min + 1 crossing on one side."""
        step = 0.05
        edge = zeta_hat + direction * step
        while chi2(edge) < target:
            step *= 2.0
            edge = zeta_hat + direction * step
            if step > 64.0:
                raise ValueError("chi-square profile never reaches chi2_min + 1")
        root = optimize.brentq(
            lambda z: chi2(z) - target,
            min(zeta_hat, edge),
            max(zeta_hat, edge),
            xtol=1e-10,
        )
        return abs(root - zeta_hat)

    sigma_plus = crossing(+1)
    sigma_minus = crossing(-1)

    return FitResult(
        zeta_hat=float(zeta_hat),
        sigma_minus=float(sigma_minus),
        sigma_plus=float(sigma_plus),
        chi2_min=chi2_min,
        ndf=len(points) - 1,
        basis=basis,
        mode=mode,
    )


def bundled_cplear_path() -> Path:
    """Path of the packaged CPLEAR asymmetry data file."""
    return Path(__file__).parent / "data" / "cplear.csv"


def bundled_cplear_points() -> list[AsymmetryPoint]:
    """The two published CPLEAR asymmetry measurements."""
    return read_asymmetry_csv(bundled_cplear_path())
