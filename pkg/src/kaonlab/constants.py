"""Experimental constants of the neutral-kaon system and run configuration.

Every time argument elsewhere in this library is a dimensionless multiple of
the K_S lifetime tau_S.  ``PhysicalConstants`` converts the decay and
oscillation rates into that unit once (the ``*_hat`` properties), so no other
module ever has to juggle 1e-10-scale floats.

All values are injected explicitly; there is no mutable global configuration.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path

# Experimental inputs (overridable through config files or keyword overrides).
TAU_S_SECONDS = 0.8935e-10
TAU_L_SECONDS = 5.17e-8
DELTA_M_PER_SECOND = 0.5300e10
EPSILON_ABS = 2.23e-3
EPSILON_PHASE_DEG = 45.0

DEFAULT_EPSILON = cmath.rect(EPSILON_ABS, math.radians(EPSILON_PHASE_DEG))

#: Environment variable consulted by the CLI when --config is not given.
CONFIG_ENV_VAR = "KAONLAB_CONFIG"


@dataclass(frozen=True)
class PhysicalConstants:
    """Lifetimes, K_L-K_S mass splitting and the CP-violation parameter.

    ``gamma_s_hat`` / ``gamma_l_hat`` are the decay rates in units of
    1/tau_S.  They normally derive from the lifetimes but can be overridden
    (``with_gamma_l_zero``, ``without_decays``) without changing the time
    unit, which stays tied to the physical tau_S.

    Immutable; safe to share between threads.
    """

    tau_s: float = TAU_S_SECONDS
    tau_l: float = TAU_L_SECONDS
    delta_m: float = DELTA_M_PER_SECOND
    epsilon: complex = DEFAULT_EPSILON
    gamma_s_hat: float | None = None
    gamma_l_hat: float | None = None

    def __post_init__(self) -> None:
        if not self.tau_s > 0:
            raise ValueError(f"tau_s must be positive, got {self.tau_s}")
        if not self.tau_l > 0:
            raise ValueError(f"tau_l must be positive, got {self.tau_l}")
        if not self.tau_l > self.tau_s:
            raise ValueError(
                f"tau_l must exceed tau_s, got tau_l={self.tau_l}, tau_s={self.tau_s}"
            )
        if abs(self.epsilon) >= 0.1:
            raise ValueError(
                f"|epsilon| must stay below 0.1, got {abs(self.epsilon)}"
            )
        if self.gamma_s_hat is None:
            object.__setattr__(self, "gamma_s_hat", 1.0)
        if self.gamma_l_hat is None:
            object.__setattr__(self, "gamma_l_hat", self.tau_s / self.tau_l)
        if self.gamma_s_hat < 0 or self.gamma_l_hat < 0:
            raise ValueError("decay rates cannot be negative")

    # -- rates in units of 1/tau_S ------------------------------------------

    @property
    def delta_m_hat(self) -> float:
        """Strangeness-oscillation frequency in radians per tau_S."""
        return self.delta_m * self.tau_s

    @property
    def gamma_hat(self) -> float:
        """Mean decay rate (gamma_S + gamma_L)/2 per tau_S."""
        return 0.5 * (self.gamma_s_hat + self.gamma_l_hat)

    @property
    def delta_gamma_hat(self) -> float:
        """gamma_L - gamma_S per tau_S (negative: K_S decays faster)."""
        return self.gamma_l_hat - self.gamma_s_hat

    # -- rates in 1/s, for reporting ----------------------------------------

    @property
    def gamma_s(self) -> float:
        return self.gamma_s_hat / self.tau_s

    @property
    def gamma_l(self) -> float:
        return self.gamma_l_hat / self.tau_s

    @property
    def gamma(self) -> float:
        return 0.5 * (self.gamma_s + self.gamma_l)

    @property
    def delta_gamma(self) -> float:
        return self.gamma_l - self.gamma_s

    @property
    def x(self) -> float:
        """Oscillation-to-decay ratio 2*delta_m/gamma_S (~0.95 for defaults)."""
        if self.gamma_s_hat == 0.0:
            return math.inf
        return 2.0 * self.delta_m * self.tau_s / self.gamma_s_hat

    # -- overrides ------------------------------------------------------------

    def with_epsilon(self, magnitude: float, phase_deg: float) -> "PhysicalConstants":
        return PhysicalConstants(
            tau_s=self.tau_s,
            tau_l=self.tau_l,
            delta_m=self.delta_m,
            epsilon=cmath.rect(magnitude, math.radians(phase_deg)),
            gamma_s_hat=self.gamma_s_hat,
            gamma_l_hat=self.gamma_l_hat,
        )

    def with_gamma_l_zero(self) -> "PhysicalConstants":
        """Copy with the long-lived decay rate switched off (gamma_L = 0)."""
        return PhysicalConstants(
            tau_s=self.tau_s,
            tau_l=self.tau_l,
            delta_m=self.delta_m,
            epsilon=self.epsilon,
            gamma_s_hat=self.gamma_s_hat,
            gamma_l_hat=0.0,
        )

    def without_decays(self) -> "PhysicalConstants":
        """Copy with both decay rates switched off (oscillation only)."""
        return PhysicalConstants(
            tau_s=self.tau_s,
            tau_l=self.tau_l,
            delta_m=self.delta_m,
            epsilon=self.epsilon,
            gamma_s_hat=0.0,
            gamma_l_hat=0.0,
        )


def default_constants() -> PhysicalConstants:
    """Constants built from the experimental default values."""
    return PhysicalConstants()


_CONFIG_KEYS = (
    "tau_s",
    "tau_l",
    "delta_m",
    "epsilon_abs",
    "epsilon_phase_deg",
    "gamma_l_zero",
    "no_decays",
)

_TRUE_STRINGS = {"1", "true", "yes", "on"}
_FALSE_STRINGS = {"0", "false", "no", "off"}


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in _TRUE_STRINGS:
        return True
    if lowered in _FALSE_STRINGS:
        return False
    raise ValueError(f"config key {key!r}: expected a boolean, got {raw!r}")


def load_config(path: str | Path) -> PhysicalConstants:
    """Read a ``key = value`` config file into PhysicalConstants.

    Recognised keys: tau_s, tau_l, delta_m [SI units], epsilon_abs,
    epsilon_phase_deg, gamma_l_zero, no_decays.  Lines starting with ``#``
    and blank lines are ignored.  Unknown keys are an error.
    """
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = raw.strip()

    tau_s = float(values.get("tau_s", TAU_S_SECONDS))
    tau_l = float(values.get("tau_l", TAU_L_SECONDS))
    delta_m = float(values.get("delta_m", DELTA_M_PER_SECOND))
    eps_abs = float(values.get("epsilon_abs", EPSILON_ABS))
    eps_phase = float(values.get("epsilon_phase_deg", EPSILON_PHASE_DEG))

    constants = PhysicalConstants(
        tau_s=tau_s,
        tau_l=tau_l,
        delta_m=delta_m,
        epsilon=cmath.rect(eps_abs, math.radians(eps_phase)),
    )
    if values.get("no_decays") and _parse_bool("no_decays", values["no_decays"]):
        constants = constants.without_decays()
    elif values.get("gamma_l_zero") and _parse_bool("gamma_l_zero", values["gamma_l_zero"]):
        constants = constants.with_gamma_l_zero()
    return constants
