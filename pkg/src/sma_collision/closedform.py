"""Homogeneous (space-independent) collision: exact solution and a brute-force oracle.

When the temperature and the fractions do not depend on position and the
dissipated work ``diss`` is known, the problem reduces to

    c M2 (chi+ - chi-) + xi = (0, l_a/T0 (T+ - T0)),   xi in N_K(chi+),
    C (T+ - T-) + l_a (beta3+ - beta3-) = diss.

For the symmetric martensite state ``beta1- = beta2-`` and the uniform
dissipation coupling, ``beta1+ = beta2+`` and, while all three phases
coexist,

    beta3+ = beta3- + 2 l_a / (3 c T0) (T+ - T0),
    (C + 2 l_a^2 / (3 c T0)) T+ = diss + C T- + 2 l_a^2 / (3 c).

The mixture exists for ``lower < diss + C (T- - T0) < upper`` with
``width = (3 c C T0 + 2 l_a^2) / (2 l_a)``, ``lower = -beta3- width`` and
``upper = (1 - beta3-) width``; below it only the temperature rises, above
it the solid becomes fully austenitic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .params import MaterialParams, PhaseVariant, check_beta


class Regime(enum.Enum):
    NO_TRANSFORMATION = "NoTransformation"
    MIXTURE = "Mixture"
    FULL_AUSTENITE = "FullAustenite"

    @classmethod
    def of(cls, beta3: float) -> "Regime":
        if beta3 <= 0.0:
            return cls.NO_TRANSFORMATION
        if beta3 >= 1.0:
            return cls.FULL_AUSTENITE
        return cls.MIXTURE


@dataclass(frozen=True)
class ClosedFormInput:
    """Homogeneous data: ``c``, ``C``, ``l_a``, ``T0`` in SI units, ``diss`` in J/m^3."""

    T_minus: float
    beta_minus: tuple
    diss_work: float
    c: float
    C: float
    l_a: float
    T0: float

    def __post_init__(self):
        object.__setattr__(self, "beta_minus", tuple(float(b) for b in self.beta_minus))
        if len(self.beta_minus) != 3:
            raise ValueError("beta_minus needs three fractions")
        check_beta(np.array(self.beta_minus))
        if not self.T_minus > 0.0:
            raise ValueError("T_minus must be positive")
        if not self.diss_work >= 0.0:
            raise ValueError("dissipated work must be nonnegative")
        if not (self.c >= 0.0 and self.C > 0.0 and self.l_a > 0.0 and self.T0 > 0.0):
            raise ValueError("need c >= 0 and C, l_a, T0 > 0")

    @classmethod
    def from_params(cls, params: MaterialParams, T_minus, beta_minus, diss_work):
        return cls(T_minus, tuple(beta_minus), diss_work, params.c, params.C, params.l_a, params.T0)

    def energy_T(self, beta3_plus: float) -> float:
        """Temperature from the energy balance for a given ``beta3+``."""
        return self.T_minus + (self.diss_work - self.l_a * (beta3_plus - self.beta_minus[2])) / self.C


@dataclass(frozen=True)
class ClosedFormSolution:
    regime: Regime
    T_plus: float
    beta_plus: tuple


def mixture_width(c, C, l_a, T0) -> float:
    """``(3 c C T0 + 2 l_a^2) / (2 l_a)``: the range of ``diss + C(T- - T0)`` spanning the mixture."""
    return (3.0 * c * C * T0 + 2.0 * l_a * l_a) / (2.0 * l_a)


def regime_thresholds(inp: ClosedFormInput) -> tuple[float, float]:
    """Values of ``diss`` where the mixture starts and where it ends."""
    w = mixture_width(inp.c, inp.C, inp.l_a, inp.T0)
    b3 = inp.beta_minus[2]
    shift = inp.C * (inp.T0 - inp.T_minus)
    return shift - b3 * w, shift + (1.0 - b3) * w


def solve_0d(inp: ClosedFormInput) -> ClosedFormSolution:
    """Exact homogeneous solution for ``beta1- = beta2-`` (uniform dissipation)."""
    b1m, b2m, b3m = inp.beta_minus
    if abs(b1m - b2m) > 1e-12:
        raise ValueError("solve_0d needs beta1- == beta2-; use brute_force_0d for general states")
    c, C, l_a, T0 = inp.c, inp.C, inp.l_a, inp.T0
    w = mixture_width(c, C, l_a, T0)
    drive = inp.diss_work + C * (inp.T_minus - T0)
    if drive <= -b3m * w:
        b3 = 0.0
    elif drive >= (1.0 - b3m) * w:
        b3 = 1.0
    else:
        b3 = None
    if b3 is None:
        if c == 0.0:
            # no dissipation: the mixture sits at the transformation temperature
            T = T0
            b3 = b3m + drive / l_a
        else:
            k = 2.0 * l_a * l_a / (3.0 * c)
            T = (inp.diss_work + C * inp.T_minus + k) / (C + k / T0)
            b3 = b3m + 2.0 * l_a / (3.0 * c * T0) * (T - T0)
        regime = Regime.MIXTURE
    else:
        T = inp.energy_T(b3)
        regime = Regime.of(b3)
    if regime is Regime.NO_TRANSFORMATION and b3m == 0.0:
        beta = (b1m, b2m, 0.0)
    else:
        half = 0.5 * (1.0 - b3)
        beta = (half, half, b3)
    return ClosedFormSolution(regime, float(T), tuple(float(b) for b in beta))


def _kkt_gamma(inp: ClosedFormInput, M2) -> float:
    lam = float(np.linalg.eigvalsh(M2)[-1])
    return inp.c * lam + inp.l_a * inp.l_a / (inp.T0 * inp.C)


def kkt_residual(inp: ClosedFormInput, beta2: float, beta3: float, variant=PhaseVariant.UNIFORM) -> float:
    """Natural residual of the homogeneous inequality at ``(beta2, beta3)``."""
    M2 = PhaseVariant.parse(variant).coupling
    gamma = _kkt_gamma(inp, M2)
    chi = np.array([beta2, beta3])
    chim = np.array(inp.beta_minus[1:])
    T = inp.energy_T(beta3)
    g = inp.c * M2 @ (chi - chim) - np.array([0.0, inp.l_a / inp.T0 * (T - inp.T0)])
    proj, _ = kernels.project_triangle((chi - g / gamma).reshape(1, 2))
    return float(np.linalg.norm(chi - proj[0]))


# lattice denominators of the search: exhaustive at the first, windows after
_LEVELS = (1_000, 10_000, 100_000, 1_000_000, 10_000_000)
_WINDOW = 30


def brute_force_0d(inp: ClosedFormInput, variant=PhaseVariant.UNIFORM) -> ClosedFormSolution:
    """Exhaustive lattice search over K for the smallest KKT residual.

    All lattice points of spacing 1e-3 in K are scanned, then windows of
    +-30 cells around the incumbent are rescanned at ten times finer spacing
    down to 1e-7.  Lattice points are ``(i/n, j/n)`` so the vertices and
    edges of K are hit exactly.
    """
    M2 = PhaseVariant.parse(variant).coupling
    gamma = _kkt_gamma(inp, M2)
    args = (M2.ravel(), inp.c, inp.beta_minus[1], inp.beta_minus[2], inp.T_minus,
            inp.diss_work, inp.l_a, inp.C, inp.T0, gamma)
    n = _LEVELS[0]
    i, j, _ = kernels.kkt_grid_min(0, n, 0, n, n, *args)
    for n_next in _LEVELS[1:]:
        r = n_next // n
        i, j, _ = kernels.kkt_grid_min(
            (i - _WINDOW) * r, (i + _WINDOW) * r, (j - _WINDOW) * r, (j + _WINDOW) * r, n_next, *args
        )
        n = n_next
    b2 = i / n
    b3 = j / n
    T = inp.energy_T(b3)
    return ClosedFormSolution(Regime.of(b3), float(T), (1.0 - b2 - b3, b2, b3))


@dataclass(frozen=True)
class SweepRow:
    diss: float
    T_plus: float
    beta3: float
    regime: Regime


def sweep_0d(T_minus, params: MaterialParams, diss_min: float, diss_max: float, samples: int,
             beta_minus=(0.5, 0.5, 0.0)) -> list[SweepRow]:
    """``solve_0d`` on ``samples`` equispaced values of the dissipated work."""
    if diss_max < diss_min or diss_min < 0.0 or samples < 1:
        raise ValueError("need 0 <= diss_min <= diss_max and samples >= 1")
    if diss_max == diss_min:
        values = np.array([diss_min])
    else:
        values = np.linspace(diss_min, diss_max, samples)
    rows = []
    for d in values:
        sol = solve_0d(ClosedFormInput.from_params(params, T_minus, beta_minus, float(d)))
        rows.append(SweepRow(float(d), sol.T_plus, sol.beta_plus[2], sol.regime))
    return rows
