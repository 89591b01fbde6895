"""Material constants and the state before collision (SI units throughout)."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class PhaseVariant(enum.Enum):
    """Dissipation structure of the phase equation.

    ``UNIFORM`` is obtained when all three phases share one dissipation
    constant; after eliminating the first martensite, the operator acting on
    ``(chi2, chi3)`` is ``[[2, 1], [1, 2]]``.  ``REDUCED`` drops the first
    phase from the dissipation and interfacial energy, leaving the identity.
    """

    UNIFORM = "UniformDissipation"
    REDUCED = "ReducedDissipation"

    @property
    def coupling(self) -> np.ndarray:
        if self is PhaseVariant.UNIFORM:
            return np.array([[2.0, 1.0], [1.0, 2.0]])
        return np.eye(2)

    @classmethod
    def parse(cls, value) -> "PhaseVariant":
        if isinstance(value, cls):
            return value
        for v in cls:
            if value in (v.value, v.name, v.name.lower()):
                return v
        raise ValueError(f"unknown phase variant {value!r}")


@dataclass(frozen=True)
class MaterialParams:
    """Constitutive constants.

    rho      density [kg/m^3]
    k_v      viscosity of the macroscopic percussion law [Pa s]
    c        dissipation of phase jumps [J/m^3]
    upsilon  gradient dissipation of phase jumps [J/m]
    kappa    interfacial energy coefficient [J/m]
    lam      thermal conductivity, time-integrated [J/(K m)]
    C        volumetric heat capacity [J/(m^3 K)]
    l_a      latent heat [J/m^3]
    T0       phase change temperature [K]
    """

    rho: float
    k_v: float
    c: float
    upsilon: float
    kappa: float
    lam: float
    C: float
    l_a: float
    T0: float
    variant: PhaseVariant = PhaseVariant.UNIFORM

    def __post_init__(self):
        for name in ("rho", "k_v", "C", "l_a", "T0"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("c", "upsilon", "kappa", "lam"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)!r}")
        object.__setattr__(self, "variant", PhaseVariant.parse(self.variant))

    @classmethod
    def niti(cls, **overrides) -> "MaterialParams":
        """Ni-Ti constants of the collision experiment."""
        l_a = 80e6
        base = dict(
            rho=6500.0,
            k_v=1e6,
            c=0.05 * l_a,
            upsilon=0.5,
            kappa=0.5,
            lam=18.0,
            C=5.4e6,
            l_a=l_a,
            T0=332.75,
        )
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True)
class PreState:
    """Fields before collision.

    ``T_minus`` and ``beta_minus`` may be given as a scalar / triple
    (uniform) or per node; :meth:`on` broadcasts them to a mesh.
    """

    T_minus: object
    beta_minus: object
    U_minus: object = None

    def on(self, n_nodes: int):
        T = np.broadcast_to(np.asarray(self.T_minus, dtype=float), (n_nodes,)).copy()
        beta = np.broadcast_to(np.asarray(self.beta_minus, dtype=float), (n_nodes, 3)).copy()
        U = (
            np.zeros((n_nodes, 2))
            if self.U_minus is None
            else np.broadcast_to(np.asarray(self.U_minus, dtype=float), (n_nodes, 2)).copy()
        )
        return T, beta, U


def check_beta(beta: np.ndarray, tol: float = 1e-12) -> None:
    """Raise ``ValueError`` unless every row lies on the unit simplex."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < -tol) or np.any(beta > 1.0 + tol):
        raise ValueError("volume fractions must lie in [0, 1]")
    if np.any(np.abs(beta.sum(axis=-1) - 1.0) > tol):
        raise ValueError("volume fractions must sum to 1")
