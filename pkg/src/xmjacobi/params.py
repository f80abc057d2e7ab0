"""Model parameters of the X_m-Jacobi family and the conventions derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class FamilyParams:
    """Parameters ``(g, h, m)`` of the deformed generalized Poschl-Teller potential.

    ``lambda = (g, h)`` and the shape-invariance shift is ``delta = (1, -1)``.
    Every other quantity (``A``, ``B``, Jacobi ``alpha``/``beta``, ``nu_B``)
    is derived on access so there is a single source of truth.
    """

    g: float
    h: float
    m: int = 0

    def __post_init__(self):
        g, h, m = self.g, self.h, self.m
        if isinstance(m, bool) or not isinstance(m, int):
            if isinstance(m, float) and m.is_integer():
                object.__setattr__(self, "m", int(m))
                m = int(m)
            else:
                raise ParameterError(f"m must be a non-negative integer, got {m!r}")
        if not (math.isfinite(g) and math.isfinite(h)):
            raise ParameterError("g and h must be finite")
        if m < 0:
            raise ParameterError(f"m must be a non-negative integer, got {m!r}")
        if not g > 0:
            raise ParameterError(f"g must be positive, got {g!r}")
        if not h > g:
            raise ParameterError(f"h must exceed g, got g={g!r}, h={h!r}")
        if not h - g > 2 * m:
            raise ParameterError(f"h-g must exceed 2m (h-g={h - g!r}, 2m={2 * m})")

    # constants of the scattering problem
    @property
    def A(self) -> float:
        return (self.h - self.g - 2 * self.m) / 2

    @property
    def B(self) -> float:
        return (self.g + self.h) / 2

    # Jacobi parameters of the X_m polynomials
    @property
    def alpha(self) -> float:
        return self.g + self.m - 0.5

    @property
    def beta(self) -> float:
        return -self.h + self.m - 0.5

    @property
    def nu_B(self) -> float:
        return (self.h - self.g) / 2

    @property
    def nu_max(self) -> int:
        """Largest index allowed by ``nu <= nu_B - m``."""
        return int(math.floor(self.nu_B - self.m + 1e-12))

    @property
    def indicial_exponent(self) -> float:
        """Power ``s`` of the regular solution ``psi ~ r**s`` at the origin."""
        return self.g + self.m

    def bound_indices(self) -> range:
        """Indices of normalizable bound states (``nu < A``).

        When ``A`` is an integer the index ``nu = A`` sits exactly at the
        continuum threshold and is excluded here.
        """
        top = self.nu_max
        if abs(self.A - top) < 1e-12:
            top -= 1
        return range(top + 1)

    def shifted(self, steps: int = 1) -> "FamilyParams":
        """Return ``lambda + steps*delta`` at the same ``m`` (validated)."""
        return FamilyParams(self.g + steps, self.h - steps, self.m)

    def with_m(self, m: int) -> "FamilyParams":
        return FamilyParams(self.g, self.h, m)

    def as_dict(self) -> dict:
        return {"g": self.g, "h": self.h, "m": self.m}
