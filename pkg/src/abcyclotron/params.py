"""Model parameters and periodic drive description."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ModelParams:
    """Physical constants, flux parameters and resonance indices.

    ``drive_frequency`` is normally left as ``None`` so that the drive runs at
    the resonant frequency ``mu * omega_c``; setting it explicitly is the
    off-resonance override.
    """

    hbar: float = 1.0
    charge: float = 1.0
    mass: float = 1.0
    b_field: float = 1.0
    p: float = 2.5
    epsilon: float = 0.4
    mu: int = 1
    s: int = 0
    n_max: int = 120
    drive_frequency: float | None = None

    def __post_init__(self):
        for name in ("hbar", "charge", "mass", "b_field"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.p < 0:
            raise ValueError(f"p must be nonnegative, got {self.p!r}")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError(f"mu must be a positive integer, got {self.mu!r}")
        if int(self.s) != self.s or not 0 <= self.s < self.mu:
            raise ValueError(f"s must satisfy 0 <= s < mu, got s={self.s!r}, mu={self.mu!r}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be a positive integer, got {self.n_max!r}")
        if self.drive_frequency is not None and not self.drive_frequency > 0:
            raise ValueError("drive_frequency must be positive when given")

    @property
    def omega_c(self) -> float:
        return self.charge * self.b_field / self.mass

    @property
    def omega(self) -> float:
        if self.drive_frequency is not None:
            return self.drive_frequency
        return self.mu * self.omega_c

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def energy_quantum(self) -> float:
        """hbar * omega_c, the Landau level spacing."""
        return self.hbar * self.omega_c

    @property
    def resonant(self) -> bool:
        return self.drive_frequency is None or math.isclose(
            self.drive_frequency, self.mu * self.omega_c, rel_tol=1e-12
        )

    @property
    def length_scale(self) -> float:
        """eB / (2 hbar), the inverse squared magnetic length (up to a factor 2)."""
        return self.charge * self.b_field / (2.0 * self.hbar)


@dataclass(frozen=True)
class DriveSpec:
    """A zero-mean 2pi-periodic drive given by finitely many Fourier coefficients.

    ``harmonics`` maps a nonzero integer j to the coefficient
    (2pi)^-1 int_0^{2pi} exp(-i j s) f(s) ds. Only nonnegative or only
    positive keys need to be supplied; missing conjugate partners are filled
    in so that the drive is real.
    """

    harmonics: dict = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        full = {}
        for j, c in self.harmonics.items():
            j = int(j)
            c = complex(c)
            if j == 0:
                if abs(c) > 0:
                    raise ValueError("drive must have zero mean (harmonic 0 must vanish)")
                continue
            full[j] = c
        for j, c in list(full.items()):
            partner = full.get(-j)
            if partner is None:
                full[-j] = c.conjugate()
            elif not cmath.isclose(partner, c.conjugate(), abs_tol=1e-14):
                raise ValueError(f"harmonics {j} and {-j} are not complex conjugates")
        object.__setattr__(self, "harmonics", dict(sorted(full.items())))

    @classmethod
    def sine(cls) -> "DriveSpec":
        return cls({1: -0.5j, -1: 0.5j}, name="sin")

    def coefficient(self, j: int) -> complex:
        return self.harmonics.get(int(j), 0j)

    def value(self, phase: float) -> float:
        """f(phase)."""
        total = sum(c * cmath.exp(1j * j * phase) for j, c in self.harmonics.items())
        return total.real

    def integral(self, phase: float) -> float:
        """int_0^phase f(s) ds."""
        total = sum(c * (cmath.exp(1j * j * phase) - 1.0) / (1j * j) for j, c in self.harmonics.items())
        return total.real

    def derivative(self, phase: float) -> float:
        """f'(phase)."""
        total = sum(1j * j * c * cmath.exp(1j * j * phase) for j, c in self.harmonics.items())
        return total.real
