"""Single-particle angular profiles given by their Fourier coefficients.

A profile stores the coefficients f_hat(n) of a probability density on the
torus (with respect to dtheta/(2*pi)), normalised so f_hat(0) = 1 and with
conjugate symmetry f_hat(-n) = conj(f_hat(n)).  Profiles serve both as initial
data for the analytic hierarchy and as sampling distributions for simulated
ensembles.  The two named presets have exactly known coefficients everywhere:
``uniform`` (all zero beyond n=0) and ``one_plus_cos`` (1/2 at n = +-1).
"""

from __future__ import annotations

import math

import numpy as np


class CoverageError(ValueError):
    """A coefficient outside the stored range of a finite profile was requested."""


class OrderProfile:
    """Fourier description of a density 1 + 2 sum_n Re(c_n e^{i n theta}).

    ``exact_outside=True`` declares that every coefficient beyond the stored
    range vanishes exactly (true for the presets); otherwise such requests
    raise CoverageError so callers can restrict their tuple sets explicitly.
    """

    def __init__(self, coeffs: dict[int, complex], exact_outside: bool = False,
                 name: str | None = None, validate: bool = True):
        full: dict[int, complex] = {0: 1.0 + 0.0j}
        for n, c in coeffs.items():
            n = int(n)
            c = complex(c)
            full[n] = c
            full.setdefault(-n, c.conjugate())
        if abs(full[0] - 1.0) > 1e-12:
            raise ValueError("profile coefficient at 0 must be 1 (unit mass)")
        for n, c in full.items():
            if abs(c - full[-n].conjugate()) > 1e-12:
                raise ValueError(f"conjugate symmetry violated at n={n}")
            if abs(c) > 1.0 + 1e-12:
                raise ValueError(f"|coefficient| > 1 at n={n}")
        self.coeffs = full
        self.exact_outside = exact_outside
        self.name = name
        self.n_max = max(abs(n) for n in full)
        if validate:
            self._check_density()

    def _check_density(self, grid: int = 4096, tol: float = -1e-9):
        theta = np.linspace(-math.pi, math.pi, grid, endpoint=False)
        if self.density(theta).min() < tol:
            raise ValueError("profile coefficients do not define a nonnegative density")

    @classmethod
    def uniform(cls) -> "OrderProfile":
        return cls({}, exact_outside=True, name="uniform")

    @classmethod
    def one_plus_cos(cls) -> "OrderProfile":
        return cls({1: 0.5}, exact_outside=True, name="one_plus_cos")

    @classmethod
    def preset(cls, name: str) -> "OrderProfile":
        key = name.replace("-", "_")
        if key == "uniform":
            return cls.uniform()
        if key == "one_plus_cos":
            return cls.one_plus_cos()
        raise ValueError(f"unknown profile preset {name!r}")

    def covers(self, n: int) -> bool:
        return self.exact_outside or abs(int(n)) <= self.n_max

    def coeff(self, n: int) -> complex:
        n = int(n)
        c = self.coeffs.get(n)
        if c is not None:
            return c
        if self.exact_outside:
            return 0.0 + 0.0j
        raise CoverageError(f"profile {self.name or ''} does not cover coefficient n={n}")

    def density(self, theta):
        """Density values with respect to dtheta/(2*pi)."""
        theta = np.asarray(theta, dtype=float)
        out = np.ones_like(theta)
        for n, c in self.coeffs.items():
            if n > 0:
                out = out + 2.0 * (c * np.exp(1j * n * theta)).real
        return out

    def density_bound(self) -> float:
        return 1.0 + 2.0 * sum(abs(c) for n, c in self.coeffs.items() if n > 0)

    def sample(self, rng: np.random.Generator, size: int):
        """Rejection sampling against the uniform envelope; exact."""
        bound = self.density_bound()
        out = np.empty(size)
        have = 0
        while have < size:
            batch = max(64, 2 * (size - have))
            theta = rng.uniform(-math.pi, math.pi, size=batch)
            accept = rng.uniform(0.0, bound, size=batch) <= self.density(theta)
            good = theta[accept]
            take = min(size - have, good.size)
            out[have:have + take] = good[:take]
            have += take
        return out

    def __repr__(self):
        label = self.name or f"{len(self.coeffs)} coeffs"
        return f"OrderProfile({label})"
