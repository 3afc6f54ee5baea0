"""Jones/Stokes polarization algebra.

Conventions used throughout the package:

- Jones vectors are column vectors (ex, ey) of complex amplitudes in sqrt(W).
- Stokes parameters use s2 = 2*Re(conj(ex)*ey), s3 = 2*Im(conj(ex)*ey), so
  circular light with ey = j*ex has s3 = +1 (right-circular positive).
- Waveplates are SU(2) matrices built from an axis angle xi and a
  half-retardation zeta (accumulated phase difference between the plate's
  principal states is 2*zeta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "JonesVector",
    "StokesVector",
    "waveplate_matrix",
    "jones_to_stokes",
    "dop",
    "haar_random_rotation",
]


@dataclass(frozen=True)
class JonesVector:
    """Complex field amplitudes (sqrt(W)) of the two polarization components."""

    ex: complex
    ey: complex

    def __post_init__(self):
        if not (np.isfinite(self.ex) and np.isfinite(self.ey)):
            raise ValueError("Jones components must be finite")

    @property
    def power(self) -> float:
        return abs(self.ex) ** 2 + abs(self.ey) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.ex, self.ey], dtype=complex)

    def normalized(self) -> "JonesVector":
        p = self.power
        if p <= 0.0:
            raise ValueError("cannot normalize a zero Jones vector")
        s = 1.0 / np.sqrt(p)
        return JonesVector(self.ex * s, self.ey * s)


@dataclass(frozen=True)
class StokesVector:
    """Stokes parameters; s0 is total power (W or normalized units)."""

    s0: float
    s1: float
    s2: float
    s3: float

    def reduced(self) -> np.ndarray:
        """The (s1, s2, s3) part as an array."""
        return np.array([self.s1, self.s2, self.s3])

    def unit(self) -> np.ndarray:
        """Unit Poincare-sphere direction of the polarized part."""
        r = self.reduced()
        n = np.linalg.norm(r)
        if n == 0.0:
            raise ValueError("zero polarized part has no direction")
        return r / n


def waveplate_matrix(xi: float, zeta: float) -> np.ndarray:
    """SU(2) Jones matrix of a birefringent waveplate.

    ``xi`` is the angle of the plate's principal axes relative to the frame
    of the previous element; ``zeta`` is half the accumulated phase
    difference between the principal states.  The result is unitary with
    unit determinant.
    """
    if not (np.isfinite(xi) and np.isfinite(zeta)):
        raise ValueError("waveplate angles must be finite")
    c, s = np.cos(xi), np.sin(xi)
    ez = np.exp(1j * zeta)
    return np.array([[ez * c, ez * s], [-np.conj(ez) * s, np.conj(ez) * c]])


def jones_to_stokes(v: JonesVector | np.ndarray) -> StokesVector:
    """Standard Stokes construction; s0 equals the Jones power exactly."""
    if isinstance(v, JonesVector):
        ex, ey = v.ex, v.ey
    else:
        ex, ey = v[0], v[1]
    px = abs(ex) ** 2
    py = abs(ey) ** 2
    cross = np.conj(ex) * ey
    return StokesVector(px + py, px - py, 2.0 * cross.real, 2.0 * cross.imag)


def stokes_samples_to_array(samples) -> np.ndarray:
    """Stack StokesVector samples into an (n, 4) float array."""
    return np.array([[s.s0, s.s1, s.s2, s.s3] for s in samples])


def dop(samples) -> float:
    """Degree of polarization of a set of Stokes samples.

    |mean reduced Stokes vector| / mean power.  Accepts a sequence of
    StokesVector or an (n, 4) array.
    """
    arr = samples if isinstance(samples, np.ndarray) else stokes_samples_to_array(samples)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] != 4:
        raise ValueError("need an (n, 4) set of Stokes samples")
    s0_mean = arr[:, 0].mean()
    if s0_mean <= 0.0 or np.any(arr[:, 0] <= 0.0):
        raise ValueError("all samples must have positive power")
    return float(np.linalg.norm(arr[:, 1:].mean(axis=0)) / s0_mean)


def haar_random_rotation(seed: int) -> np.ndarray:
    """Haar-uniform SU(2) rotation, deterministic for a given seed.

    Sampled by normalizing a 4D Gaussian to a unit quaternion
    (q0, q1, q2, q3) and mapping to SU(2).
    """
    rng = np.random.default_rng(seed)
    return _haar_su2(rng)


def _haar_su2(rng: np.random.Generator) -> np.ndarray:
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    return np.array(
        [
            [q[0] + 1j * q[1], q[2] + 1j * q[3]],
            [-q[2] + 1j * q[3], q[0] - 1j * q[1]],
        ]
    )
