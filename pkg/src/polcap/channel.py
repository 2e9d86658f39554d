"""Physical model of the polarization photon-counting channel.

A source emits N identically polarized photons per sample window at an angle
theta in [0, pi/2] from horizontal.  Each photon passes a horizontal polarizer
whose own angle is a random misalignment Phi supported on [0, a] and is
detected with probability cos^2(theta - phi).  Averaging over Phi gives a
per-photon detection probability t, and the photon count over a window is
binomial(N, t).  This module supplies the angle/probability mapping, the
admissible range of t, and numerically stable binomial transition rows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln

HALF_PI = 0.5 * math.pi

# Noise kinds
DETERMINISTIC = "deterministic"
UNIFORM = "uniform"
TABULATED = "tabulated"


class DegenerateNoiseError(ValueError):
    """The polarizer misalignment is fully depolarizing: no angle is preferred."""


class NoiseMoments(NamedTuple):
    """Trigonometric moments (E[cos 2*Phi], E[sin 2*Phi]) of the misalignment."""

    f_c: float
    f_s: float


def _validate_angle(value, name="angle"):
    arr = np.asarray(value, dtype=float)
    if np.any(arr < -1e-15) or np.any(arr > HALF_PI + 1e-15):
        raise ValueError(f"{name} must lie in [0, pi/2], got {value}")
    return arr


@dataclass(frozen=True)
class DetectorNoise:
    """Distribution of the detector polarizer misalignment on [0, a].

    kind is one of 'deterministic' (Phi == 0), 'uniform' (flat on [0, a]) or
    'tabulated' (piecewise-linear density given at increasing nodes starting
    at 0).  Construct through the factory classmethods.
    """

    kind: str
    a: float = 0.0
    nodes: np.ndarray | None = None
    density: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (DETERMINISTIC, UNIFORM, TABULATED):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.a <= HALF_PI + 1e-15:
            raise ValueError(f"support bound a={self.a} outside [0, pi/2]")
        if self.kind == TABULATED:
            nodes, density = self.nodes, self.density
            if nodes is None or density is None:
                raise ValueError("tabulated noise requires nodes and density")
            if nodes.ndim != 1 or nodes.shape != density.shape or nodes.size < 2:
                raise ValueError("density table must be two equal 1-d columns")
            if np.any(np.diff(nodes) <= 0):
                raise ValueError("density table nodes must be strictly increasing")
            if abs(nodes[0]) > 1e-12:
                raise ValueError("density table must start at phi = 0")
            if nodes[-1] > HALF_PI + 1e-12:
                raise ValueError("density table extends beyond pi/2")
            if np.any(density < 0):
                raise ValueError("density values must be nonnegative")
            total = np.trapezoid(density, nodes)
            if abs(total - 1.0) > 1e-8:
                raise ValueError(f"density integrates to {total}, expected 1 +- 1e-8")
        elif self.nodes is not None or self.density is not None:
            raise ValueError(f"{self.kind} noise takes no density table")

    @classmethod
    def deterministic(cls) -> "DetectorNoise":
        """Perfectly aligned polarizer, Phi identically 0."""
        return cls(DETERMINISTIC, 0.0)

    @classmethod
    def uniform(cls, a: float) -> "DetectorNoise":
        """Misalignment uniform on [0, a]; a = 0 degenerates to deterministic."""
        if a == 0.0:
            return cls.deterministic()
        return cls(UNIFORM, float(a))

    @classmethod
    def tabulated(cls, nodes, density) -> "DetectorNoise":
        nodes = np.asarray(nodes, dtype=float)
        density = np.asarray(density, dtype=float)
        return cls(TABULATED, float(nodes[-1]), nodes, density)

    @classmethod
    def from_csv(cls, path) -> "DetectorNoise":
        """Load a tabulated density from a two-column CSV (phi_radians, density).

        A header row is required; nodes must be strictly increasing.
        """
        nodes, density = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty noise density file") from None
            try:
                float(header[0])
            except (ValueError, IndexError):
                pass
            else:
                raise ValueError(f"{path}: header row required")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) < 2:
                    raise ValueError(f"{path}:{lineno}: expected two columns")
                nodes.append(float(row[0]))
                density.append(float(row[1]))
        if len(nodes) < 2:
            raise ValueError(f"{path}: need at least two density nodes")
        return cls.tabulated(nodes, density)

    def moments(self) -> NoiseMoments:
        """Moments (E[cos 2*Phi], E[sin 2*Phi]) of the misalignment angle."""
        if self.kind == DETERMINISTIC:
            return NoiseMoments(1.0, 0.0)
        if self.kind == UNIFORM:
            a = self.a
            # sin(2a)/(2a) and sin(a)^2/a via sinc, stable through a -> 0
            f_c = float(np.sinc(2.0 * a / math.pi))
            f_s = float(math.sin(a) * np.sinc(a / math.pi))
            return NoiseMoments(f_c, f_s)
        interp = lambda phi: np.interp(phi, self.nodes, self.density)
        pts = self.nodes[1:-1] if self.nodes.size > 2 else None
        f_c, _ = integrate.quad(lambda p: interp(p) * math.cos(2 * p), 0.0, self.a,
                                epsabs=1e-10, limit=max(200, 4 * self.nodes.size),
                                points=pts)
        f_s, _ = integrate.quad(lambda p: interp(p) * math.sin(2 * p), 0.0, self.a,
                                epsabs=1e-10, limit=max(200, 4 * self.nodes.size),
                                points=pts)
        return NoiseMoments(float(f_c), float(f_s))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a}


def conditional_detection_prob(theta, phi):
    """Detection probability cos^2(theta - phi) for fixed polarizer angle phi."""
    theta = _validate_angle(theta, "theta")
    phi = _validate_angle(phi, "phi")
    out = np.cos(theta - phi) ** 2
    return float(out) if out.ndim == 0 else out


def noise_moments(noise: DetectorNoise) -> NoiseMoments:
    return noise.moments()


def mean_detection_prob(theta, noise: DetectorNoise):
    """Per-photon detection probability averaged over the misalignment.

    Equals 0.5 * (1 + cos(2*theta) F_c + sin(2*theta) F_s) where (F_c, F_s)
    are the noise moments.
    """
    theta = _validate_angle(theta, "theta")
    f_c, f_s = noise.moments()
    out = 0.5 * (1.0 + np.cos(2.0 * theta) * f_c + np.sin(2.0 * theta) * f_s)
    return float(out) if np.ndim(out) == 0 else out


def optimal_angle(noise: DetectorNoise) -> float:
    """Polarization angle maximizing the mean detection probability.

    Raises DegenerateNoiseError when both moments vanish (fully depolarizing
    misalignment), in which case every angle performs identically.
    """
    f_c, f_s = noise.moments()
    if math.hypot(f_c, f_s) < 1e-14:
        raise DegenerateNoiseError("noise moments vanish; no preferred angle")
    return 0.5 * math.atan2(f_s, f_c)


def detection_prob_bounds(noise: DetectorNoise) -> tuple[float, float]:
    """Admissible range (t_min, t_max) of the mean detection probability.

    t_max = (1 + sqrt(F_c^2 + F_s^2)) / 2 is attained at the optimal angle;
    t_min is the smaller of the horizontal and vertical endpoint values.
    """
    f_c, f_s = noise.moments()
    t_max = 0.5 * (1.0 + math.hypot(f_c, f_s))
    t_min = 0.5 * (1.0 - abs(f_c))
    return t_min, t_max


def angle_from_detection_prob(t: float, noise: DetectorNoise) -> float:
    """Invert the mean detection probability on its decreasing branch.

    Returns the unique theta in [theta_opt, pi/2] with mean detection
    probability t.  For misalignment densities with a negative cosine moment
    the requested t may only be reachable on the increasing branch
    [0, theta_opt], which is then used instead.
    """
    t = float(t)
    t_min, t_max = detection_prob_bounds(noise)
    if not t_min - 1e-12 <= t <= t_max + 1e-12:
        raise ValueError(f"t={t} outside admissible range [{t_min}, {t_max}]")
    theta_opt = optimal_angle(noise)
    if t >= t_max:
        return theta_opt
    f_c, f_s = noise.moments()

    def g(theta):
        return 0.5 * (1.0 + math.cos(2 * theta) * f_c + math.sin(2 * theta) * f_s) - t

    lo, hi = theta_opt, HALF_PI
    if g(hi) > 0.0:
        # t below the decreasing branch's floor; use the rising branch
        lo, hi = 0.0, theta_opt
        if g(lo) > 0.0:
            return 0.0
    root = optimize.brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16)
    return float(min(max(root, 0.0), HALF_PI))


def binomial_row(n_photons: int, t: float) -> np.ndarray:
    """Binomial(N, t) pmf over counts 0..N, evaluated through log-gamma.

    Endpoint inputs t = 0 and t = 1 produce exact degenerate rows.
    """
    if n_photons < 1:
        raise ValueError(f"photon count N must be >= 1, got {n_photons}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"detection probability t={t} outside [0, 1]")
    return transition_matrix(n_photons, np.array([t]))[0]


def transition_matrix(n_photons: int, ts) -> np.ndarray:
    """Stack of binomial rows, one per detection probability in `ts`."""
    if n_photons < 1:
        raise ValueError(f"photon count N must be >= 1, got {n_photons}")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < 0.0) or np.any(ts > 1.0):
        raise ValueError("detection probabilities must lie in [0, 1]")
    counts = np.arange(n_photons + 1)
    log_comb = (gammaln(n_photons + 1) - gammaln(counts + 1)
                - gammaln(n_photons - counts + 1))
    rows = np.zeros((ts.size, n_photons + 1))
    interior = (ts > 0.0) & (ts < 1.0)
    if interior.any():
        ti = ts[interior][:, None]
        rows[interior] = np.exp(log_comb + counts * np.log(ti)
                                + (n_photons - counts) * np.log1p(-ti))
    rows[ts <= 0.0, 0] = 1.0
    rows[ts >= 1.0, n_photons] = 1.0
    return rows
