"""Coupled-mode propagation ``E(z) = exp(-i z J) E(0)`` through the eigenbasis.

With ``W[s, n]`` the eigenvector components (rows indexed by the eigenvalue),

    E_n(z) = sum_s W[s, source] W[s, n] exp(-i z lambda_s),

so a scan over many distances is a single matrix product.  Events are the
distances where the interior sites ``0 < n < N`` are (numerically) empty:
perfect transfer, perfect return, or a fractional revival between the ends.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import minimize_scalar

from .errors import DegenerateSpectrum
from .lattice import LatticeSpec, PentadiagonalSpec

__all__ = [
    "EigenSystem",
    "AmplitudeField",
    "TransportEvent",
    "eigendecompose",
    "propagate",
    "amplitudes",
    "transfer_fidelity",
    "leakage",
    "detect_events",
    "verify_event",
    "default_workers",
]

DEGENERACY_RTOL = 1e-12
LEAKAGE_THRESHOLD = 1e-6
GRID = 4096
SAMPLES_PER_RADIAN = 16 / math.pi  # grid points per radian of the fastest phase
REFINE_XTOL = 1e-10
CANDIDATE_CEILING = 0.5
DEDUPE_TOL = 1e-8


def default_workers() -> int:
    """Worker count from ``LATTICE_FORGE_THREADS`` (1 when unset or invalid)."""
    try:
        return max(1, int(os.environ.get("LATTICE_FORGE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and the orthogonal transform ``W`` (rows = eigenvectors)."""

    eigenvalues: np.ndarray
    transform: np.ndarray
    weights: np.ndarray

    @property
    def n_max(self) -> int:
        return self.eigenvalues.size - 1

    @property
    def spread(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def orthogonality_defect(self) -> float:
        w = self.transform
        return float(np.max(np.abs(w @ w.T - np.eye(w.shape[0]))))

    def matrix(self) -> np.ndarray:
        """``W^T diag(lambda) W``, the generator this system was built from."""
        w = self.transform
        return (w.T * self.eigenvalues) @ w


@dataclass(frozen=True)
class AmplitudeField:
    z: float
    amplitudes: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.probabilities))


@dataclass(frozen=True)
class TransportEvent:
    """A distance where only the end sites are populated.

    ``theta = atan2(|E_N|, |E_0|)`` lies in ``[0, pi/2]``; ``phi`` is ``arg E_0``,
    or ``arg E_N - pi/2`` when ``|E_N| > |E_0|``.
    """

    z: float
    kind: str  # "PST", "FR" or "return"
    theta: float
    phi: float
    leakage: float
    end_probabilities: tuple[float, float]
    note: str = ""

    @property
    def fidelity(self) -> float:
        return self.end_probabilities[1]

    @property
    def balanced(self) -> bool:
        return self.kind == "FR" and abs(self.theta - math.pi / 4) < 1e-4

    def to_json(self) -> dict:
        return {
            "z": self.z,
            "kind": self.kind,
            "theta": self.theta,
            "phi": self.phi,
            "leakage": self.leakage,
            "end_probabilities": list(self.end_probabilities),
            "note": self.note,
        }


def eigendecompose(lattice: LatticeSpec | PentadiagonalSpec) -> EigenSystem:
    """Eigen-expansion with ``W[s, 0] > 0``.

    Jacobi matrices go through LAPACK's tridiagonal solver, pentadiagonal ones
    through the dense symmetric solver.

    Raises
    ------
    DegenerateSpectrum
        Two eigenvalues closer than ``1e-12`` times the spread.
    """
    if isinstance(lattice, PentadiagonalSpec):
        lam, vec = eigh(lattice.dense())
    else:
        lam, vec = eigh_tridiagonal(lattice.site_constants, lattice.couplings)
    spread = lam[-1] - lam[0]
    gaps = np.diff(lam)
    if spread <= 0 or np.min(gaps) < DEGENERACY_RTOL * spread:
        raise DegenerateSpectrum(f"eigenvalue gap {np.min(gaps):.3e} below {DEGENERACY_RTOL:g} x spread")
    w = vec.T.copy()
    w *= np.where(w[:, 0] < 0, -1.0, 1.0)[:, None]
    for arr in (lam, w):
        arr.setflags(write=False)
    weights = w[:, 0] ** 2
    weights.setflags(write=False)
    return EigenSystem(lam, w, weights)


def amplitudes(system: EigenSystem, z, source: int = 0) -> np.ndarray:
    """``E_n(z)`` for an array of distances; shape ``z.shape + (N+1,)``."""
    if not 0 <= source <= system.n_max:
        raise ValueError(f"source must lie in 0..{system.n_max}")
    z = np.asarray(z, dtype=float)
    w = system.transform
    coef = w[:, source][:, None] * w  # (s, n)
    phases = np.exp(-1j * z[..., None] * system.eigenvalues)
    return phases @ coef


def propagate(system: EigenSystem, z: float, source: int = 0) -> AmplitudeField:
    return AmplitudeField(float(z), amplitudes(system, float(z), source))


def transfer_fidelity(system: EigenSystem, z):
    """``|E_N(z)|**2`` starting from site 0 (scalar or array)."""
    w = system.transform
    coef = w[:, 0] * w[:, -1]
    z = np.asarray(z, dtype=float)
    val = np.abs(np.exp(-1j * z[..., None] * system.eigenvalues) @ coef) ** 2
    return float(val) if val.ndim == 0 else val


def leakage(system: EigenSystem, z, source: int = 0):
    """Population on the interior sites ``0 < n < N``."""
    p = np.abs(amplitudes(system, z, source)) ** 2
    val = 1.0 - p[..., 0] - p[..., -1]
    inner = np.sum(p[..., 1:-1], axis=-1)
    # the direct sum is accurate near zero, the complement elsewhere
    out = np.where(inner < 0.5, inner, val)
    return float(out) if out.ndim == 0 else out


def _event(system: EigenSystem, z: float, threshold: float, note: str = "") -> TransportEvent:
    e = amplitudes(system, z)
    p = np.abs(e) ** 2
    leak = float(np.sum(p[1:-1]))
    a0, an = abs(e[0]), abs(e[-1])
    theta = math.atan2(an, a0)
    phi = float(np.angle(e[0])) if a0 >= an else float(np.angle(e[-1])) - math.pi / 2
    phi = math.remainder(phi, 2 * math.pi)
    if p[-1] >= 1 - threshold:
        kind = "PST"
    elif p[0] >= 1 - threshold:
        kind = "return"
    else:
        kind = "FR"
    return TransportEvent(float(z), kind, theta, phi, leak, (float(p[0]), float(p[-1])), note)


def _two_site_events(system: EigenSystem, z_max: float, threshold: float) -> list[TransportEvent]:
    # |E_1|^2 = 4 w_0 w_1 sin^2(gap z / 2): extremes at multiples of pi / gap
    gap = system.spread
    note = "two-site lattice: no interior sites, every z is a revival; only extremes reported"
    out = []
    m = 1
    while m * math.pi / gap <= z_max * (1 + 1e-12):
        out.append(_event(system, m * math.pi / gap, threshold, note))
        m += 1
    return out


def _refine(system: EigenSystem, lo: float, mid: float, hi: float) -> float:
    f = lambda z: leakage(system, z)  # noqa: E731
    try:
        res = minimize_scalar(f, bracket=(lo, mid, hi), method="golden",
                              options={"xtol": REFINE_XTOL / max(abs(mid), 1.0)})
        z = float(res.x)
    except ValueError:
        return mid
    if not lo <= z <= hi or f(z) > f(mid):
        return mid
    return z


def detect_events(system: EigenSystem, z_max: float, grid: int = GRID,
                  leakage_threshold: float = LEAKAGE_THRESHOLD, workers: int | None = None) -> list[TransportEvent]:
    """Distances in ``(0, z_max]`` where the interior leakage drops below threshold.

    The scan uses at least ``grid`` points and at least 16 points per period
    ``pi / spread`` of the fastest phase; every local minimum of the
    leakage below 1/2 is refined by golden-section search.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    if z_max <= 0:
        return []
    if system.n_max == 1:
        return _two_site_events(system, z_max, leakage_threshold)
    workers = default_workers() if workers is None else max(1, int(workers))
    points = max(int(grid), math.ceil(SAMPLES_PER_RADIAN * z_max * system.spread))
    dz = z_max / (points - 1)
    zs = np.arange(points + 2) * dz  # one extra sample past z_max on each side of the interval end
    if workers > 1:
        chunks = np.array_split(zs, workers)
        with ThreadPoolExecutor(workers) as pool:
            leak = np.concatenate(list(pool.map(lambda c: leakage(system, c), chunks)))
    else:
        leak = leakage(system, zs)
    inner = np.arange(1, zs.size - 1)
    is_min = (leak[inner] <= leak[inner - 1]) & (leak[inner] < leak[inner + 1]) & (leak[inner] < CANDIDATE_CEILING)
    cand = inner[is_min]
    brackets = [(zs[i - 1], zs[i], zs[i + 1]) for i in cand]
    if workers > 1 and len(brackets) > 1:
        with ThreadPoolExecutor(workers) as pool:
            refined = list(pool.map(lambda b: _refine(system, *b), brackets))
    else:
        refined = [_refine(system, *b) for b in brackets]
    out: list[TransportEvent] = []
    for z in sorted(refined):
        if not 0 < z <= z_max * (1 + 1e-12):
            continue
        ev = _event(system, z, leakage_threshold)
        if ev.leakage > leakage_threshold:
            continue
        if out and abs(z - out[-1].z) <= DEDUPE_TOL * max(1.0, z):
            continue
        out.append(ev)
    return out


def verify_event(system: EigenSystem, prediction, tol: float = LEAKAGE_THRESHOLD) -> bool:
    """True iff simulating at ``prediction.distance`` shows leakage ``<= tol`` and the predicted angle.

    Angles are compared on the canonical range ``[0, pi/2]`` within ``sqrt(tol)``.
    """
    if prediction.kind == "none" or not math.isfinite(prediction.distance):
        return False
    ev = _event(system, prediction.distance, tol)
    if system.n_max > 1 and ev.leakage > tol:
        return False
    return abs(ev.theta - prediction.mixing_angle) <= math.sqrt(tol)
