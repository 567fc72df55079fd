"""Core value types for coupled lattices and their spectra.

A lattice of ``N + 1`` sites is described by its nearest-neighbour couplings
``J_1..J_N`` and on-site propagation constants ``B_0..B_N``; together they form
the symmetric tridiagonal (Jacobi) matrix that generates the dynamics.  The
next-to-nearest-neighbour variant ``alpha * J**2 + beta * J`` is pentadiagonal.

All types are frozen dataclasses holding read-only numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    CouplingExceedsAmplitude,
    InvalidLattice,
    InvalidSpectrum,
    NegativeDistance,
)

__all__ = [
    "Spectrum",
    "LatticeSpec",
    "PentadiagonalSpec",
    "GeometryParams",
    "validate_mirror_symmetry",
    "mirror_defect",
    "couplings_to_distances",
    "distances_to_couplings",
    "build_nnn",
]

MIRROR_RTOL = 1e-10


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidLattice(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Strictly increasing eigenvalues ``values`` with global factor ``scale``.

    The physical eigenvalues are ``scale * values``; see :attr:`eigenvalues`.
    """

    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size < 2:
            raise InvalidSpectrum("a spectrum needs at least two eigenvalues")
        if not np.all(np.isfinite(vals)):
            raise InvalidSpectrum("spectrum contains non-finite values")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidSpectrum(f"scale must be positive, got {self.scale!r}")
        if np.any(np.diff(vals) <= 0):
            raise InvalidSpectrum("eigenvalues must be strictly increasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.scale * self.values

    def __len__(self):
        return self.values.size

    @classmethod
    def from_json(cls, obj) -> "Spectrum":
        """Accept a flat list or ``{"values": [...], "beta": x}``."""
        if isinstance(obj, Mapping):
            return cls(obj["values"], float(obj.get("beta", obj.get("scale", 1.0))))
        return cls(list(obj))

    def to_json(self) -> dict:
        return {"values": [float(v) for v in self.values], "beta": self.scale}


@dataclass(frozen=True)
class LatticeSpec:
    """Couplings ``J_1..J_N`` (all positive) and site constants ``B_0..B_N``.

    The boundary values ``J_0 = J_{N+1} = 0`` are implicit.  ``meta`` is a
    free-form provenance map carried through JSON and ignored by equality.
    """

    couplings: np.ndarray
    site_constants: np.ndarray
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        j = _frozen(self.couplings, "couplings")
        b = _frozen(self.site_constants, "site_constants")
        if j.size < 1:
            raise InvalidLattice("a lattice needs at least one coupling (N >= 1)")
        if b.size != j.size + 1:
            raise InvalidLattice(
                f"expected {j.size + 1} site constants for {j.size} couplings, got {b.size}"
            )
        if np.any(j <= 0):
            raise InvalidLattice("all couplings must be positive")
        object.__setattr__(self, "couplings", j)
        object.__setattr__(self, "site_constants", b)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n_max(self) -> int:
        return self.couplings.size

    @property
    def size(self) -> int:
        return self.couplings.size + 1

    def dense(self) -> np.ndarray:
        return (
            np.diag(self.site_constants)
            + np.diag(self.couplings, 1)
            + np.diag(self.couplings, -1)
        )

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max,
            "couplings": [float(v) for v in self.couplings],
            "site_constants": [float(v) for v in self.site_constants],
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "LatticeSpec":
        lat = cls(obj["couplings"], obj["site_constants"], obj.get("meta", {}))
        if "n_max" in obj and int(obj["n_max"]) != lat.n_max:
            raise InvalidLattice(f"n_max={obj['n_max']} disagrees with {lat.n_max} couplings")
        return lat


@dataclass(frozen=True)
class PentadiagonalSpec:
    """Symmetric pentadiagonal matrix stored by bands.

    ``off1[k]`` couples sites ``k`` and ``k+1``; ``off2[k]`` couples ``k`` and ``k+2``.
    """

    diag: np.ndarray
    off1: np.ndarray
    off2: np.ndarray
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        d = _frozen(self.diag, "diag")
        o1 = _frozen(self.off1, "off1")
        o2 = _frozen(self.off2, "off2")
        n = d.size - 1
        if n < 1 or o1.size != n or o2.size != max(n - 1, 0):
            raise InvalidLattice("band sizes must be N+1, N and N-1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "off1", o1)
        object.__setattr__(self, "off2", o2)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n_max(self) -> int:
        return self.diag.size - 1

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        m = np.diag(self.diag) + np.diag(self.off1, 1) + np.diag(self.off1, -1)
        if self.off2.size:
            m += np.diag(self.off2, 2) + np.diag(self.off2, -2)
        return m


@dataclass(frozen=True)
class GeometryParams:
    """Evanescent coupling law ``J = A * exp(-C * d)``."""

    amplitude_A: float
    decay_C: float

    def __post_init__(self):
        if not (self.amplitude_A > 0 and self.decay_C > 0):
            raise InvalidLattice("amplitude_A and decay_C must both be positive")


def mirror_defect(lattice: LatticeSpec | PentadiagonalSpec) -> float:
    """Largest absolute violation of reflection symmetry about the anti-diagonal."""
    if isinstance(lattice, PentadiagonalSpec):
        bands = (lattice.diag, lattice.off1, lattice.off2)
    else:
        bands = (lattice.site_constants, lattice.couplings)
    return max((float(np.max(np.abs(b - b[::-1]))) for b in bands if b.size), default=0.0)


def validate_mirror_symmetry(lattice: LatticeSpec | PentadiagonalSpec, tol: float | None = None) -> bool:
    """True iff ``B_{N-n} = B_n`` and ``J_{N-n+1} = J_n`` within ``tol``.

    ``tol`` is absolute.  When omitted it defaults to ``1e-10`` times the largest
    matrix entry in magnitude.
    """
    if tol is None:
        bands = (
            (lattice.diag, lattice.off1, lattice.off2)
            if isinstance(lattice, PentadiagonalSpec)
            else (lattice.site_constants, lattice.couplings)
        )
        tol = MIRROR_RTOL * max(float(np.max(np.abs(b))) for b in bands if b.size)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return mirror_defect(lattice) <= tol


def couplings_to_distances(lattice: LatticeSpec, geom: GeometryParams) -> np.ndarray:
    """Separations ``d_{n,n+1} = ln(A / J_{n+1}) / C`` realising each coupling."""
    j = lattice.couplings
    bad = np.nonzero(j > geom.amplitude_A)[0]
    if bad.size:
        n = int(bad[0]) + 1
        raise CouplingExceedsAmplitude(
            f"J_{n} = {float(j[n - 1])!r} exceeds the amplitude A = {geom.amplitude_A!r}"
        )
    return np.log(geom.amplitude_A / j) / geom.decay_C


def distances_to_couplings(distances: Sequence[float], geom: GeometryParams) -> np.ndarray:
    d = np.asarray(distances, dtype=float)
    if np.any(d < 0):
        raise NegativeDistance(f"distances must be non-negative, got {float(d.min())!r}")
    return geom.amplitude_A * np.exp(-geom.decay_C * d)


def build_nnn(lattice: LatticeSpec, alpha_nnn: float, beta_nnn: float) -> PentadiagonalSpec:
    """Bands of ``alpha_nnn * J @ J + beta_nnn * J`` for the Jacobi matrix of ``lattice``."""
    j = np.concatenate(([0.0], lattice.couplings, [0.0]))  # J_0 .. J_{N+1}
    b = lattice.site_constants
    a, c = alpha_nnn, beta_nnn
    diag = a * (j[:-1] ** 2 + b**2 + j[1:] ** 2) + c * b
    inner = j[1:-1]
    off1 = inner * (a * (b[:-1] + b[1:]) + c)
    off2 = a * inner[:-1] * inner[1:]
    meta = dict(lattice.meta)
    meta["nnn"] = {"alpha": float(a), "beta": float(c)}
    return PentadiagonalSpec(diag, off1, off2, meta)
