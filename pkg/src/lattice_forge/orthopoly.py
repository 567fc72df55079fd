"""Orthogonal polynomials attached to a Jacobi matrix.

The eigenvector components of a Jacobi matrix are ``W[s, n] = sqrt(w_s) *
chi_n(lambda_s)`` where ``chi_n`` obey the three-term recurrence

    x chi_n(x) = J_{n+1} chi_{n+1}(x) + B_n chi_n(x) + J_n chi_{n-1}(x),

with ``chi_{-1} = 0`` and ``chi_0 = 1``.  For mirror-symmetric lattices the top
polynomial takes the alternating values ``chi_N(lambda_s) = (-1)**(N+s)`` on the
spectrum, which pins it down by interpolation and yields the weights directly
from the spectrum.

Coefficient vectors here are always in ascending degree order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    NonPositiveLeadingCoefficient,
    NonPositiveWeight,
    SpectrumMismatch,
)
from .lattice import LatticeSpec, Spectrum

__all__ = [
    "MonicPoly",
    "ChiInterpolant",
    "PolySystem",
    "eval_chi",
    "characteristic_poly",
    "char_poly_derivative",
    "chi_n_from_spectrum",
    "weights_from_spectrum",
    "build_poly_system",
]


# -- exact polynomial helpers (coefficients may be Fraction or float) --------


def poly_from_roots(roots: Sequence) -> list:
    """Monic coefficients of ``prod (x - r)``."""
    coeffs = [type(roots[0])(1) if roots else 1]
    for r in roots:
        nxt = [0 * r] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= r * c
        coeffs = nxt
    return coeffs


def deflate(coeffs: Sequence, root) -> list:
    """Quotient of ``coeffs`` by ``(x - root)`` via synthetic division; remainder dropped."""
    deg = len(coeffs) - 1
    out = [None] * deg
    acc = coeffs[deg]
    out[deg - 1] = acc
    for k in range(deg - 1, 0, -1):
        acc = coeffs[k] + acc * root
        out[k - 1] = acc
    return out


def chi_top_coefficients(nodes: Sequence) -> list:
    """Coefficients of the degree-N interpolant of ``(-1)**(N+s)`` at ``nodes``.

    Works in whatever arithmetic the nodes carry; pass ``Fraction`` nodes for an
    exact result.
    """
    n = len(nodes) - 1
    full = poly_from_roots(list(nodes))
    out = [0 * nodes[0]] * (n + 1)
    for s, xs in enumerate(nodes):
        denom = 1
        for i, xi in enumerate(nodes):
            if i != s:
                denom *= xs - xi
        scale = (1 if (n + s) % 2 == 0 else -1) / denom
        for k, c in enumerate(deflate(full, xs)):
            out[k] += scale * c
    return out


def exact_nodes(spectrum: Spectrum) -> list[Fraction]:
    scale = Fraction(spectrum.scale)
    return [scale * Fraction(float(v)) for v in spectrum.values]


# -- public surface -----------------------------------------------------------


@dataclass(frozen=True)
class MonicPoly:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.size == 0 or c[-1] != 1.0:
            raise ValueError("a monic polynomial needs leading coefficient exactly 1")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)


@dataclass(frozen=True)
class ChiInterpolant:
    """``chi_N`` reconstructed from the spectrum alone.

    Evaluation uses the second barycentric formula; the coefficient vectors
    ``raw`` (leading coefficient ``1 / (J_1 ... J_N)``) and ``monic`` are kept
    for routines that need the monomial basis.
    """

    nodes: np.ndarray
    values: np.ndarray
    bary_weights: np.ndarray
    raw: np.ndarray
    monic: MonicPoly

    @property
    def leading(self) -> float:
        return float(self.raw[-1])

    @property
    def h_sqrt(self) -> float:
        """``sqrt(h_N) = J_1 ... J_N`` of the lattice that owns this spectrum."""
        return 1.0 / self.leading

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        diff = x[:, None] - self.nodes[None, :]
        exact = diff == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            t = self.bary_weights / diff
            out = (t @ self.values) / t.sum(axis=1)
        rows, cols = np.nonzero(exact)
        out[rows] = self.values[cols]
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PolySystem:
    lattice: LatticeSpec
    spectrum: Spectrum
    chi_table: np.ndarray  # chi_table[n, s] = chi_n(lambda_s)
    weights: np.ndarray
    h_sqrt: float

    @property
    def transform(self) -> np.ndarray:
        """``W[s, n] = sqrt(w_s) * chi_n(lambda_s)``; orthogonal."""
        return np.sqrt(self.weights)[:, None] * self.chi_table.T

    def orthogonality_defect(self) -> float:
        gram = (self.chi_table * self.weights) @ self.chi_table.T
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def eval_chi(lattice: LatticeSpec, x) -> np.ndarray:
    """``[chi_0(x), ..., chi_N(x)]`` by forward recurrence.

    ``x`` may be an array, in which case the result has shape ``(N+1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    j, b = lattice.couplings, lattice.site_constants
    n = lattice.n_max
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    prev = np.zeros_like(x)
    for k in range(n):
        jk = j[k - 1] if k > 0 else 0.0
        out[k + 1] = ((x - b[k]) * out[k] - jk * prev) / j[k]
        prev = out[k]
    return out


def characteristic_poly(spectrum: Spectrum) -> MonicPoly:
    """``P_{N+1}(x) = prod_s (x - scale * lambda_s)``."""
    return MonicPoly([float(c) for c in poly_from_roots(exact_nodes(spectrum))])


def char_poly_derivative(spectrum: Spectrum) -> np.ndarray:
    """``P'_{N+1}(lambda_s)`` evaluated as the product of node differences."""
    lam = spectrum.eigenvalues
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, 1.0)
    return np.prod(diff, axis=1)


def chi_n_from_spectrum(spectrum: Spectrum) -> ChiInterpolant:
    n = spectrum.n_max
    lam = spectrum.eigenvalues
    values = np.array([(-1.0) ** (n + s) for s in range(n + 1)])
    raw_exact = chi_top_coefficients(exact_nodes(spectrum))
    lead = raw_exact[-1]
    if lead <= 0:
        raise NonPositiveLeadingCoefficient(
            f"leading coefficient of chi_N is {float(lead)!r}; no positive-coupling chain has this spectrum"
        )
    raw = np.array([float(c) for c in raw_exact])
    monic = [float(c / lead) for c in raw_exact]
    monic[-1] = 1.0
    bary = 1.0 / char_poly_derivative(spectrum)
    return ChiInterpolant(lam, values, bary, raw, MonicPoly(monic))


def weights_from_spectrum(spectrum: Spectrum, return_defect: bool = False):
    """Discrete weights ``w_s = sqrt(h_N) / (chi_N(lambda_s) P'_{N+1}(lambda_s))``.

    The result is renormalised to sum to one.  With ``return_defect=True`` the
    pair ``(weights, sum_before_normalisation - 1)`` is returned.
    """
    chi = chi_n_from_spectrum(spectrum)
    dp = char_poly_derivative(spectrum)
    w = chi.h_sqrt / (chi.values * dp)
    if np.any(w <= 0):
        s = int(np.nonzero(w <= 0)[0][0])
        raise NonPositiveWeight(f"w_{s} = {float(w[s])!r} is not positive")
    defect = math.fsum(w) - 1.0
    w = w / math.fsum(w)
    return (w, defect) if return_defect else w


def build_poly_system(lattice: LatticeSpec, spectrum: Spectrum, tol: float = 1e-9) -> PolySystem:
    """Tabulate ``chi_n(lambda_s)`` and the weights for a lattice/spectrum pair.

    The table is read off the eigenvectors, ``chi_n(lambda_s) = W[s, n] / W[s, 0]``,
    rather than from the forward recurrence: on exponential spectra the
    recurrence amplifies rounding by many orders of magnitude at the extreme
    eigenvalues, whereas the tridiagonal eigensolver keeps every ratio accurate.

    Raises :class:`SpectrumMismatch` when the lattice eigenvalues differ from
    the spectrum by more than ``tol`` relative to the spectral radius.
    """
    if lattice.n_max != spectrum.n_max:
        raise SpectrumMismatch(
            f"lattice has {lattice.size} sites but spectrum has {len(spectrum)} values"
        )
    lam = spectrum.eigenvalues
    eig, vec = eigh_tridiagonal(lattice.site_constants, lattice.couplings)
    radius = max(1.0, float(np.max(np.abs(lam))))
    err = float(np.max(np.abs(eig - lam))) / radius
    if err > tol:
        raise SpectrumMismatch(f"lattice eigenvalues differ from the spectrum by {err:.3e} (relative)")
    w = vec.T * np.sign(vec[0])[:, None]  # rows s, W[s, 0] > 0
    table = (w / w[:, :1]).T
    return PolySystem(
        lattice=lattice,
        spectrum=spectrum,
        chi_table=table,
        weights=weights_from_spectrum(spectrum),
        h_sqrt=float(np.prod(lattice.couplings)),
    )
