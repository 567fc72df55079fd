"""Mirror-symmetric Jacobi matrix from its spectrum.

The top polynomial ``P_N`` is the monic form of the interpolant of
``(-1)**(N+s)`` on the eigenvalues and ``P_{N+1}`` is the characteristic
polynomial.  Matching coefficients in

    P_{n+1}(x) = (x - B_n) P_n(x) - J_n**2 P_{n-1}(x)

degree by degree yields ``B_n``, then ``J_n**2``, then ``P_{n-1}``, and so on
down to ``B_0``.

The descent runs on monomial coefficient vectors.  In double precision it
loses roughly one digit per site on exponential and quadratic spectra, so the
default path carries out every step exactly on ``Fraction`` images of the
(float) eigenvalues and rounds only the final ``B_n`` and ``J_n``.
``exact=False`` selects the float path with compensated sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import DegreeDefect, NegativeUn
from .lattice import LatticeSpec, Spectrum, mirror_defect
from .orthopoly import chi_top_coefficients, exact_nodes, poly_from_roots

__all__ = ["ReconstructionReport", "reconstruct", "verify_roundtrip"]

REMAINDER_RTOL = 1e-7


@dataclass(frozen=True)
class ReconstructionReport:
    lattice: LatticeSpec
    residual_spectrum_error: float
    mirror_defect: float
    per_step_u: tuple[float, ...]  # U_n = J_n**2 for n = 1..N, original units


def _descend(p_top: list, p_next: list, exact: bool):
    """Run the Euclidean descent; returns ``(B_0..B_N, U_1..U_N)`` in the working units."""
    n_max = len(p_next) - 1
    b = [None] * (n_max + 1)
    u = [None] * (n_max + 1)
    hi, lo = list(p_top), list(p_next)  # P_{n+1}, P_n
    for n in range(n_max, 0, -1):
        b_n = lo[n - 1] - hi[n]
        # R = (x - B_n) P_n - P_{n+1} = U_n P_{n-1}
        rem = []
        for k in range(n + 2):
            terms = [
                lo[k - 1] if 1 <= k <= n + 1 else 0,
                -b_n * lo[k] if k <= n else 0,
                -hi[k],
            ]
            rem.append(sum(terms) if exact else math.fsum(terms))
        scale = 1 if exact else max(1.0, max(abs(c) for c in hi))
        residual = max(abs(rem[n + 1]), abs(rem[n]))
        if residual > (0 if exact else REMAINDER_RTOL * scale):
            raise DegreeDefect(n, float(residual))
        u_n = rem[n - 1]
        if not u_n > 0:
            raise NegativeUn(n, float(u_n))
        b[n], u[n] = b_n, u_n
        hi, lo = lo, [c / u_n for c in rem[:n]]
        lo[-1] = type(lo[-1])(1)
    b[0] = -hi[0]  # P_1 = x - B_0
    return b, u[1:]


def _forward_residual(p_top: list, b: list, u: list) -> float:
    """Coefficient mismatch between ``P_{N+1}`` and the polynomial the recurrence rebuilds."""
    prev, cur = [1], [-b[0], 1]
    for n in range(1, len(b)):
        nxt = [0] * (n + 2)
        for k, c in enumerate(cur):
            nxt[k + 1] += c
            nxt[k] -= b[n] * c
        for k, c in enumerate(prev):
            nxt[k] -= u[n - 1] * c
        prev, cur = cur, nxt
    return max(abs(x - y) for x, y in zip(cur, p_top))


def reconstruct(spectrum: Spectrum, exact: bool = True) -> ReconstructionReport:
    """Unique mirror-symmetric lattice whose eigenvalues are ``spectrum.eigenvalues``.

    The spectrum is mapped affinely onto ``[-1, 1]`` first; the resulting
    ``B_n`` and ``J_n`` are mapped back afterwards.

    Raises
    ------
    NegativeUn
        A step produced ``J_n**2 <= 0``.
    DegreeDefect
        A division step, or the final forward rebuild, left a remainder above
        ``1e-7`` times the largest coefficient (float path; the exact path
        must vanish identically).
    """
    nodes = exact_nodes(spectrum)
    mid = (nodes[0] + nodes[-1]) / 2
    half = (nodes[-1] - nodes[0]) / 2
    x = [(v - mid) / half for v in nodes]
    if not exact:
        x = [float(v) for v in x]
    p_top = poly_from_roots(x)
    chi = chi_top_coefficients(x)
    p_next = [c / chi[-1] for c in chi]
    p_next[-1] = type(p_next[-1])(1)

    b, u = _descend(p_top, p_next, exact)
    resid = _forward_residual(p_top, b, u)
    tol = 0 if exact else REMAINDER_RTOL * max(1.0, max(abs(c) for c in p_top))
    if resid > tol:
        raise DegreeDefect(0, float(resid))

    if exact:
        u_orig = [un * half * half for un in u]
        sites = [float(bn * half + mid) for bn in b]
        couplings = [math.sqrt(float(v)) for v in u_orig]
        per_step = tuple(float(v) for v in u_orig)
    else:
        h, m = float(half), float(mid)
        sites = [bn * h + m for bn in b]
        couplings = [math.sqrt(un) * h for un in u]
        per_step = tuple(un * h * h for un in u)

    lattice = LatticeSpec(
        couplings,
        sites,
        meta={"source": "reconstruct", "arithmetic": "exact" if exact else "float64"},
    )
    spec_err, mirror = verify_roundtrip(spectrum, lattice)
    return ReconstructionReport(lattice, spec_err, mirror, per_step)


def verify_roundtrip(spectrum: Spectrum, lattice: LatticeSpec) -> tuple[float, float]:
    """``(eigenvalue defect, mirror defect)``, both relative.

    The eigenvalue defect is the largest ``|eig - lambda|`` divided by the
    spectral radius; the mirror defect is divided by the largest matrix entry.
    """
    if lattice.n_max != spectrum.n_max:
        raise ValueError("spectrum and lattice sizes disagree")
    lam = spectrum.eigenvalues
    eig = eigvalsh_tridiagonal(lattice.site_constants, lattice.couplings)
    radius = float(np.max(np.abs(lam))) or 1.0
    entry = max(float(np.max(np.abs(lattice.site_constants))), float(np.max(lattice.couplings)))
    return float(np.max(np.abs(eig - lam))) / radius, mirror_defect(lattice) / entry
