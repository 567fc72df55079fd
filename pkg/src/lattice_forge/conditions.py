"""PST and FR conditions read off the spectrum of a mirror-symmetric lattice.

With ``chi_N(lambda_s) = (-1)**(N+s)`` the evolved end amplitudes at distance
``Z`` are fixed by the phases ``exp(-i Z lambda_s)``:

* PST needs every gap ``lambda_s - lambda_{s-1}`` to equal ``pi * M_s / Z``
  with ``M_s`` odd.
* FR with mixing angle ``theta`` needs ``Z (lambda_s - lambda_{s-1}) =
  -2 (-1)**(N+s) theta (mod 2 pi)`` for every ``s``.  Eliminating ``theta``
  between neighbouring gaps leaves ``Z (lambda_{s+1} - lambda_{s-1})`` in
  ``2 pi Z``, so the FR distances form the lattice generated by the gcd of
  the second differences, and ``theta`` then follows from any single gap.

Gap ratios are turned into exact fractions (continued fractions, bounded
denominator), after which the odd/even bookkeeping is done in integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .lattice import Spectrum

__all__ = [
    "PSTCondition",
    "FRCondition",
    "ConditionReport",
    "rationalize",
    "canonical_angle",
    "check_pst",
    "check_fr",
    "check_pst_nnn",
    "integer_valued_basis",
    "analyze_spectrum",
    "pst_from_integer_gaps",
    "fr_from_integer_gaps",
]

MAX_DENOMINATOR = 10**6
RATIONAL_TOL = 1e-9
FR_HORIZON = 20.0  # in units of pi / scale
MAX_FR_EVENTS = 100


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Fraction with the smallest denominator in ``[lo, hi]`` (continued-fraction descent)."""
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -_simplest_between(-hi, -lo)
    n = math.floor(lo)
    if n == lo or n + 1 <= hi:
        return Fraction(n if n == lo else n + 1)
    return n + 1 / _simplest_between(1 / (hi - n), 1 / (lo - n))


def rationalize(x: float, tol: float = RATIONAL_TOL, max_denominator: int = MAX_DENOMINATOR):
    """Simplest fraction within ``tol`` (relative) of ``x``, or None if its denominator exceeds the cap.

    Every real lies within ``1/q**2`` of some ``p/q``, so with the default
    tolerance and cap any float is accepted; what the routine guarantees is
    that exact rationals with small denominators come back exactly.
    """
    if not math.isfinite(x):
        return None
    eps = Fraction(tol * max(1.0, abs(x)))
    xf = Fraction(float(x))
    f = _simplest_between(xf - eps, xf + eps)
    return f if f.denominator <= max_denominator else None


def canonical_angle(theta: float) -> float:
    """Representative of ``theta`` in ``[0, pi/2]`` under ``theta -> -theta`` and ``theta -> theta + pi``."""
    t = math.fmod(theta, math.pi)
    if t < 0:
        t += math.pi
    return min(t, math.pi - t)


def _wrap(phi: float) -> float:
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _as_integers(values: Sequence[float], tol: float, max_denominator: int):
    """Write ``values = unit * n_s`` with coprime integers ``n_s``; None if not commensurate.

    ``unit`` is positive; the integers carry the signs.
    """
    ref = min(abs(v) for v in values)
    if ref == 0:
        return None
    fracs = []
    for v in values:
        f = rationalize(v / ref, tol, max_denominator)
        if f is None:
            return None
        fracs.append(f)
    den = reduce(_lcm, (f.denominator for f in fracs), 1)
    if den > max_denominator:
        return None
    ints = [int(f * den) for f in fracs]
    g = reduce(math.gcd, (abs(n) for n in ints))
    return ref * g / den, [n // g for n in ints]


@dataclass(frozen=True)
class PSTCondition:
    distance: float
    multipliers: tuple[int, ...]

    def to_json(self):
        return {"distance": self.distance, "multipliers": list(self.multipliers)}


@dataclass(frozen=True)
class FRCondition:
    """One distance at which the excitation sits only on the two end sites.

    ``theta`` is the canonical mixing angle in ``[0, pi/2]`` and ``theta_raw``
    the representative in ``[0, pi)`` that the integer sequences ``l_even``
    (gaps ``lambda_{2s} - lambda_{2s-1}``) and ``l_odd`` (gaps
    ``lambda_{2s+1} - lambda_{2s}``) refer to.
    """

    theta: float
    theta_raw: float
    phi: float
    distance: float
    l_even: tuple[int, ...]
    l_odd: tuple[int, ...]
    kind: str  # "FR", "PST" or "return"

    @property
    def balanced(self) -> bool:
        return self.kind == "FR" and abs(self.theta - math.pi / 4) < 1e-9

    def to_json(self):
        return {
            "kind": self.kind,
            "distance": self.distance,
            "theta": self.theta,
            "theta_raw": self.theta_raw,
            "phi": self.phi,
            "l_even": list(self.l_even),
            "l_odd": list(self.l_odd),
        }


@dataclass(frozen=True)
class ConditionReport:
    pst: PSTCondition | None
    fr: tuple[FRCondition, ...]
    notes: tuple[str, ...] = field(default=())

    def to_json(self):
        return {
            "pst": None if self.pst is None else self.pst.to_json(),
            "fr": [f.to_json() for f in self.fr],
            "notes": list(self.notes),
        }


def pst_from_integer_gaps(unit: float, gaps: Sequence[int]):
    """PST for gaps ``unit * gaps`` (coprime integers): ``(Z_min, M_s)`` or None."""
    if any(g % 2 == 0 for g in gaps):
        return None
    return math.pi / unit, tuple(int(g) for g in gaps)


def fr_from_integer_gaps(unit: float, gaps: Sequence[int], eigenvalue0: float, horizon: float,
                         max_events: int = MAX_FR_EVENTS) -> list[FRCondition]:
    """FR events up to ``horizon`` for integer gaps ``unit * gaps`` (N = len(gaps) >= 2).

    Everything except the phase is computed in integers, so the PST/return
    labels are exact.
    """
    n = len(gaps)
    second = [gaps[s] + gaps[s + 1] for s in range(n - 1)]
    d = reduce(math.gcd, (abs(v) for v in second))
    if d == 0:
        return []
    # Z_k = 2 pi k / (unit * d);  2 theta / pi = -eps_1 Z g_1 / pi = -eps_1 2 k g_1 / d
    eps1 = 1 if (n + 1) % 2 == 0 else -1
    out = []
    k = 1
    while len(out) < max_events:
        z = 2 * math.pi * k / (unit * d)
        if z > horizon * (1 + 1e-12):
            break
        two_theta_over_pi = Fraction(-eps1 * 2 * k * gaps[0], d) % 2  # in [0, 2)
        theta_raw = float(two_theta_over_pi) * math.pi / 2
        if two_theta_over_pi == 1:
            kind = "PST"
        elif two_theta_over_pi == 0:
            kind = "return"
        else:
            kind = "FR"
        out.append(_fr_entry(z, theta_raw, kind, [unit * g for g in gaps], eigenvalue0, n))
        k += 1
    return out


def _fr_entry(z, theta_raw, kind, gaps, eigenvalue0, n):
    sign_n = 1 if n % 2 == 0 else -1
    l_even = tuple(
        round((z * gaps[t - 1] + sign_n * 2 * theta_raw) / (2 * math.pi)) for t in range(2, n + 1, 2)
    )
    l_odd = tuple(
        round((z * gaps[t - 1] - sign_n * 2 * theta_raw) / (2 * math.pi)) for t in range(1, n + 1, 2)
    )
    phi = _wrap(-z * eigenvalue0 - sign_n * theta_raw)
    return FRCondition(canonical_angle(theta_raw), theta_raw, phi, z, l_even, l_odd, kind)


def check_pst(spectrum: Spectrum, tol: float = RATIONAL_TOL, max_denominator: int = MAX_DENOMINATOR):
    """Minimal PST distance and odd multipliers for ``spectrum``, or None.

    The gaps are first written as ``unit * M_s`` with coprime integers; PST
    exists iff every ``M_s`` is odd, and then ``Z_PST = pi / unit``.
    """
    gaps = np.diff(spectrum.eigenvalues)
    rep = _as_integers(gaps, tol, max_denominator)
    if rep is None:
        return None
    res = pst_from_integer_gaps(*rep)
    return None if res is None else PSTCondition(*res)


def check_fr(spectrum: Spectrum, tol: float = RATIONAL_TOL, horizon: float | None = None,
             max_denominator: int = MAX_DENOMINATOR, max_events: int = MAX_FR_EVENTS) -> list[FRCondition]:
    """All end-to-end revival distances in ``(0, horizon]``, ascending.

    ``horizon`` defaults to ``20 pi / spectrum.scale``.  Entries with
    ``theta`` a multiple of ``pi/2`` are labelled ``"PST"`` or ``"return"``;
    the rest are genuine FR.  A two-site spectrum revives at every distance and
    yields an empty list.
    """
    if horizon is None:
        horizon = FR_HORIZON * math.pi / spectrum.scale
    lam = spectrum.eigenvalues
    n = spectrum.n_max
    if n < 2:
        return []
    gaps = np.diff(lam)
    second = gaps[:-1] + gaps[1:]
    rep = _as_integers(second, tol, max_denominator)
    if rep is None:
        return []
    sunit, sints = rep
    d = reduce(math.gcd, (abs(v) for v in sints))
    # the first gap in units of the second-difference unit decides whether theta/pi is rational
    g1 = rationalize(gaps[0] / sunit, tol, max_denominator)
    out = []
    k = 1
    while len(out) < max_events:
        z = 2 * math.pi * k / (sunit * d)
        if z > horizon * (1 + 1e-12):
            break
        eps1 = 1 if (n + 1) % 2 == 0 else -1
        if g1 is not None:
            two = Fraction(-eps1 * 2 * k) * g1 / d % 2
            theta_raw = float(two) * math.pi / 2
            kind = "PST" if two == 1 else "return" if two == 0 else "FR"
        else:
            theta_raw = math.fmod(-eps1 * z * gaps[0] / 2, math.pi) % math.pi
            kind = "FR"
        out.append(_fr_entry(z, theta_raw, kind, list(gaps), float(lam[0]), n))
        k += 1
    return out


def check_pst_nnn(spectrum: Spectrum, alpha_nnn: float, beta_nnn: float, tol: float = RATIONAL_TOL,
                  max_denominator: int = MAX_DENOMINATOR):
    """PST for the pentadiagonal ``alpha J**2 + beta J`` built on a lattice with ``spectrum``.

    The gaps ``(l_s - l_{s-1}) (alpha (l_s + l_{s-1}) + beta)`` are taken in the
    original eigenvalue order, because the parity ``chi_N(lambda_s) = (-1)**(N+s)``
    stays attached to that order; multipliers may therefore be negative.
    A transform that maps two eigenvalues onto the same value gives None.
    """
    lam = spectrum.eigenvalues
    mu = alpha_nnn * lam**2 + beta_nnn * lam
    spread = float(np.ptp(mu))
    if spread == 0 or np.min(np.diff(np.sort(mu))) <= 1e-12 * spread:
        return None
    gaps = np.diff(mu)
    rep = _as_integers(gaps, tol, max_denominator)
    if rep is None:
        return None
    res = pst_from_integer_gaps(*rep)
    return None if res is None else PSTCondition(*res)


def integer_valued_basis(poly_values: Sequence[float], tol: float = RATIONAL_TOL):
    """Coefficients ``c_n`` of ``p(s) = sum_n c_n * binom(s, n)`` if all are integers.

    ``poly_values`` are ``p(0), ..., p(N)``; ``c_n`` is the n-th forward
    difference at zero.
    """
    vals = np.array(poly_values, dtype=float)
    coeffs = []
    while vals.size:
        coeffs.append(vals[0])
        vals = np.diff(vals)
    out = []
    for c in coeffs:
        r = round(c)
        if abs(c - r) > tol * max(1.0, abs(c)):
            return None
        out.append(int(r))
    return out


def analyze_spectrum(spectrum: Spectrum, tol: float = RATIONAL_TOL, horizon: float | None = None,
                     nnn: tuple[float, float] | None = None) -> ConditionReport:
    notes = ["conditions assume a mirror-symmetric lattice (chi_N(lambda_s) = (-1)^(N+s))"]
    if nnn is not None:
        a, b = nnn
        pst = check_pst_nnn(spectrum, a, b, tol)
        lam = spectrum.eigenvalues
        mu = a * lam**2 + b * lam
        notes.append(f"NNN transform alpha={a!r}, beta={b!r}; FR checked on the transformed spectrum")
        order_ok = np.all(np.diff(mu) > 0)
        fr = check_fr(Spectrum(mu), tol, horizon or FR_HORIZON * math.pi / spectrum.scale) if order_ok else []
        if not order_ok:
            notes.append("transformed spectrum is not increasing; FR scan skipped")
    else:
        pst = check_pst(spectrum, tol)
        fr = check_fr(spectrum, tol, horizon)
    if spectrum.n_max == 1:
        notes.append("two-site lattice: the excitation only ever occupies the end sites")
    elif not fr:
        notes.append("no revival distance within the horizon")
    return ConditionReport(pst, tuple(fr), tuple(notes))
