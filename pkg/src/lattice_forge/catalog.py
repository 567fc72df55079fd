"""Analytic lattices with perfect state transfer.

Five families are available, each given by a closed-form spectrum and the
mirror-symmetric couplings that the inverse problem returns for it:

========================  ==============================================
``krawtchouk``            linear spectrum ``beta (s - N/2)``
``para_krawtchouk``       bi-lattice of two linear lattices shifted by ``delta``
``dual_hahn``             quadratic ``beta s (s + 2 gamma + 1)``
``q_racah``               exponential ``beta (q^(N/2-s) - q^(s-N/2))``, ``q + 1/q = K``
``para_racah``            quadratic bi-lattice ``beta (s+a)^2``, ``beta (s+c)^2``
========================  ==============================================

:func:`predict_transport` turns the closed-form FR/PST relations of each
family into concrete distances and mixing angles, and
:func:`nnn_krawtchouk_prediction` does the same for the pentadiagonal
``alpha J^2 + beta J`` built on Krawtchouk couplings.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .conditions import canonical_angle, fr_from_integer_gaps, pst_from_integer_gaps, rationalize
from .errors import InvalidParams, NonMonotoneSpectrum, UnsupportedParamRegion
from .lattice import LatticeSpec, Spectrum

__all__ = [
    "FAMILIES",
    "ModelParams",
    "TransportPrediction",
    "spectrum",
    "couplings",
    "predict_transport",
    "nnn_krawtchouk_prediction",
    "q_racah_values",
    "para_racah_j",
]

FAMILIES = ("krawtchouk", "para_krawtchouk", "dual_hahn", "q_racah", "para_racah")
N_EVENTS = 3
SEARCH_LIMIT = 10_000


@dataclass(frozen=True)
class ModelParams:
    """Family name, size ``n_max = N`` and the family's parameters.

    Only the parameters relevant to ``family`` are read; each is range-checked
    on construction.
    """

    family: str
    n_max: int
    beta: float = 1.0
    delta: float | None = None  # para_krawtchouk, 0 < delta < 2
    gamma: float | None = None  # dual_hahn, gamma > -1
    big_k: int | None = None  # q_racah, integer K > 2
    a: float | None = None  # para_racah
    c: float | None = None  # para_racah
    j_split: int | None = None  # para_racah truncation; (N-1)/2 or N/2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParams(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidParams(f"n must be an integer >= 1, got {self.n_max!r}")
        if not self.beta > 0:
            raise InvalidParams(f"beta must be positive, got {self.beta!r}")
        fam = self.family
        if fam == "para_krawtchouk":
            if self.delta is None or not 0 < self.delta < 2:
                raise InvalidParams(f"delta out of (0,2): {self.delta!r}")
        elif fam == "dual_hahn":
            if self.gamma is None or not self.gamma > -1:
                raise InvalidParams(f"gamma must exceed -1: {self.gamma!r}")
        elif fam == "q_racah":
            if self.big_k is None or int(self.big_k) != self.big_k or self.big_k <= 2:
                raise InvalidParams(f"K must be an integer > 2: {self.big_k!r}")
        elif fam == "para_racah":
            a, c = self.a, self.c
            if a is None or c is None:
                raise InvalidParams("para_racah needs both a and c")
            if not (a > -0.5 and abs(a) < c < abs(a + 1)):
                raise InvalidParams(f"para_racah needs a > -1/2 and |a| < c < |a+1|; got a={a!r}, c={c!r}")
            expected = para_racah_j(self.n_max)
            if self.j_split is not None and self.j_split != expected:
                raise InvalidParams(f"j_split must be {expected} for N={self.n_max}, got {self.j_split!r}")

    @property
    def q(self) -> float:
        k = self.big_k
        return k / 2 - math.sqrt(k * k / 4 - 1)

    def to_json(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        if self.family == "para_racah":
            d["j_split"] = para_racah_j(self.n_max)
        return d


@dataclass(frozen=True)
class TransportPrediction:
    """A predicted PST or FR distance, or a ``"none"`` entry explaining why there is none.

    ``mixing_angle`` is canonical (in ``[0, pi/2]``); ``raw_angle`` is the value
    the closed form produces.  ``phase`` is ``phi`` in ``mu = exp(i phi) cos(theta)``.
    """

    kind: str
    distance: float
    mixing_angle: float
    phase: float
    constraint_note: str = ""
    raw_angle: float = float("nan")
    integers: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("PST", "FR", "none"):
            raise ValueError(f"bad prediction kind {self.kind!r}")
        if not self.distance > 0:
            raise ValueError("prediction distance must be positive")

    @property
    def balanced(self) -> bool:
        return self.kind == "FR" and abs(self.mixing_angle - math.pi / 4) < 1e-9

    def to_json(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else None

        return {
            "kind": self.kind,
            "distance": num(self.distance),
            "mixing_angle": num(self.mixing_angle),
            "raw_angle": num(self.raw_angle),
            "phase": num(self.phase),
            "constraint_note": self.constraint_note,
            "integers": dict(self.integers),
        }


def _none(note: str) -> TransportPrediction:
    return TransportPrediction("none", math.inf, float("nan"), float("nan"), note)


def para_racah_j(n_max: int) -> int:
    return (n_max - 1) // 2 if n_max % 2 else n_max // 2


def q_racah_values(n_max: int, q: float) -> np.ndarray:
    """``q^(N/2-s) - q^(s-N/2)`` for ``s = 0..N``; increasing for ``0 < q < 1``."""
    s = np.arange(n_max + 1)
    return q ** (n_max / 2 - s) - q ** (s - n_max / 2)


def _spectrum_values(p: ModelParams) -> np.ndarray:
    n = p.n_max
    s = np.arange(n + 1, dtype=float)
    if p.family == "krawtchouk":
        return s - n / 2
    if p.family == "para_krawtchouk":
        d = p.delta
        return s - (n - 1 + d) / 2 + (d - 1) / 2 * (1 - (-1.0) ** s)
    if p.family == "dual_hahn":
        return s * (s + 2 * p.gamma + 1)
    if p.family == "q_racah":
        return q_racah_values(n, p.q)
    half = np.floor(s / 2)
    return np.where(s % 2 == 0, (half + p.a) ** 2, (half + p.c) ** 2)


def spectrum(params: ModelParams) -> Spectrum:
    """Closed-form spectrum, ``values`` unscaled and ``scale = beta``."""
    vals = _spectrum_values(params)
    if np.any(np.diff(vals) <= 0):
        raise NonMonotoneSpectrum(f"{params.family} spectrum is not strictly increasing for {params}")
    return Spectrum(vals, params.beta)


def _sqrt(radicand, family):
    r = np.asarray(radicand, dtype=float)
    if np.any(r <= 0):
        raise UnsupportedParamRegion(f"{family}: coupling radicand not positive")
    return np.sqrt(r)


def couplings(params: ModelParams) -> LatticeSpec:
    """Closed-form mirror-symmetric couplings ``J_1..J_N`` and constants ``B_0..B_N``.

    ``beta`` multiplies every ``J_n`` and ``B_n`` so the eigenvalues are exactly
    ``spectrum(params).eigenvalues``.
    """
    p = params
    n_max, beta = p.n_max, p.beta
    n = np.arange(1, n_max + 1, dtype=float)  # coupling index
    m = np.arange(n_max + 1, dtype=float)  # site index
    fam = p.family
    if fam == "krawtchouk":
        j = 0.5 * np.sqrt(n * (n_max - n + 1))
        b = np.zeros(n_max + 1)
    elif fam == "para_krawtchouk":
        d = p.delta
        if n_max % 2:
            j = 0.5 * _sqrt(
                n * (n_max + 1 - n) * ((n_max + 1 - 2 * n) ** 2 - d * d)
                / ((n_max - 2 * n) * (n_max - 2 * n + 2)),
                fam,
            )
            b = np.zeros(n_max + 1)
        else:
            j = 0.5 * _sqrt(
                n * (n_max + 1 - n) * ((2 * n - n_max - 1) ** 2 - (d - 1) ** 2) / (2 * n - n_max - 1) ** 2,
                fam,
            )
            b = (d - 1) * (n_max + 1) / 4 * (1 / (2 * m - n_max - 1) - 1 / (2 * m + 1 - n_max))
    elif fam == "dual_hahn":
        g = p.gamma
        k = n - 1
        j = _sqrt((k + 1) * (n_max - k) * (g + n_max - k) * (g + k + 1), fam)
        b = 2 * m * (n_max - m) + (g + 1) * n_max
    elif fam == "q_racah":
        q = p.q
        j = _sqrt(
            (1 - q ** (2 * n)) * (q ** (2 * (n - n_max - 1)) - 1)
            / ((1 + q ** (2 * n - n_max - 2)) * (1 + q ** (2 * n - n_max))),
            fam,
        )
        b = np.zeros(n_max + 1)
    else:
        a, c = p.a, p.c
        js = para_racah_j(n_max)
        if n_max % 2:
            b = 0.5 * (a * (a + js) + c * (c + js) + m * (n_max - m))
            j = _sqrt(
                n * (n_max + 1 - n) * (n_max - n + a + c) * (n - 1 + a + c)
                * ((n - js - 1) ** 2 - (a - c) ** 2)
                / (4 * (n_max - 2 * n) * (n_max - 2 * n + 2)),
                fam,
            )
        else:
            j = _sqrt(
                n * (n_max + 1 - n) * (n - 1 + a + c) * (n_max - n + a + c)
                * (n - js + a - c) * (n - js + c - a - 1)
                / (4 * (n_max - 2 * n + 1) ** 2),
                fam,
            )
            e = 1 + 2 * a - 2 * c
            b = (
                0.5 * (a * a + c * c + m - m * m)
                + 0.25 * (2 * m + a + c) * (n_max - 1)
                + (m + 1) * (m + a + c) * e / (4 * (1 + 2 * m - n_max))
                + m * (m - 1 + a + c) * e / (4 * (1 - 2 * m + n_max))
            )
    return LatticeSpec(beta * j, beta * b, meta={"family": fam, "params": p.to_json()})


# -- transport predictions ---------------------------------------------------


def _phase(z: float, theta_raw: float, lam0: float, n_max: int) -> float:
    sign_n = 1 if n_max % 2 == 0 else -1
    return math.remainder(-z * lam0 - sign_n * theta_raw, 2 * math.pi)


def _fr(z, theta_raw, lam0, n_max, **ints) -> TransportPrediction:
    theta = canonical_angle(theta_raw)
    note = "balanced" if abs(theta - math.pi / 4) < 1e-12 else ""
    return TransportPrediction("FR", z, theta, _phase(z, theta_raw, lam0, n_max), note, theta_raw, ints)


def _pst(z, lam0, n_max, note="", **ints) -> TransportPrediction:
    return TransportPrediction("PST", z, math.pi / 2, _phase(z, math.pi / 2, lam0, n_max), note, math.pi / 2, ints)


def _half_turns(x: Fraction) -> str:
    """Classify ``theta = x * pi / 2`` as exact PST (odd), return (even) or genuine FR."""
    if x.denominator != 1:
        return "FR"
    return "PST" if x.numerator % 2 else "return"


def _two_site(p: ModelParams, lam) -> list[TransportPrediction]:
    gap = float(lam[1] - lam[0])
    out = [_pst((2 * m + 1) * math.pi / gap, float(lam[0]), 1, f"odd multiple {2 * m + 1}") for m in range(N_EVENTS)]
    out.append(_none("two-site lattice: every distance is a revival; no discrete FR events"))
    return out


def _rational_or_none(x, name):
    f = rationalize(x)
    if f is None:
        return None, _none(f"{name}={x!r} is not rational (denominator <= 1e6); constraint unsatisfiable")
    return f, None


def predict_transport(params: ModelParams) -> list[TransportPrediction]:
    """Minimal PST/FR events (the smallest plus the next two of each kind).

    Constraints that fail (irrational parameters, wrong parity) are reported
    as ``kind="none"`` entries, never raised.
    """
    p = params
    spec = spectrum(p)
    lam = spec.eigenvalues
    lam0 = float(lam[0])
    n_max, beta = p.n_max, p.beta
    if n_max == 1:
        return _two_site(p, lam)
    fam = p.family
    out: list[TransportPrediction] = []

    if fam == "krawtchouk":
        out += [_pst(q * math.pi / beta, lam0, n_max, f"q={q} odd", q=q) for q in (1, 3, 5)]
        out.append(_none("theta = (-1)^N pi (c0 - c1) / 2 is a multiple of pi/2: FR does not occur"))
        return out

    if fam == "para_krawtchouk":
        d = p.delta
        dfrac = rationalize(d)
        sign_n = 1 if n_max % 2 == 0 else -1
        k = 1
        while sum(e.kind == "FR" for e in out) < N_EVENTS and k <= SEARCH_LIMIT:
            theta_raw = sign_n * math.pi * d * k / 2  # c0 = k, c1 = 0
            exact = _half_turns(dfrac * k) if dfrac is not None else "FR"
            if exact == "FR":
                out.append(_fr(k * math.pi / beta, theta_raw, lam0, n_max, c0=k, c1=0))
            k += 1
        if dfrac is None:
            out.append(_none(f"delta={d!r} is irrational: PST needs delta = p/q with p odd"))
        elif dfrac.numerator % 2 == 0:
            out.append(_none(f"delta={dfrac} has an even numerator: PST needs delta = p/q with p odd"))
        else:
            q = dfrac.denominator
            for m in (1, 3, 5):
                kk = q * m
                c1 = (dfrac.numerator * m - 1) // 2
                c0 = kk - c1 - 1
                out.append(_pst(kk * math.pi / beta, lam0, n_max, f"delta=(2c1+1)/(c0+c1+1)={dfrac}", c0=c0, c1=c1))
        return out

    if fam == "dual_hahn":
        g, bad = _rational_or_none(p.gamma, "gamma")
        if bad:
            return [bad]
        sign_n = 1 if n_max % 2 == 0 else -1
        c1 = 1
        while sum(e.kind == "FR" for e in out) < N_EVENTS and c1 <= SEARCH_LIMIT:
            two_s = c1 * (2 * g + 1)  # = 2 (c0 + c0')
            if two_s.denominator == 1 and two_s.numerator % 2 == 0:
                s_sum = two_s.numerator // 2
                x = Fraction(c1, 2) + s_sum  # theta = (-1)^N (pi c1/4 + pi (c0 - c0')/2) = x pi/2
                if _half_turns(x) == "FR":
                    out.append(_fr(c1 * math.pi / (2 * beta), sign_n * float(x) * math.pi / 2, lam0, n_max,
                                   c1=c1, c0=s_sum, c0p=0))
            c1 += 1
        if not any(e.kind == "FR" for e in out):
            out.append(_none(f"gamma={g}: no c1 <= {SEARCH_LIMIT} with c1 (2 gamma + 1) even"))
        pst = []
        c1 = 1
        while len(pst) < N_EVENTS and c1 <= SEARCH_LIMIT:
            odd = 2 * c1 * g
            if odd.denominator == 1 and odd.numerator % 2:
                pst.append(_pst(c1 * math.pi / beta, lam0, n_max, f"gamma=(2c0+1)/(2c1)={g}",
                                c1=c1, c0=(odd.numerator - 1) // 2))
            c1 += 1
        out += pst or [_none(f"gamma={g} is not of the form p/(2q) with p odd: no PST")]
        if n_max < 3:
            out.append(_none("N < 3: FR closed form assumes at least two second differences; more events may exist"))
        return out

    if fam == "q_racah":
        return _q_racah_predictions(p, lam0)

    return _para_racah_predictions(p, lam0)


def _q_racah_integers(p: ModelParams):
    """``lambda_s = beta * unit * n_s`` with integer ``n_s`` (exact Chebyshev-type recurrence)."""
    k, n_max = p.big_k, p.n_max
    if n_max % 2:
        unit = math.sqrt(k - 2)  # q^(-1/2) - q^(1/2)
        seq = {1: 1, -1: -1}
        start = 1
    else:
        unit = math.sqrt(k * k - 4)  # q^(-1) - q
        seq = {0: 0, 2: 1, -2: -1}
        start = 2
    m = start
    while m + 2 <= n_max:
        seq[m + 2] = k * seq[m] - seq[m - 2]
        seq[-(m + 2)] = -seq[m + 2]
        m += 2
    return unit, [-seq[n_max - 2 * s] for s in range(n_max + 1)]


def _q_racah_predictions(p: ModelParams, lam0: float) -> list[TransportPrediction]:
    unit, ints = _q_racah_integers(p)
    gaps = [ints[s] - ints[s - 1] for s in range(1, len(ints))]
    g = math.gcd(*gaps)
    red = [x // g for x in gaps]
    step = p.beta * unit * g
    out: list[TransportPrediction] = []
    pst = pst_from_integer_gaps(step, red)
    # scan far enough to see N_EVENTS revivals whatever their labels
    second = math.gcd(*[red[s] + red[s + 1] for s in range(len(red) - 1)])
    horizon = 2 * math.pi * 4 * (N_EVENTS + 1) / (step * second)
    events = fr_from_integer_gaps(step, red, lam0, horizon)
    for e in events:
        if e.kind == "FR" and sum(x.kind == "FR" for x in out) < N_EVENTS:
            q_int = ((1 if p.n_max % 2 == 0 else -1) * e.theta_raw * (p.big_k + 2)
                     + e.phi * (p.big_k - 2)) / (2 * math.pi)
            # the angle/phase relation through an integer Q; kept only when Q is integral
            ints = {"Q": round(q_int)} if abs(q_int - round(q_int)) < 1e-6 else {}
            out.append(TransportPrediction("FR", e.distance, e.theta, e.phi,
                                           "balanced" if e.balanced else "", e.theta_raw, ints))
    if not any(x.kind == "FR" for x in out):
        why = "N even: the central eigenvalue is 0, forcing theta to a multiple of pi/2" if p.n_max % 2 == 0 \
            else "no genuine FR among the revival distances"
        out.append(_none(why))
    if pst is None:
        out.append(_none(f"K={p.big_k}: gaps are not all odd multiples of a common unit; no PST"))
    else:
        z0, mult = pst
        out += [_pst(z0 * m, lam0, p.n_max, f"odd multiple {m}", M=list(mult)) for m in (1, 3, 5)]
    return out


def _para_racah_predictions(p: ModelParams, lam0: float) -> list[TransportPrediction]:
    a, bad_a = _rational_or_none(p.a, "a")
    c, bad_c = _rational_or_none(p.c, "c")
    if bad_a or bad_c:
        return [bad_a or bad_c]
    n_max, beta = p.n_max, p.beta
    out: list[TransportPrediction] = []
    pst: list[TransportPrediction] = []
    t = 1
    while (sum(e.kind == "FR" for e in out) < N_EVENTS or len(pst) < N_EVENTS) and t <= SEARCH_LIMIT:
        c1p = t * (c - a)
        if c1p.denominator == 1:
            c1p = int(c1p)
            c1 = t - c1p
            two_s = t * (a + c) - c1  # = 2 (c0 + c0')
            if two_s.denominator == 1 and two_s.numerator % 2 == 0 and sum(e.kind == "FR" for e in out) < N_EVENTS:
                s_sum = two_s.numerator // 2
                # c0 = s_sum, c0' = 0
                x = Fraction(-(2 * s_sum * c1p + c1 * c1p), t)  # theta = (-1)^(N+1) x pi / 2
                if _half_turns(x) == "FR":
                    sign = -1 if n_max % 2 == 0 else 1
                    out.append(_fr(t * math.pi / beta, sign * float(x) * math.pi / 2, lam0, n_max,
                                   c1=c1, c1p=c1p, c0=s_sum, c0p=0))
            odd0 = c1 * (a + c - 1)  # 2 c0 + 1
            odd1 = c1p * (a + c)  # 2 c0' + 1
            if (len(pst) < N_EVENTS and odd0.denominator == 1 and odd1.denominator == 1
                    and odd0.numerator % 2 and odd1.numerator % 2):
                pst.append(_pst(t * math.pi / beta, lam0, n_max, "", c1=c1, c1p=c1p,
                                c0=(odd0.numerator - 1) // 2, c0p=(odd1.numerator - 1) // 2))
        t += 1
    if not any(e.kind == "FR" for e in out):
        out.append(_none(f"a={a}, c={c}: no FR with c1 + c1' <= {SEARCH_LIMIT}"))
    out += pst or [_none(f"a={a}, c={c}: PST parity conditions fail for c1 + c1' <= {SEARCH_LIMIT}")]
    if n_max < 5:
        out.append(_none("N < 5: closed forms assume two gaps of each parity; more events may exist"))
    return out


def nnn_krawtchouk_prediction(n_max: int, alpha_nnn: float, beta_nnn: float) -> list[TransportPrediction]:
    """PST/FR for ``alpha J^2 + beta J`` with unit-scale Krawtchouk ``J``.

    The NNN spectrum is ``alpha l^2 + beta l`` with ``l_s = s - N/2``.  FR sits
    at ``Z = pi c1 / (2 alpha)`` whenever ``c1 (beta/alpha - N) / 2`` is an
    integer ``S``, with ``theta = (-1)^N (pi c1 / 4 + pi S / 2)``; PST sits at
    ``Z = pi c1 / alpha`` whenever ``c1 (beta/alpha - N - 1)`` is odd.
    """
    if alpha_nnn == 0:
        if beta_nnn <= 0:
            return [_none("alpha = 0 needs beta > 0")]
        return predict_transport(ModelParams("krawtchouk", n_max, beta_nnn))
    lam = np.arange(n_max + 1) - n_max / 2
    mu0 = float(alpha_nnn * lam[0] ** 2 + beta_nnn * lam[0])
    rho, bad = _rational_or_none(beta_nnn / alpha_nnn, "beta/alpha")
    if bad:
        return [bad]
    sgn = 1 if alpha_nnn > 0 else -1
    a_abs = abs(alpha_nnn)
    sign_n = 1 if n_max % 2 == 0 else -1
    out: list[TransportPrediction] = []
    m = 1
    while sum(e.kind == "FR" for e in out) < N_EVENTS and m <= SEARCH_LIMIT:
        c1 = sgn * m
        s2 = c1 * (rho - n_max)
        if s2.denominator == 1 and s2.numerator % 2 == 0:
            s_sum = s2.numerator // 2
            x = Fraction(c1, 2) + s_sum
            if _half_turns(x) == "FR":
                out.append(_fr(m * math.pi / (2 * a_abs), sign_n * float(x) * math.pi / 2, mu0, n_max,
                               c1=c1, c0=s_sum, c0p=0))
        m += 1
    if not any(e.kind == "FR" for e in out):
        out.append(_none(f"beta/alpha={rho}: no genuine FR"))
    pst = []
    m = 1
    while len(pst) < N_EVENTS and m <= SEARCH_LIMIT:
        c1 = sgn * m
        odd = c1 * (rho - (n_max + 1))
        if odd.denominator == 1 and odd.numerator % 2:
            pst.append(_pst(m * math.pi / a_abs, mu0, n_max, f"beta/alpha=(2c0+1)/c1+(N+1)={rho}",
                            c1=c1, c0=(odd.numerator - 1) // 2))
        m += 1
    out += pst or [_none(f"beta/alpha={rho} is not (2c0+1)/c1 + (N+1): no PST")]
    if n_max < 3:
        out.append(_none("N < 3: FR closed form assumes at least two second differences; more events may exist"))
    return out
