"""``lattice-forge`` command line.

Subcommands
-----------
design       closed-form lattice from the catalog, plus a transport prediction report
reconstruct  mirror-symmetric lattice from a spectrum
verify       PST/FR conditions of a spectrum or lattice
simulate     amplitude trace (CSV) and detected events (JSON)
geometry     waveguide separations from the evanescent coupling law

Exit status: 0 success, 2 invalid parameters or unmet ``--require``, 3 file
I/O, 4 unparsable input, 5 reconstruction failure, 6 coupling above ``A``.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import catalog, conditions, inverse, transport
from .errors import (
    CouplingExceedsAmplitude,
    InvalidLattice,
    InvalidSpectrum,
    LatticeForgeError,
    NonPositiveLeadingCoefficient,
    NonPositiveWeight,
    ReconstructionError,
)
from .io import dumps, geometry_csv, read_json_arg, trace_csv, write_json, write_text
from .lattice import (
    GeometryParams,
    LatticeSpec,
    Spectrum,
    build_nnn,
    couplings_to_distances,
    validate_mirror_symmetry,
)

EXIT_PARAMS, EXIT_IO, EXIT_PARSE, EXIT_RECON, EXIT_AMPLITUDE = 2, 3, 4, 5, 6
STABLE_N = {"krawtchouk": 20, "para_krawtchouk": 20, "q_racah": 20, "dual_hahn": 15, "para_racah": 15}
TRACE_POINTS = 201


class ParseError(Exception):
    pass


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _emit(text: str, path: str | None) -> None:
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _load(value: str, what: str):
    try:
        return read_json_arg(value)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: not valid JSON ({exc})") from exc


def _spectrum(value: str, beta: float | None) -> Spectrum:
    obj = _load(value, "spectrum")
    try:
        spec = Spectrum.from_json(obj)
    except (InvalidSpectrum, TypeError, KeyError, ValueError) as exc:
        raise ParseError(f"spectrum: {exc}") from exc
    return Spectrum(spec.values, beta) if beta is not None else spec


def _lattice(value: str) -> LatticeSpec:
    obj = _load(value, "lattice")
    try:
        return LatticeSpec.from_json(obj)
    except (InvalidLattice, TypeError, KeyError, ValueError) as exc:
        raise ParseError(f"lattice: {exc}") from exc


def _params(args) -> catalog.ModelParams:
    return catalog.ModelParams(
        family=args.family,
        n_max=args.n,
        beta=args.beta,
        delta=args.delta,
        gamma=args.gamma,
        big_k=args.k,
        a=args.a,
        c=args.c,
        j_split=args.j_split,
    )


def _fmt_pred(p) -> str:
    if p.kind == "none":
        return f"  none: {p.constraint_note}"
    return f"  {p.kind:<4} Z={p.distance:.10g} theta={p.mixing_angle:.10g} phi={p.phase:.10g} {p.constraint_note}".rstrip()


def cmd_design(args) -> int:
    params = _params(args)
    if params.n_max > STABLE_N[params.family]:
        _warn(f"N={params.n_max} exceeds the tested range N <= {STABLE_N[params.family]} for {params.family}")
    spec = catalog.spectrum(params)
    lat = catalog.couplings(params)
    preds = catalog.predict_transport(params)
    report = {
        "meta": lat.meta,
        "spectrum": spec.to_json(),
        "predictions": [p.to_json() for p in preds],
        "conditions": conditions.analyze_spectrum(spec).to_json(),
    }
    if args.nnn_alpha is not None or args.nnn_beta is not None:
        if params.family != "krawtchouk":
            raise catalog.InvalidParams("--nnn-alpha/--nnn-beta apply to the krawtchouk family only")
        a = args.nnn_alpha if args.nnn_alpha is not None else 0.0
        b = args.nnn_beta if args.nnn_beta is not None else 1.0
        nnn = catalog.nnn_krawtchouk_prediction(params.n_max, a * params.beta**2, b * params.beta)
        report["nnn"] = {"alpha": a, "beta": b, "predictions": [p.to_json() for p in nnn]}
        preds = nnn
    _emit(dumps(lat.to_json()), args.out)
    if args.report:
        write_json(args.report, report)
    print(f"{params.family} N={params.n_max}:", file=sys.stderr)
    for p in preds:
        print(_fmt_pred(p), file=sys.stderr)
    if args.require:
        kind = args.require.upper()
        if not any(p.kind == kind for p in preds):
            notes = "; ".join(p.constraint_note for p in preds if p.kind == "none") or "no event found"
            print(f"error: required {kind} not available: {notes}", file=sys.stderr)
            return EXIT_PARAMS
    return 0


def cmd_reconstruct(args) -> int:
    spec = _spectrum(args.spectrum, args.beta)
    if spec.n_max > 20:
        _warn(f"N={spec.n_max} exceeds the tested range N <= 20")
    rep = inverse.reconstruct(spec, exact=args.arithmetic == "exact")
    _emit(dumps(rep.lattice.to_json()), args.out)
    line = f"residual_spectrum_error={rep.residual_spectrum_error:.3e} mirror_defect={rep.mirror_defect:.3e}"
    print(line, file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_verify(args) -> int:
    if (args.spectrum is None) == (args.lattice is None):
        raise ParseError("verify needs exactly one of --spectrum and --lattice")
    extra = []
    if args.spectrum is not None:
        spec = _spectrum(args.spectrum, args.beta)
    else:
        lat = _lattice(args.lattice)
        lam = eigvalsh_tridiagonal(lat.site_constants, lat.couplings)
        spec = Spectrum(lam)
        if not validate_mirror_symmetry(lat):
            extra.append("lattice is not mirror-symmetric: PST is impossible whatever the spectrum")
    nnn = None
    if args.nnn_alpha is not None or args.nnn_beta is not None:
        nnn = (args.nnn_alpha or 0.0, 1.0 if args.nnn_beta is None else args.nnn_beta)
    horizon = None if args.horizon is None else args.horizon
    rep = conditions.analyze_spectrum(spec, horizon=horizon, nnn=nnn)
    out = rep.to_json()
    out["notes"] = extra + out["notes"]
    if extra:
        out["pst"] = None
        out["fr"] = []
    _emit(dumps(out), args.out)
    return 0


def cmd_simulate(args) -> int:
    lat = _lattice(args.lattice)
    target = lat
    if args.nnn_alpha is not None or args.nnn_beta is not None:
        target = build_nnn(lat, args.nnn_alpha or 0.0, 1.0 if args.nnn_beta is None else args.nnn_beta)
    system = transport.eigendecompose(target)
    events = transport.detect_events(system, args.zmax, args.grid, args.threshold)
    notes = ["probabilities |E_n|^2 are on a linear scale"]
    if system.n_max == 1:
        notes.append("two-site lattice: every z is a revival; only extremes are listed")
    doc = {
        "meta": dict(target.meta),
        "z_max": args.zmax,
        "grid": args.grid,
        "threshold": args.threshold,
        "events": [e.to_json() for e in events],
        "notes": notes,
    }
    if args.trace:
        zs = np.linspace(0.0, args.zmax, args.trace_points)
        write_text(args.trace, trace_csv(zs, transport.amplitudes(system, zs, args.source)))
    _emit(dumps(doc), args.events)
    for e in events:
        print(f"  {e.kind:<6} z={e.z:.10g} theta={e.theta:.6g} leakage={e.leakage:.2e}", file=sys.stderr)
    return 0


def cmd_geometry(args) -> int:
    lat = _lattice(args.lattice)
    d = couplings_to_distances(lat, GeometryParams(args.amp_A, args.decay_C))
    _emit(geometry_csv(d), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lattice-forge", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="closed-form lattice from the catalog")
    d.add_argument("--family", required=True, choices=catalog.FAMILIES)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--beta", type=float, default=1.0)
    d.add_argument("--delta", type=float)
    d.add_argument("--gamma", type=float)
    d.add_argument("--k", type=int)
    d.add_argument("--a", type=float)
    d.add_argument("--c", type=float)
    d.add_argument("--j-split", type=int)
    d.add_argument("--nnn-alpha", type=float)
    d.add_argument("--nnn-beta", type=float)
    d.add_argument("--require", choices=("pst", "fr"))
    d.add_argument("--out")
    d.add_argument("--report")
    d.set_defaults(func=cmd_design)

    r = sub.add_parser("reconstruct", help="lattice from a spectrum")
    r.add_argument("--spectrum", required=True, help="JSON array, {'values':[...],'beta':x}, or a file")
    r.add_argument("--beta", type=float)
    r.add_argument("--arithmetic", choices=("exact", "float"), default="exact")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("verify", help="PST/FR conditions")
    v.add_argument("--spectrum")
    v.add_argument("--lattice")
    v.add_argument("--beta", type=float)
    v.add_argument("--horizon", type=float, help="largest Z scanned for revivals")
    v.add_argument("--nnn-alpha", type=float)
    v.add_argument("--nnn-beta", type=float)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="propagate and detect events")
    s.add_argument("--lattice", required=True)
    s.add_argument("--zmax", type=float, required=True)
    s.add_argument("--grid", type=int, default=transport.GRID)
    s.add_argument("--threshold", type=float, default=transport.LEAKAGE_THRESHOLD)
    s.add_argument("--source", type=int, default=0)
    s.add_argument("--trace")
    s.add_argument("--trace-points", type=int, default=TRACE_POINTS)
    s.add_argument("--events")
    s.add_argument("--nnn-alpha", type=float)
    s.add_argument("--nnn-beta", type=float)
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("geometry", help="separations from J = A exp(-C d)")
    g.add_argument("--lattice", required=True)
    g.add_argument("--amp-A", dest="amp_A", type=float, required=True)
    g.add_argument("--decay-C", dest="decay_C", type=float, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_geometry)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CouplingExceedsAmplitude as exc:
        code, msg = EXIT_AMPLITUDE, exc
    except (ReconstructionError, NonPositiveLeadingCoefficient, NonPositiveWeight) as exc:
        code, msg = EXIT_RECON, f"reconstruction failed: {exc}"
    except ParseError as exc:
        code, msg = EXIT_PARSE, exc
    except OSError as exc:
        code, msg = EXIT_IO, exc
    except LatticeForgeError as exc:
        code, msg = EXIT_PARAMS, exc
    print(f"error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
