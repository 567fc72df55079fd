"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py`` (or execute this file directly);
the terminal summary lists one PASS/FAIL line per criterion.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.linalg import eigvalsh_tridiagonal

from cases import LINEAR_MAX, QUADRATIC_MAX, catalog_cases, case_id
from oracles import expm_field
from lattice_forge import catalog, conditions, transport
from lattice_forge.catalog import ModelParams
from lattice_forge.inverse import reconstruct
from lattice_forge.lattice import LatticeSpec, Spectrum, build_nnn
from lattice_forge.orthopoly import build_poly_system, char_poly_derivative

PI = math.pi
LEAK = 1e-6
ANGLE = 1e-4


def _sim(system, z):
    e = transport.amplitudes(system, z)
    p = np.abs(e) ** 2
    return e, p, float(np.sum(p[1:-1]))


def _first(preds):
    out = {}
    for p in preds:
        out.setdefault(p.kind, p)
    return out


def _theta(e):
    return math.atan2(abs(e[-1]), abs(e[0]))


def test_criterion_1_q_racah_nine():
    """q-Racah N=9, K=6: FR at pi/4, PST at pi/2, under 1 s"""
    t0 = time.perf_counter()
    params = ModelParams("q_racah", 9, beta=0.5, big_k=6)
    system = transport.eigendecompose(catalog.couplings(params))
    _, p_fr, leak_fr = _sim(system, PI / 4)
    fid = transport.transfer_fidelity(system, PI / 2)
    events = transport.detect_events(system, 2.0)
    elapsed = time.perf_counter() - t0
    assert leak_fr <= LEAK
    assert p_fr[0] > 0.01 and p_fr[-1] > 0.01
    assert fid >= 1 - LEAK
    assert [e.kind for e in events] == ["FR", "PST"]
    assert elapsed < 1.0, elapsed


def test_criterion_2_krawtchouk():
    """Krawtchouk N=1..30: PST at pi within 1e-8, no genuine FR in (0, 2pi], under 5 s"""
    t0 = time.perf_counter()
    for n in range(1, 31):
        system = transport.eigendecompose(catalog.couplings(ModelParams("krawtchouk", n)))
        assert abs(transport.transfer_fidelity(system, PI) - 1) <= 1e-8, n
        for ev in transport.detect_events(system, 2 * PI):
            assert min(ev.theta, abs(ev.theta - PI / 2)) <= ANGLE, (n, ev)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, elapsed


def test_criterion_3_para_krawtchouk():
    """para-Krawtchouk N=4, delta=3/5: FR at pi with theta=3pi/10, PST at 5pi"""
    params = ModelParams("para_krawtchouk", 4, delta=0.6)
    preds = _first(catalog.predict_transport(params))
    assert preds["FR"].distance == pytest.approx(PI, rel=1e-12)
    assert preds["FR"].mixing_angle == pytest.approx(3 * PI / 10, abs=1e-12)
    assert preds["PST"].distance == pytest.approx(5 * PI, rel=1e-12)
    system = transport.eigendecompose(catalog.couplings(params))
    e, p, leak = _sim(system, PI)
    assert leak <= LEAK and abs(_theta(e) - 3 * PI / 10) <= ANGLE
    e, p, leak = _sim(system, 5 * PI)
    assert leak <= LEAK and abs(_theta(e) - PI / 2) <= ANGLE
    # the condition checker finds the same pair from the spectrum alone
    rep = conditions.analyze_spectrum(catalog.spectrum(params))
    assert rep.pst.distance == pytest.approx(5 * PI, rel=1e-9)
    first = rep.fr[0]
    assert first.kind == "FR" and first.distance == pytest.approx(PI, rel=1e-9)


def test_criterion_4_dual_hahn():
    """dual-Hahn N=6, gamma=1/2: PST at pi, balanced FR at pi/2"""
    params = ModelParams("dual_hahn", 6, gamma=0.5)
    preds = _first(catalog.predict_transport(params))
    assert preds["PST"].distance == pytest.approx(PI, rel=1e-12)
    assert preds["FR"].distance == pytest.approx(PI / 2, rel=1e-12)
    system = transport.eigendecompose(catalog.couplings(params))
    e, p, leak = _sim(system, PI)
    assert leak <= LEAK and p[-1] >= 1 - LEAK
    e, p, leak = _sim(system, PI / 2)
    assert leak <= LEAK
    assert abs(abs(e[0]) - 2**-0.5) <= ANGLE and abs(abs(e[-1]) - 2**-0.5) <= ANGLE


def test_criterion_5_inverse_oracle():
    """reconstruct(spectrum) equals the closed-form couplings within 1e-8 relative"""
    checked = 0
    for params in catalog_cases(beta=1.0):
        top = QUADRATIC_MAX if params.family in ("dual_hahn", "para_racah") else LINEAR_MAX
        assert params.n_max <= top
        try:
            ref = catalog.couplings(params)
        except catalog.UnsupportedParamRegion:
            continue
        rep = reconstruct(catalog.spectrum(params))
        floor = 1e-8 * float(np.max(ref.couplings))
        np.testing.assert_allclose(rep.lattice.couplings, ref.couplings, rtol=1e-8, err_msg=case_id(params))
        np.testing.assert_allclose(rep.lattice.site_constants, ref.site_constants, rtol=1e-8, atol=floor,
                                   err_msg=case_id(params))
        checked += 1
    assert checked >= 200


def test_criterion_6_orthopoly_identities():
    """weights, normalisation, orthogonality, chi_N(lambda_s) and the sign law, all families, N <= 15"""
    for params in catalog_cases(n_values=range(1, 16), beta=1.0):
        spec = catalog.spectrum(params)
        ps = build_poly_system(catalog.couplings(params), spec)
        n = params.n_max
        alt = np.array([(-1) ** (n + s) for s in range(n + 1)])
        assert np.all(ps.weights > 0), case_id(params)
        assert abs(ps.weights.sum() - 1) <= 1e-12, case_id(params)
        assert ps.orthogonality_defect() <= 1e-8, case_id(params)
        assert np.max(np.abs(ps.chi_table[n] - alt)) <= 1e-8, case_id(params)
        np.testing.assert_array_equal(np.sign(char_poly_derivative(spec)), alt, err_msg=case_id(params))


def test_criterion_7_nnn_krawtchouk():
    """NNN Krawtchouk N=9, alpha=1, beta=11: PST at pi, balanced FR at pi/2, expm cross-check"""
    lat = catalog.couplings(ModelParams("krawtchouk", 9))
    penta = build_nnn(lat, 1.0, 11.0)
    system = transport.eigendecompose(penta)
    assert transport.transfer_fidelity(system, PI) >= 1 - LEAK
    e, p, leak = _sim(system, PI / 2)
    assert leak <= LEAK
    assert abs(_theta(e) - PI / 4) <= ANGLE
    preds = _first(catalog.nnn_krawtchouk_prediction(9, 1.0, 11.0))
    assert preds["PST"].distance == pytest.approx(PI)
    assert preds["FR"].distance == pytest.approx(PI / 2)
    dense = penta.dense()
    for z in (0.3, PI / 2, PI, 7.9):
        ref = expm_field(dense, z)
        np.testing.assert_allclose(transport.amplitudes(system, z), ref, rtol=0, atol=1e-9)


SWEEP = 200
SWEEP_SEED = 20240611


def _mirror_lattice(rng, n):
    half_j = rng.uniform(0.5, 1.5, n)
    half_b = rng.uniform(-0.5, 0.5, n + 1)
    j = np.array([half_j[min(k, n - 1 - k)] for k in range(n)])
    b = np.array([half_b[min(k, n - k)] for k in range(n + 1)])
    return LatticeSpec(j, b)


def _pst_lattice(rng, n):
    gaps = 2 * rng.integers(0, 4, n) + 1
    unit = rng.uniform(0.3, 1.5)
    values = rng.uniform(-2, 2) + unit * np.concatenate(([0], np.cumsum(gaps)))
    return reconstruct(Spectrum(values)).lattice


def test_criterion_8_checker_soundness():
    """200 random mirror-symmetric lattices: accepted means PST, rejected means no near-PST"""
    rng = np.random.default_rng(SWEEP_SEED)
    accepted = rejected = 0
    violations = []
    for k in range(SWEEP):
        n = int(rng.integers(1, 11))
        lat = _pst_lattice(rng, n) if k % 2 else _mirror_lattice(rng, n)
        spec = Spectrum(eigvalsh_tridiagonal(lat.site_constants, lat.couplings))
        system = transport.eigendecompose(lat)
        pst = conditions.check_pst(spec)
        if pst is not None:
            accepted += 1
            fid = transport.transfer_fidelity(system, pst.distance)
            if fid < 1 - 1e-5:
                violations.append(("accepted", k, n, fid))
            continue
        rejected += 1
        horizon = 20 * PI  # checker default for unit scale
        points = math.ceil(32 / PI * horizon * system.spread)
        zs = np.linspace(0, horizon, points + 1)[1:]
        best = float(np.max(transport.transfer_fidelity(system, zs)))
        if best >= 1 - 1e-3:
            violations.append(("rejected", k, n, best))
    summary = f"accepted={accepted} rejected={rejected} violations={len(violations)}"
    print(summary)
    assert accepted > 0 and rejected > 0, summary
    assert not violations, f"{summary}: {violations}"


def _unitary_cases():
    for params in catalog_cases(n_values=(1, 2, 5, 9, 15), beta=1.0):
        yield catalog.couplings(params)
    yield build_nnn(catalog.couplings(ModelParams("krawtchouk", 9)), 1.0, 11.0)


CLI_RUN = [
    ["design", "--family", "q_racah", "--n", "9", "--k", "6", "--beta", "0.5", "--out", "lat.json", "--report", "rep.json"],
    ["reconstruct", "--spectrum", "[-1, 0, 1, 3]", "--out", "rec.json"],
    ["simulate", "--lattice", "lat.json", "--zmax", "2.0", "--events", "ev.json", "--trace", "tr.csv"],
    ["verify", "--lattice", "lat.json", "--out", "ver.json"],
    ["geometry", "--lattice", "lat.json", "--amp-A", "5000", "--decay-C", "1", "--out", "geo.csv"],
]


def test_criterion_9_unitarity_and_determinism(tmp_path):
    """probability conserved within 1e-10; repeated CLI runs byte-identical"""
    zs = np.linspace(0, 40, 97)
    for lat in _unitary_cases():
        system = transport.eigendecompose(lat)
        for source in (0, system.n_max // 2):
            norms = np.sum(np.abs(transport.amplitudes(system, zs, source)) ** 2, axis=-1)
            assert np.max(np.abs(norms - 1)) <= 1e-10
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        d.mkdir()
        for argv in CLI_RUN:
            subprocess.run([sys.executable, "-m", "lattice_forge.cli", *argv], cwd=d, check=True, capture_output=True)
        outputs.append({f.name: f.read_bytes() for f in sorted(d.iterdir())})
    assert len(outputs[0]) == 7
    assert outputs[0] == outputs[1]
    assert json.loads(outputs[0]["ev.json"])["events"]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
