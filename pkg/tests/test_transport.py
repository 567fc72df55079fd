import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cases import case_id, catalog_cases
from lattice_forge import catalog
from lattice_forge.catalog import ModelParams, TransportPrediction
from lattice_forge.errors import DegenerateSpectrum
from lattice_forge.lattice import LatticeSpec, build_nnn
from lattice_forge.orthopoly import weights_from_spectrum
from lattice_forge.transport import (
    amplitudes,
    default_workers,
    detect_events,
    eigendecompose,
    leakage,
    propagate,
    transfer_fidelity,
    verify_event,
)
from oracles import expm_field

PI = math.pi
TWO = LatticeSpec([0.5], [0, 0])


def kraw(n, beta=1.0):
    return catalog.couplings(ModelParams("krawtchouk", n, beta))


@st.composite
def lattices(draw, max_n=12, mirror=False):
    n = draw(st.integers(1, max_n))
    j = draw(st.lists(st.floats(0.2, 2.0), min_size=n, max_size=n))
    b = draw(st.lists(st.floats(-1.0, 1.0), min_size=n + 1, max_size=n + 1))
    if mirror:
        j = [j[min(k, n - 1 - k)] for k in range(n)]
        b = [b[min(k, n - k)] for k in range(n + 1)]
    return LatticeSpec(j, b)


class TestEigendecompose:
    def test_two_site(self):
        s = eigendecompose(TWO)
        np.testing.assert_allclose(s.eigenvalues, [-0.5, 0.5])
        np.testing.assert_allclose(s.weights, [0.5, 0.5])

    def test_krawtchouk_two(self):
        s = eigendecompose(kraw(2))
        np.testing.assert_allclose(s.eigenvalues, [-1, 0, 1], atol=1e-14)
        np.testing.assert_allclose(s.weights, [0.25, 0.5, 0.25])
        np.testing.assert_allclose(s.weights, weights_from_spectrum(catalog.spectrum(ModelParams("krawtchouk", 2))))

    def test_sign_convention(self):
        s = eigendecompose(kraw(7))
        assert np.all(s.transform[:, 0] > 0)

    def test_vanishing_coupling_rejected(self):
        with pytest.raises(ValueError):
            LatticeSpec([0.0], [0, 0])

    def test_degenerate_pentadiagonal(self):
        with pytest.raises(DegenerateSpectrum):
            eigendecompose(build_nnn(kraw(2), 1.0, 0.0))

    @settings(max_examples=40, deadline=None)
    @given(lattices(max_n=50))
    def test_orthogonal_and_faithful(self, lat):
        try:
            s = eigendecompose(lat)
        except DegenerateSpectrum:
            return
        assert s.orthogonality_defect() <= 1e-10
        top = np.abs(lat.dense()).max()
        assert np.max(np.abs(s.matrix() - lat.dense())) <= 1e-9 * max(1, top)
        assert math.fsum(s.weights) == pytest.approx(1, abs=1e-12)


class TestPropagate:
    def test_two_site_closed_form(self):
        e = propagate(eigendecompose(TWO), PI).amplitudes
        np.testing.assert_allclose(e, [0, -1j], atol=1e-12)
        z = 0.7
        np.testing.assert_allclose(
            propagate(eigendecompose(TWO), z).amplitudes, [math.cos(z / 2), -1j * math.sin(z / 2)], atol=1e-14
        )

    @pytest.mark.parametrize("source", [0, 2, 5])
    def test_identity_at_zero(self, source):
        e = propagate(eigendecompose(kraw(5)), 0.0, source).amplitudes
        ref = np.zeros(6)
        ref[source] = 1
        np.testing.assert_allclose(e, ref, atol=1e-14)

    def test_bad_source(self):
        with pytest.raises(ValueError):
            propagate(eigendecompose(kraw(3)), 1.0, 4)

    def test_q_racah_transfer(self):
        s = eigendecompose(catalog.couplings(ModelParams("q_racah", 9, 0.5, big_k=6)))
        assert abs(propagate(s, PI / 2).amplitudes[9]) ** 2 >= 1 - 1e-6

    def test_vectorised_matches_scalar(self):
        s = eigendecompose(kraw(6))
        zs = np.linspace(0, 5, 11)
        field = amplitudes(s, zs, 2)
        for k, z in enumerate(zs):
            np.testing.assert_allclose(field[k], propagate(s, z, 2).amplitudes, atol=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(lattices(), st.floats(0, 200), st.data())
    def test_unitary(self, lat, z, data):
        s = eigendecompose(lat)
        src = data.draw(st.integers(0, lat.n_max))
        assert propagate(s, z, src).norm == pytest.approx(1, abs=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(lattices(), st.floats(0, 30))
    def test_matches_matrix_exponential(self, lat, z):
        s = eigendecompose(lat)
        np.testing.assert_allclose(propagate(s, z).amplitudes, expm_field(lat.dense(), z), atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(lattices(mirror=True), st.floats(-1, 1), st.floats(0.2, 2), st.floats(0, 20))
    def test_pentadiagonal_matches_matrix_exponential(self, lat, a, b, z):
        penta = build_nnn(lat, a, b)
        try:
            s = eigendecompose(penta)
        except DegenerateSpectrum:
            return
        np.testing.assert_allclose(propagate(s, z).amplitudes, expm_field(penta.dense(), z), atol=1e-9)


class TestFidelity:
    def test_krawtchouk_nine(self):
        s = eigendecompose(kraw(9))
        assert transfer_fidelity(s, PI) == pytest.approx(1, abs=1e-8)
        assert transfer_fidelity(s, 0.0) == pytest.approx(0, abs=1e-28)
        assert transfer_fidelity(s, 2 * PI) == pytest.approx(0, abs=1e-12)
        assert abs(propagate(s, 2 * PI).amplitudes[0]) ** 2 == pytest.approx(1, abs=1e-10)

    def test_range(self):
        s = eigendecompose(LatticeSpec([0.3, 1.1, 0.7], [0.2, -0.4, 0.9, 0.1]))
        f = transfer_fidelity(s, np.linspace(0, 40, 400))
        assert np.all((f >= 0) & (f <= 1 + 1e-12))

    def test_leakage_complement(self):
        s = eigendecompose(kraw(6))
        zs = np.linspace(0, 7, 50)
        p = np.abs(amplitudes(s, zs)) ** 2
        np.testing.assert_allclose(leakage(s, zs), 1 - p[:, 0] - p[:, -1], atol=1e-12)


def _has_events(params):
    return any(p.kind != "none" and p.distance < 60 for p in catalog.predict_transport(params))


class TestDetect:
    def test_q_racah_nine(self):
        s = eigendecompose(catalog.couplings(ModelParams("q_racah", 9, 0.5, big_k=6)))
        ev = detect_events(s, 2.0, 4096, 1e-6)
        assert [e.kind for e in ev] == ["FR", "PST"]
        assert ev[0].z == pytest.approx(PI / 4, abs=1e-9)
        assert ev[1].z == pytest.approx(PI / 2, abs=1e-9)
        assert ev[0].balanced

    def test_krawtchouk_five(self):
        ev = detect_events(eigendecompose(kraw(5)), 7.0)
        assert [e.kind for e in ev] == ["PST", "return"]
        assert ev[0].z == pytest.approx(PI, abs=1e-9)
        assert ev[1].z == pytest.approx(2 * PI, abs=1e-9)

    def test_two_site_extremes_only(self):
        s = eigendecompose(LatticeSpec([0.8], [0.1, 0.1]))
        ev = detect_events(s, 2 * PI / 1.6)
        assert [e.kind for e in ev] == ["PST", "return"]
        assert all("two-site" in e.note for e in ev)

    def test_event_invariants(self):
        s = eigendecompose(catalog.couplings(ModelParams("dual_hahn", 6, gamma=0.5)))
        ev = detect_events(s, 3 * PI)
        assert ev
        for e in ev:
            assert e.leakage <= 1e-6
            assert sum(e.end_probabilities) + e.leakage == pytest.approx(1, abs=1e-10)
            probs = np.abs(propagate(s, e.z).amplitudes) ** 2
            assert probs[1:-1].max() <= 1e-6

    def test_threads_identical(self):
        s = eigendecompose(catalog.couplings(ModelParams("para_krawtchouk", 6, delta=0.6)))
        a = detect_events(s, 12.0, workers=1)
        b = detect_events(s, 12.0, workers=4)
        assert [e.to_json() for e in a] == [e.to_json() for e in b]

    def test_env_workers(self, monkeypatch):
        monkeypatch.setenv("LATTICE_FORGE_THREADS", "3")
        assert default_workers() == 3
        monkeypatch.setenv("LATTICE_FORGE_THREADS", "junk")
        assert default_workers() == 1

    def test_grid_guard(self):
        with pytest.raises(ValueError):
            detect_events(eigendecompose(kraw(3)), 1.0, grid=1)
        assert detect_events(eigendecompose(kraw(3)), 0.0) == []

    @pytest.mark.parametrize("params", [p for p in catalog_cases(range(3, 9)) if _has_events(p)], ids=case_id)
    def test_finds_predicted_events(self, params):
        s = eigendecompose(catalog.couplings(params))
        preds = [p for p in catalog.predict_transport(params) if p.kind != "none"]
        zmax = min(p.distance for p in preds) * 1.05
        ev = detect_events(s, zmax)
        for p in preds:
            if p.distance <= zmax:
                assert any(abs(e.z - p.distance) < 1e-7 and e.kind == p.kind for e in ev), (p, ev)


class TestVerify:
    def test_para_krawtchouk_three(self):
        s = eigendecompose(catalog.couplings(ModelParams("para_krawtchouk", 3, delta=0.5)))
        assert verify_event(s, TransportPrediction("FR", PI, PI / 4, 0.0))

    def test_fake_fr(self):
        s = eigendecompose(kraw(5))
        assert not verify_event(s, TransportPrediction("FR", PI / 2, PI / 4, 0.0))

    def test_detected_pst_verifies(self):
        s = eigendecompose(kraw(8))
        ev = [e for e in detect_events(s, 4.0) if e.kind == "PST"][0]
        assert verify_event(s, TransportPrediction("PST", ev.z, PI / 2, ev.phi))

    def test_wrong_angle(self):
        s = eigendecompose(catalog.couplings(ModelParams("para_krawtchouk", 3, delta=0.5)))
        assert not verify_event(s, TransportPrediction("FR", PI, PI / 3, 0.0))

    def test_none(self):
        s = eigendecompose(kraw(3))
        assert not verify_event(s, TransportPrediction("none", math.inf, math.nan, math.nan))
