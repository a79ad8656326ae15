import itertools
from math import factorial, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import random_symmetric
from frozen_oracles import HOM_AMPLITUDES, SQUEEZED_VACUUM_R03
from multisqueeze.errors import EmptySector, PhotonNumberMismatch, RouteMismatch, ShapeMismatch, TooManyPhotons
from multisqueeze.fock import (
    FockState,
    PostselectionProjector,
    apply_passive,
    biphoton_fidelity,
    biphoton_overlap_direct,
    biphoton_state,
    occupation_tuples,
    passive_transition,
    postselect,
    single_mode_series,
    squeezed_vacuum_expand,
    transition_matrix,
)
from multisqueeze.hamiltonian import (
    JSABlockHamiltonian,
    SymmetricHamiltonian,
    propagate_tensor,
)
from multisqueeze.analysis import dichroic_sandwich, embed_spatial
from multisqueeze.linalg import random_unitary
from multisqueeze.symplectic import SymplecticKernel, bloch_messiah
from multisqueeze.tensor import flatten, gbm, truncate

BALANCED = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)


def brute_transition(w, m_in):
    """Expand prod_i (sum_j W[j, i] b_j^dag)^{m_i} / sqrt(m_i!) |0> term by term."""
    poly = {(): 1.0 + 0j}
    for i, m in enumerate(m_in):
        for _ in range(m):
            nxt = {}
            for word, c in poly.items():
                for j in range(w.shape[0]):
                    key = tuple(sorted(word + (j,)))
                    nxt[key] = nxt.get(key, 0) + c * w[j, i]
            poly = nxt
    norm_in = np.prod([factorial(m) for m in m_in])
    out = {}
    for word, c in poly.items():
        occ = tuple(word.count(j) for j in range(w.shape[0]))
        # b^dag word |0> = sqrt(prod n!) |n>
        out[occ] = out.get(occ, 0) + c * sqrt(np.prod([factorial(n) for n in occ])) / sqrt(norm_in)
    return out


def truncated_squeeze_vector(r, dim=40):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return expm(0.5 * r * (a.T @ a.T - a @ a))[:, 0]


class TestSqueezedVacuum:
    def test_zero_is_vacuum(self):
        st_ = squeezed_vacuum_expand([0.0])
        assert st_.amplitudes == {(0,): 1.0}

    def test_frozen_series(self):
        np.testing.assert_allclose(single_mode_series(0.3, 4), SQUEEZED_VACUUM_R03, atol=1e-15)

    @pytest.mark.parametrize("r", [0.05, 0.1, -0.2])
    def test_against_truncated_generator(self, r):
        ref = truncated_squeeze_vector(r, dim=15)
        np.testing.assert_allclose(single_mode_series(r, 4), ref[:5].real, atol=1e-12)

    def test_two_modes_no_cross_terms(self):
        st2 = squeezed_vacuum_expand([0.3, 0.3]).sector(2)
        assert set(st2.amplitudes) == {(2, 0), (0, 2)}

    def test_odd_sectors_empty(self, rng):
        norms = squeezed_vacuum_expand(rng.uniform(-1, 1, 4)).sector_norms()
        assert set(norms) <= {0, 2, 4}

    def test_product_amplitudes(self):
        st2 = squeezed_vacuum_expand([0.3, 0.5])
        a, b = single_mode_series(0.3, 4), single_mode_series(0.5, 4)
        assert st2.amplitudes[(2, 2)] == pytest.approx(a[2] * b[2])

    def test_limits(self):
        with pytest.raises(TooManyPhotons):
            squeezed_vacuum_expand([0.1], n_max=6)
        with pytest.raises(TooManyPhotons):
            squeezed_vacuum_expand(np.zeros(13))

    def test_invalid_occupation(self):
        with pytest.raises(ShapeMismatch):
            FockState(2, {(1,): 1.0})


class TestPassiveTransition:
    def test_identity(self):
        for m in occupation_tuples(3, 2):
            for n in occupation_tuples(3, 2):
                assert passive_transition(np.eye(3), m, n) == (1.0 if m == n else 0.0)

    def test_hong_ou_mandel(self):
        for n, amp in HOM_AMPLITUDES.items():
            assert passive_transition(BALANCED, (1, 1), n) == pytest.approx(amp, abs=1e-12)
        assert abs(passive_transition(BALANCED, (1, 1), (1, 1))) < 1e-12
        assert abs(passive_transition(BALANCED, (1, 1), (2, 0))) ** 2 == pytest.approx(0.5)

    def test_against_brute_force(self, rng):
        w = random_unitary(3, rng)
        for m in occupation_tuples(3, 3):
            ref = brute_transition(w, m)
            for n in occupation_tuples(3, 3):
                assert passive_transition(w, m, n) == pytest.approx(ref.get(n, 0), abs=1e-12)

    def test_probability_conserved(self, rng):
        w = random_unitary(3, rng)
        for m in occupation_tuples(3, 3):
            total = sum(abs(passive_transition(w, m, n)) ** 2 for n in occupation_tuples(3, 3))
            assert total == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("modes,photons", [(m, n) for m in range(1, 6) for n in range(1, 4)])
    def test_sector_unitary(self, modes, photons, rng):
        t = transition_matrix(random_unitary(modes, rng), photons)
        np.testing.assert_allclose(t @ t.conj().T, np.eye(t.shape[0]), atol=1e-9)

    def test_photon_mismatch(self):
        with pytest.raises(PhotonNumberMismatch):
            passive_transition(np.eye(2), (1, 0), (1, 1))

    def test_too_many(self):
        with pytest.raises(TooManyPhotons):
            passive_transition(np.eye(2), (3, 2), (2, 3))

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), photons=st.integers(1, 3))
    def test_property_homomorphism(self, seed, photons):
        rng = np.random.default_rng(seed)
        a, b = random_unitary(3, rng), random_unitary(3, rng)
        lhs = transition_matrix(a @ b, photons)
        rhs = transition_matrix(a, photons) @ transition_matrix(b, photons)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def two_pair_sources(r):
    c = np.cosh(r) * np.eye(4)
    s = np.sinh(r) * np.kron(np.eye(2), [[0, 1], [1, 0]])
    return SymplecticKernel(c, s)


def sector_state(k, n):
    bm = bloch_messiah(k)
    return apply_passive(squeezed_vacuum_expand(bm.squeezing, n_max=n), bm.U, n)


class TestPostselect:
    def test_accept_all_identity(self, rng):
        st_ = squeezed_vacuum_expand([0.3, 0.4])
        proj = PostselectionProjector({t: t for t in occupation_tuples(2, 2)})
        res = postselect(st_, np.eye(2), proj)
        assert res.probability == pytest.approx(st_.sector_norms()[2])
        for occ, amp in st_.sector(2).amplitudes.items():
            assert res.amplitudes[occ] == pytest.approx(amp / np.sqrt(res.probability))

    def test_two_pair_sources_bell_like(self):
        r = 0.3
        st_ = sector_state(two_pair_sources(r), 2)
        # hand enumeration: each source contributes tanh r / cosh^2 r to its own |1, 1>
        expected = np.tanh(r) / np.cosh(r) ** 2
        assert abs(st_.amplitudes[(1, 1, 0, 0)]) == pytest.approx(expected, rel=1e-10)
        assert abs(st_.amplitudes[(0, 0, 1, 1)]) == pytest.approx(expected, rel=1e-10)
        assert st_.norm2 == pytest.approx(2 * expected**2, rel=1e-10)
        proj = PostselectionProjector({(1, 1, 0, 0): "pair-A", (0, 0, 1, 1): "pair-B"})
        res = postselect(st_, np.eye(4), proj)
        assert res.probability == pytest.approx(2 * expected**2, rel=1e-10)
        a, b = res.amplitudes["pair-A"], res.amplitudes["pair-B"]
        assert abs(a) == pytest.approx(1 / np.sqrt(2), rel=1e-10)
        assert a == pytest.approx(b, abs=1e-10)

    def test_truncated_vs_full_fidelity(self):
        f = 0.2 * np.random.default_rng(9).normal(size=(2, 2))
        tk = propagate_tensor(dichroic_sandwich(embed_spatial(JSABlockHamiltonian(f).H)))
        g = gbm(tk)
        full = sector_state(flatten(tk), 2)
        fids = []
        for d in (1, 2, 4):
            trunc = sector_state(flatten(truncate(g, d).kernel), 2)
            ov = abs(trunc.inner(full)) ** 2 / (trunc.norm2 * full.norm2)
            fids.append(ov)
        assert 0 <= fids[0] <= fids[1] + 1e-12
        assert fids[-1] == pytest.approx(1.0, abs=1e-10)

    def test_empty_sector(self):
        st_ = squeezed_vacuum_expand([0.3])
        with pytest.raises(EmptySector):
            postselect(st_, np.eye(1), PostselectionProjector({(1,): "x"}))

    def test_projector_validation(self):
        with pytest.raises(EmptySector):
            PostselectionProjector({})
        with pytest.raises(PhotonNumberMismatch):
            PostselectionProjector({(1, 0): "a", (1, 1): "b"})


class TestBiphoton:
    def test_full_overlap(self, rng):
        h = random_symmetric(5, rng)
        assert biphoton_fidelity(h, h) == pytest.approx(2 * np.linalg.norm(h) ** 2)

    def test_zero(self, rng):
        h = random_symmetric(4, rng)
        assert biphoton_fidelity(h, np.zeros((4, 4))) == 0.0

    def test_state_amplitudes(self):
        h = np.array([[0.1, 0.2], [0.2, 0.3]])
        st_ = biphoton_state(SymmetricHamiltonian(h))
        assert st_.amplitudes[(1, 1)] == pytest.approx(0.4)
        assert st_.amplitudes[(2, 0)] == pytest.approx(np.sqrt(2) * 0.1)
        assert st_.norm2 == pytest.approx(2 * np.linalg.norm(h) ** 2)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            biphoton_fidelity(np.eye(2), np.eye(3))

    def test_route_mismatch_detected(self):
        with pytest.raises(RouteMismatch):
            biphoton_fidelity(np.eye(2), np.eye(2), tol=-1.0)

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
    def test_property_routes_agree(self, n, seed):
        rng = np.random.default_rng(seed)
        h, h2 = random_symmetric(n, rng), random_symmetric(n, rng)
        formula = 2 * np.sum(h2.conj() * h)
        assert abs(biphoton_overlap_direct(h, h2) - formula) <= 1e-10 * max(1.0, abs(formula))
