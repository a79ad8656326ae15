"""Few-photon Fock-space expansion of Gaussian states.

Squeezed vacua are expanded sector by sector in total photon number, carried
through passive linear optics with permanents, and post-selected onto
occupation patterns. A passive unitary ``W`` acts on creation operators as
``a_i^dagger -> sum_j W[j, i] a_j^dagger``, i.e. input mode ``i`` is the
``i``-th column of ``W``; for a Bloch-Messiah reduction ``S = U S_D V^T`` the
squeezed modes map into the output with ``W = U``.
"""

import itertools
from dataclasses import dataclass, field
from math import factorial, sqrt

import numpy as np

from .errors import (
    EmptySector,
    PhotonNumberMismatch,
    RouteMismatch,
    ShapeMismatch,
    TooManyPhotons,
)
from .hamiltonian import SymmetricHamiltonian
from .linalg import as_complex_matrix, permanent

MAX_PHOTONS = 4
MAX_MODES = 12
# amplitudes below this are not stored
_AMP_CUTOFF = 1e-15


def occupation_tuples(n_modes, n_photons):
    """All occupation tuples of ``n_photons`` over ``n_modes``, lexicographically descending."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n_modes), n_photons):
        occ = [0] * n_modes
        for i in combo:
            occ[i] += 1
        out.append(tuple(occ))
    return sorted(out, reverse=True)


@dataclass(frozen=True)
class FockState:
    n_modes: int
    amplitudes: dict = field(default_factory=dict)

    def __post_init__(self):
        for occ in self.amplitudes:
            if len(occ) != self.n_modes or min(occ, default=0) < 0:
                raise ShapeMismatch(f"invalid occupation tuple {occ} for {self.n_modes} modes")

    def sector(self, n):
        return FockState(self.n_modes, {k: v for k, v in self.amplitudes.items() if sum(k) == n})

    def sector_norms(self):
        """Squared norm of every populated photon-number sector."""
        norms = {}
        for occ, amp in self.amplitudes.items():
            norms[sum(occ)] = norms.get(sum(occ), 0.0) + abs(amp) ** 2
        return dict(sorted(norms.items()))

    @property
    def norm2(self):
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def vector(self, n):
        """Amplitudes of sector ``n`` in :func:`occupation_tuples` order."""
        return np.array(
            [self.amplitudes.get(t, 0.0) for t in occupation_tuples(self.n_modes, n)], dtype=complex
        )

    def inner(self, other):
        """``<self|other>``."""
        return complex(sum(np.conj(a) * other.amplitudes.get(k, 0.0) for k, a in self.amplitudes.items()))


def single_mode_series(r, n_max):
    """Amplitudes of ``exp[(r/2)(a^dagger^2 - a^2)]|0>`` on ``|0>, |1>, ..., |n_max>``.

    Only even photon numbers are populated:
    ``c_2n = (cosh r)^(-1/2) (tanh r)^n sqrt((2n)!) / (2^n n!)``.
    """
    amps = np.zeros(n_max + 1)
    t = np.tanh(r)
    pre = 1.0 / np.sqrt(np.cosh(r))
    for n in range(n_max // 2 + 1):
        amps[2 * n] = pre * t**n * sqrt(factorial(2 * n)) / (2**n * factorial(n))
    return amps


def squeezed_vacuum_expand(r, n_max=MAX_PHOTONS):
    """Product of single-mode squeezed vacua, truncated at ``n_max`` total photons.

    Args:
        r: squeezing parameters, one per mode. For a Bloch-Messiah reduction
            pass ``BMDecomposition.squeezing`` (``arcsinh`` of ``s_diag``).
        n_max: largest total photon number kept (at most 4).

    Raises:
        TooManyPhotons: if ``n_max`` exceeds 4 or there are more than 12 modes.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if not np.all(np.isfinite(r)):
        raise ValueError("squeezing values must be finite")
    if n_max > MAX_PHOTONS or n_max < 0:
        raise TooManyPhotons(f"n_max must be in 0..{MAX_PHOTONS}, got {n_max}")
    if r.size > MAX_MODES:
        raise TooManyPhotons(f"at most {MAX_MODES} modes supported, got {r.size}")
    series = [single_mode_series(ri, n_max) for ri in r]
    amps = {}
    for n in range(0, n_max + 1, 2):
        for occ in occupation_tuples(r.size, n):
            if any(o % 2 for o in occ):
                continue
            a = np.prod([series[i][o] for i, o in enumerate(occ)])
            if abs(a) > _AMP_CUTOFF:
                amps[occ] = complex(a)
    return FockState(int(r.size), amps)


def _repeat(occ):
    return [i for i, n in enumerate(occ) for _ in range(n)]


def _norm_factor(occ):
    return np.prod([factorial(n) for n in occ])


def passive_transition(w, m_in, n_out):
    """``<n_out| U(W) |m_in>`` for a passive linear-optical network.

    ``perm(W[n; m]) / sqrt(prod n_i! prod m_i!)`` with row ``j`` of ``W``
    repeated ``n_out[j]`` times and column ``i`` repeated ``m_in[i]`` times.
    ``W`` may be rectangular (rows of a larger unitary) to address a subset
    of output modes.

    Raises:
        PhotonNumberMismatch: if the tuples carry different photon numbers.
    """
    w = as_complex_matrix(w, "W", square=False)
    if len(m_in) != w.shape[1] or len(n_out) != w.shape[0]:
        raise ShapeMismatch(f"tuples of lengths {len(m_in)}, {len(n_out)} do not fit W {w.shape}")
    if sum(m_in) != sum(n_out):
        raise PhotonNumberMismatch(f"input has {sum(m_in)} photons, output {sum(n_out)}")
    if sum(m_in) > MAX_PHOTONS:
        raise TooManyPhotons(f"at most {MAX_PHOTONS} photons, got {sum(m_in)}")
    sub = w[np.ix_(_repeat(n_out), _repeat(m_in))]
    return complex(permanent(sub) / sqrt(_norm_factor(n_out) * _norm_factor(m_in)))


def transition_matrix(w, n_photons):
    """Matrix of the ``n_photons`` irrep, rows/columns in :func:`occupation_tuples` order."""
    w = as_complex_matrix(w, "W", square=False)
    outs = occupation_tuples(w.shape[0], n_photons)
    ins = occupation_tuples(w.shape[1], n_photons)
    return np.array([[passive_transition(w, m, n) for m in ins] for n in outs])


def apply_passive(state, w, n_photons):
    """Image of sector ``n_photons`` of ``state`` under ``W``."""
    w = as_complex_matrix(w, "W", square=False)
    if w.shape[1] != state.n_modes:
        raise ShapeMismatch(f"W has {w.shape[1]} input modes, state has {state.n_modes}")
    sec = {k: v for k, v in state.amplitudes.items() if sum(k) == n_photons}
    if not sec:
        raise EmptySector(f"state has no amplitude with {n_photons} photons")
    out = {}
    for n in occupation_tuples(w.shape[0], n_photons):
        a = sum(amp * passive_transition(w, m, n) for m, amp in sec.items())
        if abs(a) > _AMP_CUTOFF:
            out[n] = complex(a)
    return FockState(w.shape[0], out)


@dataclass(frozen=True)
class PostselectionProjector:
    """Accepted occupation tuples, each mapped to an abstract label."""

    accept: dict

    def __post_init__(self):
        if not self.accept:
            raise EmptySector("projector accepts no tuples")
        lengths = {len(t) for t in self.accept}
        totals = {sum(t) for t in self.accept}
        if len(lengths) != 1 or any(min(t) < 0 for t in self.accept):
            raise ShapeMismatch("accepted tuples must be valid and of one length")
        if len(totals) != 1:
            raise PhotonNumberMismatch(f"accepted tuples span photon numbers {sorted(totals)}")

    @property
    def n_modes(self):
        return len(next(iter(self.accept)))

    @property
    def n_photons(self):
        return sum(next(iter(self.accept)))


@dataclass(frozen=True)
class PostselectionResult:
    amplitudes: dict
    probability: float


def postselect(state, w, proj):
    """Heralded state ``P U_N |psi^(N)>`` expressed in the projector's labels.

    Tuples sharing a label add coherently. The success probability is the
    squared norm before normalisation; returned amplitudes are normalised.

    Raises:
        EmptySector: if nothing survives the projection.
    """
    w = as_complex_matrix(w, "W", square=False)
    if w.shape[0] != proj.n_modes:
        raise ShapeMismatch(f"W has {w.shape[0]} output modes, projector expects {proj.n_modes}")
    n = proj.n_photons
    sec = {k: v for k, v in state.amplitudes.items() if sum(k) == n}
    if not sec:
        raise EmptySector(f"state has no amplitude with {n} photons")
    labelled = {}
    for occ, label in proj.accept.items():
        a = sum(amp * passive_transition(w, m, occ) for m, amp in sec.items())
        labelled[label] = labelled.get(label, 0.0) + a
    prob = float(sum(abs(a) ** 2 for a in labelled.values()))
    if prob <= 0.0:
        raise EmptySector("post-selection has zero success probability")
    scale = 1.0 / np.sqrt(prob)
    return PostselectionResult({k: complex(v * scale) for k, v in labelled.items()}, prob)


def biphoton_state(h):
    """First-order pair state ``sum_nm H_nm a_n^dagger a_m^dagger |vac>``, unnormalised."""
    h = h.H if isinstance(h, SymmetricHamiltonian) else as_complex_matrix(h, "H")
    n = h.shape[0]
    amps = {}
    for occ in occupation_tuples(n, 2):
        i, j = _repeat(occ)
        # a_i^dag a_j^dag |0> is |1_i 1_j> for i != j and sqrt(2)|2_i> otherwise
        a = 2 * h[i, j] if i != j else sqrt(2.0) * h[i, i]
        if a != 0:
            amps[occ] = complex(a)
    return FockState(n, amps)


def biphoton_overlap_direct(h, h_trunc):
    return biphoton_state(h_trunc).inner(biphoton_state(h))


def biphoton_fidelity(h, h_trunc, tol=1e-10):
    """Overlap ``<psi_trunc|psi> = 2 sum conj(H_trunc) H`` of first-order pair states.

    For ``H_trunc`` obtained by projecting ``H`` this equals
    ``2 ||H_trunc||_F^2``. The value is cross-checked against the explicit
    two-photon Fock overlap.

    Raises:
        ShapeMismatch: if the two matrices differ in shape.
        RouteMismatch: if the two routes disagree beyond ``tol``.
    """
    hm = h.H if isinstance(h, SymmetricHamiltonian) else as_complex_matrix(h, "H")
    ht = h_trunc.H if isinstance(h_trunc, SymmetricHamiltonian) else as_complex_matrix(h_trunc, "H_trunc")
    if hm.shape != ht.shape:
        raise ShapeMismatch(f"H {hm.shape} and H_trunc {ht.shape} differ in shape")
    formula = 2.0 * np.sum(ht.conj() * hm)
    direct = biphoton_overlap_direct(hm, ht)
    if abs(formula - direct) > tol * max(1.0, abs(formula)):
        raise RouteMismatch(f"formula {formula} and direct overlap {direct} disagree")
    return float(formula.real)


__all__ = [
    "FockState",
    "PostselectionProjector",
    "PostselectionResult",
    "apply_passive",
    "biphoton_fidelity",
    "biphoton_overlap_direct",
    "biphoton_state",
    "occupation_tuples",
    "passive_transition",
    "postselect",
    "single_mode_series",
    "squeezed_vacuum_expand",
    "transition_matrix",
]
