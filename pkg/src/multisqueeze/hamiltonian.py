"""Hamiltonian-level reductions.

A quadratic interaction-picture Hamiltonian (time ordering neglected) is a
complex symmetric matrix ``H``; its propagator acts on mode operators as
``exp(-i K [[0, H], [H^*, 0]])`` with ``K = diag(1, -1)``. Takagi-factoring
``H`` brings that propagator straight to Bloch-Messiah form.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BadDimension, NonFinite, NotSymmetric, ShapeMismatch
from .linalg import (
    TakagiDecomposition,
    as_complex_matrix,
    degenerate_groups,
    takagi,
)
from .symplectic import SymplecticKernel, apply_passive
from .tensor import _mode_factor, fold, mode_multiply, n_mode_flatten

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SymmetricHamiltonian:
    H: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        h = as_complex_matrix(self.H, "H")
        if np.linalg.norm(h - h.T) > SYMMETRY_TOL * max(1.0, np.linalg.norm(h)):
            raise NotSymmetric("Hamiltonian matrix must satisfy H = H^T")
        h.flags.writeable = False
        object.__setattr__(self, "H", h)

    @property
    def dim(self):
        return self.H.shape[0]


@dataclass(frozen=True)
class TensorHamiltonian:
    """Four-way ``H[t, x, t', x']`` with ``H[t, x, t', x'] == H[t', x', t, x]``."""

    H: np.ndarray

    def __post_init__(self):
        h = np.array(self.H, dtype=complex)
        if h.ndim != 4 or h.shape[:2] != h.shape[2:]:
            raise ShapeMismatch(f"tensor Hamiltonian needs shape (n_t, n_x, n_t, n_x), got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise NonFinite("tensor Hamiltonian contains NaN or Inf entries")
        asym = np.linalg.norm(h - h.transpose(2, 3, 0, 1))
        if asym > SYMMETRY_TOL * max(1.0, np.linalg.norm(h)):
            raise NotSymmetric(f"pair-exchange asymmetry {asym:.3e}")
        h.flags.writeable = False
        object.__setattr__(self, "H", h)

    @property
    def n_spectral(self):
        return self.H.shape[0]

    @property
    def n_spatial(self):
        return self.H.shape[1]

    def as_matrix(self):
        n = self.n_spectral * self.n_spatial
        return SymmetricHamiltonian(self.H.reshape(n, n))

    @classmethod
    def from_matrix(cls, h, n_spectral, n_spatial):
        h = h.H if isinstance(h, SymmetricHamiltonian) else np.asarray(h)
        return cls(np.asarray(h).reshape(n_spectral, n_spatial, n_spectral, n_spatial))


@dataclass(frozen=True)
class JSABlockHamiltonian:
    """Photon-pair Hamiltonian ``[[0, F], [F^T, 0]]`` with signal modes first."""

    F: np.ndarray
    frequencies: np.ndarray = field(default=None)

    def __post_init__(self):
        f = as_complex_matrix(self.F, "F_JSA", square=False)
        f.flags.writeable = False
        object.__setattr__(self, "F", f)

    @property
    def split(self):
        """Index of the first idler mode in the embedded Hamiltonian."""
        return self.F.shape[0]

    @property
    def H(self):
        ns, ni = self.F.shape
        return np.block([[np.zeros((ns, ns)), self.F], [self.F.T, np.zeros((ni, ni))]])

    def hamiltonian(self):
        return SymmetricHamiltonian(self.H)


def antoine_takagi(h):
    """Congruence diagonalisation ``H = U H^D U^T`` (descending ``H^D``)."""
    hm = h.H if isinstance(h, SymmetricHamiltonian) else h
    return takagi(hm, tol=SYMMETRY_TOL)


def propagate(h):
    """Bogoliubov kernel generated by ``h``: ``C = U cosh(H^D) U^dagger``,
    ``S = -i U sinh(H^D) U^T``.
    """
    t = antoine_takagi(h)
    u, d = t.unitary, t.diag
    return SymplecticKernel((u * np.cosh(d)) @ u.conj().T, -1j * (u * np.sinh(d)) @ u.T)


def propagate_tensor(th):
    return fold(propagate(th.as_matrix()), th.n_spectral, th.n_spatial)


def rotate_squeezing_phase(k, phi):
    """Multiply ``S`` by ``exp(i phi)`` leaving ``C`` fixed.

    Equal phase shifts ``exp(i phi / 2)`` on input and output. With
    ``phi = pi / 2`` the ``-i sinh`` convention of :func:`propagate` becomes
    the real ``sinh`` convention.
    """
    w = np.exp(0.5j * phi) * np.eye(k.dim)
    return apply_passive(apply_passive(k, w, "output"), w, "input")


@dataclass(frozen=True)
class GATDecomposition:
    """``H = core x (U_t, U_s, U_t, U_s)``: congruence form of a tensor Hamiltonian."""

    U_t: np.ndarray
    U_s: np.ndarray
    core: np.ndarray
    singular_values: tuple

    def reconstruct(self):
        return mode_multiply(self.core, (self.U_t, self.U_s, self.U_t, self.U_s))

    def spectral_slice_norms(self):
        return np.linalg.norm(n_mode_flatten(self.core, 1), axis=1)


def _congruence_core(h, u_t, u_s):
    return mode_multiply(h, [u_t.conj().T, u_s.conj().T, u_t.conj().T, u_s.conj().T])


def _fix_spectral_phases(h, u_t, u_s):
    """Greedy phase choice making each spectral index's dominant core entry
    real positive. A core entry picks up ``exp(-i(phi_a + phi_a'))``."""
    core = _congruence_core(h, u_t, u_s)
    n = u_t.shape[1]
    fixed = np.zeros(n, dtype=bool)
    phases = np.zeros(n)
    for a in range(n):
        if fixed[a]:
            continue
        sl = core[a] * np.exp(-1j * phases[None, :, None])
        flat = np.abs(sl).ravel()
        if flat.size == 0 or flat.max() == 0:
            fixed[a] = True
            continue
        top = flat.max()
        # lowest index among near-maximal entries, for determinism
        b, a2, b2 = np.unravel_index(int(np.flatnonzero(flat >= top * (1 - 1e-9))[0]), sl.shape)
        z = sl[b, a2, b2]
        if a2 == a:
            phases[a] = 0.5 * np.angle(z)
        elif not fixed[a2]:
            phases[a2] = np.angle(z)
            fixed[a2] = True
        else:
            phases[a] = np.angle(z)
        fixed[a] = True
    return u_t * np.exp(1j * phases)


def generalized_antoine_takagi(th):
    """Congruence HOSVD ``H[t,x,t',x'] = U_t U_s H_core U_t U_s`` (no conjugates).

    Pair-exchange symmetry makes the mode-3 (mode-4) unfolding equal to the
    mode-1 (mode-2) one, so the right factors coincide with the left ones.
    Phases are then fixed Takagi-style: within each cluster of equal
    spectral singular values the spatially contracted core block
    ``K[a, a'] = sum_b core[a, b, a', b]`` is Takagi-factored, and each
    spectral index's dominant core entry is made real positive. For a single
    spatial mode this reproduces :func:`antoine_takagi`.
    """
    if not isinstance(th, TensorHamiltonian):
        raise NotSymmetric("generalized_antoine_takagi expects a TensorHamiltonian")
    h = 0.5 * (th.H + th.H.transpose(2, 3, 0, 1))
    u_t, sv_t = _mode_factor(n_mode_flatten(h, 1))
    u_s, sv_s = _mode_factor(n_mode_flatten(h, 2))
    core = _congruence_core(h, u_t, u_s)
    scale = np.linalg.norm(core)
    for grp in degenerate_groups(sv_t):
        if grp.size < 2 or scale == 0:
            continue
        k = np.einsum("abcb->ac", core[np.ix_(grp, range(core.shape[1]), grp, range(core.shape[3]))])
        k = 0.5 * (k + k.T)
        if np.linalg.norm(k) <= 1e-8 * scale:
            continue
        u_t[:, grp] = u_t[:, grp] @ takagi(k, tol=1e-6).unitary
    u_t = _fix_spectral_phases(h, u_t, u_s)
    core = _congruence_core(h, u_t, u_s)
    return GATDecomposition(u_t, u_s, core, (sv_t, sv_s))



def congruence_truncate(th, spectral_basis):
    """Project both pair indices onto ``span(spectral_basis) (x) 1_spatial``.

    ``spectral_basis`` has orthonormal columns; the result is
    ``Pi H Pi^T`` with ``Pi`` the corresponding orthogonal projector.
    """
    q = np.asarray(spectral_basis, dtype=complex)
    if q.ndim != 2 or q.shape[0] != th.n_spectral:
        raise ShapeMismatch(f"basis must have {th.n_spectral} rows, got shape {q.shape}")
    proj = q @ q.conj().T
    eye = np.eye(th.n_spatial)
    return TensorHamiltonian(mode_multiply(th.H, (proj, eye, proj, eye)))


def truncate_hamiltonian(gat, d_spectral):
    """Keep the ``d_spectral`` leading spectral modes of a congruence reduction."""
    n_t, n_x = gat.core.shape[:2]
    if not (isinstance(d_spectral, (int, np.integer)) and 0 <= d_spectral <= n_t):
        raise BadDimension(f"d_spectral must be an integer in 0..{n_t}, got {d_spectral}")
    core = np.zeros_like(gat.core)
    core[:d_spectral, :, :d_spectral, :] = gat.core[:d_spectral, :, :d_spectral, :]
    return TensorHamiltonian(mode_multiply(core, (gat.U_t, gat.U_s, gat.U_t, gat.U_s)))

@dataclass(frozen=True)
class TwoModeReduction:
    U_s: np.ndarray
    U_i: np.ndarray
    F_D: np.ndarray
    kernel: SymplecticKernel
    consistency_residual: float
    block_spectrum_residual: float


def two_mode_reduce(j):
    """Schmidt (two-mode squeezing) form of a photon-pair Hamiltonian.

    ``F = U_s diag(F_D) U_i^T``, so ``H = (U_s + U_i)[[0, F_D], [F_D, 0]](U_s + U_i)^T``
    and the kernel in that basis is ``C = cosh F_D (+) cosh F_D``,
    ``S = -i [[0, sinh F_D], [sinh F_D, 0]]``. The returned residuals compare
    this form against :func:`propagate` of the full Hamiltonian carried into
    the two-mode basis, and the singular spectra of the two diagonal blocks
    of that transformed ``C``.
    """
    f = np.asarray(j.F)
    ns, ni = f.shape
    if ns != ni:
        raise ShapeMismatch("two-mode reduction needs a square JSA matrix")
    w, fd, yh = np.linalg.svd(f)
    u_s, u_i = w, yh.T
    z = np.zeros((ns, ns))
    ch, sh = np.diag(np.cosh(fd)), np.diag(np.sinh(fd))
    kernel = SymplecticKernel(np.block([[ch, z], [z, ch]]), -1j * np.block([[z, sh], [sh, z]]))

    full = propagate(j.hamiltonian())
    p = np.block([[u_s, z], [z, u_i]])
    c_two = p.conj().T @ full.C @ p
    s_two = p.conj().T @ full.S @ p.conj()
    consistency = float(np.linalg.norm(c_two - kernel.C) + np.linalg.norm(s_two - kernel.S))
    sv_ss = np.linalg.svd(c_two[:ns, :ns], compute_uv=False)
    sv_ii = np.linalg.svd(c_two[ns:, ns:], compute_uv=False)
    return TwoModeReduction(
        u_s, u_i, fd, kernel, consistency, float(np.max(np.abs(sv_ss - sv_ii)))
    )


@dataclass(frozen=True)
class EquivalenceReport:
    r: float
    beamsplitter: np.ndarray
    residual: float


def single_vs_two_mode_equiv(r):
    """Check that a two-mode squeezer is two equal single-mode squeezers
    conjugated by a balanced beamsplitter ``U`` with ``U U^T = X``."""
    single = SymplecticKernel.squeezers([r, r])
    two = SymplecticKernel.two_mode_squeezer(r)
    u = takagi(np.array([[0.0, 1.0], [1.0, 0.0]])).unitary
    big = np.block([[u, np.zeros((2, 2))], [np.zeros((2, 2)), u.conj()]])
    rebuilt = big @ single.matrix @ big.conj().T
    return EquivalenceReport(float(r), u, float(np.linalg.norm(rebuilt - two.matrix)))


__all__ = [
    "GATDecomposition",
    "JSABlockHamiltonian",
    "SymmetricHamiltonian",
    "TakagiDecomposition",
    "TensorHamiltonian",
    "TwoModeReduction",
    "antoine_takagi",
    "congruence_truncate",
    "generalized_antoine_takagi",
    "propagate",
    "propagate_tensor",
    "rotate_squeezing_phase",
    "single_vs_two_mode_equiv",
    "truncate_hamiltonian",
    "two_mode_reduce",
]
