"""Discretised Bogoliubov kernels and the conventional Bloch-Messiah reduction.

A kernel is the pair ``(C, S)`` acting on mode operators as
``b = C a + S a^dagger``; the full transformation on ``(a, a^dagger)`` is
``M = [[C, S], [S^*, C^*]]``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSupport, NotSymplectic, NotUnitary, ShapeMismatch
from .linalg import (
    as_complex_matrix,
    coupled_groups,
    degenerate_groups,
    is_unitary,
    random_unitary,
    takagi,
)

DEFAULT_TOL = 1e-8
# squeezing below this fraction of max(1, s_max) counts as unsqueezed
SUPPORT_RTOL = 1e-10

CONSTRAINTS = (
    "CCdag-SSdag=1",
    "CST-SCT=0",
    "CdagC-STSconj=1",
    "CdagS-STCconj=0",
)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SymplecticKernel:
    C: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        c = as_complex_matrix(self.C, "C")
        s = as_complex_matrix(self.S, "S")
        if c.shape != s.shape:
            raise ShapeMismatch(f"C {c.shape} and S {s.shape} differ in shape")
        object.__setattr__(self, "C", _frozen(c))
        object.__setattr__(self, "S", _frozen(s))

    @property
    def dim(self):
        return self.C.shape[0]

    @property
    def matrix(self):
        """The ``2N x 2N`` complex-form transformation ``M``."""
        return np.block([[self.C, self.S], [self.S.conj(), self.C.conj()]])

    @property
    def photon_number(self):
        """Mean output photon number for vacuum input, ``||S||_F^2``."""
        return float(np.linalg.norm(self.S) ** 2)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n), np.zeros((n, n)))

    @classmethod
    def squeezers(cls, r):
        """Independent single-mode squeezers with parameters ``r``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return cls(np.diag(np.cosh(r)), np.diag(np.sinh(r)))

    @classmethod
    def two_mode_squeezer(cls, r):
        c, s = np.cosh(r), np.sinh(r)
        return cls(c * np.eye(2), s * np.array([[0.0, 1.0], [1.0, 0.0]]))

    @classmethod
    def passive(cls, w):
        w = as_complex_matrix(w, "W")
        return cls(w, np.zeros_like(w))

    @classmethod
    def from_matrix(cls, m):
        m = as_complex_matrix(m, "M")
        n = m.shape[0] // 2
        if m.shape[0] != 2 * n:
            raise ShapeMismatch("M must have even dimension")
        return cls(m[:n, :n], m[:n, n:])


@dataclass(frozen=True)
class SymplecticReport:
    residuals: dict
    tol: float
    scale: float

    @property
    def valid(self):
        return all(r < self.tol * self.scale for r in self.residuals.values())

    @property
    def max_residual(self):
        return max(self.residuals.values())


def symplectic_residuals(c, s):
    n = c.shape[0]
    eye = np.eye(n)
    ch, st = c.conj().T, s.T
    return dict(
        zip(
            CONSTRAINTS,
            (
                float(np.linalg.norm(c @ ch - s @ s.conj().T - eye)),
                float(np.linalg.norm(c @ st - s @ c.T)),
                float(np.linalg.norm(ch @ c - st @ s.conj() - eye)),
                float(np.linalg.norm(ch @ s - st @ c.conj())),
            ),
        )
    )


def validate_symplectic(k, tol=DEFAULT_TOL):
    """Frobenius residuals of the four commutator-preservation constraints.

    The kernel is valid when every residual is below
    ``tol * max(1, ||C||_2^2)``; the scale keeps strongly squeezed kernels from
    failing on round-off alone.
    """
    if k.C.shape != k.S.shape:
        raise ShapeMismatch("C and S must have equal shapes")
    scale = max(1.0, float(np.linalg.norm(k.C, 2)) ** 2)
    return SymplecticReport(symplectic_residuals(k.C, k.S), tol, scale)


def compose(k1, k2):
    """Kernel of ``M1 @ M2`` (``k2`` acts first)."""
    if k1.dim != k2.dim:
        raise ShapeMismatch(f"cannot compose kernels of dims {k1.dim} and {k2.dim}")
    return SymplecticKernel(
        k1.C @ k2.C + k1.S @ k2.S.conj(),
        k1.C @ k2.S + k1.S @ k2.C.conj(),
    )


def inverse(k):
    return SymplecticKernel(k.C.conj().T, -k.S.T)


def apply_passive(k, w, side="output"):
    """Follow (``output``) or precede (``input``) ``k`` by the passive unitary ``w``."""
    w = as_complex_matrix(w, "W")
    if w.shape[0] != k.dim:
        raise ShapeMismatch(f"W has dim {w.shape[0]}, kernel has {k.dim}")
    if not is_unitary(w, atol=1e-10):
        raise NotUnitary("W is not unitary within 1e-10")
    if side == "output":
        return SymplecticKernel(w @ k.C, w @ k.S)
    if side == "input":
        return SymplecticKernel(k.C @ w.conj().T, k.S @ w.T)
    raise ValueError(f"side must be 'input' or 'output', got {side!r}")


def random_kernel(n, rng=None, r_max=1.0, r=None, layers=2):
    """Random valid kernel built from alternating passives and squeezer banks.

    Pass ``r`` (length ``n``) to fix the squeezers of a single layer; the
    Bloch-Messiah spectrum is then exactly ``sinh(r)``.
    """
    rng = np.random.default_rng(rng)
    k = SymplecticKernel.passive(random_unitary(n, rng))
    if r is not None:
        layers_r = [np.asarray(r, dtype=float)]
    else:
        layers_r = [rng.uniform(0, r_max, n) for _ in range(layers)]
    for rr in layers_r:
        k = compose(SymplecticKernel.squeezers(rr), k)
        k = compose(SymplecticKernel.passive(random_unitary(n, rng)), k)
    return k


@dataclass(frozen=True)
class BMDecomposition:
    """``C = U diag(c) V^dagger`` and ``S = U diag(s) V^T``."""

    U: np.ndarray
    V: np.ndarray
    c_diag: np.ndarray
    s_diag: np.ndarray
    squeezed_count: int

    @property
    def squeezing(self):
        """Squeezing parameters ``r = arcsinh(s)``."""
        return np.arcsinh(self.s_diag)

    @property
    def photon_number(self):
        return float(np.sum(self.s_diag**2))

    def reconstruct(self):
        return SymplecticKernel(
            (self.U * self.c_diag) @ self.V.conj().T,
            (self.U * self.s_diag) @ self.V.T,
        )

    def residual(self, k):
        r = self.reconstruct()
        return float(np.linalg.norm(r.C - k.C) + np.linalg.norm(r.S - k.S))


def bloch_messiah(k, tol=DEFAULT_TOL):
    """Bloch-Messiah reduction in four steps.

    1. ``C C^dagger U = U C_D^2`` (eigendecomposition, descending).
    2. ``V_C = (C_D^{-1} U^dagger C)^dagger``.
    3. On the squeezed support, ``V_S^dagger = S_D^{-1} U^dagger S``.
    4. Takagi-factor ``G = V_C^dagger V_S^*`` blockwise over equal squeezing
       values, ``G = D D^T``, and rotate ``U <- U D``, ``V <- V_C D``.

    ``S_D`` is read off as the row norms of ``U^dagger S`` rather than
    ``sqrt(C_D^2 - 1)``, which loses all relative accuracy for weak squeezing.

    Raises:
        NotSymplectic: if :func:`validate_symplectic` fails at ``tol``.
        DegenerateSupport: if ``C`` has singular values below ``1 - tol``.
    """
    report = validate_symplectic(k, tol)
    if not report.valid:
        raise NotSymplectic(f"kernel fails symplectic constraints: {report.residuals}")
    c, s = np.asarray(k.C), np.asarray(k.S)
    cc = c @ c.conj().T
    evals, u = np.linalg.eigh(0.5 * (cc + cc.conj().T))
    evals, u = evals[::-1], u[:, ::-1]
    if evals.min() < (1.0 - tol) ** 2:
        raise DegenerateSupport(
            f"C has singular value {np.sqrt(max(evals.min(), 0)):.6g} < 1"
        )
    # within a cluster of equal C_D the eigenvectors are arbitrary, and for weak
    # squeezing C_D^2 - 1 sits below round-off; an SVD of U_c^dagger S fixes
    # the basis from S itself
    for grp in degenerate_groups(evals):
        if grp.size > 1:
            w, _, _ = np.linalg.svd(u[:, grp].conj().T @ s)
            u[:, grp] = u[:, grp] @ w
    u = np.ascontiguousarray(u)
    c_diag = np.sqrt(np.maximum(evals, 1.0))
    v_c = c.conj().T @ u / c_diag

    us = u.conj().T @ s
    s_diag = np.linalg.norm(us, axis=1)
    support = np.flatnonzero(s_diag > SUPPORT_RTOL * max(1.0, s_diag.max()))
    s_diag[np.setdiff1d(np.arange(k.dim), support)] = 0.0
    v_s = (us[support] / s_diag[support, None]).conj().T
    g = v_c[:, support].conj().T @ v_s.conj()

    d = np.zeros((support.size, support.size), dtype=complex)
    for grp in coupled_groups(s_diag[support], g):
        blk = g[np.ix_(grp, grp)]
        # G is symmetric in exact arithmetic; its rounding noise grows as 1/s
        d[np.ix_(grp, grp)] = takagi(0.5 * (blk + blk.T)).unitary
    u_out, v_out = u.copy(), v_c.copy()
    u_out[:, support] = u[:, support] @ d
    v_out[:, support] = v_c[:, support] @ d
    return BMDecomposition(u_out, v_out, c_diag, s_diag, int(support.size))
