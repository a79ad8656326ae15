"""Dense complex linear-algebra primitives.

Takagi factorisation with explicit handling of degenerate singular values,
a pivoted Gram-Schmidt that reports the coefficient matrix, a Ryser permanent,
and the phase / degenerate-subspace conventions shared by every SVD in the
package.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import unitary_group

from .errors import EmptyInput, NonFinite, NotSymmetric, ShapeMismatch, TooLarge

# relative width of a degenerate singular-value cluster
DEGENERACY_RTOL = 1e-8
# ties in "largest-magnitude entry" are resolved to the lowest index
_PHASE_TIE_RTOL = 1e-10
PERMANENT_MAX_DIM = 16


def as_complex_matrix(a, name="matrix", square=True):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-dimensional, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf entries")
    return a


def random_unitary(n, rng=None):
    """Haar-random ``n x n`` unitary."""
    if n == 1:
        rng = np.random.default_rng(rng)
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(n, random_state=np.random.default_rng(rng))


def is_unitary(u, atol=1e-10):
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u @ u.conj().T, np.eye(u.shape[0]), atol=atol, rtol=0
    )


def fix_column_phases(u):
    """Rotate every column so its largest-magnitude entry is real positive.

    Ties (within a relative 1e-10) go to the lowest row index.
    """
    u = np.array(u, dtype=complex)
    mags = np.abs(u)
    for k in range(u.shape[1]):
        col = mags[:, k]
        top = col.max()
        if top == 0:
            continue
        idx = int(np.flatnonzero(col >= top * (1 - _PHASE_TIE_RTOL))[0])
        u[:, k] *= np.conj(u[idx, k]) / col[idx]
    return u


def degenerate_groups(values, rtol=DEGENERACY_RTOL, scale=None):
    """Split a sorted sequence into clusters of (near-)equal values.

    Consecutive entries closer than ``rtol * scale`` share a cluster, with
    ``scale`` defaulting to ``max(|values|)``. Returns a list of index arrays
    in the original order.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    if scale is None:
        scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
    breaks = np.flatnonzero(np.abs(np.diff(values)) > rtol * scale) + 1
    return np.split(np.arange(values.size), breaks)


def coupled_groups(values, coupling, cutoff=1e-12):
    """Clusters of :func:`degenerate_groups` split by an explicit coupling matrix.

    Within a cluster, ``i`` and ``j`` stay together only if linked by a chain
    of entries with ``|coupling[i, j]| * max(values[i], values[j])`` above
    ``cutoff * max(values)``; that product bounds the reconstruction error of
    ignoring the link. Long runs of tiny, distinct singular values chain into
    one cluster under a gap test but have negligible weighted coupling, so
    they separate again.
    """
    from scipy.sparse.csgraph import connected_components

    values = np.asarray(values, dtype=float)
    top = max(float(np.max(np.abs(values), initial=0.0)), np.finfo(float).tiny)
    groups = []
    for grp in degenerate_groups(values):
        if grp.size == 1:
            groups.append(grp)
            continue
        v = values[grp]
        weight = np.abs(coupling[np.ix_(grp, grp)]) * np.maximum.outer(v, v)
        _, labels = connected_components(weight > cutoff * top, directed=False)
        groups.extend(grp[labels == lab] for lab in np.unique(labels))
    return groups


def localize_subspace(w):
    """Deterministic orthonormal basis of ``span(w)`` that prefers sparse vectors.

    A column-pivoted QR on ``w^T`` picks pivot rows; the basis is brought to
    reduced echelon form on those rows (so vectors spanning disjoint supports
    come out separated), orthonormalised in pivot order, and returned sorted
    by pivot row.
    """
    from scipy.linalg import qr

    w = np.asarray(w, dtype=complex)
    k = w.shape[1]
    if k <= 1:
        return w.copy()
    _, _, piv = qr(w.T, pivoting=True, mode="economic")
    rows = np.sort(piv[:k])
    echelon = w @ np.linalg.inv(w[rows, :])
    q, r = np.linalg.qr(echelon)
    # undo the arbitrary signs LAPACK attaches to Householder QR
    q = q * (np.sign(np.diag(r).real) + (np.diag(r).real == 0))
    return q


def symmetric_unitary_factor(g):
    """Return ``d`` with ``d @ d.T == g`` for a symmetric unitary ``g``.

    ``Re g`` and ``Im g`` are commuting real symmetric matrices, so one real
    orthogonal ``q`` diagonalises both; with eigenphases ``theta`` of ``g`` in
    that basis, ``d = q diag(exp(i theta / 2))``.
    """
    g = np.asarray(g, dtype=complex)
    n = g.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    g = 0.5 * (g + g.T)
    re, im = g.real, g.imag
    evals, q = np.linalg.eigh(re)
    im_rot = q.T @ im @ q
    # clusters of Re-eigenvalues are resolved by the Im part
    for idx in degenerate_groups(evals, rtol=1e-7, scale=1.0):
        if idx.size > 1:
            blk = im_rot[np.ix_(idx, idx)]
            _, rot = np.linalg.eigh(0.5 * (blk + blk.T))
            q[:, idx] = q[:, idx] @ rot
    theta = np.angle(np.einsum("ij,ik,kj->j", q, g, q))
    return q * np.exp(0.5j * theta)


@dataclass(frozen=True)
class TakagiDecomposition:
    """``A = unitary @ diag(diag) @ unitary.T`` with ``diag`` descending."""

    unitary: np.ndarray
    diag: np.ndarray

    def reconstruct(self):
        return (self.unitary * self.diag) @ self.unitary.T


def takagi(a, tol=1e-10):
    """Takagi (Autonne-Takagi) factorisation of a complex symmetric matrix.

    Starts from a plain SVD ``A = W diag(s) Y^dagger``. Symmetry of ``A``
    forces ``Z = W^dagger Y^*`` to be block diagonal over clusters of equal
    singular values with each block a symmetric unitary; writing each block
    as ``Z_i = D_i D_i^T`` gives ``A = (W D) diag(s) (W D)^T``.

    Args:
        a: square complex matrix with ``a == a.T`` up to ``tol * ||a||_F``.
        tol: relative symmetry tolerance.

    Returns:
        TakagiDecomposition with real non-negative, descending ``diag``.

    Raises:
        NotSymmetric: if ``||a - a.T||_F > tol * ||a||_F``.
        NonFinite: on NaN or Inf entries.
    """
    a = as_complex_matrix(a)
    n = a.shape[0]
    norm = np.linalg.norm(a)
    if norm == 0:
        return TakagiDecomposition(np.eye(n, dtype=complex), np.zeros(n))
    if np.linalg.norm(a - a.T) > tol * norm:
        raise NotSymmetric(
            f"matrix is not symmetric: ||A - A^T|| = {np.linalg.norm(a - a.T):.3e}"
        )
    a = 0.5 * (a + a.T)
    w, s, yh = np.linalg.svd(a)
    u = w.copy()
    zero_cut = 8 * n * np.finfo(float).eps * s[0]
    # for distinct values Z = W^dagger Y^* is a diagonal phase matrix
    z_full = w.conj().T @ yh.T
    for grp in coupled_groups(s, z_full):
        if s[grp].max() <= zero_cut:
            continue
        z = z_full[np.ix_(grp, grp)]
        z = 0.5 * (z + z.T)
        left, _, right = np.linalg.svd(z)
        z = left @ right
        u[:, grp] = w[:, grp] @ symmetric_unitary_factor(z)
    # the remaining freedom is a sign per column
    for k in range(n):
        col = np.abs(u[:, k])
        idx = int(np.flatnonzero(col >= col.max() * (1 - _PHASE_TIE_RTOL))[0])
        if u[idx, k].real < 0:
            u[:, k] = -u[:, k]
    return TakagiDecomposition(u, s)


class GramSchmidtResult(NamedTuple):
    basis: np.ndarray  # rows are orthonormal vectors
    coefficients: np.ndarray  # basis = coefficients @ vectors[kept]
    kept: np.ndarray
    dropped: np.ndarray


def gram_schmidt_pivoted(vectors, drop_tol=1e-10):
    """Orthonormalise a set of vectors, largest residual first.

    At every step the remaining vector with the largest residual norm is
    normalised (two passes of modified Gram-Schmidt) and projected out of the
    rest. Vectors whose residual falls below ``drop_tol`` are dropped.

    Args:
        vectors: sequence of equal-length complex vectors (rows).
        drop_tol: absolute residual-norm threshold.

    Returns:
        GramSchmidtResult. ``kept`` is in pivot order and ``coefficients`` is
        square over it, so ``basis == coefficients @ vectors[kept]``.
    """
    vecs = np.asarray(vectors, dtype=complex)
    if vecs.size == 0:
        raise EmptyInput("no vectors to orthonormalise")
    if vecs.ndim != 2:
        raise ShapeMismatch("vectors must all have the same length")
    m, dim = vecs.shape
    resid = vecs.copy()
    coeff = np.eye(m, dtype=complex)
    basis, rows, kept = [], [], []
    remaining = list(range(m))
    while remaining and len(basis) < dim:
        norms = np.linalg.norm(resid[remaining], axis=1)
        pick = int(np.argmax(norms))
        if norms[pick] < drop_tol:
            break
        j = remaining.pop(pick)
        q, t = resid[j].copy(), coeff[j].copy()
        for _ in range(2):
            for b, tb in zip(basis, rows):
                c = np.vdot(b, q)
                q -= c * b
                t -= c * tb
            nq = np.linalg.norm(q)
            q, t = q / nq, t / nq
        basis.append(q)
        rows.append(t)
        kept.append(j)
        for i in remaining:
            c = np.vdot(q, resid[i])
            resid[i] -= c * q
            coeff[i] -= c * t
    kept = np.array(kept, dtype=int)
    basis = np.array(basis).reshape(len(kept), dim)
    coefficients = np.array(rows).reshape(len(kept), m)[:, kept]
    return GramSchmidtResult(basis, coefficients, kept, np.array(sorted(remaining), dtype=int))


def permanent(a):
    """Permanent via Ryser's formula, visiting subsets in Gray-code order."""
    a = as_complex_matrix(a)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n > PERMANENT_MAX_DIM:
        raise TooLarge(f"permanent limited to dimension {PERMANENT_MAX_DIM}, got {n}")
    cols = [a[:, j] for j in range(n)]
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    for k in range(1, 2**n):
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        if gray >> j & 1:
            row_sums += cols[j]
        else:
            row_sums -= cols[j]
        term = np.prod(row_sums)
        total += -term if bin(gray).count("1") & 1 else term
    return (-1) ** n * total
