"""Acceptance criteria 1-10.

Each test records one ``PASS``/``FAIL`` line with the measured figure; the
lines are printed in the pytest terminal summary, and running this file
directly (``python3 tests/test_acceptance.py``) prints them as well.
"""

import itertools
import json
import shutil
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import random_symmetric, random_tensor_kernel  # noqa: E402
from multisqueeze.analysis import (  # noqa: E402
    dichroic_sandwich,
    embed_spatial,
    ghz_check,
    ghz_hamiltonian,
    kronecker_residual,
    lossy_squeezing,
    two_mode_structure,
)
from multisqueeze.fileformat import read_kernel, read_report, write_kernel  # noqa: E402
from multisqueeze.fixtures import double_gaussian_schmidt_ratio, fixture_double_gaussian, purity  # noqa: E402
from multisqueeze.fock import biphoton_fidelity, biphoton_overlap_direct, passive_transition, transition_matrix  # noqa: E402
from multisqueeze.hamiltonian import (  # noqa: E402
    SymmetricHamiltonian,
    TensorHamiltonian,
    congruence_truncate,
    generalized_antoine_takagi,
    propagate_tensor,
    single_vs_two_mode_equiv,
    truncate_hamiltonian,
)
from multisqueeze.linalg import permanent, random_unitary, takagi  # noqa: E402
from multisqueeze.symplectic import (  # noqa: E402
    SymplecticKernel,
    apply_passive,
    bloch_messiah,
    random_kernel,
    validate_symplectic,
)
from multisqueeze.tensor import captured_photons, flatten, gbm, hosvd, truncate  # noqa: E402

RESULTS = {}
SEED = 1234


def record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} -- {detail}"
    RESULTS[number] = line
    print(line)
    return passed


def criterion_1():
    rng = np.random.default_rng(SEED + 1)
    worst_constraint = worst_bm = worst_degenerate = 0.0
    for i in range(100):
        n = int(rng.integers(2, 9))
        degenerate = i % 3 == 0
        r = None
        if degenerate:
            r = rng.uniform(0.05, 1.2, n)
            r[: max(2, n // 2)] = r[0]
        k = random_kernel(n, rng, r=r, layers=2)
        worst_constraint = max(worst_constraint, validate_symplectic(k).max_residual)
        res = bloch_messiah(k).residual(k)
        if degenerate:
            worst_degenerate = max(worst_degenerate, res)
        else:
            worst_bm = max(worst_bm, res)
    ok = worst_constraint < 1e-9 and worst_bm < 1e-9 and worst_degenerate < 1e-8
    return record(
        1, "symplectic suite (100 kernels)", ok,
        f"constraints {worst_constraint:.1e}, BM {worst_bm:.1e}, degenerate BM {worst_degenerate:.1e}",
    )


def criterion_2():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(2, 11))
        a = random_symmetric(n, rng, degenerate=i % 2 == 0)
        t = takagi(a)
        worst = max(worst, np.linalg.norm(t.reconstruct() - a) / np.linalg.norm(a))
    u = takagi(np.array([[0.0, 1.0], [1.0, 0.0]])).unitary
    anchor = np.abs(u @ u.T - np.array([[0.0, 1.0], [1.0, 0.0]])).max()
    ok = worst < 1e-10 and anchor < 1e-12
    return record(2, "Takagi suite (100 matrices, X anchor)", ok,
                  f"relative reconstruction {worst:.1e}, |UU^T - X| {anchor:.1e}")


def criterion_3():
    rng = np.random.default_rng(SEED + 3)
    worst_orth = worst_norm = 0.0
    for _ in range(50):
        shape = tuple(int(d) for d in rng.integers(1, 6, size=4))
        t = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        h = hosvd(t)
        nt = np.linalg.norm(t)
        worst_orth = max(worst_orth, h.orthogonality_residual() / nt**2)
        worst_norm = max(worst_norm, abs(np.linalg.norm(h.core) - nt) / nt)
    j = fixture_double_gaussian(4.0, 1.0, n_bins=32, amplitude=0.05)
    tk = propagate_tensor(dichroic_sandwich(embed_spatial(j.H)))
    g = gbm(tk)
    st = two_mode_structure(g)
    leak = max(st.s_leakage, st.c_leakage)
    bm_kron = kronecker_residual(bloch_messiah(flatten(tk)).U, tk.n_spectral, tk.n_spatial)
    ok = worst_orth < 1e-9 and worst_norm < 1e-10 and leak < 1e-9 and st.kronecker_residual < 1e-9
    return record(
        3, "HOSVD/GBM suite", ok,
        f"all-orthogonality {worst_orth:.1e}, norm {worst_norm:.1e}, two-mode leakage {leak:.1e}, "
        f"GBM Kronecker residual {st.kronecker_residual:.1e} (plain BM {bm_kron:.2f})",
    )


def criterion_4():
    res = {r: single_vs_two_mode_equiv(r).residual for r in (0.1, 0.4, 1.0, 2.0)}
    worst = max(res.values())
    return record(4, "single vs two-mode equivalence", worst < 1e-9,
                  ", ".join(f"r={r}: {v:.1e}" for r, v in res.items()))


def criterion_5():
    j = fixture_double_gaussian(4.0, 1.0, n_bins=64)
    sv = np.linalg.svd(j.F, compute_uv=False)
    t = double_gaussian_schmidt_ratio(4.0, 1.0)
    rel = np.max(np.abs(sv[:5] / sv[0] - t ** np.arange(5)) / t ** np.arange(5))
    p = purity(fixture_double_gaussian(2.0, 2.0, n_bins=64).F)
    ok = rel < 1e-4 and abs(p - 1) < 1e-10
    return record(5, "double-Gaussian Schmidt spectrum", ok,
                  f"geometric ratio {t} relative error {rel:.1e}, equal-width purity error {abs(p - 1):.1e}")


def criterion_6():
    rng = np.random.default_rng(SEED + 6)
    worst = 0.0
    for _ in range(20):
        tk = random_tensor_kernel(8, 2, rng)
        ls = lossy_squeezing(tk, 0, agreement_tol=np.inf)
        worst = max(worst, abs(ls.min_variance_bm - ls.min_variance_gbm))
    r = 0.7
    from multisqueeze.tensor import fold

    lossless = fold(SymplecticKernel.squeezers([r, 0.0]), 1, 2)
    ls = lossy_squeezing(lossless, 0)
    err = max(abs(ls.min_variance_bm - np.exp(-2 * r)), abs(ls.min_variance_gbm - np.exp(-2 * r)))
    ok = worst < 1e-8 and err < 1e-10
    return record(6, "lossy squeezing routes", ok,
                  f"route difference {worst:.1e} over 20 kernels, lossless error {err:.1e}")


def criterion_7():
    rng = np.random.default_rng(SEED + 7)
    gbm_violations = 0
    for _ in range(10):
        tk = random_tensor_kernel(6, 2, rng)
        best = truncate(gbm(tk), 2).captured_photon_number
        s = flatten(tk).S
        for _ in range(200):
            q = random_unitary(6, rng)[:, :2]
            gbm_violations += captured_photons(s, q, 2) > best + 1e-12
    route = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 8))
        h, h2 = random_symmetric(n, rng), random_symmetric(n, rng)
        formula = 2 * np.sum(h2.conj() * h)
        route = max(route, abs(biphoton_overlap_direct(h, h2) - formula) / max(1.0, abs(formula)))
    gat_violations = 0
    for _ in range(10):
        th = TensorHamiltonian(random_symmetric(6, rng).reshape(6, 1, 6, 1))
        h = th.as_matrix()
        best = biphoton_fidelity(h, truncate_hamiltonian(generalized_antoine_takagi(th), 2).as_matrix())
        for _ in range(100):
            q = random_unitary(6, rng)[:, :2]
            alt = biphoton_fidelity(h, congruence_truncate(th, q).as_matrix())
            gat_violations += alt > best + 1e-12
    ok = gbm_violations == 0 and route < 1e-10 and gat_violations == 0
    return record(
        7, "truncation optimality", ok,
        f"GBM violations {gbm_violations}/2000, biphoton route difference {route:.1e}, "
        f"GAT violations {gat_violations}/1000",
    )


def criterion_8():
    rng = np.random.default_rng(SEED + 8)
    worst_u = 0.0
    for m in range(1, 6):
        for n in range(1, 4):
            t = transition_matrix(random_unitary(m, rng), n)
            worst_u = max(worst_u, np.abs(t @ t.conj().T - np.eye(t.shape[0])).max())
    worst_p = 0.0
    for n in range(1, 7):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ref = sum(np.prod(a[np.arange(n), p]) for p in itertools.permutations(range(n)))
        worst_p = max(worst_p, abs(permanent(a) - ref) / abs(ref))
    bs = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    hom = abs(passive_transition(bs, (1, 1), (1, 1)))
    ok = worst_u < 1e-9 and worst_p < 1e-12 and hom < 1e-12
    return record(8, "Fock suite", ok,
                  f"sector unitarity {worst_u:.1e}, permanent {worst_p:.1e}, HOM (1,1) amplitude {hom:.1e}")


def perturbed_ghz(eps, rng):
    hd, ho = np.array([0.3, 0.1]), np.array([0.5, 0.2])
    core = np.kron(np.ones((3, 3)) - np.eye(3), np.diag(ho)) + np.kron(np.eye(3), np.diag(hd))
    core[0, 0] += eps
    v = np.zeros((6, 6), dtype=complex)
    for i in range(3):
        v[2 * i:2 * i + 2, 2 * i:2 * i + 2] = random_unitary(2, rng)
    return SymmetricHamiltonian(v @ core @ v.T)


def criterion_9():
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for _ in range(10):
        m = int(rng.integers(1, 4))
        rep = ghz_check(ghz_hamiltonian(rng.uniform(0.05, 1, m), rng.uniform(0.05, 1, m), rng=rng))
        worst = max(worst, rep.block_offdiag.max(), rep.symmetry_deviation, rep.parasitic)
    ratios = {eps: ghz_check(perturbed_ghz(eps, rng)).symmetry_deviation / eps for eps in (1e-3, 1e-2)}
    ok = worst < 1e-10 and all(0.5 <= v <= 2.0 for v in ratios.values())
    return record(9, "GHZ suite", ok,
                  f"ideal residuals {worst:.1e}, deviation/eps "
                  + ", ".join(f"{e:g}: {v:.3f}" for e, v in ratios.items()))


def _cli():
    exe = shutil.which("multisqueeze")
    return [exe] if exe else [sys.executable, "-m", "multisqueeze"]


def criterion_10():
    rng = np.random.default_rng(SEED + 10)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bitwise = True
        for i in range(5):
            tk = random_tensor_kernel(3, 2, rng)
            write_kernel(tk, tmp / f"k{i}.json")
            back = read_kernel(tmp / f"k{i}.json")
            bitwise &= np.array_equal(back.C, tk.C) and np.array_equal(back.S, tk.S)
        fx, g, tr, rep = (tmp / n for n in ("fx.json", "gbm.json", "tr.json", "tr_rep.json"))
        steps = [
            ["fixture", "double-gaussian", "--sigma-plus", "4", "--sigma-minus", "1", "--bins", "64",
             "--form", "dichroic-kernel", "--out", str(fx)],
            ["decompose", "--mode", "gbm", str(fx), "--out", str(g)],
            ["truncate", "--d", "2", str(fx), "--out", str(tr), "--report", str(rep)],
        ]
        start = time.perf_counter()
        codes = [subprocess.run(_cli() + s, capture_output=True).returncode for s in steps]
        elapsed = time.perf_counter() - start
        report_ok = all(c == 0 for c in codes) and "captured_photon_number" in read_report(rep)["results"]
    ok = bitwise and report_ok and elapsed < 10.0
    return record(10, "CLI and file format", ok,
                  f"round-trip bitwise {bitwise}, pipeline exit codes {codes}, {elapsed:.1f} s")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(check):
    assert check(), RESULTS.get(int(check.__name__.split("_")[1]))


if __name__ == "__main__":
    failed = [c.__name__ for c in CRITERIA if not c()]
    sys.exit(1 if failed else 0)
