"""Command-line front end.

Every command writes its numbers to a JSON report; logs go to stderr.
Exit codes: 0 success, 1 validation or parse failure, 2 usage error.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, fock, hamiltonian, symplectic, tensor
from .errors import DecompositionError, RouteMismatch
from .fileformat import read_kernel_file, sha256_file, to_jsonable, write_kernel, write_report
from .fixtures import fixture_double_gaussian

log = logging.getLogger("multisqueeze")

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class InputKindError(DecompositionError):
    pass


def _as_kernel(kf):
    """Flat kernel from any input kind (Hamiltonians are propagated)."""
    obj = kf.obj
    if isinstance(obj, symplectic.SymplecticKernel):
        return obj
    if isinstance(obj, tensor.TensorKernel):
        return tensor.flatten(obj)
    if isinstance(obj, hamiltonian.SymmetricHamiltonian):
        return hamiltonian.propagate(obj)
    return hamiltonian.propagate(obj.as_matrix())


def _as_tensor_kernel(kf):
    obj = kf.obj
    if isinstance(obj, tensor.TensorKernel):
        return obj
    if isinstance(obj, hamiltonian.TensorHamiltonian):
        return hamiltonian.propagate_tensor(obj)
    return tensor.fold(_as_kernel(kf), kf.n_spectral, kf.n_spatial)


def _as_tensor_hamiltonian(kf):
    obj = kf.obj
    if isinstance(obj, hamiltonian.TensorHamiltonian):
        return obj
    if isinstance(obj, hamiltonian.SymmetricHamiltonian):
        return hamiltonian.TensorHamiltonian.from_matrix(obj, kf.n_spectral, kf.n_spatial)
    raise InputKindError(f"command needs a Hamiltonian input, got {kf.kind!r}")


def _base_report(args, kf, command):
    return {
        "command": command,
        "input": {"path": str(args.input), "sha256": sha256_file(args.input), "kind": kf.kind},
        "shape": {"n_spectral": kf.n_spectral, "n_spatial": kf.n_spatial},
    }


def _symplectic_block(k, tol):
    rep = symplectic.validate_symplectic(k, tol)
    return rep.valid, dict(rep.residuals)


def cmd_validate(args, kf):
    report = _base_report(args, kf, "validate")
    obj = kf.obj
    if isinstance(obj, (hamiltonian.SymmetricHamiltonian, hamiltonian.TensorHamiltonian)):
        h = obj.H if obj.H.ndim == 2 else obj.as_matrix().H
        res = {"H-HT": float(np.linalg.norm(h - h.T))}
        valid = True
    else:
        valid, res = _symplectic_block(_as_kernel(kf), args.tol)
    report.update(valid=valid, residuals=res, tol=args.tol)
    return report, valid


def _decompose_bm(kf, tol):
    k = _as_kernel(kf)
    bm = symplectic.bloch_messiah(k, tol)
    valid, res = _symplectic_block(k, tol)
    res["reconstruction"] = bm.residual(k)
    res["U-unitarity"] = float(np.linalg.norm(bm.U @ bm.U.conj().T - np.eye(k.dim)))
    res["V-unitarity"] = float(np.linalg.norm(bm.V @ bm.V.conj().T - np.eye(k.dim)))
    r = bm.squeezing
    return res, {
        "U": bm.U,
        "V": bm.V,
        "c_diag": bm.c_diag,
        "s_diag": bm.s_diag,
        "squeezing": r,
        "squeezing_db": 20.0 * r / np.log(10.0),
        "squeezed_count": bm.squeezed_count,
        "photon_number": bm.photon_number,
    }


def _hamiltonian_matrix(kf):
    obj = kf.obj
    if isinstance(obj, hamiltonian.SymmetricHamiltonian):
        return obj
    if isinstance(obj, hamiltonian.TensorHamiltonian):
        return obj.as_matrix()
    raise InputKindError(f"command needs a Hamiltonian input, got {kf.kind!r}")


def _decompose_takagi(kf, tol, propagate=False):
    h = _hamiltonian_matrix(kf)
    t = hamiltonian.antoine_takagi(h)
    n = h.dim
    res = {
        "reconstruction": float(np.linalg.norm(t.reconstruct() - h.H)),
        "U-unitarity": float(np.linalg.norm(t.unitary @ t.unitary.conj().T - np.eye(n))),
    }
    out = {"U": t.unitary, "diag": t.diag}
    if propagate:
        k = hamiltonian.propagate(h)
        _, sres = _symplectic_block(k, tol)
        res.update({f"kernel:{key}": v for key, v in sres.items()})
        out.update(squeezing=t.diag, squeezing_db=20.0 * t.diag / np.log(10.0),
                   photon_number=k.photon_number)
    return res, out


def _decompose_hosvd(kf, tol):
    if kf.kind in ("tensor-hamiltonian", "hamiltonian"):
        t = _as_tensor_hamiltonian(kf).H
    else:
        t = _as_tensor_kernel(kf).S
    h = tensor.hosvd(t)
    res = {
        "reconstruction": float(np.linalg.norm(h.reconstruct() - t)),
        "all-orthogonality": h.orthogonality_residual(),
        "norm-conservation": float(abs(np.linalg.norm(h.core) - np.linalg.norm(t))),
    }
    return res, {
        "factors": list(h.factors),
        "core": h.core,
        "singular_values": list(h.singular_values),
    }


def _decompose_gbm(kf, tol):
    tk = _as_tensor_kernel(kf)
    g = tensor.gbm(tk, tol)
    rec = g.reconstruct()
    core_valid, core_res = _symplectic_block(tensor.flatten(g.core_kernel), tol)
    h = tensor.HOSVDResult((g.U_t, g.U_s, g.V_t, g.V_s), g.S_core, g.singular_values)
    res = {
        "reconstruction-C": float(np.linalg.norm(rec.C - tk.C)),
        "reconstruction-S": float(np.linalg.norm(rec.S - tk.S)),
        "all-orthogonality": h.orthogonality_residual(),
    }
    res.update({f"core:{k}": v for k, v in core_res.items()})
    norms = g.spectral_slice_norms()
    out = {
        "U_t": g.U_t,
        "U_s": g.U_s,
        "V_t": g.V_t,
        "V_s": g.V_s,
        "S_core": g.S_core,
        "C_core": g.C_core,
        "singular_values": list(g.singular_values),
        "spectral_slice_norms": norms,
        "captured_photon_number": np.cumsum(norms**2),
        "photon_number": float(np.sum(norms**2)),
    }
    if tk.n_spatial == 2 and tk.n_spectral % 2 == 0:
        st = analysis.two_mode_structure(g)
        out["two_mode"] = {
            "s_leakage": st.s_leakage,
            "c_leakage": st.c_leakage,
            "spectral_mixing": st.spectral_mixing,
            "spatial_offdiag": st.spatial_offdiag,
            "kronecker_residual": st.kronecker_residual,
            "two_mode_form": st.passed(),
        }
    return res, out


def _decompose_gat(kf, tol):
    th = _as_tensor_hamiltonian(kf)
    g = hamiltonian.generalized_antoine_takagi(th)
    res = {"reconstruction": float(np.linalg.norm(g.reconstruct() - th.H))}
    return res, {
        "U_t": g.U_t,
        "U_s": g.U_s,
        "core": g.core,
        "singular_values": list(g.singular_values),
        "spectral_slice_norms": g.spectral_slice_norms(),
    }


def cmd_decompose(args, kf):
    report = _base_report(args, kf, f"decompose:{args.mode}")
    t0 = time.perf_counter()
    if args.mode == "bm":
        res, out = _decompose_bm(kf, args.tol)
    elif args.mode == "takagi":
        res, out = _decompose_takagi(kf, args.tol)
    elif args.mode == "at":
        res, out = _decompose_takagi(kf, args.tol, propagate=True)
    elif args.mode == "hosvd":
        res, out = _decompose_hosvd(kf, args.tol)
    elif args.mode == "gbm":
        res, out = _decompose_gbm(kf, args.tol)
    else:
        res, out = _decompose_gat(kf, args.tol)
    report.update(residuals=res, results=out, timing={"seconds": time.perf_counter() - t0})
    return report, True


def cmd_truncate(args, kf):
    t0 = time.perf_counter()
    tk = _as_tensor_kernel(kf)
    g = tensor.gbm(tk, args.tol)
    tr = tensor.truncate(g, args.d)
    grid = dict(kf.grid)
    grid["truncation"] = {
        "d_spectral": tr.d_spectral,
        "captured_photon_number": tr.captured_photon_number,
        "total_photon_number": tr.total_photon_number,
        "source_sha256": sha256_file(args.input),
    }
    write_kernel(tr.kernel, args.out, grid)
    log.info("wrote truncated kernel to %s", args.out)
    report = _base_report(args, kf, "truncate")
    _, res = _symplectic_block(tensor.flatten(tr.kernel), args.tol)
    report.update(
        residuals=res,
        results={
            "d_spectral": tr.d_spectral,
            "captured_photon_number": tr.captured_photon_number,
            "total_photon_number": tr.total_photon_number,
            "captured_fraction": tr.captured_photon_number / tr.total_photon_number
            if tr.total_photon_number > 0 else 1.0,
            "output": str(args.out),
            "output_sha256": sha256_file(args.out),
        },
        timing={"seconds": time.perf_counter() - t0},
    )
    return report, True


def cmd_analyze(args, kf):
    t0 = time.perf_counter()
    report = _base_report(args, kf, f"analyze:{args.what}")
    if args.what == "loss":
        tk = _as_tensor_kernel(kf)
        ls = analysis.lossy_squeezing(tk, args.bus, args.tol)
        report.update(
            residuals={"route-difference": abs(ls.min_variance_bm - ls.min_variance_gbm)},
            results={
                "bus": args.bus,
                "min_variance": ls.min_variance,
                "min_variance_bm": ls.min_variance_bm,
                "min_variance_gbm": ls.min_variance_gbm,
                "squeezing_db": ls.db,
                "mode": ls.mode,
                "kept_modes": ls.kept_modes,
            },
        )
    elif args.what == "two-mode":
        h = _hamiltonian_matrix(kf)
        split = kf.grid.get("split")
        if split is None:
            raise InputKindError("two-mode analysis needs grid.split in the input file")
        split = int(split)
        f = h.H[:split, split:]
        if np.linalg.norm(h.H[:split, :split]) + np.linalg.norm(h.H[split:, split:]) > 1e-12 * max(
            1.0, np.linalg.norm(h.H)
        ):
            log.warning("Hamiltonian has signal-signal or idler-idler terms; using the off-diagonal block")
        red = hamiltonian.two_mode_reduce(hamiltonian.JSABlockHamiltonian(f))
        w = red.F_D**2
        report.update(
            residuals={
                "kernel-consistency": red.consistency_residual,
                "block-spectrum": red.block_spectrum_residual,
            },
            results={
                "U_s": red.U_s,
                "U_i": red.U_i,
                "F_D": red.F_D,
                "schmidt_weights": w / w.sum() if w.sum() > 0 else w,
                "purity": float(np.sum((w / w.sum()) ** 2)) if w.sum() > 0 else 1.0,
                "photon_number": red.kernel.photon_number,
            },
        )
    else:
        rep = analysis.ghz_check(_hamiltonian_matrix(kf), args.tol)
        report.update(
            residuals={
                "block_offdiag": rep.block_offdiag,
                "diagonal_symmetry": rep.diagonal_symmetry,
                "offdiagonal_symmetry": rep.offdiagonal_symmetry,
                "parasitic": rep.parasitic,
            },
            results={"passed": rep.passed, "diagonals": rep.diagonals, "unitaries": list(rep.unitaries)},
        )
    report["timing"] = {"seconds": time.perf_counter() - t0}
    return report, True


def _read_projector(path):
    doc = json.loads(Path(path).read_text())
    accept = {}
    for entry in doc["accept"]:
        accept[tuple(int(n) for n in entry["occupation"])] = str(entry.get("label", entry["occupation"]))
    return fock.PostselectionProjector(accept)


def cmd_fock(args, kf):
    t0 = time.perf_counter()
    k = _as_kernel(kf)
    proj = _read_projector(args.proj)
    if proj.n_photons != args.sector:
        raise fock.PhotonNumberMismatch(
            f"projector tuples carry {proj.n_photons} photons, --sector is {args.sector}"
        )
    bm = symplectic.bloch_messiah(k, args.tol)
    support = np.flatnonzero(bm.s_diag > 0)
    state = fock.squeezed_vacuum_expand(bm.squeezing[support], args.sector)
    res = fock.postselect(state, bm.U[:, support], proj)
    report = _base_report(args, kf, "fock:postselect")
    report.update(
        residuals={"bm-reconstruction": bm.residual(k)},
        results={
            "sector": args.sector,
            "sector_norm": state.sector_norms().get(args.sector, 0.0),
            "probability": res.probability,
            "amplitudes": res.amplitudes,
        },
        timing={"seconds": time.perf_counter() - t0},
    )
    return report, True


def cmd_fixture(args):
    j = fixture_double_gaussian(args.sigma_plus, args.sigma_minus, args.bins, args.amplitude)
    grid = {
        "frequencies": np.asarray(j.frequencies),
        "split": j.split,
        "fixture": {
            "name": "double-gaussian",
            "sigma_plus": args.sigma_plus,
            "sigma_minus": args.sigma_minus,
            "bins": args.bins,
            "amplitude": args.amplitude,
        },
    }
    if args.form == "hamiltonian":
        obj = j.hamiltonian()
    elif args.form == "kernel":
        obj = hamiltonian.propagate(j.hamiltonian())
    else:
        th = analysis.dichroic_sandwich(analysis.embed_spatial(j.hamiltonian(), 2, 0))
        obj = hamiltonian.propagate_tensor(th)
        grid["spatial"] = ["signal-port", "idler-port"]
    write_kernel(obj, args.out, grid)
    log.info("wrote %s fixture to %s", args.form, args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="multisqueeze", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("input", type=Path)
        sp.add_argument("--out", type=Path, required=out_required)
        sp.add_argument("--tol", type=float, default=symplectic.DEFAULT_TOL)

    common(sub.add_parser("validate", help="check kernel constraints"), out_required=False)

    dp = sub.add_parser("decompose", help="run a decomposition")
    dp.add_argument("--mode", required=True, choices=["bm", "takagi", "at", "hosvd", "gbm", "gat"])
    common(dp)

    tp = sub.add_parser("truncate", help="keep the leading GBM spectral modes")
    tp.add_argument("--d", type=int, required=True)
    tp.add_argument("--report", type=Path)
    common(tp)

    ap = sub.add_parser("analyze", help="physical analyses")
    asub = ap.add_subparsers(dest="what", required=True)
    lp = asub.add_parser("loss")
    lp.add_argument("--bus", type=int, required=True)
    common(lp)
    common(asub.add_parser("two-mode"))
    gp = asub.add_parser("ghz")
    common(gp)
    gp.set_defaults(tol=1e-10)

    fp = sub.add_parser("fock", help="Fock-space post-selection")
    fsub = fp.add_subparsers(dest="what", required=True)
    pp = fsub.add_parser("postselect")
    pp.add_argument("--proj", type=Path, required=True)
    pp.add_argument("--sector", type=int, required=True)
    common(pp)

    xp = sub.add_parser("fixture", help="write a test input")
    xsub = xp.add_subparsers(dest="what", required=True)
    dg = xsub.add_parser("double-gaussian")
    dg.add_argument("--sigma-plus", type=float, required=True)
    dg.add_argument("--sigma-minus", type=float, required=True)
    dg.add_argument("--bins", type=int, default=64)
    dg.add_argument("--amplitude", type=float, default=0.05,
                    help="JSA scale; the default keeps the leading squeezing moderate at 64 bins")
    dg.add_argument("--form", choices=["hamiltonian", "kernel", "dichroic-kernel"], default="hamiltonian")
    dg.add_argument("--out", type=Path, required=True)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "fixture":
            return cmd_fixture(args)
        kf = read_kernel_file(args.input)
        handler = {
            "validate": cmd_validate,
            "decompose": cmd_decompose,
            "truncate": cmd_truncate,
            "analyze": cmd_analyze,
            "fock": cmd_fock,
        }[args.command]
        report, ok = handler(args, kf)
    except FileNotFoundError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except (DecompositionError, RouteMismatch) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INVALID
    target = args.report if args.command == "truncate" else args.out
    if target is not None:
        write_report(report, target)
        log.info("wrote report to %s", target)
    elif args.command == "validate":
        json.dump(to_jsonable(report), sys.stdout, indent=1)
        sys.stdout.write("\n")
    if not ok:
        log.error("validation failed")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
