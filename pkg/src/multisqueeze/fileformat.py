"""JSON kernel files and decomposition reports.

Kernel file layout::

    {
      "format": "multisqueeze-kernel",
      "version": 1,
      "kind": "kernel" | "hamiltonian" | "tensor-kernel" | "tensor-hamiltonian",
      "shape": {"n_spectral": 4, "n_spatial": 2},
      "flattening": "omega-major",
      "grid": {...},                       # optional, carried verbatim
      "payload": {"C": [[[re, im], ...], ...], "S": ...}   # or {"H": ...}
    }

Payload matrices are always the flattened ``N x N`` form with
``N = n_spectral * n_spatial`` and row index ``omega * n_spatial + x``.
Python's float repr round-trips exactly, so write/read is bitwise stable.
"""

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, VersionUnsupported
from .hamiltonian import SymmetricHamiltonian, TensorHamiltonian
from .symplectic import SymplecticKernel
from .tensor import TensorKernel, flatten

FORMAT_KERNEL = "multisqueeze-kernel"
FORMAT_REPORT = "multisqueeze-report"
SUPPORTED_VERSIONS = (1,)
KINDS = ("kernel", "hamiltonian", "tensor-kernel", "tensor-hamiltonian")
FLATTENING = "omega-major"


@dataclass(frozen=True)
class KernelFile:
    kind: str
    n_spectral: int
    n_spatial: int
    obj: object
    grid: dict = field(default_factory=dict)
    digest: str = ""


def encode_complex(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(data, field_name):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"non-numeric entries: {exc}", field=field_name) from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ParseError("complex entries must be [re, im] pairs", field=field_name)
    return arr[..., 0] + 1j * arr[..., 1]


def to_jsonable(x):
    """Recursively convert numpy data to JSON types; complex arrays become [re, im]."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return encode_complex(x)
        return x.tolist()
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path, text):
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _kind_of(obj):
    if isinstance(obj, SymplecticKernel):
        return "kernel", obj.dim, 1
    if isinstance(obj, SymmetricHamiltonian):
        return "hamiltonian", obj.dim, 1
    if isinstance(obj, TensorKernel):
        return "tensor-kernel", obj.n_spectral, obj.n_spatial
    if isinstance(obj, TensorHamiltonian):
        return "tensor-hamiltonian", obj.n_spectral, obj.n_spatial
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def kernel_document(obj, grid=None):
    kind, n_w, n_x = _kind_of(obj)
    if kind == "kernel":
        payload = {"C": encode_complex(obj.C), "S": encode_complex(obj.S)}
    elif kind == "tensor-kernel":
        k = flatten(obj)
        payload = {"C": encode_complex(k.C), "S": encode_complex(k.S)}
    elif kind == "hamiltonian":
        payload = {"H": encode_complex(obj.H)}
    else:
        payload = {"H": encode_complex(obj.as_matrix().H)}
    doc = {
        "format": FORMAT_KERNEL,
        "version": 1,
        "kind": kind,
        "shape": {"n_spectral": n_w, "n_spatial": n_x},
        "flattening": FLATTENING,
    }
    if grid:
        doc["grid"] = to_jsonable(grid)
    doc["payload"] = payload
    return doc


def write_kernel(obj, path, grid=None):
    atomic_write_text(path, json.dumps(kernel_document(obj, grid)) + "\n")


def _require(doc, key, types, where=None):
    if key not in doc:
        raise ParseError("missing field", field=f"{where}.{key}" if where else key)
    if not isinstance(doc[key], types):
        raise ParseError(f"expected {types}, got {type(doc[key]).__name__}", field=key)
    return doc[key]


def parse_kernel_document(doc, digest=""):
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    fmt = _require(doc, "format", str)
    if fmt != FORMAT_KERNEL:
        raise ParseError(f"unknown format {fmt!r}", field="format")
    version = _require(doc, "version", int)
    if version not in SUPPORTED_VERSIONS:
        raise VersionUnsupported(f"version {version} not supported (known: {SUPPORTED_VERSIONS})")
    kind = _require(doc, "kind", str)
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", field="kind")
    flat = doc.get("flattening", FLATTENING)
    if flat != FLATTENING:
        raise ParseError(f"unsupported flattening {flat!r}", field="flattening")
    shape = _require(doc, "shape", dict)
    try:
        n_w, n_x = int(shape["n_spectral"]), int(shape["n_spatial"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("needs integer n_spectral and n_spatial", field="shape") from None
    if n_w < 1 or n_x < 1:
        raise ParseError("dimensions must be positive", field="shape")
    if kind in ("kernel", "hamiltonian") and n_x != 1:
        raise ParseError(f"kind {kind!r} requires n_spatial = 1", field="shape.n_spatial")
    payload = _require(doc, "payload", dict)
    n = n_w * n_x
    names = ("C", "S") if kind.endswith("kernel") else ("H",)
    mats = {}
    for name in names:
        fname = f"payload.{name}"
        m = decode_complex(_require(payload, name, list, "payload"), fname)
        if m.shape != (n, n):
            raise ParseError(f"shape {m.shape} does not match declared ({n}, {n})", field=fname)
        if not np.all(np.isfinite(m)):
            raise ParseError("non-finite entries", field=fname)
        mats[name] = m
    grid = doc.get("grid") or {}
    if not isinstance(grid, dict):
        raise ParseError("grid must be an object", field="grid")
    try:
        if kind == "kernel":
            obj = SymplecticKernel(mats["C"], mats["S"])
        elif kind == "tensor-kernel":
            shp = (n_w, n_x, n_w, n_x)
            obj = TensorKernel(mats["C"].reshape(shp), mats["S"].reshape(shp))
        elif kind == "hamiltonian":
            obj = SymmetricHamiltonian(mats["H"])
        else:
            obj = TensorHamiltonian.from_matrix(mats["H"], n_w, n_x)
    except ValueError as exc:
        raise ParseError(str(exc), field="payload") from None
    return KernelFile(kind, n_w, n_x, obj, grid, digest)


def read_kernel_file(path):
    """Parse a kernel file into a :class:`KernelFile` record.

    Raises:
        ParseError: on malformed JSON or inconsistent fields.
        VersionUnsupported: on an unknown format version.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return parse_kernel_document(doc, hashlib.sha256(text.encode()).hexdigest())


def read_kernel(path):
    """Parse a kernel file and return the typed kernel or Hamiltonian."""
    return read_kernel_file(path).obj


def write_report(report, path):
    """Write a report dict as JSON, atomically. Numpy data is converted."""
    doc = {"format": FORMAT_REPORT, "version": 1}
    doc.update(to_jsonable(report))
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def read_report(path):
    return json.loads(Path(path).read_text())


__all__ = [
    "KernelFile",
    "decode_complex",
    "encode_complex",
    "kernel_document",
    "read_kernel",
    "read_kernel_file",
    "read_report",
    "sha256_file",
    "to_jsonable",
    "write_kernel",
    "write_report",
]
