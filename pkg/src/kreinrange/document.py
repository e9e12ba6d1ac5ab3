"""Reading matrix documents.

A document is a JSON object::

    {
      "format_version": "1",
      "metric": {"kind": "signature", "r": 3, "n": 6},
      "matrix": [[[re, im], ...], ...],
      "structure": {"kind": "tridiagonal", "alpha": [re, im], ...}
    }

``metric`` may also be ``{"kind": "hermitian", "entries": [[[re, im], ...], ...]}``
(reduced to a signature by Sylvester inertia) or ``{"kind": "diagonal",
"signs": [1, -1, ...]}``.  ``matrix`` is either nested rows or a flat
row-major list of pairs.  When ``structure`` fully determines the matrix
(``tridiagonal``, ``arrowhead``, ``block``) the ``matrix`` key may be omitted.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import DiagonalMetric, Signature, as_matrix, inertia_reduce
from .errors import DocumentError, InvalidDimension
from .pipeline import StructureHint
from .tridiagonal import TridiagonalSpec

SUPPORTED_VERSIONS = {"1"}


@dataclass(frozen=True, eq=False)
class MatrixDocument:
    name: str
    matrix: np.ndarray
    metric: Union[Signature, DiagonalMetric]
    hint: Optional[StructureHint] = None
    reduction: Optional[np.ndarray] = None


def _scalar(v, what: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise DocumentError(f"{what}: expected a number or an [re, im] pair, got {v!r}")


def _vector(v, what: str) -> np.ndarray:
    if not isinstance(v, list):
        raise DocumentError(f"{what}: expected a list")
    return np.array([_scalar(x, what) for x in v], dtype=complex)


def _matrix(v, what: str, n: Optional[int] = None) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise DocumentError(f"{what}: expected a non-empty list")
    if all(isinstance(row, list) and row and isinstance(row[0], list) for row in v):
        rows = [[_scalar(x, what) for x in row] for row in v]
        if len({len(r) for r in rows}) != 1:
            raise DocumentError(f"{what}: ragged rows")
        m = np.array(rows, dtype=complex)
    else:
        flat = _vector(v, what)
        size = n if n is not None else int(round(math.sqrt(flat.size)))
        if size * size != flat.size:
            raise DocumentError(f"{what}: {flat.size} entries do not form a square matrix")
        m = flat.reshape(size, size)
    if not np.all(np.isfinite(m)):
        raise DocumentError(f"{what}: entries must be finite")
    return m


def _metric(spec, n_hint: Optional[int]):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DocumentError("metric: expected an object with a 'kind'")
    kind = spec["kind"]
    if kind == "signature":
        try:
            return Signature(int(spec["r"]), int(spec["n"])), None
        except KeyError as exc:
            raise DocumentError(f"metric: missing {exc}") from None
    if kind == "diagonal":
        return DiagonalMetric(tuple(int(s) for s in spec.get("signs", []))), None
    if kind == "alternating":
        n = int(spec.get("n", n_hint or 0))
        return DiagonalMetric.alternating(n), None
    if kind == "hermitian":
        h = _matrix(spec.get("entries"), "metric.entries")
        j, s = inertia_reduce(h)
        return j, s
    raise DocumentError(f"metric: unknown kind {kind!r}")


def _structure(spec) -> tuple[Optional[StructureHint], Optional[np.ndarray], Optional[int]]:
    """Returns the hint, a matrix built from it (if it determines one), and the alternating size."""
    if spec is None:
        return None, None, None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DocumentError("structure: expected an object with a 'kind'")
    kind = spec["kind"]
    if kind == "generic":
        return StructureHint("generic"), None, None
    params = {}
    for key in ("alpha", "beta", "kappa"):
        if key in spec:
            params[key] = _scalar(spec[key], f"structure.{key}")
    if kind == "tridiagonal":
        for key in ("alpha", "beta"):
            if key not in params:
                raise DocumentError(f"structure: tridiagonal needs {key}")
        c = _vector(spec.get("c"), "structure.c")
        d = _vector(spec["d"], "structure.d") if "d" in spec else params.get("kappa", 0) * c.conj()
        params.update(c=c, d=d)
        t = TridiagonalSpec(params["alpha"], params["beta"], c, d)
        return StructureHint("tridiagonal", params), t.matrix(), t.n
    if kind == "arrowhead":
        c = _vector(spec.get("c"), "structure.c")
        d = _vector(spec.get("d"), "structure.d")
        if c.size != d.size:
            raise DocumentError("structure: arrowhead vectors differ in length")
        params.update(c=c, d=d)
        n = c.size + 1
        a = np.zeros((n, n), dtype=complex)
        a[: n - 1, : n - 1] = params["alpha"] * np.eye(n - 1)
        a[n - 1, n - 1] = params["beta"]
        a[: n - 1, n - 1] = c
        a[n - 1, : n - 1] = d
        return StructureHint("arrowhead", params), a, None
    if kind == "block":
        if "c" in spec and "d" in spec:
            cm = np.array([[_scalar(x, "structure.c") for x in row] for row in spec["c"]], dtype=complex)
            dm = np.array([[_scalar(x, "structure.d") for x in row] for row in spec["d"]], dtype=complex)
            r, m = cm.shape
            if dm.shape != (m, r):
                raise DocumentError("structure: block shapes do not match")
            a = np.zeros((r + m, r + m), dtype=complex)
            a[:r, :r] = params["alpha"] * np.eye(r)
            a[r:, r:] = params["beta"] * np.eye(m)
            a[:r, r:] = cm
            a[r:, :r] = dm
            params.update(c=cm, d=dm)
            return StructureHint("block", params), a, None
        return StructureHint("block", params), None, None
    raise DocumentError(f"structure: unknown kind {kind!r}")


def parse_document(data: dict, name: str = "matrix") -> MatrixDocument:
    if not isinstance(data, dict):
        raise DocumentError("document must be a JSON object")
    version = str(data.get("format_version", ""))
    if version not in SUPPORTED_VERSIONS:
        raise DocumentError(f"unsupported format_version {version!r}")
    hint, built, alt_n = _structure(data.get("structure"))
    if "matrix" in data:
        a = _matrix(data["matrix"], "matrix")
        if built is not None and (built.shape != a.shape or not np.allclose(built, a, atol=1e-12)):
            raise DocumentError("matrix disagrees with its structure parameters")
    elif built is not None:
        a = built
    else:
        raise DocumentError("document has no matrix")
    if "metric" in data:
        metric, reduction = _metric(data["metric"], a.shape[0])
    elif alt_n is not None:
        metric, reduction = DiagonalMetric.alternating(alt_n), None
    else:
        raise DocumentError("document has no metric")
    if metric.n != a.shape[0]:
        raise InvalidDimension(f"metric dimension {metric.n} does not match matrix size {a.shape[0]}")
    a = as_matrix(a)
    if reduction is not None:
        # [Ax, x]_H with x = S y equals [S^{-1} A S y, y]_J
        a = np.linalg.solve(reduction, a @ reduction)
    return MatrixDocument(str(data.get("name", name)), a, metric, hint, reduction)


def load_document(path) -> MatrixDocument:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc})") from None
    return parse_document(data, path.stem)


def document_from_matrix(a, j: Signature, name: str = "matrix") -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "format_version": "1",
        "name": name,
        "metric": {"kind": "signature", "r": j.r, "n": j.n},
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }
