"""JSON documents for matrices, pairs, words, combinations and grid functions.

Complex entries are stored as ``[re, im]`` pairs in row-major order::

    {"rows": 2, "cols": 2, "entries": [[1, 0], [0, 0], [0, 0], [0, 0]]}
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .grid import GridMatrixFunction, GridSpec
from .linalg import DEFAULT_TOL, Tolerance
from .pairs import ProjectionPair
from .words import Word, WordCombination


def matrix_to_doc(m):
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def _entry(x):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise ParseError(f"matrix entry must be a number or [re, im], got {x!r}")


def matrix_from_doc(doc):
    try:
        rows, cols, entries = int(doc["rows"]), int(doc["cols"]), doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"matrix document needs rows, cols, entries: {exc}") from None
    if rows < 1 or cols < 1:
        raise ValidationError(f"matrix dimensions must be positive, got {rows}x{cols}")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise ValidationError(f"expected {rows * cols} entries")
    vals = np.array([_entry(x) for x in entries], dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise ValidationError("matrix has non-finite entries")
    return vals.reshape(rows, cols)


def tol_to_doc(tol):
    return {"rank_cut": tol.rank_cut, "residual": tol.residual}


def tol_from_doc(doc):
    if doc is None:
        return DEFAULT_TOL
    try:
        return Tolerance(doc.get("rank_cut"), float(doc.get("residual", DEFAULT_TOL.residual)))
    except (AttributeError, TypeError, ValueError) as exc:
        raise ParseError(f"bad tolerance document: {exc}") from None


def pair_to_doc(pair):
    return {
        "dim": pair.dim,
        "p": matrix_to_doc(pair.p),
        "q": matrix_to_doc(pair.q),
        "tol": tol_to_doc(pair.tol),
    }


def pair_from_doc(doc, tol=None):
    if not isinstance(doc, dict) or "p" not in doc or "q" not in doc:
        raise ParseError("pair document needs 'p' and 'q'")
    p, q = matrix_from_doc(doc["p"]), matrix_from_doc(doc["q"])
    if "dim" in doc and (p.shape[0] != doc["dim"] or q.shape[0] != doc["dim"]):
        raise ValidationError(f"declared dim {doc['dim']} does not match the matrices")
    return ProjectionPair(p, q, tol if tol is not None else tol_from_doc(doc.get("tol")))


def word_to_doc(w):
    return {"family": w.family.value, "k": w.k}


def word_from_doc(doc):
    try:
        return Word(doc["family"], doc.get("k", 0))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"bad word document: {exc}") from None


def combination_to_doc(c):
    return {
        "lambda0": [c.lambda0.real, c.lambda0.imag],
        "mode": c.mode,
        "terms": [
            {"re": z.real, "im": z.imag, "family": w.family.value, "k": w.k} for z, w in c.terms
        ],
    }


def combination_from_doc(doc):
    try:
        lam = _entry(doc.get("lambda0", 0))
        terms = [
            (complex(t.get("re", 0.0), t.get("im", 0.0)), word_from_doc(t))
            for t in doc.get("terms", [])
        ]
        return WordCombination(lam, terms, doc.get("mode", "identity"))
    except (AttributeError, TypeError) as exc:
        raise ParseError(f"bad combination document: {exc}") from None


def grid_function_to_doc(f):
    return {
        "n_samples": f.grid.n_samples,
        "values": [matrix_to_doc(v) for v in f.values],
    }


def grid_function_from_doc(doc):
    try:
        grid = GridSpec(int(doc["n_samples"]))
        values = np.array([matrix_from_doc(v) for v in doc["values"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad grid function document: {exc}") from None
    return GridMatrixFunction(grid, values)


def to_plain(obj):
    """Recursively convert numpy scalars/arrays so ``json`` can encode them."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return matrix_to_doc(obj) if obj.ndim == 2 else to_plain(obj.tolist())
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(doc):
    """Deterministic JSON (sorted keys, fixed separators)."""
    return json.dumps(to_plain(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
