"""JSON file schemas and deterministic CSV/JSON writers."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .lattice import LatticeSpec, ThresholdScan
from .mixed import MixedFamily, density_diagnostic
from .pure import StateFamily

RENORMALIZE_WARN = 1e-6
SCAN_COLUMNS = (
    "n",
    "count",
    "S",
    "q_n",
    "collapsed_flag",
    "gaussian_sum_bound",
    "closed_form_bound",
    "upper_bound",
)


def fmt(x) -> str:
    """Locale-free 12-significant-digit rendering used in every CSV."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0.0:
            return "0"
        return format(x, ".12g")
    return str(x)


def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError("input", f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("input", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SchemaError("input", "top level must be a JSON object")
    return data


def _complex_array(raw, field: str, shape_hint: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(field, f"expected numeric {shape_hint} of [re, im] pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise SchemaError(field, f"expected {shape_hint} of [re, im] pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(field, "non-finite number")
    return arr[..., 0] + 1j * arr[..., 1]


def _dim_and_labels(data: dict, count_field: str) -> tuple[int, list]:
    if "dim" not in data:
        raise SchemaError("dim", "missing")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError("dim", f"must be a positive integer, got {dim!r}")
    if count_field not in data:
        raise SchemaError(count_field, "missing")
    if not isinstance(data[count_field], list) or not data[count_field]:
        raise SchemaError(count_field, "must be a non-empty list")
    n = len(data[count_field])
    labels = data.get("labels", [str(i + 1) for i in range(n)])
    if not isinstance(labels, list) or len(labels) != n:
        raise SchemaError("labels", f"must be a list of {n} identifiers")
    if len(set(map(str, labels))) != n:
        raise SchemaError("labels", "must be unique")
    return dim, labels


def parse_state_family(data: dict) -> StateFamily:
    """``{"dim": d, "labels": [...], "states": [[[re, im], ...], ...]}``.

    Vectors are normalized; a warning is issued when one was off by more
    than 1e-6.
    """
    dim, labels = _dim_and_labels(data, "states")
    vectors = []
    for k, raw in enumerate(data["states"]):
        field = f"states[{k}]"
        v = _complex_array(raw, field, "a list")
        if v.shape != (dim,):
            raise SchemaError(field, f"expected {dim} amplitudes, got {v.shape[0] if v.ndim else 0}")
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise SchemaError(field, "zero vector")
        if abs(norm - 1.0) > RENORMALIZE_WARN:
            warnings.warn(f"{field} had norm {norm:.12g}; renormalized", stacklevel=2)
        vectors.append(v / norm)
    return StateFamily(np.array(vectors), tuple(map(str, labels)))


def parse_mixed_family(data: dict) -> MixedFamily:
    """``{"dim": d, "labels": [...], "rhos": [[[re, im] ... d x d] ...]}``."""
    dim, labels = _dim_and_labels(data, "rhos")
    rhos = []
    for k, raw in enumerate(data["rhos"]):
        field = f"rhos[{k}]"
        rho = _complex_array(raw, field, "a d x d matrix")
        if rho.shape != (dim, dim):
            raise SchemaError(field, f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
        problem = density_diagnostic(rho)
        if problem:
            raise SchemaError(field, problem)
        rhos.append(rho)
    return MixedFamily(np.array(rhos), tuple(map(str, labels)))


def _pair(raw, field: str) -> complex:
    try:
        re, im = (float(x) for x in raw)
    except (TypeError, ValueError) as exc:
        raise SchemaError(field, "expected [re, im]") from exc
    if not (math.isfinite(re) and math.isfinite(im)):
        raise SchemaError(field, "non-finite number")
    return complex(re, im)


def parse_lattice_spec(data: dict) -> tuple[LatticeSpec, int | None]:
    """``{"omega1": [re, im], "omega2": [re, im], "n_max": n}``; n_max optional."""
    for key in ("omega1", "omega2"):
        if key not in data:
            raise SchemaError(key, "missing")
    w1 = _pair(data["omega1"], "omega1")
    w2 = _pair(data["omega2"], "omega2")
    n_max = data.get("n_max")
    if n_max is not None and (not isinstance(n_max, int) or isinstance(n_max, bool)):
        raise SchemaError("n_max", f"must be an integer, got {n_max!r}")
    return LatticeSpec(w1, w2), n_max


def load_state_family(path) -> StateFamily:
    return parse_state_family(_read_json(path))


def load_mixed_family(path) -> MixedFamily:
    return parse_mixed_family(_read_json(path))


def load_lattice_spec(path) -> tuple[LatticeSpec, int | None]:
    return parse_lattice_spec(_read_json(path))


def complex_to_json(a) -> list:
    """Nested [re, im] lists mirroring the array shape."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def state_family_to_json(family: StateFamily) -> dict:
    return {"dim": family.dim, "labels": list(family.labels), "states": complex_to_json(family.states)}


def mixed_family_to_json(family: MixedFamily) -> dict:
    return {"dim": family.dim, "labels": list(family.labels), "rhos": complex_to_json(family.rhos)}


def dumps_json(obj) -> str:
    """Sorted-key JSON; floats keep their shortest round-trip repr."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def scan_csv(scan: ThresholdScan) -> str:
    rows = [SCAN_COLUMNS]
    for r in scan.rows:
        d = r.as_dict()
        rows.append([d[c] for c in SCAN_COLUMNS])
    return csv_text(rows)


def scan_json(scan: ThresholdScan) -> dict:
    return {
        "omega1": [scan.spec.omega1.real, scan.spec.omega1.imag],
        "omega2": [scan.spec.omega2.real, scan.spec.omega2.imag],
        "rows": [r.as_dict() for r in scan.rows],
    }
