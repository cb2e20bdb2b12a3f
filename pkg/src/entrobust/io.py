"""JSON encoding of matrices, SDP data and reports.

Matrices use ``{"dims": [...], "re": [[...]], "im": [[...]]}`` in row-major
order with the lexicographic tensor-product basis of :mod:`entrobust.linalg`.
Reports are written by :func:`dumps`, which prints every float with 17
significant digits and sorts keys, so equal inputs give identical bytes.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .linalg import DensityMatrix
from .optim.sdp import SdpProblem, SdpSolution


def _float(x: float) -> str:
    # JSON has no NaN or infinity
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text with round-trip-exact floats."""
    return _encode(obj, indent, 0) + "\n"


# ---------------------------------------------------------------------------
# matrices


def matrix_to_json(m, dims=None) -> dict:
    """Encode a matrix or :class:`DensityMatrix`."""
    if isinstance(m, DensityMatrix):
        dims, m = m.dims, m.matrix
    m = np.asarray(m, dtype=complex)
    dims = [m.shape[0]] if dims is None else [int(d) for d in dims]
    return {"dims": dims, "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj) -> tuple[np.ndarray, tuple[int, ...] | None]:
    """Decode a matrix object; ``im`` may be omitted. Returns ``(matrix, dims)``."""
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValueError('matrix must be an object with "re" (and optionally "im", "dims")')
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1] or im.shape != re.shape:
        raise ValueError(f"matrix parts must be equal square arrays, got {re.shape} and {im.shape}")
    dims = obj.get("dims")
    if dims is not None:
        dims = tuple(int(d) for d in dims)
        if int(np.prod(dims)) != re.shape[0]:
            raise ValueError(f"dims {list(dims)} do not match order {re.shape[0]}")
    return re + 1j * im, dims


def density_from_json(obj) -> DensityMatrix:
    m, dims = matrix_from_json(obj)
    if dims is None:
        raise ValueError('a density matrix needs "dims"')
    return DensityMatrix(m, dims)


# ---------------------------------------------------------------------------
# SDP data


def problem_to_json(problem: SdpProblem) -> dict:
    return {
        "c": problem.c.tolist(),
        "F0": matrix_to_json(problem.F0),
        "Fi": [matrix_to_json(f) for f in problem.Fi],
    }


def problem_from_json(obj) -> SdpProblem:
    if not isinstance(obj, dict) or not {"c", "F0", "Fi"} <= set(obj):
        raise ValueError('SDP problem must be an object with "c", "F0", "Fi"')
    if not isinstance(obj["Fi"], list):
        raise ValueError('"Fi" must be a list of matrices')
    F0, _ = matrix_from_json(obj["F0"])
    Fi = [matrix_from_json(f)[0] for f in obj["Fi"]]
    c = np.asarray(obj["c"], dtype=float)
    if c.ndim != 1 or len(Fi) != c.size:
        raise ValueError(f"need one F_i per entry of c, got {len(Fi)} and {c.size}")
    Fi = np.array(Fi) if Fi else np.zeros((0,) + F0.shape, dtype=complex)
    return SdpProblem(c=c, F0=F0, Fi=Fi)


def solution_to_json(sol: SdpSolution) -> dict:
    return {
        "x": sol.x.tolist(),
        "Z": matrix_to_json(sol.Z),
        "p_star": sol.p_star,
        "d_star": sol.d_star,
        "certificates": sol.certificates(),
    }


# ---------------------------------------------------------------------------
# results


def descriptor_to_json(desc) -> dict:
    out = {"family": desc.family}
    for f in dataclasses.fields(desc):
        v = getattr(desc, f.name)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


def result_to_json(res) -> dict:
    """Encode a :class:`~entrobust.analytic.RobustnessResult` with both witnesses."""
    out = {
        "s": res.s,
        "method": res.method,
        "certificates": dict(res.certificates),
        "flags": dict(res.flags),
        "rho_prime": matrix_to_json(res.rho_prime),
        "rho_dprime": matrix_to_json(res.rho_dprime),
    }
    if res.plan is not None:
        out["plan"] = {"weights": list(res.plan.weights), "vertices": list(res.plan.vertices), "plane": res.plan.plane}
    return out
