"""JSON documents for states, decompositions, densities and verdicts.

Complex numbers are stored as ``[re, im]`` pairs, arrays flattened row-major.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .density import DensityMatrix
from .errors import DimensionMismatch, ParseError
from .linalg import DEFAULT_TOL
from .multipartite import DecomposabilityVerdict
from .state import SchmidtDecomposition, StateTensor


def _parse(data) -> dict:
    if isinstance(data, dict):
        return data
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be an object")
    return doc


def _field(doc: dict, name: str):
    if name not in doc:
        raise ParseError(f"missing field {name!r}")
    return doc[name]


def _dims(raw) -> tuple[int, ...]:
    if not isinstance(raw, list) or not raw:
        raise ParseError("dims must be a nonempty list of integers")
    if any(isinstance(d, bool) or not isinstance(d, int) for d in raw):
        raise ParseError("dims must be integers")
    if any(d < 1 for d in raw):
        raise DimensionMismatch(f"dims must be positive, got {raw}")
    return tuple(raw)


def complex_list(raw, name: str = "amps") -> np.ndarray:
    if not isinstance(raw, list):
        raise ParseError(f"{name} must be a list of [re, im] pairs")
    out = np.empty(len(raw), dtype=complex)
    for i, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in pair)):
            raise ParseError(f"{name}[{i}] is not an [re, im] pair of numbers")
        if not all(math.isfinite(x) for x in pair):
            raise ParseError(f"{name}[{i}] is not finite")
        out[i] = complex(pair[0], pair[1])
    return out


def pairs(arr) -> list[list[float]]:
    arr = np.asarray(arr, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in arr]


def load_state(data, tol: float = DEFAULT_TOL) -> StateTensor:
    """Parse a state document (text, bytes or an already-decoded dict)."""
    doc = _parse(data)
    dims = _dims(_field(doc, "dims"))
    if len(dims) < 2:
        raise DimensionMismatch("a state needs at least two subsystems")
    amps = complex_list(_field(doc, "amps"))
    normalize = doc.get("normalize", False)
    if not isinstance(normalize, bool):
        raise ParseError("normalize must be true or false")
    if amps.size != math.prod(dims):
        raise DimensionMismatch(f"{amps.size} amplitudes for dims {list(dims)}")
    return StateTensor.from_vector(dims, amps, normalize=normalize, tol=tol)


def state_doc(psi: StateTensor) -> dict:
    return {"dims": list(psi.dims), "amps": pairs(psi.amps)}


def decomposition_doc(decomp: SchmidtDecomposition, residual: float | None = None) -> dict:
    doc = {
        "rank": decomp.rank,
        "coeffs": [float(c) for c in decomp.coeffs],
        "vectors": [[pairs(v[:, j]) for j in range(decomp.rank)] for v in decomp.vectors],
    }
    if residual is not None:
        doc["residual"] = float(residual)
    return doc


def load_decomposition(data) -> SchmidtDecomposition:
    doc = _parse(data)
    coeffs = _field(doc, "coeffs")
    vectors = _field(doc, "vectors")
    if not isinstance(coeffs, list) or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in coeffs):
        raise ParseError("coeffs must be a list of numbers")
    if not isinstance(vectors, list) or not vectors:
        raise ParseError("vectors must be a nonempty list")
    mats = []
    for k, group in enumerate(vectors):
        if not isinstance(group, list) or len(group) != len(coeffs):
            raise ParseError(f"vectors[{k}] must hold one vector per coefficient")
        cols = [complex_list(v, f"vectors[{k}]") for v in group]
        if len({c.size for c in cols}) > 1:
            raise ParseError(f"vectors[{k}] mixes lengths")
        mats.append(np.array(cols).T if cols else np.zeros((1, 0), dtype=complex))
    if "rank" in doc and doc["rank"] != len(coeffs):
        raise ParseError("rank does not match the number of coefficients")
    return SchmidtDecomposition(np.array(coeffs, dtype=float), tuple(mats))


def verdict_doc(v: DecomposabilityVerdict) -> dict:
    doc: dict[str, Any] = {
        "decomposable": bool(v.decomposable),
        "reason": None if v.reason is None else str(v.reason.value),
    }
    if v.decomposition is not None:
        doc.update(decomposition_doc(v.decomposition))
    doc["residual"] = float(v.residual)
    if v.detail:
        doc["detail"] = v.detail
    return doc


def density_doc(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims) or [rho.dim], "density": pairs(rho.matrix)}


def load_density(data) -> DensityMatrix:
    doc = _parse(data)
    dims = _dims(_field(doc, "dims"))
    flat = complex_list(_field(doc, "density"), "density")
    dim = math.prod(dims)
    if flat.size != dim * dim:
        raise DimensionMismatch(f"{flat.size} density entries for total dimension {dim}")
    return DensityMatrix(flat.reshape(dim, dim), dims)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=None, separators=(",", ":"))
