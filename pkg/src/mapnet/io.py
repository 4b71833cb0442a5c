"""JSON formats for states, maps, networks and reports.

Complex matrices are nested row lists of ``[re, im]`` pairs. Superoperators
in map files are flat row-major lists of pairs. All emitters use the same
``json.dumps`` settings, so parse-and-re-emit is byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .detect import DetectionReport
from .errors import InvalidStateError
from .linmaps import KrausPairDecomposition, LinearMap
from .network import Network, reassemble
from .tensor import DensityMatrix


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_default) + "\n"


def _default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def matrix_to_json(mat) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def matrix_from_json(obj, shape: tuple[int, int] | None = None) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("matrix entries must be [re, im] pairs")
    mat = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None:
        mat = mat.reshape(shape)
    if mat.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {mat.shape}")
    return mat


# -- states --------------------------------------------------------------------


def state_to_json(rho: DensityMatrix, **metadata) -> dict:
    out = {"dims": list(rho.dims), "matrix": matrix_to_json(rho.mat)}
    meta = {k: v for k, v in metadata.items() if v is not None}
    if meta:
        out["metadata"] = meta
    return out


def state_from_json(obj: dict) -> tuple[DensityMatrix, dict]:
    """Parse and validate a state file; violations raise :class:`InvalidStateError`."""
    try:
        dims = [int(d) for d in obj["dims"]]
        mat = matrix_from_json(obj["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidStateError("format", float("nan"), f"malformed state file: {exc}") from exc
    if int(np.prod(dims)) != mat.shape[0]:
        raise InvalidStateError("dims", float(np.prod(dims)),
                                f"dims {dims} do not multiply to matrix size {mat.shape[0]}")
    return DensityMatrix(mat, tuple(dims)), dict(obj.get("metadata", {}))


def load_state(path) -> tuple[DensityMatrix, dict]:
    return state_from_json(json.loads(Path(path).read_text()))


def save_state(path, rho: DensityMatrix, **metadata) -> None:
    Path(path).write_text(dumps(state_to_json(rho, **metadata)))


# -- maps ----------------------------------------------------------------------


def map_to_json(m: LinearMap) -> dict:
    out: dict = {}
    if m.src_shape[0] == m.src_shape[1]:
        out["src_dim"] = m.src_shape[0]
    else:
        out["src"] = list(m.src_shape)
    out["dst"] = list(m.dst_shape)
    out["superop"] = [[float(z.real), float(z.imag)] for z in m.superop.reshape(-1)]
    if m.kraus is not None:
        out["kraus"] = {"eta": list(m.kraus.eta), "K": [matrix_to_json(k) for k in m.kraus.ops]}
    out["name"] = m.name
    return out


def map_from_json(obj: dict) -> LinearMap:
    if "src" in obj:
        src = tuple(int(x) for x in obj["src"])
    else:
        n = int(obj["src_dim"])
        src = (n, n)
    dst = tuple(int(x) for x in obj["dst"])
    kraus = None
    if "kraus" in obj:
        kraus = KrausPairDecomposition(tuple(obj["kraus"]["eta"]),
                                       tuple(matrix_from_json(k) for k in obj["kraus"]["K"]))
    if "superop" in obj:
        sup = matrix_from_json(obj["superop"], (dst[0] * dst[1], src[0] * src[1]))
    elif kraus is not None:
        sup = kraus.superop()
    else:
        raise ValueError("map file needs 'superop' or 'kraus'")
    if kraus is not None and np.max(np.abs(kraus.superop() - sup)) > 1e-10:
        raise ValueError("map file: 'kraus' and 'superop' disagree")
    return LinearMap(sup, src, dst, name=obj.get("name", "file"), kraus=kraus)


def load_map(path) -> LinearMap:
    return map_from_json(json.loads(Path(path).read_text()))


# -- networks ------------------------------------------------------------------


def network_to_json(net: Network, include_ua: bool = False) -> dict:
    d = net.dilation
    out = {
        "a_minus": d.a_minus,
        "a_plus": d.a_plus,
        "dim": d.dim,
        "lambdas": [float(x) for x in d.lambdas],
        "thetas": [float(x) for x in d.thetas],
        "uprime": matrix_to_json(d.uprime),
    }
    if include_ua:
        out["u_a"] = matrix_to_json(d.U_A)
    return out


def unitary_from_network_json(obj: dict) -> np.ndarray:
    """Rebuild ``U_A`` from an exported network's angles and basis change."""
    return reassemble(obj["thetas"], matrix_from_json(obj["uprime"]))


# -- reports -------------------------------------------------------------------


def report_to_json(report: DetectionReport) -> str:
    return dumps(report.to_dict())
