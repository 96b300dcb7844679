"""JSON encoding of problems, reports, and numerical artifacts.

Complex numbers serialize as [re, im] pairs in every external format;
matrices are row-major entry lists with explicit shape; kernels follow the
``{nodes, block, entries}`` layout.  Reports are plain dicts so they can be
hashed canonically: ``canonical_json`` sorts keys and keeps the default
shortest round-trip float text, and ``report_hash`` drops wall-clock fields
(the one part of a report that legitimately differs between identical runs).
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from .errors import ValidationError
from .feasibility import CPBlocks, SolveReport
from .geometry import MembershipReport
from .kernels import AlphaGrid, KernelMatrix, NodeSet
from .realization import Colligation

FORMAT_VERSION = 1
VOLATILE_KEYS = ("wall_time", "timings", "report_hash")


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(v) -> complex:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ValidationError(f"complex values serialize as [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def encode_matrix(m: np.ndarray) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [encode_complex(z) for z in m.ravel()],
    }


def decode_matrix(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = [decode_complex(v) for v in obj["entries"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    if len(entries) != rows * cols:
        raise ValidationError("matrix entry count disagrees with its shape")
    return np.array(entries, dtype=complex).reshape(rows, cols)


def encode_nodes(nodes: NodeSet) -> list[list[float]]:
    return [[q.s.real, q.s.imag, q.p.real, q.p.imag] for q in nodes.points]


def decode_nodes(obj) -> NodeSet:
    pairs = []
    for row in obj:
        if len(row) != 4:
            raise ValidationError("node rows serialize as [s_re, s_im, p_re, p_im]")
        pairs.append(
            (complex(float(row[0]), float(row[1])), complex(float(row[2]), float(row[3])))
        )
    return NodeSet.from_pairs(pairs)


def encode_grid(grid: AlphaGrid) -> dict:
    return {"kind": "explicit", "alphas": [encode_complex(a) for a in grid.alphas]}


def decode_grid(obj) -> AlphaGrid:
    if obj is None:
        return AlphaGrid.solver_default()
    kind = obj.get("kind", "explicit")
    if kind == "explicit":
        return AlphaGrid(np.array([decode_complex(a) for a in obj["alphas"]]))
    if kind == "boundary":
        return AlphaGrid.boundary(int(obj["n"]), bool(obj.get("include_zero", True)))
    if kind == "solver_default":
        return AlphaGrid.solver_default()
    if kind == "check_default":
        return AlphaGrid.check_default()
    raise ValidationError(f"unknown grid kind {kind!r}")


def encode_kernel(kernel: KernelMatrix) -> dict:
    return {
        "nodes": encode_nodes(kernel.nodes),
        "block": int(kernel.block),
        "entries": [encode_complex(z) for z in kernel.matrix.ravel()],
    }


def decode_kernel(obj) -> KernelMatrix:
    nodes = decode_nodes(obj["nodes"])
    block = int(obj.get("block", 1))
    n = len(nodes) * block
    entries = [decode_complex(v) for v in obj["entries"]]
    if len(entries) != n * n:
        raise ValidationError("kernel entry count disagrees with nodes and block size")
    return KernelMatrix(
        nodes=nodes, matrix=np.array(entries, dtype=complex).reshape(n, n), block=block
    )


def encode_blocks(blocks: CPBlocks) -> dict:
    return {
        "grid": encode_grid(blocks.grid),
        "blocks": [encode_matrix(b) for b in blocks.blocks],
    }


def encode_colligation(col: Colligation) -> dict:
    return {
        "a": encode_matrix(col.a),
        "b": encode_matrix(col.b),
        "c": encode_matrix(col.c),
        "d": encode_matrix(col.d),
        "alphas": [encode_complex(a) for a in col.alphas],
        "multiplicities": list(col.multiplicities),
        "out_dim": col.out_dim,
        "in_dim": col.in_dim,
    }


def decode_colligation(obj) -> Colligation:
    return Colligation(
        a=decode_matrix(obj["a"]),
        b=decode_matrix(obj["b"]),
        c=decode_matrix(obj["c"]),
        d=decode_matrix(obj["d"]),
        alphas=np.array([decode_complex(a) for a in obj["alphas"]]),
        multiplicities=tuple(int(m) for m in obj["multiplicities"]),
        out_dim=int(obj["out_dim"]),
        in_dim=int(obj["in_dim"]),
    )


def encode_solve_report(report: SolveReport) -> dict:
    out: dict[str, Any] = {
        "status": report.status.value,
        "residual": report.residual,
        "iterations": report.iterations,
        "wall_time": report.wall_time,
        "notes": list(report.notes),
    }
    if report.blocks is not None:
        out["blocks"] = encode_blocks(report.blocks)
    if report.certificate is not None:
        out["certificate"] = encode_kernel(report.certificate)
        out["certificate_min_eig"] = report.certificate_min_eig
    return out


def encode_membership(report: MembershipReport) -> dict:
    return {
        "is_member": report.is_member,
        "sup_modulus": report.sup_modulus,
        "argmax_alpha": encode_complex(report.argmax_alpha),
        "tolerance": report.tolerance,
        "is_boundary": report.is_boundary,
        "reason": report.reason,
    }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def strip_volatile(obj):
    if isinstance(obj, dict):
        return {
            k: strip_volatile(v) for k, v in obj.items() if k not in VOLATILE_KEYS
        }
    if isinstance(obj, list):
        return [strip_volatile(v) for v in obj]
    return obj


def report_hash(report: dict) -> str:
    """sha256 of the canonical report text with wall-clock fields removed."""
    return hashlib.sha256(canonical_json(strip_volatile(report)).encode()).hexdigest()
