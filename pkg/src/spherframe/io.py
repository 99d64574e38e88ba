"""CSV/JSON serialization of rules, functions, coefficient trees and reports."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .frame import CoefficientTree, FrameSystem, build_frame
from .harmonic import BandlimitedFunction
from .quadrature import CubatureRule, build_product_rule

NODE_TOL = 1e-12


class InputMismatch(ValueError):
    """An input file is inconsistent with its header or with the rebuilt rule."""

    def __init__(self, path, why):
        self.path = str(path)
        super().__init__(f"{path}: {why}")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def jsonable(obj):
    """Recursively replace non-finite floats and numpy scalars for strict JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputMismatch(path, f"not valid JSON ({exc})") from None


def sidecar(path) -> Path:
    return Path(path).with_suffix(".json")


def write_csv(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(str(int(v)) if np.issubdtype(type(v), np.integer) else _fmt(v) for v in row) + "\n")


def read_csv(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise InputMismatch(path, "empty file") from None
        if [h.strip() for h in got] != list(header):
            raise InputMismatch(path, f"expected header {','.join(header)}, found {','.join(got)}")
        try:
            rows = [[float(v) for v in r] for r in reader if r]
        except ValueError as exc:
            raise InputMismatch(path, f"non-numeric entry ({exc})") from None
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    return arr


# --- rules ---------------------------------------------------------------

def write_rule(path, rule: CubatureRule):
    if rule.dim != 3:
        raise ValueError("rule CSV is defined for d = 3")
    X = rule.nodes
    write_csv(path, ["x", "y", "z", "weight"], [X[:, 0], X[:, 1], X[:, 2], rule.weights])


def read_rule(path, degree: int, kind: str = "scattered") -> CubatureRule:
    a = read_csv(path, ["x", "y", "z", "weight"])
    return CubatureRule(dim=3, degree=degree, nodes=a[:, :3], weights=a[:, 3], kind=kind)


# --- functions -----------------------------------------------------------

def write_function(path, f: BandlimitedFunction, seed=None, extra=None):
    X = f.carrier.nodes
    write_csv(path, ["x", "y", "z", "value"], [X[:, 0], X[:, 1], X[:, 2], f.samples])
    meta = {"dim": f.dim, "degree": f.degree, "rule_degree": f.carrier.degree, "seed": seed}
    if extra:
        meta.update(extra)
    write_json(sidecar(path), meta)


def read_function(path) -> BandlimitedFunction:
    meta_path = sidecar(path)
    if not meta_path.exists():
        raise InputMismatch(path, f"missing sidecar {meta_path}")
    meta = read_json(meta_path)
    for key in ("dim", "degree", "rule_degree"):
        if key not in meta:
            raise InputMismatch(meta_path, f"sidecar lacks '{key}'")
    a = read_csv(path, ["x", "y", "z", "value"])
    if meta["dim"] != 3:
        raise InputMismatch(meta_path, "only d = 3 functions can be read")
    rule = build_product_rule(3, int(meta["rule_degree"]))
    if a.shape[0] != len(rule) or np.max(np.abs(a[:, :3] - rule.nodes)) > NODE_TOL:
        raise InputMismatch(path, f"nodes do not match a degree-{meta['rule_degree']} product rule")
    try:
        return BandlimitedFunction(3, int(meta["degree"]), rule, a[:, 3])
    except ValueError as exc:
        raise InputMismatch(path, str(exc)) from None


# --- coefficient trees ---------------------------------------------------

TREE_HEADER = ["j", "k", "cx", "cy", "cz", "lambda", "coef"]


def write_tree(path, F: FrameSystem, tree: CoefficientTree, seed=None, source=None):
    j, k = tree.index()
    X = np.concatenate([r.nodes for r in F.levels])
    lam = np.concatenate([r.weights for r in F.levels])
    write_csv(path, TREE_HEADER, [j, k, X[:, 0], X[:, 1], X[:, 2], lam, tree.flat()])
    write_json(sidecar(path), {"dim": F.dim, "Jmax": F.jmax, "oversampling": F.oversampling,
                               "seed": seed, "source": source, "truncated": tree.truncated})


def read_tree(path):
    """Returns ``(F, tree, header)``; the frame is rebuilt and checked row by row."""
    meta_path = sidecar(path)
    if not meta_path.exists():
        raise InputMismatch(path, f"missing header {meta_path}")
    meta = read_json(meta_path)
    for key in ("dim", "Jmax"):
        if key not in meta:
            raise InputMismatch(meta_path, f"header lacks '{key}'")
    a = read_csv(path, TREE_HEADER)
    F = build_frame(int(meta["dim"]), int(meta["Jmax"]), oversampling=int(meta.get("oversampling", 4)))
    if a.shape[0] != len(F):
        raise InputMismatch(path, f"{a.shape[0]} rows, frame has {len(F)} atoms")
    X = np.concatenate([r.nodes for r in F.levels])
    lam = np.concatenate([r.weights for r in F.levels])
    tree = CoefficientTree.zeros(F)
    jj, kk = tree.index()
    if (np.any(a[:, 0] != jj) or np.any(a[:, 1] != kk) or np.max(np.abs(a[:, 2:5] - X)) > NODE_TOL
            or np.max(np.abs(a[:, 5] - lam)) > NODE_TOL):
        raise InputMismatch(path, "atom nodes/weights do not match the frame named in the header")
    offsets = np.cumsum([0] + F.level_sizes)
    tree.levels = [a[offsets[i]:offsets[i + 1], 6].copy() for i in range(len(F.levels))]
    tree.truncated = bool(meta.get("truncated", False))
    return F, tree, meta


def write_rates(path, report: dict, seed=None):
    write_csv(path, ["n", "error", "ratio"], [np.array(report["n"]), report["error"], report["ratio"]])
    write_json(sidecar(path), {"alpha": report["alpha"], "p": report["p"], "tau": report["tau"],
                               "slope": report["slope"], "slope_stderr": report["slope_stderr"],
                               "seed": seed})
