"""Rational quadratic triangular and biquadratic tensor-product patches.

Triangular nets are indexed by ``(i, j, k)`` with ``i + j + k = 2`` and
blended with ``u**i v**j w**k`` Bernstein terms (mixed terms carry a factor 2).
The row layout used in files and constructors is::

    c002 c011 c020
    c101 c110
    c200

Tensor-product nets are 3x3 grids ``c[i][j]`` blended with ``B_i(u) B_j(v)``.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .config import DEFAULT_TOL, Tolerances
from .errors import InvalidPatch, ParseError, ZeroDenominator
from .projective import HPoint

__all__ = [
    "TRI_KEYS",
    "TriPatch",
    "TPPatch",
    "BoundaryConic",
    "eval_tri",
    "eval_tri_many",
    "eval_tp",
    "eval_tp_many",
    "boundaries",
    "eval_conic",
    "tri_grid",
    "sample_patch",
    "parse_patch",
    "load_patch",
    "patch_to_dict",
]

#: Index triples in the file/row layout order.
TRI_KEYS: tuple[tuple[int, int, int], ...] = (
    (0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0), (2, 0, 0),
)
_KEY_POS = {k: n for n, k in enumerate(TRI_KEYS)}


def _key(index) -> tuple[int, int, int]:
    if isinstance(index, str):
        index = tuple(int(ch) for ch in index)
    index = tuple(int(i) for i in index)
    if index not in _KEY_POS:
        raise KeyError(f"not a quadratic triangle index: {index}")
    return index


def _readonly(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TriPatch:
    """Rational quadratic Bezier triangle.

    Parameters
    ----------
    points : array_like, shape (6, 3)
        Control points in :data:`TRI_KEYS` order.
    weights : array_like, shape (6,)
        Nonzero weights in the same order.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float).reshape(-1)
        if pts.shape != (6, 3) or wts.shape != (6,):
            raise InvalidPatch(
                f"triangular patch needs 6 points and 6 weights, got {pts.shape} and {wts.shape}")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(wts))):
            raise InvalidPatch("control data must be finite")
        if np.any(wts == 0.0):
            raise InvalidPatch("weights must be nonzero")
        corners = pts[[0, 2, 5]]
        scale = max(1.0, np.abs(pts).max())
        for a, b in ((0, 1), (0, 2), (1, 2)):
            if np.linalg.norm(corners[a] - corners[b]) <= 1e-12 * scale:
                raise InvalidPatch("corner points must be pairwise distinct")
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "weights", _readonly(wts))

    @classmethod
    def from_dicts(cls, points: dict, weights: dict) -> "TriPatch":
        """Build from mappings keyed by index triples or strings like ``"011"``."""
        pts = {_key(k): v for k, v in points.items()}
        wts = {_key(k): v for k, v in weights.items()}
        if set(pts) != set(TRI_KEYS) or set(wts) != set(TRI_KEYS):
            raise InvalidPatch("triangular patch needs all six indices i+j+k=2")
        return cls([pts[k] for k in TRI_KEYS], [wts[k] for k in TRI_KEYS])

    def point(self, index) -> np.ndarray:
        return self.points[_KEY_POS[_key(index)]]

    def weight(self, index) -> float:
        return float(self.weights[_KEY_POS[_key(index)]])

    def hpoint(self, index) -> HPoint:
        return HPoint.from_affine(self.point(index))

    def weighted(self, index) -> np.ndarray:
        """Homogeneous weighted control point ``w * (c, 1)``."""
        return self.weight(index) * np.append(self.point(index), 1.0)

    @property
    def P(self) -> np.ndarray:
        return self.point((0, 0, 2))

    @property
    def Q(self) -> np.ndarray:
        return self.point((0, 2, 0))

    @property
    def R(self) -> np.ndarray:
        return self.point((2, 0, 0))

    def reweighted(self, alpha: float, beta: float, gamma: float) -> "TriPatch":
        """Weights ``alpha**i beta**j gamma**k w_ijk``; the surface is unchanged."""
        factors = [alpha**i * beta**j * gamma**k for i, j, k in TRI_KEYS]
        return TriPatch(self.points, self.weights * np.array(factors))

    def transformed(self, rotation, translation) -> "TriPatch":
        """Control net moved by ``x -> rotation @ x + translation``."""
        rot = np.asarray(rotation, dtype=float)
        return TriPatch(self.points @ rot.T + np.asarray(translation, dtype=float), self.weights)


@dataclass(frozen=True, eq=False)
class TPPatch:
    """Rational biquadratic tensor-product patch.

    Parameters
    ----------
    points : array_like, shape (3, 3, 3)
        ``points[i][j]`` multiplies ``B_i(u) B_j(v)``.
    weights : array_like, shape (3, 3)
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.shape != (3, 3, 3) or wts.shape != (3, 3):
            raise InvalidPatch(
                f"tensor patch needs a 3x3 grid of points and weights, got {pts.shape}, {wts.shape}")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(wts))):
            raise InvalidPatch("control data must be finite")
        if np.any(wts == 0.0):
            raise InvalidPatch("weights must be nonzero")
        corners = pts[[0, 0, 2, 2], [0, 2, 0, 2]]
        scale = max(1.0, np.abs(pts).max())
        for a in range(4):
            for b in range(a + 1, 4):
                if np.linalg.norm(corners[a] - corners[b]) <= 1e-12 * scale:
                    raise InvalidPatch("corner points must be pairwise distinct")
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "weights", _readonly(wts))


@dataclass(frozen=True, eq=False)
class BoundaryConic:
    """Rational quadratic Bezier arc with homogeneous control points."""

    pts: tuple
    wts: tuple

    def __post_init__(self):
        pts = tuple(p if isinstance(p, HPoint) else HPoint.from_affine(p) for p in self.pts)
        wts = tuple(float(w) for w in self.wts)
        if len(pts) != 3 or len(wts) != 3:
            raise InvalidPatch("a conic arc needs three points and three weights")
        if wts[0] * wts[2] == 0.0:
            raise InvalidPatch("end weights of a conic arc must be nonzero")
        if pts[0].same_as(pts[2], 1e-12):
            raise InvalidPatch("end points of a conic arc must differ")
        object.__setattr__(self, "pts", pts)
        object.__setattr__(self, "wts", wts)

    def weighted(self) -> np.ndarray:
        """Rows ``w_i * B_i`` (homogeneous)."""
        return np.array([w * p.coords for w, p in zip(self.wts, self.pts)])


def _bernstein_tri(u, v, w):
    # order matches TRI_KEYS: w^2, 2vw, v^2, 2uw, 2uv, u^2
    return np.stack([w * w, 2 * v * w, v * v, 2 * u * w, 2 * u * v, u * u], axis=-1)


def _check_bary(u, v, w, tol: Tolerances):
    s = np.asarray(u + v + w, dtype=float)
    if np.any(np.abs(s - 1.0) > tol.tol_bary):
        raise ValueError("barycentric coordinates must satisfy u + v + w = 1")
    return u / s, v / s, w / s


def eval_tri_many(patch: TriPatch, u, v, w, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorized evaluation; returns Cartesian points of shape ``(..., 3)``."""
    u, v, w = (np.asarray(x, dtype=float) for x in (u, v, w))
    u, v, w = _check_bary(u, v, w, tol)
    basis = _bernstein_tri(u, v, w) * patch.weights
    den = basis.sum(axis=-1)
    if np.any(np.abs(den) <= 1e-14 * np.abs(basis).sum(axis=-1)):
        raise ZeroDenominator("patch denominator vanishes")
    return (basis @ patch.points) / den[..., None]


def eval_tri(patch: TriPatch, u: float, v: float, w: float,
             tol: Tolerances = DEFAULT_TOL) -> HPoint:
    """Point of the triangular patch at barycentric ``(u, v, w)``."""
    return HPoint.from_affine(eval_tri_many(patch, u, v, w, tol))


def _bernstein2(s):
    s = np.asarray(s, dtype=float)
    return np.stack([(1 - s) ** 2, 2 * s * (1 - s), s * s], axis=-1)


def eval_tp_many(patch: TPPatch, u, v) -> np.ndarray:
    """Vectorized tensor-product evaluation; returns shape ``(..., 3)``."""
    bu, bv = _bernstein2(u), _bernstein2(v)
    blend = bu[..., :, None] * bv[..., None, :] * patch.weights
    den = blend.sum(axis=(-2, -1))
    if np.any(np.abs(den) <= 1e-14 * np.abs(blend).sum(axis=(-2, -1))):
        raise ZeroDenominator("patch denominator vanishes")
    num = np.einsum("...ij,ijk->...k", blend, patch.points)
    return num / den[..., None]


def eval_tp(patch: TPPatch, u: float, v: float) -> HPoint:
    """Point of the tensor-product patch at ``(u, v)``."""
    return HPoint.from_affine(eval_tp_many(patch, u, v))


def boundaries(patch: TriPatch) -> tuple[BoundaryConic, BoundaryConic, BoundaryConic]:
    """Boundary arcs at ``u = 0``, ``v = 0`` and ``w = 0``."""
    def arc(*keys):
        return BoundaryConic(tuple(patch.hpoint(k) for k in keys),
                             tuple(patch.weight(k) for k in keys))
    return (arc((0, 0, 2), (0, 1, 1), (0, 2, 0)),
            arc((0, 0, 2), (1, 0, 1), (2, 0, 0)),
            arc((0, 2, 0), (1, 1, 0), (2, 0, 0)))


def eval_conic(c: BoundaryConic, s: float) -> HPoint:
    """Point of a conic arc; ``s = inf`` gives ``w0 b0 - 2 w1 b1 + w2 b2``."""
    rows = c.weighted()
    if np.isinf(s):
        h = rows[0] - 2.0 * rows[1] + rows[2]
        if not np.any(h):
            raise ZeroDenominator("conic point at s = inf vanishes")
        return HPoint(h)
    h = _bernstein2(s) @ rows
    if abs(h[3]) <= 1e-14 * np.abs(_bernstein2(s) * np.array(c.wts)).sum():
        raise ZeroDenominator("conic denominator vanishes")
    return HPoint(h / h[3])


def tri_grid(n: int) -> np.ndarray:
    """``n x n`` parameter grid mapped onto the triangle, rows ``(u, v, w)``.

    The square ``(s, r)`` maps to ``u = s (1 - r), v = s r, w = 1 - s``.
    """
    s, r = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n), indexing="ij")
    s, r = s.ravel(), r.ravel()
    u, v = s * (1 - r), s * r
    return np.column_stack([u, v, 1.0 - u - v])


def sample_patch(patch, n: int = 15) -> np.ndarray:
    """Cartesian samples on an ``n x n`` grid of either patch type."""
    if isinstance(patch, TPPatch):
        u, v = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n), indexing="ij")
        return eval_tp_many(patch, u.ravel(), v.ravel())
    g = tri_grid(n)
    return eval_tri_many(patch, g[:, 0], g[:, 1], g[:, 2])


# --- file ingestion ---------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": math.sqrt, "cbrt": np.cbrt, "sin": math.sin, "cos": math.cos, "tan": math.tan}
_CONSTS = {"pi": math.pi}


def _eval_expr(node):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval_expr(node.operand))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return float(_FUNCS[node.func.id](_eval_expr(node.args[0])))
    if isinstance(node, ast.Name) and node.id in _CONSTS:
        return _CONSTS[node.id]
    raise ValueError(f"unsupported expression element {ast.dump(node)}")


def _number(value, where: str) -> float:
    """A real from a number or a small arithmetic expression such as ``"sqrt(3)/2"``."""
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(_eval_expr(ast.parse(value.strip(), mode="eval")))
        except (SyntaxError, ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ParseError(f"{where}: cannot evaluate {value!r} ({exc})") from None
    else:
        raise ParseError(f"{where}: expected a number, got {type(value).__name__}")
    if not math.isfinite(out):
        raise ParseError(f"{where}: value {value!r} is not finite")
    return out


def _points(raw, count: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != count:
        got = len(raw) if isinstance(raw, list) else type(raw).__name__
        raise ParseError(f"points: expected a list of {count} entries, got {got}")
    out = []
    for n, p in enumerate(raw):
        if not isinstance(p, list) or len(p) != 3:
            raise ParseError(f"points[{n}]: expected [x, y, z]")
        out.append([_number(x, f"points[{n}][{m}]") for m, x in enumerate(p)])
    return np.array(out)


def _weights(raw, count: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != count:
        got = len(raw) if isinstance(raw, list) else type(raw).__name__
        raise ParseError(f"weights: expected a list of {count} entries, got {got}")
    return np.array([_number(x, f"weights[{n}]") for n, x in enumerate(raw)])


def _flatten_rows(raw, field: str):
    """Accept either a flat list or the row layout (list of rows)."""
    if isinstance(raw, list) and raw and all(isinstance(r, list) for r in raw):
        depth_two = all(r and isinstance(r[0], list) for r in raw)
        if field == "points" and depth_two:
            return [p for row in raw for p in row]
        if field == "weights":
            return [w for row in raw for w in row]
    return raw


def parse_patch(doc) -> TriPatch | TPPatch:
    """Build a patch from a parsed document (mapping with type/points/weights)."""
    if not isinstance(doc, dict):
        raise ParseError("patch document must be a mapping with keys type, points, weights")
    missing = {"type", "points", "weights"} - set(doc)
    if missing:
        raise ParseError(f"missing field(s): {', '.join(sorted(missing))}")
    kind = doc["type"]
    points = _flatten_rows(doc["points"], "points")
    weights = _flatten_rows(doc["weights"], "weights")
    try:
        if kind == "triangular":
            return TriPatch(_points(points, 6), _weights(weights, 6))
        if kind == "tensor":
            return TPPatch(_points(points, 9).reshape(3, 3, 3), _weights(weights, 9).reshape(3, 3))
    except InvalidPatch as exc:
        raise ParseError(f"invalid patch: {exc}") from None
    raise ParseError(f"type: expected 'triangular' or 'tensor', got {kind!r}")


def load_patch(path) -> TriPatch | TPPatch:
    """Read a YAML (or JSON) patch file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ParseError(f"{path}: malformed document{where}") from None
    try:
        return parse_patch(doc)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def patch_to_dict(patch: TriPatch | TPPatch) -> dict:
    """Serializable echo of a parsed patch (floats round-trip exactly)."""
    if isinstance(patch, TPPatch):
        return {"type": "tensor",
                "points": patch.points.reshape(9, 3).tolist(),
                "weights": patch.weights.reshape(9).tolist()}
    return {"type": "triangular",
            "points": patch.points.tolist(),
            "weights": patch.weights.tolist()}
