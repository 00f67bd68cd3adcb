"""Finite cell complexes with integer boundary matrices.

A complex stores ordered cell ids per degree and boundary matrices
``bmat(k): C_k -> C_{k-1}``. Products carry Koszul signs and traceable
ids (pairs of factor ids), quotients collapse a labeled subcomplex to a
basepoint, and chain maps are validated to commute with the boundaries.

The builtin registry holds the spaces the toolkit's identities live on:
spheres, the cone on the 2-sphere (compact stand-in for R^3), the two-disc
3-sphere used by the monopole gluing, CP^2, lens spaces, and wedges of
2-spheres.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .intlin import IMat


class NotASubcomplex(ValueError):
    pass


class BoundaryNotLabeled(ValueError):
    pass


class LabelMismatch(ValueError):
    pass


PT = ("*",)   # basepoint id used by quotient complexes


@dataclass
class CellComplex:
    name: str
    cells: dict                                  # degree -> ordered list of ids
    boundaries: dict = field(default_factory=dict)  # degree k>=1 -> IMat
    product_of: tuple | None = None              # (X, Y) provenance

    def __post_init__(self):
        self.cells = {k: list(v) for k, v in self.cells.items() if v}
        self._index = {k: {c: i for i, c in enumerate(v)} for k, v in self.cells.items()}
        for k, mat in self.boundaries.items():
            if mat.rows != self.n_cells(k - 1) or mat.cols != self.n_cells(k):
                raise ValueError(f"boundary {k} has shape {mat.rows}x{mat.cols}, "
                                 f"expected {self.n_cells(k-1)}x{self.n_cells(k)}")
        self.validate_square_zero()

    @property
    def top(self) -> int:
        return max(self.cells) if self.cells else 0

    def degrees(self):
        return range(self.top + 1)

    def n_cells(self, k: int) -> int:
        return len(self.cells.get(k, ()))

    def cell_ids(self, k: int) -> list:
        return self.cells.get(k, [])

    def all_ids(self) -> set:
        out = set()
        for v in self.cells.values():
            out |= set(v)
        return out

    def index(self, k: int, cell) -> int:
        return self._index[k][cell]

    def degree_of(self, cell) -> int:
        for k, idx in self._index.items():
            if cell in idx:
                return k
        raise KeyError(cell)

    def bmat(self, k: int) -> IMat:
        if k in self.boundaries:
            return self.boundaries[k]
        return IMat(self.n_cells(k - 1), self.n_cells(k))

    def validate_square_zero(self):
        for k in range(2, self.top + 1):
            if not (self.bmat(k - 1) @ self.bmat(k)).is_zero():
                raise ValueError(f"boundary squared nonzero at degree {k} in {self.name}")

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.n_cells(k) for k in self.degrees())

    # -- subcomplexes --------------------------------------------------

    def check_subcomplex(self, ids) -> frozenset:
        ids = frozenset(ids)
        unknown = ids - self.all_ids()
        if unknown:
            raise NotASubcomplex(f"cells {sorted(map(str, unknown))} not in {self.name}")
        for k in range(1, self.top + 1):
            mat = self.bmat(k)
            lower = self.cell_ids(k - 1)
            for cell in self.cell_ids(k):
                if cell in ids:
                    j = self.index(k, cell)
                    for i, low in enumerate(lower):
                        if mat[i, j] != 0 and low not in ids:
                            raise NotASubcomplex(
                                f"boundary of {cell} leaves the cell set at {low}")
        return ids

    def subcomplex(self, ids, name: str | None = None) -> "CellComplex":
        """Canonical subcomplex on the given cells; instances are cached per
        cell set so class spaces computed through different call sites agree."""
        ids = self.check_subcomplex(ids)
        cache = getattr(self, "_subcomplex_cache", None)
        if cache is None:
            cache = {}
            self._subcomplex_cache = cache
        if ids in cache:
            return cache[ids]
        cache[ids] = self._build_subcomplex(ids, name)
        return cache[ids]

    def _build_subcomplex(self, ids: frozenset, name: str | None) -> "CellComplex":
        cells = {k: [c for c in v if c in ids] for k, v in self.cells.items()}
        cells = {k: v for k, v in cells.items() if v}
        bounds = {}
        for k in range(1, self.top + 1):
            sub_k = cells.get(k, [])
            sub_low = cells.get(k - 1, [])
            if not sub_k:
                continue
            mat = self.bmat(k)
            out = IMat(len(sub_low), len(sub_k))
            for j, cell in enumerate(sub_k):
                col = self.index(k, cell)
                for i, low in enumerate(sub_low):
                    out[i, j] = mat[self.index(k - 1, low), col]
            bounds[k] = out
        return CellComplex(name or f"{self.name}|sub", cells, bounds)

    def to_json(self) -> dict:
        inc = {}
        for k in range(1, self.top + 1):
            mat = self.bmat(k)
            entries = []
            for j, cell in enumerate(self.cell_ids(k)):
                for i, low in enumerate(self.cell_ids(k - 1)):
                    if mat[i, j]:
                        entries.append([_id_str(cell), _id_str(low), mat[i, j]])
            inc[str(k)] = entries
        return {"name": self.name,
                "cells": {str(k): [_id_str(c) for c in v] for k, v in self.cells.items()},
                "boundaries": inc}


def _id_str(cell) -> str:
    if isinstance(cell, tuple):
        return "(" + ",".join(_id_str(c) for c in cell) + ")"
    return str(cell)


def build_complex(name: str, cells: dict, incidences: dict | None = None) -> CellComplex:
    """Construct from per-degree id lists and sparse incidence data.

    ``incidences[k]`` maps (lower_id, upper_id) to the integer coefficient of
    lower_id in the boundary of upper_id.
    """
    cells = {k: list(v) for k, v in cells.items()}
    index = {k: {c: i for i, c in enumerate(v)} for k, v in cells.items()}
    bounds = {}
    top = max(cells) if cells else 0
    for k in range(1, top + 1):
        rows = len(cells.get(k - 1, []))
        cols = len(cells.get(k, []))
        mat = IMat(rows, cols)
        for (low, up), coeff in (incidences or {}).get(k, {}).items():
            mat[index[k - 1][low], index[k][up]] = coeff
        bounds[k] = mat
    return CellComplex(name, cells, bounds)


# ---------------------------------------------------------------------------
# chain maps

@dataclass
class ChainMap:
    """Degree-wise integer matrices commuting with the boundaries."""

    source: CellComplex
    target: CellComplex
    mats: dict                                  # degree -> IMat (n_target x n_source)
    name: str = ""

    def __post_init__(self):
        for k in range(max(self.source.top, self.target.top) + 1):
            m = self.mat(k)
            if m.rows != self.target.n_cells(k) or m.cols != self.source.n_cells(k):
                raise ValueError(f"chain map degree {k} shape mismatch")
        for k in range(1, self.source.top + 1):
            lhs = self.target.bmat(k) @ self.mat(k)
            rhs = self.mat(k - 1) @ self.source.bmat(k)
            if lhs != rhs:
                raise ValueError(f"chain map does not commute with boundary at degree {k}")

    def mat(self, k: int) -> IMat:
        if k in self.mats:
            return self.mats[k]
        return IMat(self.target.n_cells(k), self.source.n_cells(k))

    def then(self, other: "ChainMap") -> "ChainMap":
        if other.source is not self.target:
            raise ValueError("composition mismatch")
        top = max(self.source.top, other.target.top)
        mats = {k: other.mat(k) @ self.mat(k) for k in range(top + 1)}
        return ChainMap(self.source, other.target, mats,
                        name=f"{other.name}.{self.name}")


def identity_chain_map(x: CellComplex) -> ChainMap:
    return ChainMap(x, x, {k: IMat.identity(x.n_cells(k)) for k in x.degrees()}, "id")


def inclusion_chain_map(sub: CellComplex, ambient: CellComplex) -> ChainMap:
    mats = {}
    for k in sub.degrees():
        m = IMat(ambient.n_cells(k), sub.n_cells(k))
        for j, cell in enumerate(sub.cell_ids(k)):
            m[ambient.index(k, cell), j] = 1
        mats[k] = m
    return ChainMap(sub, ambient, mats, name=f"incl:{sub.name}->{ambient.name}")


# ---------------------------------------------------------------------------
# products

_product_cache: dict = {}


def product_complex(x: CellComplex, y: CellComplex, name: str | None = None) -> CellComplex:
    """Cellular product; cell ids are (x_id, y_id), boundaries carry the
    Koszul sign: d(a x b) = da x b + (-1)^|a| a x db. Canonical per factor
    pair: repeated calls return the same instance."""
    key = (id(x), id(y), name)
    if key in _product_cache:
        return _product_cache[key]
    cells: dict = {}
    top = x.top + y.top
    for k in range(top + 1):
        row = []
        for da in range(k + 1):
            db = k - da
            for a in x.cell_ids(da):
                for b in y.cell_ids(db):
                    row.append((a, b))
        if row:
            cells[k] = row
    index = {k: {c: i for i, c in enumerate(v)} for k, v in cells.items()}
    bounds = {}
    for k in range(1, top + 1):
        mat = IMat(len(cells.get(k - 1, [])), len(cells.get(k, [])))
        for j, (a, b) in enumerate(cells.get(k, [])):
            da = x.degree_of(a)
            db = y.degree_of(b)
            if da >= 1:
                bx = x.bmat(da)
                col = x.index(da, a)
                for i, a2 in enumerate(x.cell_ids(da - 1)):
                    coeff = bx[i, col]
                    if coeff:
                        mat[index[k - 1][(a2, b)], j] += coeff
            if db >= 1:
                by = y.bmat(db)
                col = y.index(db, b)
                sign = (-1) ** da
                for i, b2 in enumerate(y.cell_ids(db - 1)):
                    coeff = by[i, col]
                    if coeff:
                        mat[index[k - 1][(a, b2)], j] += sign * coeff
        bounds[k] = mat
    out = CellComplex(name or f"{x.name}x{y.name}", cells, bounds)
    out.product_of = (x, y)
    _product_cache[key] = out
    return out


def product_with_circle(x: CellComplex) -> CellComplex:
    """X x S^1 with the one-vertex circle model; ids traceable to factors."""
    return product_complex(x, circle(), name=f"{x.name}xS1")


def product_subcomplex_ids(sub_ids, y: CellComplex) -> frozenset:
    """Cells of (subcomplex) x Y inside a product complex."""
    return frozenset((a, b) for a in sub_ids for b in y.all_ids())


# ---------------------------------------------------------------------------
# quotients (Thom spaces, collapse maps)

def quotient_by_subcomplex(x: CellComplex, sub_ids, name: str | None = None):
    """X / A: collapse the labeled subcomplex to a basepoint.

    Returns (quotient complex, collapse chain map). Vertices of A map to the
    basepoint; higher A-cells map to zero; other cells map to themselves with
    A-terms of their boundaries redirected accordingly.
    """
    sub_ids = x.check_subcomplex(sub_ids)
    cells = {0: [PT] + [c for c in x.cell_ids(0) if c not in sub_ids]}
    for k in range(1, x.top + 1):
        kept = [c for c in x.cell_ids(k) if c not in sub_ids]
        if kept:
            cells[k] = kept
    index = {k: {c: i for i, c in enumerate(v)} for k, v in cells.items()}
    bounds = {}
    for k in range(1, x.top + 1):
        if k not in cells:
            continue
        mat = IMat(len(cells.get(k - 1, [])), len(cells[k]))
        bx = x.bmat(k)
        for j, cell in enumerate(cells[k]):
            col = x.index(k, cell)
            for i, low in enumerate(x.cell_ids(k - 1)):
                coeff = bx[i, col]
                if not coeff:
                    continue
                if low in sub_ids:
                    if k == 1:          # collapsed vertex becomes the basepoint
                        mat[index[0][PT], j] += coeff
                    continue
                mat[index[k - 1][low], j] += coeff
        bounds[k] = mat
    q = CellComplex(name or f"{x.name}/{len(sub_ids)}cells", cells, bounds)
    mats = {}
    for k in x.degrees():
        m = IMat(q.n_cells(k), x.n_cells(k))
        for j, cell in enumerate(x.cell_ids(k)):
            if cell in sub_ids:
                if k == 0:
                    m[q.index(0, PT), j] = 1
                continue
            m[q.index(k, cell), j] = 1
        mats[k] = m
    return q, ChainMap(x, q, mats, name=f"collapse:{x.name}")


def thom_space(disc_bundle: CellComplex, sphere_ids, name: str | None = None):
    """Collapse the labeled boundary sphere bundle of a disc bundle model.

    ``sphere_ids`` must be a subcomplex of the disc bundle; otherwise
    BoundaryNotLabeled is raised.
    """
    try:
        ids = disc_bundle.check_subcomplex(sphere_ids)
    except NotASubcomplex as exc:
        raise BoundaryNotLabeled(str(exc)) from None
    return quotient_by_subcomplex(disc_bundle, ids, name or f"TD({disc_bundle.name})")


def collapse_map(btilde: CellComplex, disc_ids, sphere_ids,
                 target: CellComplex | None = None) -> ChainMap:
    """Collapse everything outside the open disc neighborhood of F.

    ``disc_ids`` labels the closed neighborhood N(F)-model inside ``btilde``
    and ``sphere_ids`` its boundary sphere bundle. The target of the map is
    the Thom space of the disc subcomplex. Cells outside the neighborhood
    whose boundaries meet the open part would make the collapse ill-defined;
    that situation raises LabelMismatch.
    """
    disc_ids = btilde.check_subcomplex(disc_ids)
    sphere_ids = frozenset(sphere_ids)
    if not sphere_ids <= disc_ids:
        raise LabelMismatch("sphere bundle cells must lie inside the disc bundle")
    disc = btilde.subcomplex(disc_ids, name="D(F)")
    td, quot = thom_space(disc, sphere_ids, target.name if target else None)
    if target is not None:
        if {k: target.cell_ids(k) for k in target.degrees()} != \
           {k: td.cell_ids(k) for k in td.degrees()}:
            raise LabelMismatch("provided target does not match the Thom space of the labels")
        td = target
        quot = ChainMap(disc, td, quot.mats, quot.name)
    interior = disc_ids - sphere_ids
    mats = {}
    for k in btilde.degrees():
        m = IMat(td.n_cells(k), btilde.n_cells(k))
        for j, cell in enumerate(btilde.cell_ids(k)):
            if cell in interior:
                m[td.index(k, cell), j] = 1
            elif k == 0:
                m[td.index(0, PT), j] = 1
        mats[k] = m
    try:
        return ChainMap(btilde, td, mats, name=f"collapse:{btilde.name}->TD")
    except ValueError as exc:
        raise LabelMismatch(f"collapse is not cellular with these labels: {exc}") from None


# ---------------------------------------------------------------------------
# builtin spaces
#
# Builders are memoized: complexes are immutable after construction, and a
# canonical instance per space lets cohomology classes computed through
# different call sites live in the same coordinate space.

def _memo(fn):
    cache = {}

    def wrapped(*args):
        if args not in cache:
            cache[args] = fn(*args)
        return cache[args]

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


@_memo
def point() -> CellComplex:
    return build_complex("pt", {0: ["v"]})


@_memo
def circle() -> CellComplex:
    return build_complex("S1", {0: ["a"], 1: ["e"]})


@_memo
def interval() -> CellComplex:
    return build_complex("I", {0: ["p", "q"], 1: ["i"]},
                         {1: {("q", "i"): 1, ("p", "i"): -1}})


@_memo
def sphere(n: int) -> CellComplex:
    if n < 2:
        raise ValueError("use circle() for S^1")
    return build_complex(f"S{n}", {0: ["v"], n: [f"c{n}"]})


@_memo
def cone_on_s2() -> CellComplex:
    """Compact model of the cone C^0 S^2 (= R^3, = D^3): the 2-sphere
    {u, f2} joined to the cone vertex v, filled by one 3-cell."""
    return build_complex(
        "coneS2",
        {0: ["v", "u"], 1: ["a"], 2: ["f2"], 3: ["c3"]},
        {1: {("u", "a"): 1, ("v", "a"): -1},
         3: {("f2", "c3"): 1}})


@_memo
def s3_two_disc() -> CellComplex:
    """S^3 as two 3-discs glued along the equatorial S^2 {u, f2}.

    Contains cone_on_s2 (the inner disc) as a subcomplex; the outer disc
    {u, f2, c3out} is a compact model of S^3 minus the inner vertex.
    """
    return build_complex(
        "S3+",
        {0: ["v", "u"], 1: ["a"], 2: ["f2"], 3: ["c3", "c3out"]},
        {1: {("u", "a"): 1, ("v", "a"): -1},
         3: {("f2", "c3"): 1, ("f2", "c3out"): -1}})


@_memo
def cp2() -> CellComplex:
    return build_complex("CP2", {0: ["v"], 2: ["c2"], 4: ["c4"]})


@_memo
def lens(p: int) -> CellComplex:
    """L(1,p): one cell per degree 0..3 with degree-p attaching in the middle."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return build_complex(f"L(1,{p})", {0: ["e0"], 1: ["e1"], 2: ["e2"], 3: ["e3"]},
                         {2: {("e1", "e2"): p}})


@_memo
def wedge_of_spheres(count: int, dim: int = 2) -> CellComplex:
    return build_complex(f"wedge{count}S{dim}",
                         {0: ["v"], dim: [f"s{i}" for i in range(count)]} if count
                         else {0: ["v"]})


@_memo
def disc2() -> CellComplex:
    """D^2 with its boundary circle {a, e} as a subcomplex."""
    return build_complex("D2", {0: ["a"], 1: ["e"], 2: ["f"]}, {2: {("e", "f"): 1}})


@_memo
def interval_power(k: int) -> CellComplex:
    """I^k as an iterated product; its boundary sphere is the set of product
    cells with at least one endpoint factor."""
    out = interval()
    for _ in range(k - 1):
        out = product_complex(out, interval())
    out.name = f"I^{k}"
    return out


def interval_power_boundary_ids(cube: CellComplex, k: int) -> frozenset:
    def has_endpoint(cell, depth) -> bool:
        if depth == 1:
            return cell in ("p", "q")
        a, b = cell
        return has_endpoint(a, depth - 1) or b in ("p", "q")

    return frozenset(c for c in cube.all_ids() if has_endpoint(c, k))


def trivial_disc_bundle(base: CellComplex, rank: int):
    """(D(F), S(F)-ids, F-ids) for the trivial rank-k disc bundle over base.

    F is embedded as base x (corner point), a deformation retract of the
    zero section.
    """
    cube = interval_power(rank)
    total = product_complex(base, cube, name=f"{base.name}xD{rank}")
    boundary = interval_power_boundary_ids(cube, rank)
    sphere_ids = frozenset((a, b) for a in base.all_ids() for b in boundary)
    corner = _corner_id(rank)
    f_ids = frozenset((a, corner) for a in base.all_ids())
    return total, sphere_ids, f_ids


def _corner_id(rank: int):
    cell = "p"
    for _ in range(rank - 1):
        cell = (cell, "p")
    return cell


# registry ------------------------------------------------------------------

def builtin_space(name: str) -> CellComplex:
    """Resolve a registry name: S2, S3, S2xS1, S3xS1, CP2, L1p:<p>, coneS2,
    D3, S1, pt, S3plus, wedge:<k>."""
    if name.startswith("L1p:"):
        return lens(int(name.split(":", 1)[1]))
    if name.startswith("wedge:"):
        return wedge_of_spheres(int(name.split(":", 1)[1]))
    table = {
        "pt": point,
        "S1": circle,
        "S2": lambda: sphere(2),
        "S3": lambda: sphere(3),
        "S2xS1": lambda: product_with_circle(sphere(2)),
        "S3xS1": lambda: product_with_circle(sphere(3)),
        "CP2": cp2,
        "coneS2": cone_on_s2,
        "D3": cone_on_s2,
        "S3plus": s3_two_disc,
        "D2": disc2,
    }
    if name not in table:
        raise KeyError(f"unknown builtin space {name!r}")
    return table[name]()


BUILTIN_NAMES = ("pt", "S1", "S2", "S3", "S2xS1", "S3xS1", "CP2", "coneS2",
                 "S3plus", "D2", "L1p:2", "L1p:3", "L1p:7", "wedge:1", "wedge:4")
