"""Integer (co)homology of finite cell complexes, pairs, and products.

Groups are computed by Smith normal form; classes are integer cochain
vectors reduced to canonical coordinates modulo coboundaries, so class
equality, generator extraction, induced maps, connecting maps, and
exactness checks are all exact integer computations. Cross product with
the circle generator and integration over the circle fiber act at the
cochain level on product complexes and are strict chain-level inverses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import CellComplex, ChainMap, NotASubcomplex, circle
from .intlin import IMat, kernel_basis, lattice_equal, rank_q, solve


class NotAProduct(ValueError):
    pass


class DegreeOverflow(ValueError):
    pass


class NotACocycle(ValueError):
    pass


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group: free rank plus divisibility-ordered
    torsion coefficients (each > 1, each dividing the next)."""

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        for t in self.torsion:
            if t <= 1:
                raise ValueError("torsion coefficients must exceed 1")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion list must be in divisibility order")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


Z = AbelianGroup(1)
TRIVIAL = AbelianGroup(0)


def group_from_diagonal(diag, free_rank: int) -> AbelianGroup:
    return AbelianGroup(free_rank, tuple(d for d in diag if d > 1))


# ---------------------------------------------------------------------------
# subquotient spaces: ker(out_map) / im(in_map)

class SubquotientSpace:
    """The abelian group ker(out_map)/im(in_map) with explicit coordinates.

    ``out_map``: Z^n -> Z^q and ``in_map``: Z^m -> Z^n must compose to zero.
    Elements are integer vectors in Z^n lying in ker(out_map); ``reduce``
    maps them to canonical coordinates (torsion residues, then free parts),
    and ``generators`` returns one representative per cyclic factor.
    """

    def __init__(self, n: int, out_map: IMat, in_map: IMat, label: str = ""):
        if out_map.cols != n or in_map.rows != n:
            raise ValueError("shape mismatch")
        self.n = n
        self.label = label
        self.out_map = out_map
        self.in_map = in_map
        self.kernel = kernel_basis(out_map)          # n x z
        z = self.kernel.cols
        cols = []
        for j in range(in_map.cols):
            c = solve(self.kernel, in_map.col(j))
            if c is None:
                raise ValueError("image does not lie in the kernel")
            cols.append(c)
        self.rel = IMat.from_columns(cols, z)        # z x m
        self.snf = self.rel.snf()
        diag = self.snf.diagonal()
        self.torsion_slots = [i for i in range(self.snf.rank) if diag[i] > 1]
        self.free_slots = list(range(self.snf.rank, z))
        self.torsion_values = [diag[i] for i in self.torsion_slots]

    def group(self) -> AbelianGroup:
        return AbelianGroup(len(self.free_slots), tuple(self.torsion_values))

    @property
    def coord_dim(self) -> int:
        return len(self.torsion_slots) + len(self.free_slots)

    def is_cocycle(self, vec) -> bool:
        return all(x == 0 for x in self.out_map.mul_vec(list(vec)))

    def reduce(self, vec) -> tuple:
        """Canonical coordinates of the class of ``vec``."""
        vec = list(vec)
        if len(vec) != self.n:
            raise ValueError("vector length mismatch")
        if not self.is_cocycle(vec):
            raise NotACocycle(f"vector is not a cocycle in {self.label}")
        c = solve(self.kernel, vec)
        if c is None:
            raise NotACocycle("cocycle not in kernel lattice")
        y = self.snf.u.mul_vec(c)
        out = [y[i] % self.torsion_values[k] for k, i in enumerate(self.torsion_slots)]
        out.extend(y[i] for i in self.free_slots)
        return tuple(out)

    def relations_lattice(self) -> IMat:
        """Columns generating the subgroup of coordinate vectors that are zero."""
        dim = self.coord_dim
        cols = []
        for k, t in enumerate(self.torsion_values):
            col = [0] * dim
            col[k] = t
            cols.append(col)
        return IMat.from_columns(cols, dim)

    def generators(self) -> list["CohClass"]:
        gens = []
        for slot in self.torsion_slots + self.free_slots:
            c = self.snf.uinv.col(slot)
            vec = self.kernel.mul_vec(c)
            gens.append(CohClass(self, tuple(vec)))
        return gens

    def class_from_coords(self, coords) -> "CohClass":
        coords = list(coords)
        vec = [0] * self.n
        for coeff, slot in zip(coords, self.torsion_slots + self.free_slots):
            if coeff:
                base = self.kernel.mul_vec(self.snf.uinv.col(slot))
                vec = [v + coeff * b for v, b in zip(vec, base)]
        return CohClass(self, tuple(vec))

    def zero(self) -> "CohClass":
        return CohClass(self, (0,) * self.n)


@dataclass(frozen=True)
class CohClass:
    """A cohomology class: a cocycle representative in its ambient space."""

    space: SubquotientSpace
    vector: tuple

    def reduced(self) -> tuple:
        return self.space.reduce(self.vector)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.reduced())

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        if self.space is not other.space:
            raise ValueError("classes live in different spaces")
        return self.reduced() == other.reduced()

    def __hash__(self):
        return hash((id(self.space), self.reduced()))

    def __add__(self, other: "CohClass") -> "CohClass":
        if self.space is not other.space:
            raise ValueError("classes live in different spaces")
        return CohClass(self.space, tuple(a + b for a, b in zip(self.vector, other.vector)))

    def __neg__(self) -> "CohClass":
        return CohClass(self.space, tuple(-a for a in self.vector))

    def __rmul__(self, k: int) -> "CohClass":
        return CohClass(self.space, tuple(k * a for a in self.vector))


# ---------------------------------------------------------------------------
# absolute / relative cochain spaces

def _cochain_cache(x: CellComplex) -> dict:
    cache = getattr(x, "_cochain_cache", None)
    if cache is None:
        cache = {}
        x._cochain_cache = cache
    return cache


def cochain_space(x: CellComplex, k: int) -> SubquotientSpace:
    cache = _cochain_cache(x)
    if ("abs", k) not in cache:
        delta_out = x.bmat(k + 1).transpose()
        delta_in = x.bmat(k).transpose()
        cache[("abs", k)] = SubquotientSpace(x.n_cells(k), delta_out, delta_in,
                                             label=f"H^{k}({x.name})")
    return cache[("abs", k)]


def chain_space(x: CellComplex, k: int) -> SubquotientSpace:
    cache = _cochain_cache(x)
    if ("hom", k) not in cache:
        cache[("hom", k)] = SubquotientSpace(x.n_cells(k), x.bmat(k), x.bmat(k + 1),
                                             label=f"H_{k}({x.name})")
    return cache[("hom", k)]


def cohomology(x: CellComplex, k: int) -> AbelianGroup:
    """H^k(X; Z) via Smith normal form of the coboundary matrices."""
    if k < 0:
        return TRIVIAL
    return cochain_space(x, k).group()


def homology(x: CellComplex, k: int) -> AbelianGroup:
    if k < 0:
        return TRIVIAL
    return chain_space(x, k).group()


class RelativeCochainSpace(SubquotientSpace):
    """Cochains of X vanishing on a subcomplex A, i.e. functions on X-A cells."""

    def __init__(self, x: CellComplex, a_ids, k: int):
        self.complex = x
        self.a_ids = x.check_subcomplex(a_ids)
        self.kept = {d: [c for c in x.cell_ids(d) if c not in self.a_ids]
                     for d in range(x.top + 2)}
        self.degree = k
        n = len(self.kept.get(k, []))
        super().__init__(n, self._delta(x, k), self._delta(x, k - 1),
                         label=f"H^{k}({x.name}, A)")

    def _delta(self, x: CellComplex, k: int) -> IMat:
        # restricted coboundary C^k_rel -> C^{k+1}_rel; boundaries of A-cells
        # stay in A, so dropping A-coordinates is compatible with delta
        src = self.kept.get(k, [])
        dst = self.kept.get(k + 1, [])
        full = x.bmat(k + 1).transpose()   # rows: (k+1)-cells, cols: k-cells
        out = IMat(len(dst), len(src))
        for j, cell in enumerate(src):
            col = x.index(k, cell)
            for i, up in enumerate(dst):
                out[i, j] = full[x.index(k + 1, up), col]
        return out


def relative_cochain_space(x: CellComplex, a_ids, k: int) -> RelativeCochainSpace:
    cache = _cochain_cache(x)
    key = ("rel", frozenset(a_ids), k)
    if key not in cache:
        cache[key] = RelativeCochainSpace(x, a_ids, k)
    return cache[key]


def relative_cohomology(x: CellComplex, a_ids, k: int) -> AbelianGroup:
    """H^k(X, A; Z) for a labeled subcomplex A."""
    if k < 0:
        return TRIVIAL
    return relative_cochain_space(x, a_ids, k).group()


# ---------------------------------------------------------------------------
# homomorphisms between class spaces

class GroupHom:
    """A homomorphism between subquotient spaces, given by a cochain-level
    matrix; stored as its action on reduced coordinates."""

    def __init__(self, domain: SubquotientSpace, codomain: SubquotientSpace,
                 cochain_matrix: IMat, name: str = ""):
        self.domain = domain
        self.codomain = codomain
        self.cochain_matrix = cochain_matrix
        self.name = name
        cols = []
        for gen in domain.generators():
            img = cochain_matrix.mul_vec(list(gen.vector))
            cols.append(list(codomain.reduce(img)))
        self.matrix = IMat.from_columns(cols, codomain.coord_dim)

    def apply(self, cls: CohClass) -> CohClass:
        if cls.space is not self.domain:
            raise ValueError("class not in the domain of this map")
        img = self.cochain_matrix.mul_vec(list(cls.vector))
        return CohClass(self.codomain, tuple(img))

    def preimage(self, cls: CohClass) -> CohClass | None:
        """Some class mapping to ``cls``, or None if outside the image."""
        if cls.space is not self.codomain:
            raise ValueError("class not in the codomain of this map")
        target = list(cls.reduced())
        block = self.matrix.hstack(self.codomain.relations_lattice())
        sol = solve(block, target)
        if sol is None:
            return None
        return self.domain.class_from_coords(sol[:self.matrix.cols])

    def rank(self) -> int:
        return rank_q(self.matrix)

    def image_lattice(self) -> IMat:
        return self.matrix.hstack(self.codomain.relations_lattice())

    def kernel_lattice(self) -> IMat:
        rel_c = self.codomain.relations_lattice()
        block = self.matrix.hstack(rel_c.neg())
        kern = kernel_basis(block)
        cols = [[kern[i, j] for i in range(self.matrix.cols)] for j in range(kern.cols)]
        x_part = IMat.from_columns(cols, self.matrix.cols)
        return x_part.hstack(self.domain.relations_lattice())

    def is_iso(self) -> bool:
        if self.domain.group() != self.codomain.group():
            return False
        onto = lattice_equal(self.image_lattice(),
                             IMat.identity(self.codomain.coord_dim))
        inj = lattice_equal(self.kernel_lattice(),
                            self.domain.relations_lattice()
                            if self.domain.coord_dim else IMat(0, 0))
        return onto and inj


def exact_at(f: GroupHom, g: GroupHom) -> bool:
    """Exactness of  A --f--> B --g--> C  at B: image f == kernel g."""
    if f.codomain is not g.domain:
        raise ValueError("maps do not share the middle space")
    dim = f.codomain.coord_dim
    if dim == 0:
        return True
    return lattice_equal(f.image_lattice(), g.kernel_lattice())


def pullback_hom(f: ChainMap, k: int,
                 dom: SubquotientSpace | None = None,
                 cod: SubquotientSpace | None = None) -> GroupHom:
    """Induced map H^k(target of f) -> H^k(source of f)."""
    dom = dom or cochain_space(f.target, k)
    cod = cod or cochain_space(f.source, k)
    return GroupHom(dom, cod, f.mat(k).transpose(), name=f"{f.name}^*")


def excision_hom(big: CellComplex, big_a_ids, small: CellComplex, small_a_ids,
                 k: int) -> GroupHom:
    """Restriction H^k(big, big-A) -> H^k(small, small-A) induced by an
    inclusion of pairs; the excision isomorphism when the relative cells
    agree. Cells of the small pair must appear in the big complex."""
    dom = relative_cochain_space(big, big_a_ids, k)
    cod = relative_cochain_space(small, small_a_ids, k)
    big_kept = dom.kept.get(k, [])
    pos = {c: i for i, c in enumerate(big_kept)}
    m = IMat(cod.n, dom.n)
    for j, cell in enumerate(cod.kept.get(k, [])):
        if cell not in pos:
            raise NotASubcomplex(
                f"relative cell {cell} of the small pair missing from the big pair")
        m[j, pos[cell]] = 1
    return GroupHom(dom, cod, m, name=f"excision^{k}")


# ---------------------------------------------------------------------------
# the long exact sequence of a pair

def _inclusion_matrix_rel_to_abs(rel: RelativeCochainSpace, k: int) -> IMat:
    x = rel.complex
    m = IMat(x.n_cells(k), len(rel.kept.get(k, [])))
    for j, cell in enumerate(rel.kept.get(k, [])):
        m[x.index(k, cell), j] = 1
    return m


def _restriction_matrix(x: CellComplex, a: CellComplex, k: int) -> IMat:
    m = IMat(a.n_cells(k), x.n_cells(k))
    for j, cell in enumerate(a.cell_ids(k)):
        m[j, x.index(k, cell)] = 1
    return m


def _connecting_matrix(x: CellComplex, a: CellComplex,
                       rel_next: RelativeCochainSpace, k: int) -> IMat:
    """delta: H^k(A) -> H^{k+1}(X, A): extend by zero, apply delta_X, restrict."""
    delta_x = x.bmat(k + 1).transpose()
    kept = rel_next.kept.get(k + 1, [])
    m = IMat(len(kept), a.n_cells(k))
    for j, cell in enumerate(a.cell_ids(k)):
        col = x.index(k, cell)
        for i, up in enumerate(kept):
            m[i, j] = delta_x[x.index(k + 1, up), col]
    return m


def relative_inclusion_hom(x: CellComplex, a_ids, k: int) -> GroupHom:
    """j*: H^k(X, A) -> H^k(X), inclusion of relative cochains."""
    rel = relative_cochain_space(x, a_ids, k)
    return GroupHom(rel, cochain_space(x, k),
                    _inclusion_matrix_rel_to_abs(rel, k), f"j*{k}")


def restriction_hom(x: CellComplex, a_ids, k: int) -> GroupHom:
    """i*: H^k(X) -> H^k(A), restriction to the subcomplex."""
    a = x.subcomplex(a_ids)
    return GroupHom(cochain_space(x, k), cochain_space(a, k),
                    _restriction_matrix(x, a, k), f"i*{k}")


def connecting_hom(x: CellComplex, a_ids, k: int) -> GroupHom:
    """delta: H^k(A) -> H^{k+1}(X, A), extend by zero then coboundary."""
    a = x.subcomplex(a_ids)
    rel_next = relative_cochain_space(x, a_ids, k + 1)
    return GroupHom(cochain_space(a, k), rel_next,
                    _connecting_matrix(x, a, rel_next, k), f"d{k}")


@dataclass
class LESNode:
    label: str
    group: AbelianGroup
    exact: bool | None    # None at the two open ends


@dataclass
class LESReport:
    nodes: list
    maps: dict

    @property
    def all_exact(self) -> bool:
        return all(n.exact for n in self.nodes if n.exact is not None)


def long_exact_sequence(x: CellComplex, a_ids) -> LESReport:
    """Groups and maps of ... -> H^k(X,A) -> H^k(X) -> H^k(A) -> H^{k+1}(X,A) -> ...
    with exactness verified at every interior node by exact lattice comparison."""
    a_ids = x.check_subcomplex(a_ids)
    a = x.subcomplex(a_ids, name=f"{x.name}|A")
    top = x.top + 1
    maps = {}
    rel = {k: relative_cochain_space(x, a_ids, k) for k in range(top + 2)}
    absx = {k: cochain_space(x, k) for k in range(top + 1)}
    suba = {k: cochain_space(a, k) for k in range(top + 1)}
    for k in range(top + 1):
        maps[("j", k)] = GroupHom(rel[k], absx[k],
                                  _inclusion_matrix_rel_to_abs(rel[k], k), f"j*{k}")
        maps[("i", k)] = GroupHom(absx[k], suba[k],
                                  _restriction_matrix(x, a, k), f"i*{k}")
        maps[("d", k)] = GroupHom(suba[k], rel[k + 1],
                                  _connecting_matrix(x, a, rel[k + 1], k), f"d{k}")
    nodes = []
    for k in range(top + 1):
        nodes.append(LESNode(f"H^{k}(X,A)", rel[k].group(),
                             exact_at(maps[("d", k - 1)], maps[("j", k)]) if k else None))
        nodes.append(LESNode(f"H^{k}(X)", absx[k].group(),
                             exact_at(maps[("j", k)], maps[("i", k)])))
        nodes.append(LESNode(f"H^{k}(A)", suba[k].group(),
                             exact_at(maps[("i", k)], maps[("d", k)])))
    return LESReport(nodes, maps)


# ---------------------------------------------------------------------------
# circle products: cross with z and fiber integration

def _require_circle_product(xs1: CellComplex) -> CellComplex:
    if not xs1.product_of:
        raise NotAProduct(f"{xs1.name} was not built as a product")
    base, fiber = xs1.product_of
    ref = circle()
    if {k: fiber.cell_ids(k) for k in fiber.degrees()} != \
       {k: ref.cell_ids(k) for k in ref.degrees()}:
        raise NotAProduct("second factor is not the standard circle model")
    return base


def cross_with_z_vector(x: CellComplex, xs1: CellComplex, vec, k: int) -> list:
    """(c x z) on (k+1)-cells of X x S^1: value c(sigma) on sigma x e, else 0."""
    out = [0] * xs1.n_cells(k + 1)
    for j, cell in enumerate(x.cell_ids(k)):
        out[xs1.index(k + 1, (cell, "e"))] = vec[j]
    return out


def fiber_integrate_vector(x: CellComplex, xs1: CellComplex, vec, k: int) -> list:
    """Slant against the circle 1-cell: sigma -> c(sigma x e)."""
    return [vec[xs1.index(k, (cell, "e"))] for cell in x.cell_ids(k - 1)]


def cross_with_z(cls: CohClass, xs1: CellComplex, degree: int | None = None) -> CohClass:
    """H^k(X) -> H^{k+1}(X x S^1), cross product with the circle generator."""
    base = _require_circle_product(xs1)
    k = degree if degree is not None else _degree_of_space(cls.space, base)
    if k + 1 > xs1.top:
        raise DegreeOverflow(f"degree {k+1} exceeds the product top degree")
    vec = cross_with_z_vector(base, xs1, list(cls.vector), k)
    return CohClass(cochain_space(xs1, k + 1), tuple(vec))


def fiber_integrate(cls: CohClass, xs1: CellComplex, degree: int | None = None) -> CohClass:
    """H^k(X x S^1) -> H^{k-1}(X); strict left inverse of cross_with_z."""
    base = _require_circle_product(xs1)
    k = degree if degree is not None else _degree_of_space(cls.space, xs1)
    vec = fiber_integrate_vector(base, xs1, list(cls.vector), k)
    return CohClass(cochain_space(base, k - 1), tuple(vec))


def _degree_of_space(space: SubquotientSpace, x: CellComplex) -> int:
    for k in range(x.top + 1):
        if cochain_space(x, k) is space:
            return k
    raise ValueError("class space does not belong to this complex")


# ---------------------------------------------------------------------------
# convenience

def betti_numbers(x: CellComplex) -> list[int]:
    return [cohomology(x, k).free_rank for k in range(x.top + 1)]


def universal_coefficients_consistent(x: CellComplex) -> bool:
    """Free ranks of H^k and H_k agree; torsion of H^k equals torsion of H_{k-1}."""
    for k in range(x.top + 1):
        hk = cohomology(x, k)
        if hk.free_rank != homology(x, k).free_rank:
            return False
        lower = homology(x, k - 1) if k else TRIVIAL
        if hk.torsion != lower.torsion:
            return False
    return True
