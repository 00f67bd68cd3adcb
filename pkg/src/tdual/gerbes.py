"""Cech cocycle algebra for 2-gerbes and 3-gerbes on finite covers.

A cover assigns to each index a subcomplex of a fixed cell model; tuple
intersections and their models are derived from the index sets, so the
nerve is downward closed by construction (hand-built nerve flags can also
be validated, and violations are reported with a witness tuple).

Line bundles and continuous-trace data are stored as integer cocycles on
the intersection models, one Bockstein degree up from their circle-valued
sheaf degree: a 2-gerbe carries degree-2 pair cocycles p, degree-1 triple
sections theta, and degree-0 four-fold matching data mu; a 3-gerbe carries
degree-3 pair data A, degree-2 triple trivializations Gamma, degree-1
four-fold sections eta, and degree-0 five-fold data nu. The validity
conditions are the vanishing slots of the total differential
D = delta_nerve + (-1)^q delta_cell of the Cech/cell double complex, which
is exactly the tensor-triviality and coboundary bookkeeping of the
defining data.

The characteristic class (degree 3 for 2-gerbes, degree 4 for 3-gerbes on
the circle product) is computed by the explicit staircase through the
double complex, using the row contraction given by a least-index choice
function; the rows are exact because every cell's index simplex is a full
simplex. Dualization crosses every datum with the circle generator; since
the cross product commutes with both differentials and with the staircase
contraction on the product cover, the dual's class is exactly the cross
product of the input's class.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .complexes import (CellComplex, cone_on_s2, product_with_circle,
                        s3_two_disc, sphere, trivial_disc_bundle)
from .cohomology import (CohClass, cochain_space, connecting_hom,
                         excision_hom, relative_inclusion_hom)
from .intlin import solve


class MalformedNerve(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class InvalidGerbe(ValueError):
    pass


class ModelMismatch(ValueError):
    pass


MAX_TUPLE_LEN = 5


def _parity(t: tuple) -> int:
    inv = sum(1 for a in range(len(t)) for b in range(a + 1, len(t)) if t[a] > t[b])
    return -1 if inv % 2 else 1


@dataclass
class CoverNerve:
    """Nerve of a subcomplex cover, with intersection models.

    ``sets[i]`` is the cell-id set of U_i. Tuples are stored sorted, up to
    length MAX_TUPLE_LEN; nonemptiness and models derive from intersections.
    """

    space: CellComplex
    sets: list

    def __post_init__(self):
        self.sets = [frozenset(s) for s in self.sets]
        covered = set()
        for s in self.sets:
            self.space.check_subcomplex(s)
            covered |= s
        if covered != self.space.all_ids():
            raise MalformedNerve("cover does not exhaust the space",
                                 witness=sorted(map(str, self.space.all_ids() - covered)))
        self._tuples = {}
        for q in range(min(len(self.sets), MAX_TUPLE_LEN)):
            self._tuples[q] = [t for t in _sorted_tuples(len(self.sets), q + 1)
                               if self.intersection_ids(t)]

    @property
    def size(self) -> int:
        return len(self.sets)

    def intersection_ids(self, t: tuple) -> frozenset:
        out = self.sets[t[0]]
        for i in t[1:]:
            out = out & self.sets[i]
        return out

    def tuples(self, q: int) -> list:
        """Nonempty sorted tuples of nerve degree q (length q+1)."""
        return self._tuples.get(q, [])

    def model(self, t: tuple) -> CellComplex:
        ids = self.intersection_ids(t)
        if not ids:
            raise MalformedNerve(f"empty intersection {t}")
        return self.space.subcomplex(ids, name=f"U{t}")

    def least_index(self, cell) -> int:
        for i, s in enumerate(self.sets):
            if cell in s:
                return i
        raise MalformedNerve(f"cell {cell} not covered")

    def crossed(self, xs1: CellComplex) -> "CoverNerve":
        """The induced cover of X x S^1 by the U_i x S^1."""
        circle_ids = ("a", "e")
        sets = [frozenset((c, y) for c in s for y in circle_ids) for s in self.sets]
        return CoverNerve(xs1, sets)


def _sorted_tuples(n: int, length: int):
    from itertools import combinations
    return list(combinations(range(n), length))


def validate_nerve_flags(flags: dict) -> tuple | None:
    """Downward closure check for hand-built nerve data; returns a witness
    tuple on violation (a nonempty tuple with an empty subtuple), else None."""
    from itertools import combinations
    nonempty = {tuple(sorted(t)) for t, flag in flags.items() if flag}
    for t in nonempty:
        for k in range(1, len(t)):
            for sub in combinations(t, k):
                if sub not in nonempty:
                    return t
    return None


# ---------------------------------------------------------------------------
# bigraded cochain bookkeeping

def _restrict(vec, frm: CellComplex, to: CellComplex, d: int) -> list:
    return [vec[frm.index(d, c)] for c in to.cell_ids(d)]


def _access(data: dict, t: tuple):
    """Value of antisymmetric tuple-indexed data on an arbitrary-order tuple.

    Returns (sorted_tuple, sign) or None when the tuple has a repeat.
    """
    if len(set(t)) != len(t):
        return None
    return tuple(sorted(t)), _parity(t)


def nerve_coboundary(cover: CoverNerve, data: dict, q: int, d: int) -> dict:
    """delta_nerve: data on (q+1)-tuples, degree-d cochains -> (q+2)-tuples."""
    out = {}
    for t in cover.tuples(q + 1):
        model_t = cover.model(t)
        n = model_t.n_cells(d)
        vec = [0] * n
        for a in range(len(t)):
            sub = t[:a] + t[a + 1:]
            comp = data.get(sub)
            if comp is None:
                continue
            restricted = _restrict(comp, cover.model(sub), model_t, d)
            sign = (-1) ** a
            vec = [v + sign * r for v, r in zip(vec, restricted)]
        out[t] = vec
    return out


def cell_coboundary(cover: CoverNerve, data: dict, d: int) -> dict:
    return {t: cover.model(t).bmat(d + 1).transpose().mul_vec(vec)
            for t, vec in data.items()}


def _zero_data(cover: CoverNerve, q: int, d: int) -> dict:
    return {t: [0] * cover.model(t).n_cells(d) for t in cover.tuples(q)}


def _data_sub(a: dict, b: dict) -> dict:
    out = {}
    for t, vec in a.items():
        other = b.get(t)
        out[t] = list(vec) if other is None else [x - y for x, y in zip(vec, other)]
    for t, vec in b.items():
        if t not in a:
            out[t] = [-y for y in vec]
    return out


def _data_add(a: dict, b: dict) -> dict:
    return _data_sub(a, {t: [-y for y in vec] for t, vec in b.items()})


def _data_scale(a: dict, k: int) -> dict:
    return {t: [k * x for x in vec] for t, vec in a.items()}


def _contract(cover: CoverNerve, data: dict, q: int, d: int) -> dict:
    """Row contraction h with the least-index choice function:
    (h x)_S(cell) = x_{(c(cell),) + S}(cell). Requires delta_nerve(data) = 0."""
    out = {}
    for s in cover.tuples(q - 1):
        model_s = cover.model(s)
        vec = []
        for cell in model_s.cell_ids(d):
            c = cover.least_index(cell)
            acc = _access(data, (c,) + s)
            if acc is None:
                vec.append(0)
                continue
            key, sign = acc
            comp = data.get(key)
            if comp is None:
                vec.append(0)
                continue
            vec.append(sign * comp[cover.model(key).index(d, cell)])
        out[s] = vec
    return out


def _glue(cover: CoverNerve, data: dict, d: int) -> list:
    """Invert the augmentation: a delta_nerve-closed family over single
    indices glues to a global cochain."""
    x = cover.space
    out = []
    for cell in x.cell_ids(d):
        i = cover.least_index(cell)
        vec = data.get((i,))
        out.append(vec[cover.model((i,)).index(d, cell)] if vec is not None else 0)
    return out


def total_class(cover: CoverNerve, components: dict, total_degree: int) -> CohClass:
    """Characteristic class of a total cocycle with components
    ``components[q]`` = tuple-indexed degree (total_degree - q) data, q >= 1.

    Runs the staircase down the double complex and returns the glued class
    in H^total_degree of the covered space.
    """
    comps = {q: dict(data) for q, data in components.items()}
    for q in range(total_degree, 0, -1):
        data = comps.get(q)
        if data is None or all(all(v == 0 for v in vec) for vec in data.values()):
            continue
        d = total_degree - q
        w = _contract(cover, data, q, d)
        # subtract D(w): kills level q, shifts the residue to (q-1, d+1)
        comps[q] = _data_sub(data, nerve_coboundary(cover, w, q - 1, d))
        if any(any(v for v in vec) for vec in comps[q].values()):
            raise InvalidGerbe(f"contraction failed at nerve degree {q}; "
                               "data was not a total cocycle")
        sign = (-1) ** (q - 1)
        shift = _data_scale(cell_coboundary(cover, w, d), sign)
        comps[q - 1] = _data_sub(comps.get(q - 1, _zero_data(cover, q - 1, d + 1)), shift)
    glued = _glue(cover, comps.get(0, _zero_data(cover, 0, total_degree)), total_degree)
    space = cochain_space(cover.space, total_degree)
    # sign convention: the two-patch wrap of a class pushed through the
    # connecting map of the pair reproduces that class on the nose
    return CohClass(space, tuple(glued))


# ---------------------------------------------------------------------------
# gerbe data

@dataclass
class GerbeCondition:
    name: str
    where: tuple
    ok: bool
    witness: object = None


@dataclass
class GerbeReport:
    conditions: list
    characteristic_class: CohClass | None = None

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.conditions)

    def failures(self) -> list:
        return [c for c in self.conditions if not c.ok]

    def to_json(self) -> dict:
        out = {"passed": self.passed,
               "conditions": [{"name": c.name, "tuple": list(c.where), "ok": c.ok,
                               "witness": None if c.witness is None else str(c.witness)}
                              for c in self.conditions]}
        if self.characteristic_class is not None:
            out["class"] = list(self.characteristic_class.reduced())
        return out


@dataclass
class TwoGerbe:
    """Locally trivialized 2-gerbe: pair cocycles p (degree 2), triple
    sections theta (degree 1), 4-fold matching data mu (degree 0).

    Data is stored once per sorted tuple; odd reorderings flip the sign.
    """

    cover: CoverNerve
    p: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)
    mu: dict = field(default_factory=dict)

    def __post_init__(self):
        self.p = _canonicalize(self.cover, self.p, 1, 2)
        self.theta = _canonicalize(self.cover, self.theta, 2, 1)
        self.mu = _canonicalize(self.cover, self.mu, 3, 0)

    def pair_class(self, i: int, j: int) -> CohClass:
        """The line-bundle class [p_ij] on the pair model, sign-adjusted."""
        acc = _access(self.p, (i, j))
        if acc is None:
            raise ValueError("indices must be distinct")
        key, sign = acc
        model = self.cover.model(key)
        vec = self.p.get(key, [0] * model.n_cells(2))
        return CohClass(cochain_space(model, 2), tuple(sign * v for v in vec))

    def tensor(self, other: "TwoGerbe") -> "TwoGerbe":
        if self.cover is not other.cover and \
                (self.cover.space is not other.cover.space
                 or self.cover.sets != other.cover.sets):
            raise ModelMismatch("tensor requires a common cover")
        return TwoGerbe(self.cover, _data_add(self.p, other.p),
                        _data_add(self.theta, other.theta),
                        _data_add(self.mu, other.mu))


def _canonicalize(cover: CoverNerve, data: dict, q: int, d: int) -> dict:
    """Fold arbitrary-order keys into sorted storage with sign bookkeeping;
    reject inconsistent duplicates and wrong-length vectors."""
    out = {t: [0] * cover.model(t).n_cells(d) for t in cover.tuples(q)}
    seen = {}
    for key, vec in data.items():
        key = tuple(key)
        if len(set(key)) != len(key):
            raise MalformedNerve(f"tuple {key} has repeated indices")
        skey = tuple(sorted(key))
        sign = _parity(tuple(key))
        if skey not in out:
            raise MalformedNerve(f"tuple {key} is not a nonempty nerve tuple",
                                 witness=key)
        stored = [sign * v for v in vec]
        if len(stored) != len(out[skey]):
            raise MalformedNerve(f"cochain on {key} has wrong length", witness=key)
        if skey in seen and seen[skey] != stored:
            raise MalformedNerve(f"inconsistent reorderings supplied for {skey}",
                                 witness=skey)
        seen[skey] = stored
        out[skey] = stored
    return out


@dataclass
class ThreeGerbe:
    """Locally trivialized 3-gerbe on a circle product: pair data A (degree
    3), triple trivializations gamma (degree 2), 4-fold sections eta (degree
    1), 5-fold data nu (degree 0)."""

    cover: CoverNerve
    a: dict = field(default_factory=dict)
    gamma: dict = field(default_factory=dict)
    eta: dict = field(default_factory=dict)
    nu: dict = field(default_factory=dict)

    def __post_init__(self):
        self.a = _canonicalize(self.cover, self.a, 1, 3)
        self.gamma = _canonicalize(self.cover, self.gamma, 2, 2)
        self.eta = _canonicalize(self.cover, self.eta, 3, 1)
        self.nu = _canonicalize(self.cover, self.nu, 4, 0)

    def pair_class(self, i: int, j: int) -> CohClass:
        acc = _access(self.a, (i, j))
        if acc is None:
            raise ValueError("indices must be distinct")
        key, sign = acc
        model = self.cover.model(key)
        vec = self.a.get(key, [0] * model.n_cells(3))
        return CohClass(cochain_space(model, 3), tuple(sign * v for v in vec))


# ---------------------------------------------------------------------------
# validity checks

def _check_layers(cover: CoverNerve, layers, report: list):
    """Verify the vanishing slots of the total differential.

    ``layers`` = [(name, data, q, d), ...] ordered by nerve degree; the slot
    between consecutive layers is delta_n(lower) + (-1)^q delta_c(upper).
    """
    # cell-cocycle condition on the lowest layer
    name0, data0, q0, d0 = layers[0]
    for t, vec in cell_coboundary(cover, data0, d0).items():
        bad = _first_nonzero(vec)
        report.append(GerbeCondition(f"{name0}_cocycle", t, bad is None,
                                     None if bad is None else cover.model(t).cell_ids(d0 + 1)[bad]))
    for (lname, ldata, lq, ld), (uname, udata, uq, ud) in zip(layers, layers[1:]):
        dn = nerve_coboundary(cover, ldata, lq, ld)
        dc = cell_coboundary(cover, udata, ud)
        sign = (-1) ** uq
        for t in cover.tuples(uq):
            lhs = dn.get(t, [])
            rhs = dc.get(t, [])
            mism = _first_mismatch(lhs, [sign * -v for v in rhs])
            # condition: delta_n(lower) + sign*delta_c(upper) == 0
            report.append(GerbeCondition(f"{lname}_{uname}_matching", t, mism is None,
                                         None if mism is None else cover.model(t).cell_ids(ud)[mism]))
    # top coherence: delta_n of the last layer vanishes
    tname, tdata, tq, td = layers[-1]
    top = nerve_coboundary(cover, tdata, tq, td)
    for t, vec in top.items():
        bad = _first_nonzero(vec)
        report.append(GerbeCondition(f"{tname}_nerve_cocycle", t, bad is None,
                                     None if bad is None else cover.model(t).cell_ids(td)[bad]))


def _first_nonzero(vec):
    for i, v in enumerate(vec):
        if v:
            return i
    return None


def _first_mismatch(a, b):
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return None


def check_two_gerbe(g: TwoGerbe) -> GerbeReport:
    """Pair antisymmetry is structural (canonical sorted storage); the
    report verifies the cocycle, triple-trivialization (delta_n p = -delta_c
    theta up to the total-complex sign), section-coboundary, and top nerve
    coherence conditions, then computes the characteristic class in H^3."""
    conditions: list = []
    _check_layers(g.cover, [("p", g.p, 1, 2), ("theta", g.theta, 2, 1),
                            ("mu", g.mu, 3, 0)], conditions)
    report = GerbeReport(conditions)
    if report.passed:
        report.characteristic_class = characteristic_class_two_gerbe(g, checked=True)
    return report


def characteristic_class_two_gerbe(g: TwoGerbe, checked: bool = False) -> CohClass:
    if not checked:
        rep = check_two_gerbe(g)
        if not rep.passed:
            raise InvalidGerbe(f"gerbe fails validity: {rep.failures()[0].name} "
                               f"at {rep.failures()[0].where}")
        return rep.characteristic_class
    return total_class(g.cover, {1: g.p, 2: g.theta, 3: g.mu}, 3)


def check_three_gerbe(g: ThreeGerbe) -> GerbeReport:
    conditions: list = []
    _check_layers(g.cover, [("A", g.a, 1, 3), ("gamma", g.gamma, 2, 2),
                            ("eta", g.eta, 3, 1), ("nu", g.nu, 4, 0)], conditions)
    # six-fold coherence of nu, computed from the cover membership directly
    for t in _six_fold_tuples(g.cover):
        vec = _six_fold_nerve_delta(g.cover, g.nu, t)
        bad = _first_nonzero(vec)
        conditions.append(GerbeCondition("nu_sixfold", t, bad is None, bad))
    report = GerbeReport(conditions)
    if report.passed:
        report.characteristic_class = total_class(
            g.cover, {1: g.a, 2: g.gamma, 3: g.eta, 4: g.nu}, 4)
    return report


def characteristic_class_three_gerbe(g: ThreeGerbe) -> CohClass:
    rep = check_three_gerbe(g)
    if not rep.passed:
        raise InvalidGerbe(f"3-gerbe fails validity: {rep.failures()[0].name} "
                           f"at {rep.failures()[0].where}")
    return rep.characteristic_class


def _six_fold_tuples(cover: CoverNerve):
    from itertools import combinations
    if cover.size < 6:
        return []
    out = []
    for t in combinations(range(cover.size), 6):
        if cover.intersection_ids(t):
            out.append(t)
    return out


def _six_fold_nerve_delta(cover: CoverNerve, data: dict, t: tuple) -> list:
    ids = cover.intersection_ids(t)
    cells = [c for c in cover.space.cell_ids(0) if c in ids]
    out = []
    for cell in cells:
        val = 0
        for a in range(len(t)):
            sub = t[:a] + t[a + 1:]
            comp = data.get(sub)
            if comp is None:
                continue
            val += ((-1) ** a) * comp[cover.model(sub).index(0, cell)]
        out.append(val)
    return out


# ---------------------------------------------------------------------------
# dualization (the constructive map of the main theorem)

def _cross_data(cover: CoverNerve, dual_cover: CoverNerve, data: dict, d: int) -> dict:
    out = {}
    for t, vec in data.items():
        base = cover.model(t)
        prod = dual_cover.model(t)
        n = prod.n_cells(d + 1)
        new = [0] * n
        for j, cell in enumerate(base.cell_ids(d)):
            new[prod.index(d + 1, (cell, "e"))] = vec[j]
        out[t] = new
    return out


def tdualize_two_gerbe(g: TwoGerbe, xs1: CellComplex | None = None) -> ThreeGerbe:
    """Cross every datum with the circle generator: pairs p x z become the
    degree-3 pair data, triple sections theta x z the trivializing line
    bundles, 4-fold data mu x z the sections eta; nu = 0. The output passes
    the 3-gerbe checks and its class is (class of g) x z."""
    rep = check_two_gerbe(g)
    if not rep.passed:
        f = rep.failures()[0]
        raise InvalidGerbe(f"cannot dualize: {f.name} fails at {f.where}")
    xs1 = xs1 or product_with_circle(g.cover.space)
    dual_cover = g.cover.crossed(xs1)
    return ThreeGerbe(dual_cover,
                      a=_cross_data(g.cover, dual_cover, g.p, 2),
                      gamma=_cross_data(g.cover, dual_cover, g.theta, 1),
                      eta=_cross_data(g.cover, dual_cover, g.mu, 0),
                      nu={})


# ---------------------------------------------------------------------------
# construction helpers

def two_gerbe_from_class(cover: CoverNerve, cocycle, scramble_seed: int | None = None,
                         magnitude: int = 3) -> TwoGerbe:
    """Realize a degree-3 cocycle on the covered space as a 2-gerbe.

    Requires each patch to kill the restricted class (solvable t_i with
    delta t_i = s|U_i); pair data is the patch discrepancy t_j - t_i. A
    seeded gauge scramble then produces generic-looking theta and mu data
    without changing the class.
    """
    x = cover.space
    cocycle = list(cocycle)
    ts = []
    for i in range(cover.size):
        ui = cover.model((i,))
        delta = ui.bmat(3).transpose()
        rhs = _restrict(cocycle, x, ui, 3)
        t = solve(delta, rhs)
        if t is None:
            raise ModelMismatch(f"patch {i} does not trivialize the class "
                                "(H^3 of the patch obstructs)")
        ts.append(t)
    p = {}
    for (i, j) in cover.tuples(1):
        uij = cover.model((i, j))
        ti = _restrict(ts[i], cover.model((i,)), uij, 2)
        tj = _restrict(ts[j], cover.model((j,)), uij, 2)
        p[(i, j)] = [a - b for a, b in zip(ti, tj)]
    g = TwoGerbe(cover, p=p)
    if scramble_seed is not None:
        g = gauge_perturb(g, scramble_seed, magnitude)
    return g


def gauge_perturb(g: TwoGerbe, seed: int, magnitude: int = 3,
                  pair: tuple | None = None, triple: tuple | None = None) -> TwoGerbe:
    """Gauge transformation by a random total-complex coboundary.

    ``pair``/``triple`` restrict the support to a single datum's gauge
    freedom: perturbing a pair cocycle by a cell coboundary drags the
    induced rephasing through the sections, exactly as changing a line
    bundle representative does.
    """
    rng = random.Random(seed)
    cover = g.cover
    localized = pair is not None or triple is not None
    a = {}
    if not localized or pair is not None:
        for t in cover.tuples(1):
            if pair is not None and tuple(sorted(pair)) != t:
                continue
            model = cover.model(t)
            a[t] = [rng.randint(-magnitude, magnitude) for _ in range(model.n_cells(1))]
    b = {}
    if not localized or triple is not None:
        for t in cover.tuples(2):
            if triple is not None and tuple(sorted(triple)) != t:
                continue
            model = cover.model(t)
            b[t] = [rng.randint(-magnitude, magnitude) for _ in range(model.n_cells(0))]
    new_p = _data_sub(g.p, cell_coboundary(cover, a, 1))
    new_theta = _data_add(g.theta, _data_add(nerve_coboundary(cover, a, 1, 1),
                                             cell_coboundary(cover, b, 0)))
    new_mu = _data_add(g.mu, nerve_coboundary(cover, b, 2, 0))
    return TwoGerbe(cover, new_p, new_theta, new_mu)


def trivial_two_gerbe(cover: CoverNerve) -> TwoGerbe:
    return TwoGerbe(cover)


def monopole_two_gerbe(n: int):
    """The standard two-patch gerbe on the two-disc 3-sphere with clutching
    class n on the equatorial 2-sphere; its class is n times the generator."""
    bplus = s3_two_disc()
    inner = frozenset({"v", "u", "a", "f2", "c3"})
    outer = frozenset({"u", "f2", "c3out"})
    cover = CoverNerve(bplus, [inner, outer])
    u12 = cover.model((0, 1))
    vec = [0] * u12.n_cells(2)
    vec[u12.index(2, "f2")] = n
    return TwoGerbe(cover, p={(0, 1): vec})


# ---------------------------------------------------------------------------
# from semi-free data to gerbes

@dataclass
class GerbeModels:
    """Compact models tying a semi-free classification datum to a gerbe.

    ``b`` models the base B with the fixed locus and a compact complement
    model; ``bplus`` is the compactification, covered by the neighborhood
    patch and the complement patch.
    """

    b: CellComplex
    f_ids: frozenset
    complement_ids: frozenset
    bplus: CellComplex
    bplus_minus_f_ids: frozenset
    patch_neighborhood: frozenset
    patch_complement: frozenset

    def complement_model(self) -> CellComplex:
        return self.b.subcomplex(self.complement_ids)

    def cover(self) -> CoverNerve:
        return CoverNerve(self.bplus, [self.patch_neighborhood, self.patch_complement])


def kk_gerbe_models() -> GerbeModels:
    """The single-monopole family: B = cone on S^2 (= R^3), F its vertex,
    compactification the two-disc 3-sphere."""
    return GerbeModels(
        b=cone_on_s2(),
        f_ids=frozenset({"v"}),
        complement_ids=frozenset({"u", "f2"}),
        bplus=s3_two_disc(),
        bplus_minus_f_ids=frozenset({"u", "f2", "c3out"}),
        patch_neighborhood=frozenset({"v", "u", "a", "f2", "c3"}),
        patch_complement=frozenset({"u", "f2", "c3out"}),
    )


def trivial_bundle_gerbe_models(rank: int) -> GerbeModels:
    """F = S^2 with trivial rank-k normal bundle: B = S^2 x D^k, complement
    model its boundary sphere bundle. B is closed, so it is its own
    compactification. Codimension k > 3 kills the pushed class."""
    base = sphere(2)
    total, sphere_ids, f_ids = trivial_disc_bundle(base, rank)
    return GerbeModels(
        b=total,
        f_ids=f_ids,
        complement_ids=sphere_ids,
        bplus=total,
        bplus_minus_f_ids=sphere_ids,
        patch_neighborhood=frozenset(total.all_ids()),
        patch_complement=sphere_ids,
    )


def semifree_class_to_two_gerbe(lam: CohClass, models: GerbeModels):
    """Push lambda in H^2(B-F) through the connecting map, excision, and the
    inclusion-induced map to H^3(B+), and wrap it as a two-patch gerbe.

    Returns (gerbe, pushed class in H^3(B+)); the gerbe's characteristic
    class equals the pushed class.
    """
    comp_model = models.complement_model()
    lam_space = cochain_space(comp_model, 2)
    if lam.space is not lam_space:
        raise ModelMismatch("lambda must live on the complement model's H^2")
    rel_cls = connecting_hom(models.b, models.complement_ids, 2).apply(lam)
    exc = excision_hom(models.bplus, models.bplus_minus_f_ids,
                       models.b, models.complement_ids, 3)
    rel_plus = exc.preimage(rel_cls)
    if rel_plus is None:
        raise ModelMismatch("excision preimage failed; models are inconsistent")
    pushed = relative_inclusion_hom(models.bplus, models.bplus_minus_f_ids, 3).apply(rel_plus)

    cover = models.cover()
    u12 = cover.model((0, 1))
    vec = [0] * u12.n_cells(2)
    for j, cell in enumerate(comp_model.cell_ids(2)):
        vec[u12.index(2, cell)] = lam.vector[j]
    gerbe = TwoGerbe(cover, p={(0, 1): vec})
    return gerbe, pushed
