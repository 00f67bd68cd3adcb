"""Exact symbolic expression trees over named coordinates and opaque functions.

Nodes are immutable and hashable. Rational constants are stored exactly as
``fractions.Fraction``. Opaque function applications carry a name, an argument
tuple and a derivative multi-index, so a function and its partial derivatives
coexist in one tree without committing to a formula. Numeric evaluation
resolves opaque applications through closures registered per (name, arity)
in a :class:`FunctionTable`.

Equality of expressions is decided by seeded randomized sampling
(:func:`equal_numeric`), not by canonical-form rewriting. ``simplify_basic``
only performs constant folding, 0/1 rules, flattening of nested sums and
products, and collection of identical rational powers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping


class UnboundSymbol(KeyError):
    """A free coordinate or function symbol has no assigned value/closure."""


class DomainError(ArithmeticError):
    """Evaluation hit a pole, zero division, or an invalid power."""


def _as_expr(x) -> "Expr":
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Rat(Fraction(x))
    raise TypeError(f"cannot coerce {x!r} to Expr")


@dataclass(frozen=True)
class Expr:
    """Base node. Subclasses define the tree shape; operators build new trees."""

    def __add__(self, other):
        return add(self, _as_expr(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(Rat(Fraction(-1)), _as_expr(other)))

    def __rsub__(self, other):
        return add(_as_expr(other), mul(Rat(Fraction(-1)), self))

    def __mul__(self, other):
        return mul(self, _as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return mul(self, pow_(_as_expr(other), Fraction(-1)))

    def __rtruediv__(self, other):
        return mul(_as_expr(other), pow_(self, Fraction(-1)))

    def __neg__(self):
        return mul(Rat(Fraction(-1)), self)

    def __pow__(self, exponent):
        return pow_(self, Fraction(exponent))


@dataclass(frozen=True)
class Rat(Expr):
    value: Fraction

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Sym(Expr):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App(Expr):
    """Opaque function application ``name(args)`` with derivative multi-index.

    ``deriv[i]`` counts partial derivatives taken in the i-th argument slot.
    """

    name: str
    args: tuple
    deriv: tuple

    def __str__(self):
        primes = "" if not any(self.deriv) else "^(" + ",".join(map(str, self.deriv)) + ")"
        return f"{self.name}{primes}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple

    def __str__(self):
        return "(" + " + ".join(map(str, self.terms)) + ")"


@dataclass(frozen=True)
class Prod(Expr):
    factors: tuple

    def __str__(self):
        return "(" + "*".join(map(str, self.factors)) + ")"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def __str__(self):
        return f"{self.base}^({self.exponent})"


@dataclass(frozen=True)
class SinE(Expr):
    arg: Expr

    def __str__(self):
        return f"sin({self.arg})"


@dataclass(frozen=True)
class CosE(Expr):
    arg: Expr

    def __str__(self):
        return f"cos({self.arg})"


ZERO = Rat(Fraction(0))
ONE = Rat(Fraction(1))


def rat(n, d=1) -> Rat:
    return Rat(Fraction(n, d))


def sym(name: str) -> Sym:
    return Sym(name)


def app(name: str, args: Iterable[Expr], deriv: Iterable[int] | None = None) -> App:
    args = tuple(_as_expr(a) for a in args)
    dv = tuple(deriv) if deriv is not None else (0,) * len(args)
    if len(dv) != len(args):
        raise ValueError("derivative multi-index length must match argument count")
    return App(name, args, dv)


def add(*terms) -> Expr:
    return simplify_basic(Sum(tuple(_as_expr(t) for t in terms)))


def mul(*factors) -> Expr:
    return simplify_basic(Prod(tuple(_as_expr(f) for f in factors)))


def pow_(base, exponent) -> Expr:
    return simplify_basic(Pow(_as_expr(base), Fraction(exponent)))


def sin_(x) -> Expr:
    return simplify_basic(SinE(_as_expr(x)))


def cos_(x) -> Expr:
    return simplify_basic(CosE(_as_expr(x)))


# ---------------------------------------------------------------------------
# simplification

def simplify_basic(e: Expr) -> Expr:
    """Constant folding, 0/1 rules, flattening, collection of identical
    rational powers. Idempotent; never expands or rewrites beyond this list."""
    if isinstance(e, (Rat, Sym)):
        return e
    if isinstance(e, App):
        return App(e.name, tuple(simplify_basic(a) for a in e.args), e.deriv)
    if isinstance(e, SinE):
        a = simplify_basic(e.arg)
        if isinstance(a, Rat) and a.value == 0:
            return ZERO
        return SinE(a)
    if isinstance(e, CosE):
        a = simplify_basic(e.arg)
        if isinstance(a, Rat) and a.value == 0:
            return ONE
        return CosE(a)
    if isinstance(e, Pow):
        return _simplify_pow(simplify_basic(e.base), e.exponent)
    if isinstance(e, Sum):
        return _simplify_sum(e)
    if isinstance(e, Prod):
        return _simplify_prod(e)
    raise TypeError(f"unknown node {type(e).__name__}")


def _simplify_pow(base: Expr, exponent: Fraction) -> Expr:
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Rat) and exponent.denominator == 1:
        if base.value == 0 and exponent < 0:
            raise DomainError("0 raised to a negative power")
        return Rat(base.value ** exponent.numerator)
    if isinstance(base, Pow):
        return _simplify_pow(base.base, base.exponent * exponent)
    return Pow(base, exponent)


def _simplify_sum(e: Sum) -> Expr:
    terms = []
    const = Fraction(0)
    for t in e.terms:
        t = simplify_basic(t)
        if isinstance(t, Sum):
            sub = t.terms
        else:
            sub = (t,)
        for s in sub:
            if isinstance(s, Rat):
                const += s.value
            else:
                terms.append(s)
    if const != 0:
        terms.append(Rat(const))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def _simplify_prod(e: Prod) -> Expr:
    factors = []
    const = Fraction(1)
    for f in e.factors:
        f = simplify_basic(f)
        if isinstance(f, Prod):
            sub = f.factors
        else:
            sub = (f,)
        for s in sub:
            if isinstance(s, Rat):
                const *= s.value
            else:
                factors.append(s)
    if const == 0:
        return ZERO
    # collect identical bases: x^a * x^b -> x^(a+b)
    bases: list[Expr] = []
    exps: list[Fraction] = []
    for f in factors:
        base, exp = (f.base, f.exponent) if isinstance(f, Pow) else (f, Fraction(1))
        for i, b in enumerate(bases):
            if b == base:
                exps[i] += exp
                break
        else:
            bases.append(base)
            exps.append(exp)
    out = []
    for b, x in zip(bases, exps):
        if x == 0:
            continue
        out.append(b if x == 1 else Pow(b, x))
    if const != 1:
        out.insert(0, Rat(const))
    if not out:
        return ONE
    if len(out) == 1:
        return out[0]
    return Prod(tuple(out))


# ---------------------------------------------------------------------------
# differentiation

def differentiate(e: Expr, x: str) -> Expr:
    """Symbolic partial derivative with respect to coordinate ``x``.

    Opaque applications differentiate by the chain rule, bumping the
    derivative multi-index in each argument slot.
    """
    return simplify_basic(_diff(e, x))


def _diff(e: Expr, x: str) -> Expr:
    if isinstance(e, Rat):
        return ZERO
    if isinstance(e, Sym):
        return ONE if e.name == x else ZERO
    if isinstance(e, Sum):
        return Sum(tuple(_diff(t, x) for t in e.terms))
    if isinstance(e, Prod):
        terms = []
        fs = e.factors
        for i in range(len(fs)):
            terms.append(Prod(fs[:i] + (_diff(fs[i], x),) + fs[i + 1:]))
        return Sum(tuple(terms))
    if isinstance(e, Pow):
        return Prod((Rat(e.exponent), Pow(e.base, e.exponent - 1), _diff(e.base, x)))
    if isinstance(e, SinE):
        return Prod((CosE(e.arg), _diff(e.arg, x)))
    if isinstance(e, CosE):
        return Prod((Rat(Fraction(-1)), SinE(e.arg), _diff(e.arg, x)))
    if isinstance(e, App):
        terms = []
        for i, a in enumerate(e.args):
            da = _diff(a, x)
            if isinstance(da, Rat) and da.value == 0:
                continue
            bumped = tuple(d + (1 if j == i else 0) for j, d in enumerate(e.deriv))
            terms.append(Prod((App(e.name, e.args, bumped), da)))
        if not terms:
            return ZERO
        return Sum(tuple(terms))
    raise TypeError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# substitution

def substitute(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    """Simultaneous substitution of coordinate symbols, then basic simplification."""
    return simplify_basic(_subst(e, {k: _as_expr(v) for k, v in bindings.items()}))


def _subst(e: Expr, b: Mapping[str, Expr]) -> Expr:
    if isinstance(e, Rat):
        return e
    if isinstance(e, Sym):
        return b.get(e.name, e)
    if isinstance(e, Sum):
        return Sum(tuple(_subst(t, b) for t in e.terms))
    if isinstance(e, Prod):
        return Prod(tuple(_subst(f, b) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(_subst(e.base, b), e.exponent)
    if isinstance(e, SinE):
        return SinE(_subst(e.arg, b))
    if isinstance(e, CosE):
        return CosE(_subst(e.arg, b))
    if isinstance(e, App):
        return App(e.name, tuple(_subst(a, b) for a in e.args), e.deriv)
    raise TypeError(f"unknown node {type(e).__name__}")


def free_symbols(e: Expr) -> set[str]:
    if isinstance(e, Rat):
        return set()
    if isinstance(e, Sym):
        return {e.name}
    if isinstance(e, App):
        out = set()
        for a in e.args:
            out |= free_symbols(a)
        return out
    if isinstance(e, Sum):
        out = set()
        for t in e.terms:
            out |= free_symbols(t)
        return out
    if isinstance(e, Prod):
        out = set()
        for f in e.factors:
            out |= free_symbols(f)
        return out
    if isinstance(e, Pow):
        return free_symbols(e.base)
    if isinstance(e, (SinE, CosE)):
        return free_symbols(e.arg)
    raise TypeError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# evaluation

class OpaqueFunction:
    """Numeric closures for an opaque symbol, one per derivative multi-index."""

    def __init__(self, name: str, arity: int,
                 closures: Mapping[tuple, Callable] | None = None,
                 closure_factory: Callable[[tuple], Callable | None] | None = None):
        self.name = name
        self.arity = arity
        self._closures = dict(closures or {})
        self._factory = closure_factory

    def closure(self, deriv: tuple) -> Callable:
        if deriv in self._closures:
            return self._closures[deriv]
        if self._factory is not None:
            fn = self._factory(deriv)
            if fn is not None:
                self._closures[deriv] = fn
                return fn
        raise UnboundSymbol(f"no closure for {self.name}{deriv} (arity {self.arity})")


class FunctionTable:
    """Registry of opaque functions keyed by (name, arity)."""

    def __init__(self, functions: Iterable[OpaqueFunction] = ()):
        self._by_key: dict[tuple[str, int], OpaqueFunction] = {}
        for f in functions:
            self.register(f)

    def register(self, f: OpaqueFunction) -> "FunctionTable":
        self._by_key[(f.name, f.arity)] = f
        return self

    def merged(self, other: "FunctionTable") -> "FunctionTable":
        t = FunctionTable()
        t._by_key.update(self._by_key)
        t._by_key.update(other._by_key)
        return t

    def lookup(self, name: str, arity: int) -> OpaqueFunction:
        try:
            return self._by_key[(name, arity)]
        except KeyError:
            raise UnboundSymbol(f"no registered function {name}/{arity}") from None


@dataclass
class PointAssignment:
    """Concrete values for coordinates plus a function table for opaque symbols."""

    values: dict = field(default_factory=dict)
    functions: FunctionTable = field(default_factory=FunctionTable)

    def with_values(self, **extra) -> "PointAssignment":
        v = dict(self.values)
        v.update(extra)
        return PointAssignment(v, self.functions)


_ABS_POLE = 1e-13


def evaluate(e: Expr, p: PointAssignment) -> float:
    """IEEE evaluation of ``e`` at ``p``. Raises UnboundSymbol / DomainError."""
    if isinstance(e, Rat):
        return float(e.value)
    if isinstance(e, Sym):
        try:
            return float(p.values[e.name])
        except KeyError:
            raise UnboundSymbol(f"symbol {e.name!r} not assigned") from None
    if isinstance(e, Sum):
        return sum(evaluate(t, p) for t in e.terms)
    if isinstance(e, Prod):
        out = 1.0
        for f in e.factors:
            out *= evaluate(f, p)
        return out
    if isinstance(e, Pow):
        base = evaluate(e.base, p)
        q = e.exponent
        if abs(base) < _ABS_POLE and q < 0:
            raise DomainError(f"pole: {e.base}^{q} at base {base}")
        if base < 0 and q.denominator != 1:
            raise DomainError(f"negative base {base} under fractional power {q}")
        try:
            return math.pow(base, float(q))
        except (OverflowError, ValueError) as exc:
            raise DomainError(str(exc)) from None
    if isinstance(e, SinE):
        return math.sin(evaluate(e.arg, p))
    if isinstance(e, CosE):
        return math.cos(evaluate(e.arg, p))
    if isinstance(e, App):
        fn = p.functions.lookup(e.name, len(e.args)).closure(e.deriv)
        args = [evaluate(a, p) for a in e.args]
        try:
            out = fn(*args)
        except ZeroDivisionError:
            raise DomainError(f"pole in {e.name} at {args}") from None
        if math.isnan(out) or math.isinf(out):
            raise DomainError(f"non-finite value from {e.name} at {args}")
        return out
    raise TypeError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# charts and sampling

@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names; index 0 is the dualized (fiber) direction.

    The fiber coordinate must be periodic.
    """

    names: tuple
    periodic: tuple

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("coordinate names must be unique")
        if len(self.periodic) != len(self.names):
            raise ValueError("periodicity flags must match coordinates")
        if not self.periodic[0]:
            raise ValueError("the dualized (index 0) coordinate must be periodic")

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @staticmethod
    def with_fiber(names: Iterable[str], periodic: Mapping[str, bool], fiber: str) -> "Chart":
        """Reorder so the fiber coordinate sits at index 0."""
        names = list(names)
        names.remove(fiber)
        names.insert(0, fiber)
        return Chart(tuple(names), tuple(bool(periodic[n]) for n in names))


@dataclass
class SampleSpec:
    """Sampling boxes per symbol, avoiding declared singular loci by margin.

    Boxes are closed intervals. The margin is baked into the boxes by the
    caller; this class only draws uniform samples and builds assignments.
    """

    boxes: dict
    functions: FunctionTable = field(default_factory=FunctionTable)

    def merged(self, other: "SampleSpec") -> "SampleSpec":
        boxes = dict(self.boxes)
        boxes.update(other.boxes)
        return SampleSpec(boxes, self.functions.merged(other.functions))

    def draw(self, rng: random.Random) -> PointAssignment:
        vals = {name: rng.uniform(lo, hi) for name, (lo, hi) in self.boxes.items()}
        return PointAssignment(vals, self.functions)


@dataclass
class Witness:
    """Failure evidence from randomized equality testing."""

    point: dict
    lhs: float
    rhs: float

    def to_json(self) -> dict:
        return {"point": {k: self.point[k] for k in sorted(self.point)},
                "lhs": self.lhs, "rhs": self.rhs,
                "abs_diff": abs(self.lhs - self.rhs)}


class EqualityReport:
    def __init__(self, equal: bool, trials: int, witness: Witness | None,
                 domain_errors: int):
        self.equal = equal
        self.trials = trials
        self.witness = witness
        self.domain_errors = domain_errors

    def __bool__(self):
        return self.equal


DEFAULT_TRIALS = 100
DEFAULT_TOL = 1e-9
DEFAULT_SEED = 42
_RETRY_BOUND = 5


def equal_numeric(a: Expr, b: Expr, spec: SampleSpec,
                  trials: int = DEFAULT_TRIALS, tol: float = DEFAULT_TOL,
                  seed: int = DEFAULT_SEED) -> EqualityReport:
    """Seeded randomized equality: true iff at every sampled point
    ``|a-b| <= tol * max(1, |a|, |b|)``.

    Domain errors are counted and the point resampled, up to a retry bound
    per trial; exhausting retries raises DomainError.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    domain_errors = 0
    for _ in range(trials):
        for attempt in range(_RETRY_BOUND + 1):
            p = spec.draw(rng)
            try:
                va = evaluate(a, p)
                vb = evaluate(b, p)
            except DomainError:
                domain_errors += 1
                if attempt == _RETRY_BOUND:
                    raise
                continue
            break
        if abs(va - vb) > tol * max(1.0, abs(va), abs(vb)):
            return EqualityReport(False, trials, Witness(p.values, va, vb), domain_errors)
    return EqualityReport(True, trials, None, domain_errors)


# ---------------------------------------------------------------------------
# canonical JSON serialization

def expr_to_json(e: Expr):
    if isinstance(e, Rat):
        return {"k": "rat", "v": [e.value.numerator, e.value.denominator]}
    if isinstance(e, Sym):
        return {"k": "sym", "name": e.name}
    if isinstance(e, App):
        return {"k": "app", "name": e.name, "deriv": list(e.deriv),
                "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, Sum):
        return {"k": "sum", "terms": [expr_to_json(t) for t in e.terms]}
    if isinstance(e, Prod):
        return {"k": "prod", "factors": [expr_to_json(f) for f in e.factors]}
    if isinstance(e, Pow):
        return {"k": "pow", "base": expr_to_json(e.base),
                "exp": [e.exponent.numerator, e.exponent.denominator]}
    if isinstance(e, SinE):
        return {"k": "sin", "arg": expr_to_json(e.arg)}
    if isinstance(e, CosE):
        return {"k": "cos", "arg": expr_to_json(e.arg)}
    raise TypeError(f"unknown node {type(e).__name__}")


def expr_from_json(obj) -> Expr:
    k = obj["k"]
    if k == "rat":
        n, d = obj["v"]
        return Rat(Fraction(n, d))
    if k == "sym":
        return Sym(obj["name"])
    if k == "app":
        return App(obj["name"], tuple(expr_from_json(a) for a in obj["args"]),
                   tuple(obj["deriv"]))
    if k == "sum":
        return Sum(tuple(expr_from_json(t) for t in obj["terms"]))
    if k == "prod":
        return Prod(tuple(expr_from_json(f) for f in obj["factors"]))
    if k == "pow":
        n, d = obj["exp"]
        return Pow(expr_from_json(obj["base"]), Fraction(n, d))
    if k == "sin":
        return SinE(expr_from_json(obj["arg"]))
    if k == "cos":
        return CosE(expr_from_json(obj["arg"]))
    raise ValueError(f"unknown expression kind {k!r}")
