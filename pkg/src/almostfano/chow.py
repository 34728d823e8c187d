"""Intersection numbers on projective bundles over P^1 and P^2, and
Riemann-Roch on threefolds.

A class on P(E) is a polynomial in z (the tautological class) and h (the
pullback of a hyperplane), reduced by h^(n+1) = 0 and the Grothendieck
relation z^m = sum_{i>=1} (-1)^(i+1) c_i z^(m-i) h^i, where m is the rank
of E and n the dimension of the base. The top monomial z^(m-1) h^n has
degree one.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class BundleModel:
    base: int
    rank: int
    chern: tuple[int, ...] = ()

    def __post_init__(self):
        if self.base not in (1, 2):
            raise ValueError("base must be P^1 or P^2")
        if self.rank < 1:
            raise ValueError("rank must be positive")
        chern = tuple(int(c) for c in self.chern)
        if len(chern) > self.base and any(chern[self.base:]):
            raise ValueError("Chern classes above the base dimension must vanish")
        chern = (chern + (0,) * self.base)[: self.base]
        object.__setattr__(self, "chern", chern)

    @property
    def dim(self) -> int:
        return self.rank - 1 + self.base

    def c(self, i: int) -> int:
        return self.chern[i - 1] if 1 <= i <= self.base else 0

    @property
    def z(self) -> "ChowExpr":
        return ChowExpr(self, {(1, 0): 1}, frozenset({1}))

    @property
    def h(self) -> "ChowExpr":
        return ChowExpr(self, {(0, 1): 1}, frozenset({1}))

    def const(self, value: int) -> "ChowExpr":
        return ChowExpr(self, {(0, 0): value}, frozenset({0}))


def _reduce(model: BundleModel, terms: dict) -> dict:
    out: dict[tuple[int, int], int] = {}
    todo = list(terms.items())
    m, n = model.rank, model.base
    while todo:
        (i, j), coeff = todo.pop()
        if coeff == 0 or j > n:
            continue
        if i < m:
            out[(i, j)] = out.get((i, j), 0) + coeff
            continue
        # z^i h^j = z^(i-m) h^j * z^m
        for k in range(1, n + 1):
            ck = model.c(k)
            if ck:
                todo.append(((i - k, j + k), coeff * (-1) ** (k + 1) * ck))
    return {key: v for key, v in out.items() if v}


class ChowExpr:
    """Element of the Chow ring of a projective bundle, kept reduced.

    ``degrees`` remembers every degree that went into the expression, so a
    class that reduced to zero still knows whether it was of top degree.
    """

    __slots__ = ("model", "terms", "degrees")

    def __init__(self, model: BundleModel, terms: dict, degrees: frozenset):
        self.model = model
        self.terms = _reduce(model, terms)
        self.degrees = degrees

    def _lift(self, other) -> "ChowExpr":
        if isinstance(other, ChowExpr):
            if other.model != self.model:
                raise ValueError("classes live on different bundles")
            return other
        if isinstance(other, int):
            return self.model.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return ChowExpr(self.model, terms, self.degrees | other.degrees)

    __radd__ = __add__

    def __neg__(self):
        return ChowExpr(self.model, {k: -v for k, v in self.terms.items()}, self.degrees)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms: dict[tuple[int, int], int] = {}
        for (a, b), u in self.terms.items():
            for (c, d), v in other.terms.items():
                key = (a + c, b + d)
                terms[key] = terms.get(key, 0) + u * v
        degrees = frozenset(p + q for p in self.degrees for q in other.degrees)
        return ChowExpr(self.model, terms, degrees)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = self.model.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, ChowExpr) and (self.model, self.terms) == (other.model, other.terms)

    def __hash__(self):
        return hash((self.model, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for (i, j), v in sorted(self.terms.items(), reverse=True):
            mono = "*".join(x for x in (_pw("z", i), _pw("h", j)) if x) or "1"
            out.append(f"{v}*{mono}")
        return " + ".join(out)


def _pw(sym: str, k: int) -> str:
    return "" if k == 0 else sym if k == 1 else f"{sym}^{k}"


def evaluate_top(model: BundleModel, expr: ChowExpr) -> int:
    """Degree of a class of top codimension on P(E)."""
    if expr.model != model:
        raise ValueError("class belongs to a different bundle")
    if expr.degrees and expr.degrees != {model.dim}:
        raise ValueError(f"class is not of top degree {model.dim}")
    return expr.terms.get((model.rank - 1, model.base), 0)


def monomial_degree(model: BundleModel, i: int, j: int) -> int:
    """z^i h^j via the Segre series, independent of the rewriting in ChowExpr.

    Pushing forward z^(m-1+k) gives the degree-k coefficient of
    1 / (1 - c1 t + c2 t^2 - ...).
    """
    if i + j != model.dim:
        raise ValueError("monomial is not of top degree")
    k = model.base - j
    if k < 0:
        return 0
    series = [Fraction(1)]
    for deg in range(1, k + 1):
        acc = Fraction(0)
        for step in range(1, min(deg, model.base) + 1):
            acc += (-1) ** (step + 1) * model.c(step) * series[deg - step]
        series.append(acc)
    return int(series[k])


_IMPLICIT = re.compile(r"(?<=[\d)zh])\s*(?=[(zh])")


def parse_class(model: BundleModel, text: str) -> ChowExpr:
    """Parse strings like '2z+2h', '(2z+2h)^3*(2z)' or 'z^3*h'."""
    src = _IMPLICIT.sub("*", text.replace("^", "**"))
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse class {text!r}") from exc

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return model.const(node.value)
        if isinstance(node, ast.Name) and node.id in ("z", "h"):
            return model.z if node.id == "z" else model.h
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ValueError("exponents must be integer literals")
                return walk(node.left) ** node.right.value
            ops = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__"}
            for op_type, meth in ops.items():
                if isinstance(node.op, op_type):
                    return getattr(walk(node.left), meth)(walk(node.right))
        raise ValueError(f"unsupported syntax in class {text!r}")

    return walk(tree)


def anticanonical_on_divisor(model: BundleModel, a: int, b: int) -> ChowExpr:
    """-K_X restricted from P(E) for X in |a z + b h|, by adjunction."""
    return (model.rank - a) * model.z + (model.base + 1 - model.c(1) - b) * model.h


def conic_divisor_k3(c1: int, c2: int) -> int:
    """(-K)^3 of a conic bundle X in |2z + (3 - c1)h| on P(E), E of rank 3 over P^2."""
    return c1 * c1 - 2 * c2 + 3 * c1


def conic_divisor_k3_by_ring(c1: int, c2: int) -> int:
    model = BundleModel(2, 3, (c1, c2))
    a, b = 2, 3 - c1
    x = a * model.z + b * model.h
    return evaluate_top(model, anticanonical_on_divisor(model, a, b) ** 3 * x)


def quadricbundle_k3(c1: int, mu: int) -> int:
    """(-K)^3 of a quadric bundle X in |2z + mu h| on P(E), E of rank 4 over P^1."""
    return -8 * c1 - 16 * mu + 48


def quadricbundle_k3_by_ring(c1: int, mu: int) -> int:
    model = BundleModel(1, 4, (c1,))
    x = 2 * model.z + mu * model.h
    return evaluate_top(model, anticanonical_on_divisor(model, 2, mu) ** 3 * x)


@dataclass(frozen=True)
class ThreefoldData:
    """Intersection data of A = -K and one more divisor L on a smooth threefold."""

    k3: Fraction
    k2l: Fraction
    kl2: Fraction
    l3: Fraction
    c2l: Fraction
    c2k: Fraction = Fraction(24)
    chi_o: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("k3", "k2l", "kl2", "l3", "c2l", "c2k", "chi_o"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def triple(self, u, v, w) -> Fraction:
        """Intersection of three classes given as (coefficient of A, coefficient of L)."""
        by_l_count = (self.k3, self.k2l, self.kl2, self.l3)
        total = Fraction(0)
        for pick in range(8):
            coeff = Fraction(1)
            count = 0
            for pos, cls in enumerate((u, v, w)):
                bit = (pick >> pos) & 1
                coeff *= cls[bit]
                count += bit
            total += coeff * by_l_count[count]
        return total


def conic_bundle_data(k3, tau) -> ThreefoldData:
    """L is the pullback of a line from P^2; c2.L follows from chi(L) = 3."""
    return ThreefoldData(k3, 12 - tau, 2, 0, 6 + tau)


def fibration_data(k3, kf2) -> ThreefoldData:
    """L is a fibre of a del Pezzo fibration; c2.F follows from chi(F) = 2."""
    return ThreefoldData(k3, kf2, 0, 0, 12 - kf2)


def quadric_bundle_data(k3) -> ThreefoldData:
    return fibration_data(k3, 8)


def chi_threefold(data: ThreefoldData, x, y) -> Fraction:
    """chi(O(x A + y L)) by Riemann-Roch with chi(O) from the data."""
    x, y = Fraction(x), Fraction(y)
    d = (x, y)
    d_plus_a = (x + 1, y)
    two_d_plus_a = (2 * x + 1, 2 * y)
    cubic = data.triple(d, d_plus_a, two_d_plus_a) / 12
    linear = (x * data.c2k + y * data.c2l) / 12
    return cubic + linear + data.chi_o


def chi_E_lhs(r: int, alpha_plus: int, tau: int, k3: int, p2: bool = False) -> Fraction:
    """Closed form for chi of the transform of the exceptional divisor
    over a conic bundle, with a = r*alpha_plus - 1 (or - 2 when the
    exceptional divisor is a plane with normal bundle O(-2))."""
    if not 0 <= tau <= 12:
        raise ValueError("tau must lie in 0..12")
    a = Fraction(r * alpha_plus - (2 if p2 else 1))
    return (
        (a**3 / 6 + a**2 / 4 + a / 12) * k3
        + (tau - 12) * (a * a * r / 2 + a * r / 2)
        + a * (r * r + 2)
        + Fraction(r * r, 2)
        - Fraction(3 * r, 2)
        + 1
    )
