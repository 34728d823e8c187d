"""Value types shared by every other module.

Everything here is immutable and validated on construction, so a row that
exists at all is internally consistent: its numerical fields satisfy the
degree identities that do not depend on any search.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Union


class PairingKind(enum.Enum):
    """Which pair of extremal contractions sits on the two sides of the flop."""

    DP_DP = "dp-dp"
    DP_CONIC = "dp-conic"
    DP_POINT = "dp-point"
    DP_CURVE = "dp-curve"
    CB_CB = "cb-cb"
    CB_POINT = "cb-point"
    CB_CURVE = "cb-curve"

    @classmethod
    def from_cli(cls, name: str) -> "PairingKind":
        for kind in cls:
            if kind.value == name or kind.name == name.upper():
                return kind
        raise ValueError(f"unknown pairing {name!r}")


class HalfInteger(Fraction):
    """A rational number with denominator 1 or 2.

    Arithmetic falls back to plain Fraction, so results are not re-checked
    unless wrapped again.
    """

    __slots__ = ()

    def __new__(cls, numerator=0, denominator=None):
        self = super().__new__(cls, numerator, denominator)
        if self.denominator not in (1, 2):
            raise ValueError(f"{Fraction(self)} is not a half-integer")
        return self

    def __repr__(self):
        return f"HalfInteger({self.numerator}, {self.denominator})"


def render_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Status(enum.Enum):
    EXISTS = "+"
    OPEN = "?"
    EXCLUDED = "x"


class Reason(enum.Enum):
    # mechanical: decided by a labelled filter pass
    DIV8 = "DIV8"
    F_DIVISIBLE = "F_DIVISIBLE"
    GRADARG = "GRADARG"
    RANK2_CHERN = "RANK2_CHERN"
    KF_FORBIDDEN = "KF_FORBIDDEN"
    # geometric: recorded in the ledger with a citation
    CASTELNUOVO = "CASTELNUOVO"
    GRUSON_PESKINE = "GRUSON_PESKINE"
    QUADRIC_INTERSECTION = "QUADRIC_INTERSECTION"
    LINE_DEGENERATION = "LINE_DEGENERATION"
    NO_SECTIONS = "NO_SECTIONS"
    SECTION_COUNT = "SECTION_COUNT"
    DOUBLE_POINT = "DOUBLE_POINT"

    @property
    def mechanical(self) -> bool:
        return self in _MECHANICAL


_MECHANICAL = frozenset(
    {Reason.DIV8, Reason.F_DIVISIBLE, Reason.GRADARG, Reason.RANK2_CHERN, Reason.KF_FORBIDDEN}
)


@dataclass(frozen=True)
class StatusRecord:
    code: Status
    reason: Reason | None = None
    citation: str = ""

    def __post_init__(self):
        if (self.code is Status.EXCLUDED) != (self.reason is not None):
            raise ValueError("a reason is required exactly when the row is excluded")

    @property
    def flag(self) -> str:
        return self.code.value

    def render(self) -> str:
        if self.reason is None:
            return self.flag
        return f"x:{self.reason.value}"

    @classmethod
    def parse(cls, text: str, citation: str = "") -> "StatusRecord":
        if text in ("+", "?"):
            return cls(Status(text), None, citation)
        if text.startswith("x:"):
            return cls(Status.EXCLUDED, Reason(text[2:]), citation)
        raise ValueError(f"bad status {text!r}")


class SurfaceType(enum.Enum):
    """Exceptional divisor of a divisor-to-point contraction, with its normal bundle."""

    P2_MINUS1 = "P2:O(-1)"
    QUADRIC_MINUS1 = "Q:O(-1)"
    P2_MINUS2 = "P2:O(-2)"

    @property
    def k2e(self) -> int:
        """(-K)^2 . E on the blown-up side."""
        return {"P2:O(-1)": 4, "Q:O(-1)": 2, "P2:O(-2)": 1}[self.value]

    @property
    def ke2(self) -> int:
        """(-K) . E^2, the same for all three types."""
        return -2

    @property
    def discrepancy(self) -> Fraction:
        """(-K_Y)^3 - (-K_X)^3 for the blow-down X -> Y."""
        return {"P2:O(-1)": Fraction(8), "Q:O(-1)": Fraction(2), "P2:O(-2)": Fraction(1, 2)}[
            self.value
        ]

    @property
    def gorenstein(self) -> bool:
        return self is not SurfaceType.P2_MINUS2


ADMISSIBLE_BETA_PAIRS = frozenset(
    {
        (Fraction(-1), Fraction(-1)),
        (Fraction(-2), Fraction(-1, 2)),
        (Fraction(-1, 2), Fraction(-2)),
    }
)


@dataclass(frozen=True)
class TransformCoefficients:
    """Coefficients of the flop transforms of the two extremal classes.

    With D on X and D+ on X+, the strict transforms satisfy
    D~+ = alpha (-K) + beta D and D~ = alpha_plus (-K+) + beta_plus D+.
    """

    alpha: Fraction
    beta: Fraction
    alpha_plus: Fraction
    beta_plus: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "alpha_plus", "beta_plus"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.beta >= 0 or self.beta_plus >= 0:
            raise ValueError("beta and beta_plus must be negative")
        if self.beta * self.beta_plus != 1:
            raise ValueError("beta * beta_plus must equal 1")
        if self.alpha + self.beta * self.alpha_plus != 0:
            raise ValueError("alpha + beta * alpha_plus must vanish")
        if self.alpha_plus + self.beta_plus * self.alpha != 0:
            raise ValueError("alpha_plus + beta_plus * alpha must vanish")

    @classmethod
    def from_alpha_beta(cls, alpha, beta) -> "TransformCoefficients":
        alpha, beta = Fraction(alpha), Fraction(beta)
        return cls(alpha, beta, -alpha / beta, 1 / beta)

    def swap(self) -> "TransformCoefficients":
        return TransformCoefficients(self.alpha_plus, self.beta_plus, self.alpha, self.beta)

    @property
    def admissible_fibration_pair(self) -> bool:
        return (self.beta, self.beta_plus) in ADMISSIBLE_BETA_PAIRS


@dataclass(frozen=True)
class DelPezzoFibration:
    kf2: int
    lam: int | None = None

    def __post_init__(self):
        if not 1 <= self.kf2 <= 9 or self.kf2 == 7:
            raise ValueError(f"no del Pezzo fibre of degree {self.kf2}")


@dataclass(frozen=True)
class ConicBundle:
    tau: int

    def __post_init__(self):
        if not 0 <= self.tau <= 12:
            raise ValueError(f"discriminant degree {self.tau} out of range")


@dataclass(frozen=True)
class DivisorToPoint:
    surface: SurfaceType
    target_degree: Fraction
    r_target: int = 1
    target_l3: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "target_degree", Fraction(self.target_degree))
        if self.target_l3 is not None:
            object.__setattr__(self, "target_l3", Fraction(self.target_l3))


@dataclass(frozen=True)
class DivisorToCurve:
    d: int
    g: int
    r_target: int
    h3: int

    def __post_init__(self):
        if self.r_target not in (1, 2, 3, 4):
            raise ValueError("Fano index must lie in 1..4")
        if self.g < 0 or self.d < 1:
            raise ValueError("curve needs d >= 1 and g >= 0")

    @property
    def target_degree(self) -> int:
        return self.r_target**3 * self.h3


Side = Union[DelPezzoFibration, ConicBundle, DivisorToPoint, DivisorToCurve]

_SIDE_KINDS = {
    PairingKind.DP_DP: (DelPezzoFibration, DelPezzoFibration),
    PairingKind.DP_CONIC: (DelPezzoFibration, ConicBundle),
    PairingKind.DP_POINT: (DelPezzoFibration, DivisorToPoint),
    PairingKind.DP_CURVE: (DelPezzoFibration, DivisorToCurve),
    PairingKind.CB_CB: (ConicBundle, ConicBundle),
    PairingKind.CB_POINT: (ConicBundle, DivisorToPoint),
    PairingKind.CB_CURVE: (ConicBundle, DivisorToCurve),
}


_PART = re.compile(r"^(-?\d+)(?:\^(\d+))?$")


@dataclass(frozen=True)
class SplittingType:
    """Splitting of a bundle on P^1 as (twist, multiplicity) pairs, twists ascending."""

    parts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        merged: dict[int, int] = {}
        for twist, mult in self.parts:
            if mult <= 0:
                raise ValueError("multiplicities must be positive")
            merged[twist] = merged.get(twist, 0) + mult
        object.__setattr__(self, "parts", tuple(sorted(merged.items())))

    @classmethod
    def of(cls, *pairs: tuple[int, int]) -> "SplittingType":
        return cls(tuple((t, m) for t, m in pairs if m))

    @property
    def rank(self) -> int:
        return sum(m for _, m in self.parts)

    def h0(self) -> int:
        return sum(m * (t + 1) for t, m in self.parts if t >= 0)

    def render(self) -> str:
        items = [str(t) if m == 1 else f"{t}^{m}" for t, m in self.parts]
        return "(" + ",".join(items) + ")"

    @classmethod
    def parse(cls, text: str) -> "SplittingType":
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"bad splitting type {text!r}")
        pairs = []
        for item in body[1:-1].split(","):
            m = _PART.match(item.strip())
            if not m:
                raise ValueError(f"bad splitting entry {item!r}")
            pairs.append((int(m.group(1)), int(m.group(2) or 1)))
        return cls(tuple(pairs))


@dataclass(frozen=True)
class ChernData:
    c1: int
    c2: int

    def render(self) -> str:
        return f"({self.c1},{self.c2})"

    @classmethod
    def parse(cls, text: str) -> "ChernData":
        a, b = text.strip()[1:-1].split(",")
        return cls(int(a), int(b))


def sigma(r: int, d: int, g: int) -> int:
    """(-K+)^2 . E+ for the blowup of a curve of degree d and genus g in a
    Fano threefold of index r (degree measured against the fundamental divisor)."""
    if r < 1 or d < 1 or g < 0:
        raise ValueError("need r >= 1, d >= 1, g >= 0")
    return r * d + 2 - 2 * g


def k3_from_blowup(r: int, h3: int, d: int, g: int) -> int:
    """Anticanonical degree after blowing up the curve."""
    if r < 1 or d < 1 or g < 0 or h3 < 1:
        raise ValueError("need r, h3, d >= 1 and g >= 0")
    return r**3 * h3 - 2 * r * d + 2 * g - 2


@dataclass(frozen=True)
class NumericalRow:
    """One candidate or confirmed numerical type.

    ``key`` and ``ref`` identify the row inside its pairing once the ledger has
    been consulted; raw search output leaves them empty.
    """

    pairing: PairingKind
    k3: int
    r_x: int
    side_x: Side
    side_plus: Side
    coeffs: TransformCoefficients | None = None
    splitting: SplittingType | None = None
    chern: ChernData | None = None
    status: StatusRecord | None = None
    key: str | None = None
    ref: str | None = None
    note: str = field(default="", compare=False)

    def __post_init__(self):
        if self.k3 <= 0 or self.k3 % 2 or self.k3 > 54:
            raise ValueError(f"anticanonical degree {self.k3} must be even in 2..54")
        if self.r_x not in (1, 2, 3, 4):
            raise ValueError("index of X must lie in 1..4")
        if self.r_x == 1 and self.k3 > 22:
            raise ValueError("index one rows have degree at most 22")
        want = _SIDE_KINDS[self.pairing]
        if not (isinstance(self.side_x, want[0]) and isinstance(self.side_plus, want[1])):
            raise ValueError(f"sides do not match pairing {self.pairing.value}")
        for side in (self.side_x, self.side_plus):
            if isinstance(side, DelPezzoFibration) and side.kf2 == 9 and self.r_x != 3:
                raise ValueError("P^2 fibres only occur for the index three row")
            if isinstance(side, DivisorToCurve):
                if k3_from_blowup(side.r_target, side.h3, side.d, side.g) != self.k3:
                    raise ValueError("degree identity for the curve blowup fails")
                if sigma(side.r_target, side.d, side.g) <= 0:
                    raise ValueError("blown-up curve must have positive sigma")
        fibred = not isinstance(self.side_plus, (DivisorToPoint, DivisorToCurve))
        if self.coeffs is not None and fibred and not self.coeffs.admissible_fibration_pair:
            raise ValueError("beta pair is not admissible for two fibrations")
        if self.splitting is not None and self.r_x == 1:
            ranks = set()
            for side in (self.side_x, self.side_plus):
                if isinstance(side, DelPezzoFibration):
                    ranks.add(side.kf2 + 1)
                elif isinstance(side, ConicBundle):
                    ranks.add(3)
            if ranks and self.splitting.rank not in ranks:
                raise ValueError("splitting type has the wrong rank")

    def identity(self) -> str:
        """Canonical string of the fields that pin the row down in its pairing."""
        parts = [f"k3={self.k3}", f"r_x={self.r_x}"]
        parts += _side_identity("x", self.side_x) + _side_identity("plus", self.side_plus)
        if self.coeffs is not None:
            parts.append(f"alpha={render_rational(self.coeffs.alpha)}")
            parts.append(f"beta={render_rational(self.coeffs.beta)}")
        return ";".join(parts)

    def with_status(self, status: StatusRecord, key: str | None = None, ref: str | None = None):
        return replace(
            self, status=status, key=key if key is not None else self.key, ref=ref or self.ref
        )


def _side_identity(tag: str, side: Side) -> list[str]:
    if isinstance(side, DelPezzoFibration):
        out = [f"{tag}.kf2={side.kf2}"]
        if side.lam is not None:
            out.append(f"{tag}.lambda={side.lam}")
        return out
    if isinstance(side, ConicBundle):
        return [f"{tag}.tau={side.tau}"]
    if isinstance(side, DivisorToPoint):
        return [f"{tag}.E={side.surface.value}", f"{tag}.r={side.r_target}"]
    return [f"{tag}.r={side.r_target}", f"{tag}.h3={side.h3}", f"{tag}.d={side.d}", f"{tag}.g={side.g}"]
