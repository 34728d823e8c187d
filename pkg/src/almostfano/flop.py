"""Transforming the extremal divisor class across the flop.

On the plus side Pic is spanned by L+ (the pullback of the fundamental
divisor of the target Fano) and the exceptional divisor E+, with
-K+ = r L+ - E+.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .invariants import HalfInteger, TransformCoefficients


class NotApplicable(ValueError):
    """Raised when a formula is used outside the branch it was derived for."""


@dataclass(frozen=True)
class PlusBasisClass:
    coef_L: Fraction
    coef_E: Fraction

    @property
    def integral(self) -> bool:
        return self.coef_L.denominator == 1 and self.coef_E.denominator == 1


def solve_relations(alpha, beta) -> TransformCoefficients:
    """Complete (alpha, beta) to the full coefficient set."""
    beta = HalfInteger(beta)
    if beta >= 0:
        raise ValueError("beta must be negative")
    return TransformCoefficients.from_alpha_beta(HalfInteger(alpha), beta)


def tilde_F_in_plus_basis(alpha, beta, r: int) -> PlusBasisClass:
    """The transform of the fibre class written as a L+ + b E+."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    if beta >= 0:
        raise ValueError("beta must be negative")
    return PlusBasisClass(alpha * r / -beta, (alpha + 1) / beta)


def is_F_divisible(alpha, beta, r: int) -> bool:
    """True when the transformed fibre class is a proper multiple in Pic(X+).

    The fibre of a del Pezzo fibration is primitive, so such rows die.
    """
    cls = tilde_F_in_plus_basis(alpha, beta, r)
    if not cls.integral:
        raise ValueError("transformed fibre class is not integral")
    return gcd(int(cls.coef_L), int(cls.coef_E)) > 1


def exc_degree(alpha, r: int, h3: int, d: int, beta) -> Fraction:
    """Degree that must be positive when the fibre transform is L-heavy.

    Only defined on the branch beta = -r, where the transform reads
    alpha L+ - ((alpha + 1)/r) E+.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if beta != -r:
        raise NotApplicable(f"needs beta = -r, got beta = {beta} with r = {r}")
    return alpha * alpha * h3 - ((alpha + 1) / r) ** 2 * d
