"""Numerical classification of weak Fano threefolds with a small anticanonical
contraction and a flop, organised by the pair of extremal contractions on
either side of the flop.

The package searches the Diophantine systems that constrain each pairing,
applies mechanical filters, attaches existence statuses from a shipped
ledger, and compares the resulting tables against golden data.
"""

from .invariants import (
    ChernData,
    ConicBundle,
    DelPezzoFibration,
    DivisorToCurve,
    DivisorToPoint,
    HalfInteger,
    NumericalRow,
    PairingKind,
    Reason,
    SplittingType,
    Status,
    StatusRecord,
    SurfaceType,
    TransformCoefficients,
    k3_from_blowup,
    sigma,
)

__version__ = "0.1.0"

__all__ = [
    "ChernData",
    "ConicBundle",
    "DelPezzoFibration",
    "DivisorToCurve",
    "DivisorToPoint",
    "HalfInteger",
    "NumericalRow",
    "PairingKind",
    "Reason",
    "SplittingType",
    "Status",
    "StatusRecord",
    "SurfaceType",
    "TransformCoefficients",
    "k3_from_blowup",
    "sigma",
]
