"""Shared types for the discrete- and continuous-time walks on the integer line."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

COIN_TOL = 1e-12


class QWalkError(Exception):
    """Base class for errors raised by this package."""


class NonUnitary(QWalkError, ValueError):
    """The supplied coin matrix is not unitary."""


class OutOfSupport(QWalkError, ValueError):
    """A density was evaluated outside the open interval where it lives."""


@dataclass(frozen=True)
class CoinOperator:
    """2x2 coin ``U = [[a, b], [c, d]]``.

    ``P`` keeps the top row and moves the walker left, ``Q`` keeps the
    bottom row and moves it right; ``P + Q = U``.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def P(self) -> np.ndarray:
        return np.array([[self.a, self.b], [0, 0]], dtype=np.complex128)

    @property
    def Q(self) -> np.ndarray:
        return np.array([[0, 0], [self.c, self.d]], dtype=np.complex128)

    def unitarity_defect(self) -> float:
        """Largest violation among the three row conditions."""
        a, b, c, d = self.a, self.b, self.c, self.d
        return max(
            abs(abs(a) ** 2 + abs(b) ** 2 - 1.0),
            abs(abs(c) ** 2 + abs(d) ** 2 - 1.0),
            abs(a * np.conj(c) + b * np.conj(d)),
        )

    @property
    def limit_theorem_applies(self) -> bool:
        # the weak limit needs abcd != 0
        return abs(self.a * self.b * self.c * self.d) > COIN_TOL

    @property
    def a_abs(self) -> float:
        return float(abs(self.a))


def make_coin(a: complex, b: complex, c: complex, d: complex) -> CoinOperator:
    """Build a coin and check unitarity to ``1e-12``."""
    vals = [complex(v) for v in (a, b, c, d)]
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
        raise NonUnitary("coin entries must be finite")
    coin = CoinOperator(*vals)
    defect = coin.unitarity_defect()
    if defect > COIN_TOL:
        raise NonUnitary(f"coin is not unitary (defect {defect:.3e})")
    return coin


def hadamard() -> CoinOperator:
    s = 1.0 / math.sqrt(2.0)
    return make_coin(s, s, s, -s)


@dataclass(frozen=True)
class DtqwState:
    """Two-component amplitudes on the window ``[lo, hi]`` at integer time ``t``.

    ``amps[k]`` is the chirality vector at position ``lo + k``.
    """

    t: int
    lo: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps.setflags(write=False)

    @property
    def hi(self) -> int:
        return self.lo + self.amps.shape[0] - 1

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def probabilities(self) -> np.ndarray:
        return np.sum(np.abs(self.amps) ** 2, axis=1)

    def amplitude(self, x: int) -> np.ndarray:
        if x < self.lo or x > self.hi:
            return np.zeros(2, dtype=np.complex128)
        return self.amps[x - self.lo]


@dataclass(frozen=True)
class CtqwState:
    """Scalar amplitudes on the window ``[lo, hi]`` at real time ``t``."""

    t: float
    lo: int
    amps: np.ndarray
    nu: float

    def __post_init__(self):
        self.amps.setflags(write=False)

    @property
    def hi(self) -> int:
        return self.lo + self.amps.shape[0] - 1

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def amplitude(self, x: int) -> complex:
        if x < self.lo or x > self.hi:
            return 0j
        return complex(self.amps[x - self.lo])


def symmetric_initial_state() -> DtqwState:
    """``psi_0(0) = (1/sqrt2, i/sqrt2)``; the Hadamard walk stays symmetric from here."""
    s = 1.0 / math.sqrt(2.0)
    amps = np.array([[s, 1j * s]], dtype=np.complex128)
    return DtqwState(t=0, lo=0, amps=amps)


def distribution(state: DtqwState | CtqwState) -> dict[int, float]:
    """Map position -> probability, restricted to positions the state can occupy."""
    probs = state.probabilities()
    pos = state.positions
    if isinstance(state, DtqwState):
        keep = (pos + state.t) % 2 == 0
        pos, probs = pos[keep], probs[keep]
    return {int(x): float(p) for x, p in zip(pos, probs)}
