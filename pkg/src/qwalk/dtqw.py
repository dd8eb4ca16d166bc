"""Discrete-time walk: the local two-term update and the rescaled empirical CDF."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CoinOperator, CtqwState, DtqwState, symmetric_initial_state


def dtqw_step(state: DtqwState, coin: CoinOperator) -> DtqwState:
    """One step of ``psi_{t+1}(x) = P psi_t(x+1) + Q psi_t(x-1)``.

    The window grows by one site on each side.
    """
    old = state.amps
    n = old.shape[0]
    new = np.zeros((n + 2, 2), dtype=np.complex128)
    # new index j <-> x = lo - 1 + j; psi(x+1) sits at old index j, psi(x-1) at j-2
    new[:n, 0] = coin.a * old[:, 0] + coin.b * old[:, 1]
    new[2:, 1] = coin.c * old[:, 0] + coin.d * old[:, 1]
    return DtqwState(t=state.t + 1, lo=state.lo - 1, amps=new)


def dtqw_evolve(coin: CoinOperator, t: int, initial: DtqwState | None = None) -> DtqwState:
    """Apply ``t`` steps to ``initial`` (default: the symmetric initial state)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    state = symmetric_initial_state() if initial is None else initial
    for _ in range(t):
        state = dtqw_step(state, coin)
    return state


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous step function ``F_t(x) = sum_{y <= x t} P(X_t = y)``."""

    t: float
    positions: np.ndarray
    cumulative: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        # integer sites: absorb rounding in x*t so that x = y/t counts y
        cut = np.floor(x * self.t + 1e-9)
        idx = np.searchsorted(self.positions, cut, side="right")
        cum = np.concatenate(([0.0], self.cumulative))
        out = cum[idx]
        return out if out.ndim else float(out)


def rescaled_empirical_cdf(state: DtqwState | CtqwState) -> EmpiricalCDF:
    """Distribution function of ``X_t / t`` for a simulated state."""
    if state.t <= 0:
        raise ValueError("rescaling needs t >= 1")
    probs = state.probabilities()
    cum = np.cumsum(probs)
    return EmpiricalCDF(t=float(state.t), positions=state.positions.astype(float), cumulative=cum)
