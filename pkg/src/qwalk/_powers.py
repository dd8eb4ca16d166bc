"""Products of powers of linear factors with closed-form derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerProduct:
    """``scale * prod_i (offset_i + slope_i * z) ** power_i``.

    Derivatives come from the logarithmic derivative
    ``L = sum p_i b_i / s_i``: ``u' = u L`` and ``u'' = u (L^2 + L')``.
    Bases are evaluated with principal powers, so complex ``z`` gives the
    analytic continuation off the real support.
    """

    scale: complex
    factors: tuple[tuple[float, float, float], ...]  # (offset, slope, power)

    def _bases(self, z):
        return [(off + slope * z, slope, p) for off, slope, p in self.factors]

    def value(self, z):
        z = np.asarray(z)
        dtype = np.complex128 if np.iscomplexobj(z) or np.iscomplexobj(self.scale) else float
        out = np.full(z.shape, self.scale, dtype=dtype)
        for s, _, p in self._bases(z):
            out = out * np.power(s.astype(dtype), p)
        return out

    def log_derivs(self, z):
        z = np.asarray(z)
        L = np.zeros_like(z, dtype=np.result_type(z, float))
        dL = np.zeros_like(L)
        for s, b, p in self._bases(z):
            L = L + p * b / s
            dL = dL - p * b * b / (s * s)
        return L, dL

    def deriv1(self, z):
        L, _ = self.log_derivs(z)
        return self.value(z) * L

    def deriv2(self, z):
        L, dL = self.log_derivs(z)
        return self.value(z) * (L * L + dL)

    def bundle(self, z):
        """``(u, u', u'')`` at ``z`` in one pass."""
        u = self.value(z)
        L, dL = self.log_derivs(z)
        return u, u * L, u * (L * L + dL)
