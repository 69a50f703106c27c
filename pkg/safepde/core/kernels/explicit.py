"""Closed-form kernels F(x, y), H(x, y) on the triangle 0 <= y <= x <= 1."""

from __future__ import annotations

import numpy as np
from scipy import special

from safepde.core.kernels.special import pi_function_vec
from safepde.exceptions import ContractViolation
from safepde.models.plant import PlantParameters


def kernel_FH(x, y, params: PlantParameters, theta=None, nodes: int | None = None):
    """Evaluate F and H at broadcast points (x, y).

    ``theta`` overrides (d1, d2) of ``params``; b does not enter F and H.
    On the diagonal the I1 ratio in H is replaced by its limit
    d1 d2 (q1 x/q2 + y)/(q1 + q2).
    """
    d1, d2 = (params.d1, params.d2) if theta is None else (float(theta[0]), float(theta[1]))
    q1, q2, p = params.q1, params.q2, params.p
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    if np.any(y > x + 1e-12):
        raise ContractViolation("kernel domain requires 0 <= y <= x")
    if d1 == 0.0 and d2 == 0.0:
        zeros = np.zeros(x.shape)
        return zeros, zeros.copy()
    if p == 0.0:
        raise ContractViolation("closed-form kernels need p != 0")
    if d1 * d2 < 0.0 or p * d2 < 0.0 or d1 / p < 0.0:
        raise ContractViolation(
            "closed-form kernels need d1*d2 >= 0, p*d2 >= 0 and d1/p >= 0",
            details={"d1": d1, "d2": d2, "p": p},
        )

    qs = q1 + q2
    diff = np.clip(x - y, 0.0, None)
    S = q1 * x / q2 + y
    dd = d1 * d2
    arg = 2.0 * np.sqrt(dd) / qs * np.sqrt(diff * S)
    I0 = special.i0(arg)
    I1 = special.i1(arg)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_F = np.where(S > 0.0, np.sqrt(dd * diff / np.where(S > 0.0, S, 1.0)) * I1, 0.0)
        ratio_H = np.where(
            diff > 0.0,
            np.sqrt(dd * S / np.where(diff > 0.0, diff, 1.0)) * I1,
            dd * S / qs,
        )

    s1 = p * q1 * d2 / q2 * diff / qs
    s2 = d1 / (p * q1) * (q1 * x + q2 * y) / qs
    Pi = pi_function_vec(s1, s2, nodes)

    coef = d1 * q2 / (p * q1)
    F = -1.0 / (p * qs) * (coef * I0 + ratio_F + (p * d2 - coef) * Pi)
    H = -1.0 / qs * (d1 / p * I0 + ratio_H + (p * d2 * q1 / q2 - d1 / p) * Pi)
    return F, H
