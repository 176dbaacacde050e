"""Joint numerical range of a Hermitian triple (A1, A2, A3).

The quadratic-form map rho(x) = [x* A1 x, x* A2 x, x* A3 x] sends the unit
sphere to a compact set in R^3 whose support function in direction v is
the smallest eigenvalue of v1 A1 + v2 A2 + v3 A3, attained at the matching
eigenvector.  ``boundary_sample`` traces that boundary over a
deterministic direction grid; ``optimality_certificate`` checks the
first-order optimality of a quotient-sum minimizer through the supporting
half-space of the gradient direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _parallel, linalg
from .srq2 import NondifferentiablePointError

__all__ = [
    "JnrPoint",
    "OptimalityCertificate",
    "boundary_sample",
    "direction_grid",
    "g_value",
    "optimality_certificate",
    "rho",
]


@dataclass(frozen=True)
class JnrPoint:
    """A sampled boundary point: the probing direction, the attained image
    point, the support value (their inner product), and the unit witness
    vector realizing it."""

    direction: np.ndarray
    point: np.ndarray
    support_value: float
    witness: np.ndarray


def _hermitian_triple(matrices) -> list[np.ndarray]:
    mats = [linalg.hermitian_part(m, f"matrix {i+1}")[0] for i, m in enumerate(matrices)]
    if len(mats) != 3:
        raise ValueError("expected exactly three matrices")
    if not (mats[0].shape == mats[1].shape == mats[2].shape):
        raise ValueError("the three matrices must share one shape")
    return mats


def _form(m: np.ndarray, x: np.ndarray) -> float:
    val = complex(np.vdot(x, m @ x))
    if abs(val.imag) > 1e-12 * max(1.0, linalg.norm1(m)):
        raise ValueError(
            f"quadratic form has non-negligible imaginary part {val.imag:.3e}"
        )
    return val.real


def rho(matrices, x) -> np.ndarray:
    """The real 3-vector [x* A1 x, x* A2 x, x* A3 x]."""
    mats = _hermitian_triple(matrices)
    x = np.asarray(x, dtype=np.complex128).ravel()
    return np.array([_form(m, x) for m in mats])


def direction_grid(count: int) -> np.ndarray:
    """Deterministic spiral lattice of ``count`` unit directions in R^3,
    starting at the north pole [0, 0, 1]."""
    count = int(count)
    if count < 1:
        raise ValueError("count must be at least 1")
    i = np.arange(count)
    z = 1.0 - 2.0 * i / count
    rad = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    theta = i * (np.pi * (3.0 - np.sqrt(5.0)))
    out = np.column_stack([rad * np.cos(theta), rad * np.sin(theta), z])
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out


def boundary_sample(matrices, directions) -> list[JnrPoint]:
    """Support points of the joint numerical range for each probing
    direction, in input order."""
    mats = _hermitian_triple(matrices)
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    if dirs.shape[1] != 3:
        raise ValueError("directions must be rows of length 3")

    def one(v):
        hv = v[0] * mats[0] + v[1] * mats[1] + v[2] * mats[2]
        w, vecs = np.linalg.eigh(hv)
        x = linalg.fix_phase(vecs[:, 0])
        point = np.array([_form(m, x) for m in mats])
        return JnrPoint(
            direction=v.copy(),
            point=point,
            support_value=float(w[0]),
            witness=x,
        )

    return _parallel.parallel_map(one, list(dirs))


def g_value(g_params, y) -> float:
    """The scalarized objective y1/(alpha1 + beta1 y3) + y2/(alpha2 + beta2 y3)
    with the same 0/0 and +inf conventions as the quotient sum."""
    alpha1, beta1, alpha2, beta2 = (float(p) for p in g_params)
    y = np.asarray(y, dtype=float).ravel()
    total = 0.0
    num_eps = 1e-12 * max(1.0, float(np.max(np.abs(y))))
    for num, alpha, beta in ((y[0], alpha1, beta1), (y[1], alpha2, beta2)):
        den = alpha + beta * y[2]
        den_eps = 1e-12 * max(1.0, abs(alpha) + abs(beta) * abs(y[2]))
        if den <= den_eps:
            if num <= num_eps:
                continue
            return float("inf")
        total += num / den
    return total


@dataclass(frozen=True)
class OptimalityCertificate:
    """First-order optimality data at a point x: the (unnormalized) gradient
    direction of the scalarized objective at y = rho(x), and the support
    gap v . y - lambda_min(H_v), which is nonnegative and vanishes exactly
    at supported boundary points."""

    grad_direction: np.ndarray
    support_gap: float


def optimality_certificate(matrices, g_params, x) -> OptimalityCertificate:
    mats = _hermitian_triple(matrices)
    alpha1, beta1, alpha2, beta2 = (float(p) for p in g_params)
    x = linalg.normalize(np.asarray(x, dtype=np.complex128).ravel())
    y = np.array([_form(m, x) for m in mats])
    d1 = alpha1 + beta1 * y[2]
    d2 = alpha2 + beta2 * y[2]
    eps1 = 1e-12 * max(1.0, abs(alpha1) + abs(beta1) * linalg.norm1(mats[2]))
    eps2 = 1e-12 * max(1.0, abs(alpha2) + abs(beta2) * linalg.norm1(mats[2]))
    if d1 <= eps1 or d2 <= eps2:
        raise NondifferentiablePointError(
            "a quotient denominator vanishes at this point"
        )
    v = np.array(
        [
            1.0 / d1,
            1.0 / d2,
            -(beta1 * y[0] / d1**2 + beta2 * y[1] / d2**2),
        ]
    )
    hv = v[0] * mats[0] + v[1] * mats[1] + v[2] * mats[2]
    w = np.linalg.eigvalsh(hv)
    gap = float(v @ y - w[0])
    return OptimalityCertificate(grad_direction=v, support_gap=gap)
