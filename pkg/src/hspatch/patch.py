"""Hermite cubic curves and bicubic patches, plus parameter-line restrictions.

Control matrix convention (Hermite basis).  A patch coordinate is
x(u, v) = h(u)^T X h(v) with h the Hermite basis 4-vector, and X laid out in
2x2 blocks:

    X = [ corner values        | d/dv at corners   ]
        [ d/du at corners      | d2/dudv (twists)  ]

so x11 = P(0,0), x12 = P(0,1), x21 = P(1,0), x22 = P(1,1), x13 = P_v(0,0),
x14 = P_v(0,1), x23 = P_v(1,0), x24 = P_v(1,1), x31 = P_u(0,0),
x32 = P_u(0,1), x41 = P_u(1,0), x42 = P_u(1,1), x33..x44 the mixed partials
at (0,0), (0,1), (1,0), (1,1).

A "line restriction" is the exact univariate polynomial obtained by fixing
v = slope*u + offset with slope +-1; generic bicubics restrict to degree 6 on
such lines while their boundary curves stay cubic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import algebra
from .errors import BasisMismatchError


class Basis(enum.Enum):
    HERMITE = "hermite"
    BEZIER = "bezier"
    BSPLINE = "bspline"

    @classmethod
    def parse(cls, name: str) -> "Basis":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown basis {name!r}, expected hermite/bezier/bspline") from None


_BASIS_EXACT = {
    Basis.HERMITE: algebra.HERMITE_BASIS,
    Basis.BEZIER: algebra.BEZIER_BASIS,
    Basis.BSPLINE: algebra.BSPLINE_BASIS,
}
_BASIS_FLOAT = {b: algebra.to_float(m) for b, m in _BASIS_EXACT.items()}


def basis_matrix(basis: Basis, exact: bool = False):
    """Constant coefficient matrix of a basis (rows = basis polynomials)."""
    return _BASIS_EXACT[basis] if exact else _BASIS_FLOAT[basis].copy()


@dataclass(frozen=True)
class GeometricPatch:
    """One bicubic patch: a 4x4 control matrix per spatial coordinate."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    basis: Basis = Basis.HERMITE

    def __post_init__(self):
        for name in ("x", "y", "z"):
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (4, 4):
                raise ValueError(f"control matrix {name} must be 4x4, got {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError(f"control matrix {name} contains non-finite entries")
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.x, self.y, self.z

    def translated(self, delta) -> "GeometricPatch":
        """Shift the patch by a 3-vector (adds to corner-value block only).

        Only valid in the Hermite basis, where derivatives are unaffected by
        translation.  In Bezier/BSpline all controls are points, so the whole
        matrices shift.
        """
        dx, dy, dz = (float(d) for d in delta)
        if self.basis is Basis.HERMITE:
            mask = np.zeros((4, 4))
            mask[:2, :2] = 1.0
        else:
            mask = np.ones((4, 4))
        return GeometricPatch(
            self.x + dx * mask, self.y + dy * mask, self.z + dz * mask, self.basis
        )


@dataclass(frozen=True)
class PatchJet:
    """Point and first partial derivatives of a patch at one parameter pair."""

    point: np.ndarray
    du: np.ndarray
    dv: np.ndarray

    def normal(self) -> np.ndarray:
        """Unnormalized surface normal du x dv."""
        return np.cross(self.du, self.dv)


def _power_vec(t: float) -> np.ndarray:
    return np.array([t * t * t, t * t, t, 1.0])


def _dpower_vec(t: float) -> np.ndarray:
    return np.array([3.0 * t * t, 2.0 * t, 1.0, 0.0])


def _check_param(t, clamp: bool):
    t = np.asarray(t, dtype=float)
    if clamp:
        return np.clip(t, 0.0, 1.0)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError("curve/patch parameter outside [0, 1]; pass clamp=True to clamp")
    return t


def eval_curve(control, t, basis: Basis = Basis.HERMITE, clamp: bool = False):
    """Evaluate a cubic curve coordinate with controls `control` at t in [0,1].

    `control` is the 4-vector of the chosen basis; for Hermite that is
    [P(0), P(1), P'(0), P'(1)].  Accepts scalar or array t.
    """
    c = np.asarray(control, dtype=float)
    if c.shape != (4,):
        raise ValueError("curve control must be a 4-vector")
    t = _check_param(t, clamp)
    poly = c @ _BASIS_FLOAT[basis]  # descending power coefficients
    return np.polyval(poly, t)


def eval_patch_point(patch: GeometricPatch, u: float, v: float, clamp: bool = False) -> np.ndarray:
    """Evaluate patch position in its own basis (works for all bases)."""
    u = float(_check_param(u, clamp))
    v = float(_check_param(v, clamp))
    m = _BASIS_FLOAT[patch.basis]
    hu = m @ _power_vec(u)
    hv = m @ _power_vec(v)
    return np.array([hu @ c @ hv for c in patch.coords()])


def eval_patch_jet(patch: GeometricPatch, u: float, v: float, clamp: bool = False) -> PatchJet:
    """Position and first partials of a Hermite-basis patch at (u, v)."""
    if patch.basis is not Basis.HERMITE:
        raise BasisMismatchError(
            f"jet evaluation expects a Hermite-basis patch, got {patch.basis.value!r}"
        )
    u = float(_check_param(u, clamp))
    v = float(_check_param(v, clamp))
    m = _BASIS_FLOAT[Basis.HERMITE]
    hu, dhu = m @ _power_vec(u), m @ _dpower_vec(u)
    hv, dhv = m @ _power_vec(v), m @ _dpower_vec(v)
    point = np.array([hu @ c @ hv for c in patch.coords()])
    du = np.array([dhu @ c @ hv for c in patch.coords()])
    dv = np.array([hu @ c @ dhv for c in patch.coords()])
    return PatchJet(point, du, dv)


def eval_patch_grid(patch: GeometricPatch, us, vs):
    """Vectorized jet evaluation on a parameter grid.

    Returns (P, Pu, Pv) arrays of shape (len(us), len(vs), 3).
    """
    if patch.basis is not Basis.HERMITE:
        raise BasisMismatchError("grid jet evaluation expects a Hermite-basis patch")
    us = _check_param(np.asarray(us, dtype=float), clamp=False)
    vs = _check_param(np.asarray(vs, dtype=float), clamp=False)
    m = _BASIS_FLOAT[Basis.HERMITE]
    pow_u = np.stack([us ** 3, us ** 2, us, np.ones_like(us)], axis=1)
    dpow_u = np.stack([3 * us ** 2, 2 * us, np.ones_like(us), np.zeros_like(us)], axis=1)
    pow_v = np.stack([vs ** 3, vs ** 2, vs, np.ones_like(vs)], axis=1)
    dpow_v = np.stack([3 * vs ** 2, 2 * vs, np.ones_like(vs), np.zeros_like(vs)], axis=1)
    hu, dhu = pow_u @ m.T, dpow_u @ m.T
    hv, dhv = pow_v @ m.T, dpow_v @ m.T
    p = np.stack([hu @ c @ hv.T for c in patch.coords()], axis=-1)
    pu = np.stack([dhu @ c @ hv.T for c in patch.coords()], axis=-1)
    pv = np.stack([hu @ c @ dhv.T for c in patch.coords()], axis=-1)
    return p, pu, pv


def monomial_matrix(control, basis: Basis = Basis.HERMITE) -> np.ndarray:
    """Power-basis coefficients of one patch coordinate.

    Entry [p, q] multiplies u^p v^q (ascending exponents).  This is the single
    internal representation used for every line restriction.
    """
    x = np.asarray(control, dtype=float)
    m = _BASIS_FLOAT[basis]
    descending = m.T @ x @ m  # entry (i, j) multiplies u^(3-i) v^(3-j)
    return descending[::-1, ::-1].copy()


def monomial_matrix_exact(control, basis: Basis = Basis.HERMITE):
    """Exact-rational version of monomial_matrix; entries may be LinearForms."""
    m = _BASIS_EXACT[basis]
    descending = algebra.linform_mat_mul(algebra.linform_mat_mul(algebra.mat_transpose(m), control), m)
    return tuple(tuple(descending[3 - p][3 - q] for q in range(4)) for p in range(4))


@dataclass(frozen=True)
class DiagonalPoly:
    """Restriction of a patch coordinate to a slope +-1 parameter line.

    `coeffs` holds a6..a0, descending powers of u, for x(u, slope*u + offset).
    """

    coeffs: np.ndarray
    slope: int = 1
    offset: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (7,):
            raise ValueError("diagonal polynomial has exactly 7 coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, t):
        return np.polyval(self.coeffs, t)

    def effective_degree(self, tol: float = 1e-9) -> int:
        return effective_degree(self.coeffs, tol)


def effective_degree(coeffs, tol: float = 1e-9) -> int:
    """Highest power whose coefficient exceeds tol * max(1, max |coeff|).

    Coefficients are descending.  Scale-relative so unit choices do not change
    verdicts; an all-zero polynomial reports degree 0.
    """
    c = np.asarray(coeffs, dtype=float)
    scale = max(1.0, float(np.max(np.abs(c))) if c.size else 1.0)
    n = len(c) - 1
    for k, v in enumerate(c):
        if abs(v) > tol * scale:
            return n - k
    return 0


def _line_interval(slope: int, offset: float) -> tuple[float, float]:
    """u-interval on which (u, slope*u + offset) stays inside the unit square."""
    if slope == 1:
        lo, hi = max(0.0, -offset), min(1.0, 1.0 - offset)
    else:
        lo, hi = max(0.0, offset - 1.0), min(1.0, offset)
    return lo, hi


def _check_slope(slope: int) -> int:
    if slope not in (1, -1):
        raise ValueError("only slopes +1 and -1 are supported")
    return int(slope)


def line_restriction_coeffs(control, slope: int, offset: float = 0.0,
                            basis: Basis = Basis.HERMITE) -> DiagonalPoly:
    """Exact polynomial of one coordinate along the line v = slope*u + offset.

    The monomial matrix is expanded with binomial coefficients; no sampling is
    involved.  slope=+1/offset=0 is the main diagonal, slope=-1/offset=1 the
    anti-diagonal, other offsets cover tessellation edge lines.
    """
    slope = _check_slope(slope)
    lo, hi = _line_interval(slope, offset)
    if hi < lo:
        raise ValueError(f"line v = {slope:+d}*u + {offset} misses the unit square")
    mono = monomial_matrix(control, basis)
    out = np.zeros(7)
    for q in range(4):
        for m in range(q + 1):
            # (slope*u + offset)^q contributes C(q,m) slope^m offset^(q-m) u^m
            w = comb(q, m) * (slope ** m) * (offset ** (q - m))
            if w == 0.0:
                continue
            for p in range(4):
                out[p + m] += mono[p, q] * w
    return DiagonalPoly(out[::-1], slope=slope, offset=float(offset))


def fit_line_oracle(control, slope: int, offset: float = 0.0,
                    basis: Basis = Basis.HERMITE) -> DiagonalPoly:
    """Independent check of line_restriction_coeffs by sampling.

    Evaluates the coordinate at 7 distinct parameters on the line and solves
    the 7x7 Vandermonde system, touching none of the symbolic-substitution
    code path.
    """
    slope = _check_slope(slope)
    lo, hi = _line_interval(slope, offset)
    if hi - lo <= 1e-9:
        raise ValueError("line segment inside the unit square is too short for 7 samples")
    x = np.asarray(control, dtype=float)
    m = _BASIS_FLOAT[basis]
    ts = np.linspace(lo, hi, 7)
    vs = slope * ts + offset
    hu = np.stack([ts ** 3, ts ** 2, ts, np.ones_like(ts)], axis=1) @ m.T
    hv = np.stack([vs ** 3, vs ** 2, vs, np.ones_like(vs)], axis=1) @ m.T
    samples = np.einsum("ki,ij,kj->k", hu, x, hv)
    vander = np.vander(ts, 7)  # descending powers
    coeffs = np.linalg.solve(vander, samples)
    return DiagonalPoly(coeffs, slope=slope, offset=float(offset))
