"""Vector holonomies in SO+(1,2).

Construction (closed-form exponentials around non-null and null axes),
validation and trace classification, extraction of the invariant normal
line with its stabilizer coordinate, and the closure residual of an
ordered quadruple.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import DEFAULT_TOL, Tolerances, as_matrix, is_exact, matmul, max_abs, to_float
from .errors import (
    CentralHolonomy,
    DetViolation,
    MetricViolation,
    NonNullGenerator,
    NullAxis,
    OrientationViolation,
)
from .lorentz import ETA_T, causal_class, det_cofactor, j_inv, j_map, tangent_pair

TWO_PI = 2.0 * math.pi


def _ident3(exact: bool) -> np.ndarray:
    if exact:
        return as_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]], exact=True)
    return np.eye(3)


class HolonomyClass(enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    CENTRAL = "central"


@dataclass(frozen=True)
class VectorHolonomy:
    """A validated element of SO+(1,2) with its trace classification."""

    matrix: np.ndarray
    klass: HolonomyClass

    @property
    def trace(self):
        m = self.matrix
        return m[0, 0] + m[1, 1] + m[2, 2]

    def inverse(self) -> "VectorHolonomy":
        return VectorHolonomy(so12_inverse(self.matrix), self.klass)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x


def so12_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse via the metric: O^{-1} = eta_T O^T eta_T."""
    if is_exact(m):
        out = m.T.copy()
        for i in range(3):
            for j in range(3):
                if (i == 0) != (j == 0):
                    out[i, j] = -out[i, j]
        return out
    return ETA_T @ m.T @ ETA_T


@dataclass(frozen=True)
class NormalData:
    """Invariant-normal data of one face holonomy.

    representative - the chosen tangent representative: a unit vector for
                     non-null lines, the logarithm-fixed scaled null
                     generator for parabolic holonomies
    causal_sign    - nu in {-1, 0, +1}, the squared norm of the unit
                     representative (0 for null)
    theta          - stabilizer coordinate: angle in [0, 2pi) if nu = -1,
                     rapidity if nu = +1, None if nu = 0 (the parabolic
                     scale lives in the representative itself)
    """

    representative: np.ndarray
    causal_sign: int
    theta: float | None

    def flipped(self) -> "NormalData":
        """The opposite branch of the same holonomy.

        Elliptic (n, theta) -> (-n, 2pi - theta); hyperbolic -> (-n, -theta);
        parabolic representatives flip in sign only (spin central freedom).
        """
        if self.causal_sign == -1:
            return NormalData(-self.representative, -1, (TWO_PI - self.theta) % TWO_PI)
        if self.causal_sign == +1:
            return NormalData(-self.representative, +1, -self.theta)
        return NormalData(-self.representative, 0, None)


def check_so12(m, tol: Tolerances = DEFAULT_TOL) -> VectorHolonomy:
    """Validate the three group conditions and classify by trace.

    Conditions: O^T eta_T O = eta_T, det O = 1, O_00 > 0.  The class follows
    the trace rule: Tr < 3 elliptic, Tr = 3 with O != id parabolic, Tr > 3
    hyperbolic, O = id central.
    """
    m = as_matrix(m, exact=True) if is_exact(np.asarray(m)) else to_float(np.asarray(m))
    if m.shape != (3, 3):
        raise MetricViolation(f"holonomy must be 3x3, got shape {m.shape}")
    exact = is_exact(m)
    eta = as_matrix([[-1, 0, 0], [0, 1, 0], [0, 0, 1]], exact=True) if exact \
        else ETA_T.astype(m.dtype)
    gram_residual = max_abs(matmul(matmul(m.T, eta), m) - eta)
    if gram_residual > (0 if exact else tol.classify):
        raise MetricViolation(f"O^T eta O - eta has max entry {gram_residual:.3e}"
                              if not exact else "exact metric condition fails",
                              residual=gram_residual)
    det = det_cofactor(m)
    if abs(det - 1) > (0 if exact else tol.classify):
        raise DetViolation(f"det O = {det!r} differs from 1", det=float(det))
    if not (m[0, 0] > 0):
        raise OrientationViolation(f"O_00 = {m[0, 0]!r} is not positive (time orientation)")

    tr = m[0, 0] + m[1, 1] + m[2, 2]
    ident_dev = max_abs(m - (_ident3(exact)))
    ctol = 0 if exact else tol.classify
    if ident_dev <= ctol:
        klass = HolonomyClass.CENTRAL
    elif abs(tr - 3) <= ctol:
        klass = HolonomyClass.PARABOLIC
    elif tr > 3:
        klass = HolonomyClass.HYPERBOLIC
    else:
        klass = HolonomyClass.ELLIPTIC
    return VectorHolonomy(m, klass)


def exp_axis(n, theta: float, tol: Tolerances = DEFAULT_TOL) -> VectorHolonomy:
    """Closed-form exponential exp(theta J(n)) around a unit non-null axis.

    id + r J(n) + q J(n)^2 with (r,q) = (sin, 1-cos) for a timelike axis and
    (sinh, cosh-1) for a spacelike axis.
    """
    n = np.asarray(n, dtype=float)
    nu = causal_class(n, tol)
    if nu == 0:
        raise NullAxis("axis is null; use exp_parabolic for the nilpotent generator")
    norm2 = tangent_pair(n, n)
    if abs(abs(norm2) - 1.0) > tol.classify:
        raise ValueError(f"axis must be unit-normalized, got <n,n> = {norm2}")
    if nu == -1:
        r, q = math.sin(theta), 1.0 - math.cos(theta)
    else:
        r, q = math.sinh(theta), math.cosh(theta) - 1.0
    j = j_map(n)
    m = np.eye(3) + r * j + q * (j @ j)
    return check_so12(m, tol)


def exp_parabolic(k, tol: Tolerances = DEFAULT_TOL) -> VectorHolonomy:
    """Truncated exponential id + J(k) + J(k)^2/2 of a nonzero null generator."""
    karr = np.asarray(k)
    exact = is_exact(karr)
    if not exact:
        karr = karr.astype(float)
    if max_abs(karr) == 0:
        raise NonNullGenerator("zero generator exponentiates to the identity (central)")
    if causal_class(karr, tol) != 0:
        raise NonNullGenerator(f"generator is not null: <k,k> = {tangent_pair(karr, karr)}")
    j = j_map(karr)
    half = Fraction(1, 2) if exact else 0.5
    m = _ident3(exact) + j + half * matmul(j, j)
    return check_so12(m, tol)


def _unit_timelike_kernel(m: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Unit-timelike generator of ker(O - id), for the elliptic half-turn."""
    mf = np.asarray(to_float(m), dtype=float)  # LAPACK path
    _, svals, vt = np.linalg.svd(mf - np.eye(3))
    v = vt[-1]
    if svals[-1] > math.sqrt(tol.classify):
        raise CentralHolonomy("no one-dimensional fixed line found")
    q = tangent_pair(v, v)
    if q >= 0:
        raise MetricViolation("half-turn fixed line is not timelike")
    n = v / math.sqrt(-q)
    # deterministic sign: positive time component
    if n[0] < 0:
        n = -n
    return n


def fixed_line(o: VectorHolonomy, tol: Tolerances = DEFAULT_TOL) -> NormalData:
    """Extract the invariant normal line and stabilizer coordinate of a holonomy.

    The antisymmetric part a = J^{-1}((O - O^{-1})/2) equals r n for a
    non-null unit axis with r = sin(theta) or sinh(theta); the extraction
    therefore fixes the branch with r > 0.  If a is null the holonomy is
    parabolic and the representative is the nilpotent logarithm
    J^{-1}(N - N^2/2), N = O - id.  If a vanishes (elliptic half-turn,
    Tr = -1) the fixed line is recovered from ker(O - id) with theta = pi.
    """
    if o.klass is HolonomyClass.CENTRAL:
        raise CentralHolonomy("central holonomy has no well-defined normal line")
    m = to_float(o.matrix)
    tr = float(m[0, 0] + m[1, 1] + m[2, 2])
    if o.klass is HolonomyClass.PARABOLIC:
        # nilpotent logarithm; exact when the input is exact
        mm = o.matrix
        exact = is_exact(mm)
        n_mat = mm - _ident3(exact)
        half = Fraction(1, 2) if exact else 0.5
        log = n_mat - half * matmul(n_mat, n_mat)
        k = j_inv(log)
        return NormalData(k, 0, None)

    a = j_inv((m - so12_inverse(m)) / 2.0)
    norm2 = tangent_pair(a, a)
    scale = float(a @ a)
    if scale <= tol.classify ** 2:
        # antisymmetric part vanishes: elliptic half-turn
        n = _unit_timelike_kernel(m, tol)
        return NormalData(n, -1, math.pi)
    if abs(float(norm2)) <= tol.classify * max(scale, 1.0):
        # numerically null antisymmetric part on a trace-parabolic element
        n_mat = m - np.eye(3, dtype=m.dtype)
        k = j_inv(n_mat - (n_mat @ n_mat) / 2.0)
        return NormalData(k, 0, None)
    r = np.sqrt(abs(norm2))
    n = a / r
    nu = 1 if norm2 > 0 else -1
    if nu == -1:
        theta = math.atan2(float(r), (tr - 1.0) / 2.0) % TWO_PI
    else:
        theta = math.asinh(float(r))
    return NormalData(n, nu, theta)


def closure_residual(holonomies) -> float:
    """Max-norm of O4 O3 O2 O1 - id for an ordered quadruple."""
    o1, o2, o3, o4 = [h.matrix for h in holonomies]
    prod = matmul(matmul(o4, o3), matmul(o2, o1))
    return max_abs(prod - _ident3(is_exact(prod)))
