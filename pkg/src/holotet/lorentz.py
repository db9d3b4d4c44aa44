"""Tangent and ambient Lorentzian linear algebra.

The tangent model is (R^{1,2}, eta_T = diag(-1,1,1)) with the cross product

    (u x w)^mu = eta_T^{mu lam} eps_{lam nu rho} u^nu w^rho,   eps_012 = +1,

so that <u x w, z> = det(u, w, z) in every positively oriented
pseudo-orthonormal frame.  The ambient model is (R^4, eta_sigma) with
eta_+ = diag(-1,1,1,1) and eta_- = diag(-1,-1,1,1).

The module also provides symmetric-matrix inertia (exact congruence
elimination and floating eigenvalue counting), an indefinite Sylvester
factorization of a Gram matrix into ambient normals, and the ``GramData``
bundle of determinant, principal minors, and their inertias.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import (
    DEFAULT_TOL,
    Tolerances,
    canon,
    canon_matrix,
    exact_sqrt,
    identity_like,
    is_exact,
    matmul,
    max_abs,
    sign_of,
    to_float,
)
from .errors import DegenerateGram, InertiaMismatch, ModelMismatch, NotSymmetric

ETA_T = np.diag([-1.0, 1.0, 1.0])


def eta_ambient(sigma: int, exact: bool = False) -> np.ndarray:
    """Ambient metric: diag(-1,1,1,1) for sigma=+1, diag(-1,-1,1,1) for sigma=-1."""
    if sigma not in (+1, -1):
        raise ValueError(f"model sign must be +1 or -1, got {sigma}")
    diag = [-1, 1, 1, 1] if sigma == +1 else [-1, -1, 1, 1]
    if exact:
        m = np.zeros((4, 4), dtype=object)
        for i, d in enumerate(diag):
            for j in range(4):
                m[i, j] = Fraction(d) if i == j else Fraction(0)
        return m
    return np.diag([float(d) for d in diag])


def tangent_pair(u, w):
    """Lorentzian tangent pairing u^T eta_T w."""
    return canon(-u[0] * w[0] + u[1] * w[1] + u[2] * w[2])


def ambient_pair(x, y, sigma_x: int, sigma_y: int | None = None):
    """Ambient pairing x^T eta_sigma y; both vectors must live in one model."""
    if sigma_y is not None and sigma_x != sigma_y:
        raise ModelMismatch(f"cannot pair sigma={sigma_x} with sigma={sigma_y} vectors")
    if sigma_x == +1:
        return canon(-x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3])
    if sigma_x == -1:
        return canon(-x[0] * y[0] - x[1] * y[1] + x[2] * y[2] + x[3] * y[3])
    raise ValueError(f"model sign must be +1 or -1, got {sigma_x}")


def cross(u, w) -> np.ndarray:
    """Lorentzian cross product on R^{1,2}."""
    out = [
        u[2] * w[1] - u[1] * w[2],
        u[2] * w[0] - u[0] * w[2],
        u[0] * w[1] - u[1] * w[0],
    ]
    dtype = object if (is_exact(np.asarray(u)) or is_exact(np.asarray(w))) else float
    return np.array([canon(c) for c in out], dtype=dtype)


def triple(u, w, z):
    """Scalar triple product <u x w, z> = det of the column matrix (u,w,z)."""
    return tangent_pair(cross(u, w), z)


def j_map(u) -> np.ndarray:
    """Matrix J(u) with J(u)w = u x w; satisfies J(u)^3 = <u,u> J(u)."""
    zero = u[0] * 0
    rows = [
        [zero, u[2], -u[1]],
        [u[2], zero, -u[0]],
        [-u[1], u[0], zero],
    ]
    dtype = object if is_exact(np.asarray(u)) else float
    return np.array(rows, dtype=dtype)


def j_inv(a: np.ndarray) -> np.ndarray:
    """Inverse of j_map on so(1,2), averaging the redundant entries."""
    half = Fraction(1, 2) if is_exact(a) else 0.5
    u0 = (a[2, 1] - a[1, 2]) * half
    u1 = (-a[0, 2] - a[2, 0]) * half
    u2 = (a[0, 1] + a[1, 0]) * half
    dtype = object if is_exact(a) else float
    return np.array([canon(u0), canon(u1), canon(u2)], dtype=dtype)


def causal_class(u, tol: Tolerances = DEFAULT_TOL) -> int:
    """Causal sign of a tangent vector: -1 timelike, 0 null, +1 spacelike.

    Null detection in float mode is relative to the squared norm scale.
    """
    q = tangent_pair(u, u)
    if is_exact(np.asarray(u)):
        return sign_of(q)
    scale = max(float(np.dot(to_float(np.asarray(u)), to_float(np.asarray(u)))), 1.0)
    if abs(q) <= tol.classify * scale:
        return 0
    return 1 if q > 0 else -1


@dataclass(frozen=True)
class Inertia:
    """Eigenvalue sign counts (zeros, negatives, positives) of a symmetric matrix."""

    zeros: int
    negatives: int
    positives: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.zeros, self.negatives, self.positives)

    @property
    def signature(self) -> tuple[int, int]:
        """(negatives, positives) pair for a nondegenerate matrix."""
        return (self.negatives, self.positives)


def _check_symmetric(m: np.ndarray, tol: Tolerances) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise NotSymmetric(f"matrix of shape {m.shape} is not square")
    if is_exact(m):
        m = canon_matrix(m)
        for i in range(n):
            for j in range(i + 1, n):
                if m[i, j] != m[j, i]:
                    raise NotSymmetric(f"exact entries ({i},{j}) and ({j},{i}) differ")
        return m
    skew = max_abs(m - m.T)
    scale = max(max_abs(m), 1.0)
    if skew > tol.residual * scale:
        raise NotSymmetric(f"asymmetry {skew:.3e} exceeds tolerance")
    return (m + m.T) / 2.0


def congruence_diagonalize(m: np.ndarray, tol: Tolerances = DEFAULT_TOL):
    """Symmetric congruence diagonalization: returns (w, d) with w^T m w = diag(d).

    Pivots on the largest remaining |diagonal|; a fully zero diagonal with a
    nonzero off-diagonal entry is repaired by the standard symmetric
    row/column combination before pivoting.  Runs unchanged on exact and
    float backends; the float zero threshold is relative to the input scale.
    """
    g = _check_symmetric(m, tol)
    exact = is_exact(g)
    g = g.copy()
    n = g.shape[0]
    w = identity_like(g) if exact else np.eye(n, dtype=g.dtype)
    scale = max(max_abs(g), 1.0)
    thresh = 0 if exact else tol.residual * scale

    def is_zero(x) -> bool:
        return (canon(x) == 0) if exact else (abs(x) <= thresh)

    for k in range(n):
        # largest remaining diagonal pivot
        p = max(range(k, n), key=lambda i: abs(g[i, i]))
        if is_zero(g[p, p]):
            # all diagonals vanish; find a nonzero off-diagonal partner
            best = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if best is None or abs(g[i, j]) > abs(g[best[0], best[1]]):
                        best = (i, j)
            if best is None or is_zero(g[best[0], best[1]]):
                break  # remaining block is zero
            i, j = best
            # row/col combination: col_i += col_j, row_i += row_j
            g[:, i] = g[:, i] + g[:, j]
            g[i, :] = g[i, :] + g[j, :]
            w[:, i] = w[:, i] + w[:, j]
            if exact:
                g = canon_matrix(g)
            p = max(range(k, n), key=lambda x: abs(g[x, x]))
        if p != k:
            g[:, [k, p]] = g[:, [p, k]]
            g[[k, p], :] = g[[p, k], :]
            w[:, [k, p]] = w[:, [p, k]]
        pivot = g[k, k]
        for i in range(k + 1, n):
            if is_zero(g[i, k]):
                continue
            c = g[i, k] / pivot
            g[:, i] = g[:, i] - c * g[:, k]
            g[i, :] = g[i, :] - c * g[k, :]
            w[:, i] = w[:, i] - c * w[:, k]
        if exact:
            g = canon_matrix(g)
            w = canon_matrix(w)
    d = np.array([g[i, i] for i in range(n)], dtype=object if exact else g.dtype)
    return w, d


def inertia_congruence(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> Inertia:
    """Inertia by symmetric congruence elimination (no eigenvalues)."""
    _, d = congruence_diagonalize(m, tol)
    if is_exact(d):
        signs = [sign_of(x) for x in d]
    else:
        scale = max(max_abs(m), 1.0)
        signs = [0 if abs(x) <= tol.residual * scale else (1 if x > 0 else -1) for x in d]
    return Inertia(signs.count(0), signs.count(-1), signs.count(1))


def inertia_eig(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> Inertia:
    """Inertia by eigenvalue counting (floating backend)."""
    mf = _check_symmetric(np.asarray(to_float(m), dtype=float), tol)
    eig = np.linalg.eigvalsh(mf)
    scale = max(float(np.max(np.abs(eig))), 1.0) if eig.size else 1.0
    zeros = int(np.sum(np.abs(eig) <= tol.residual * scale))
    neg = int(np.sum(eig < -tol.residual * scale))
    pos = int(np.sum(eig > tol.residual * scale))
    return Inertia(zeros, neg, pos)


def inertia_of(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> Inertia:
    """Backend-dispatching inertia: exact congruence or float eigenvalue count."""
    if is_exact(m):
        return inertia_congruence(m, tol)
    return inertia_eig(m, tol)


def det_cofactor(m: np.ndarray):
    """Determinant by cofactor expansion; exact on the exact backend."""
    n = m.shape[0]
    if n == 1:
        return canon(m[0, 0])
    if n == 2:
        return canon(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    total = m[0, 0] * 0
    cols = list(range(n))
    for j in range(n):
        minor = m[1:][:, [c for c in cols if c != j]]
        term = m[0, j] * det_cofactor(minor)
        total = total + (term if j % 2 == 0 else -term)
    return canon(total)


def principal_minors(g: np.ndarray, tol: Tolerances = DEFAULT_TOL):
    """det(G_i-hat) and In(G_i-hat) for i = 0..3, deleting row/column i."""
    n = g.shape[0]
    dets, inertias = [], []
    for i in range(n):
        keep = [j for j in range(n) if j != i]
        sub = g[np.ix_(keep, keep)]
        dets.append(det_cofactor(sub))
        inertias.append(inertia_of(sub, tol))
    return dets, inertias


@dataclass(frozen=True)
class GramData:
    """Symmetric 4x4 Gram matrix with derived determinant/minor/inertia data."""

    entries: np.ndarray
    det: object
    minors: tuple
    inertia: Inertia
    minor_inertias: tuple

    @classmethod
    def from_matrix(cls, m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> "GramData":
        g = _check_symmetric(m, tol)
        dets, inertias = principal_minors(g, tol)
        return cls(
            entries=g,
            det=det_cofactor(g),
            minors=tuple(dets),
            inertia=inertia_of(g, tol),
            minor_inertias=tuple(inertias),
        )

    @property
    def exact(self) -> bool:
        return is_exact(self.entries)


def mat_inv(m: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting, dtype-preserving.

    Exact matrices stay exact; floating matrices keep their precision
    (including extended dtypes that LAPACK would reject).
    """
    exact = is_exact(m)
    n = m.shape[0]
    a = canon_matrix(m.copy()) if exact else m.astype(m.dtype, copy=True)
    inv = identity_like(m) if exact else np.eye(n, dtype=m.dtype)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i, k]))
        if (canon(a[p, k]) == 0) if exact else (a[p, k] == 0):
            raise DegenerateGram("matrix is singular")
        if p != k:
            a[[k, p], :] = a[[p, k], :]
            inv[[k, p], :] = inv[[p, k], :]
        pivot = a[k, k]
        a[k, :] = a[k, :] / pivot
        inv[k, :] = inv[k, :] / pivot
        for i in range(n):
            if i == k:
                continue
            c = a[i, k]
            if (canon(c) == 0) if exact else (c == 0):
                continue
            a[i, :] = a[i, :] - c * a[k, :]
            inv[i, :] = inv[i, :] - c * inv[k, :]
        if exact:
            a = canon_matrix(a)
            inv = canon_matrix(inv)
    return inv


def sylvester_factor(g: np.ndarray, sigma: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Factor a nondegenerate Gram matrix as N^T eta_sigma N.

    Returns the 4x4 matrix whose columns are ambient normals N_1..N_4, one
    deterministic representative of the O_sigma orbit.  Exact inputs stay
    exact when every congruence pivot has a rational square root; otherwise
    the computation falls back to floats.
    """
    g_in = _check_symmetric(g, tol)
    target = Inertia(0, 1, 3) if sigma == +1 else Inertia(0, 2, 2)
    found = inertia_of(g_in, tol)
    if found.zeros > 0:
        raise DegenerateGram(f"Gram matrix is degenerate: inertia {found.as_tuple()}")
    if found != target:
        raise InertiaMismatch(
            f"inertia {found.signature} does not match eta_sigma for sigma={sigma:+d}",
            inertia=found.as_tuple(), sigma=sigma)

    w, d = congruence_diagonalize(g_in, tol)
    exact = is_exact(g_in)
    if exact:
        roots = [exact_sqrt(abs(x)) for x in d]
        if any(r is None for r in roots):
            return sylvester_factor(to_float(g_in), sigma, tol)
        w_inv = mat_inv(w)
        scale = np.array([[roots[i] if i == j else Fraction(0) for j in range(4)]
                          for i in range(4)], dtype=object)
    else:
        w_inv = mat_inv(w)
        scale = np.diag(np.sqrt(np.abs(d)))

    # permute elimination slots so the sign pattern matches eta_sigma
    eta_signs = [-1, 1, 1, 1] if sigma == +1 else [-1, -1, 1, 1]
    d_signs = [sign_of(x) if exact else (1 if x > 0 else -1) for x in d]
    neg_slots = [i for i, s in enumerate(eta_signs) if s < 0]
    pos_slots = [i for i, s in enumerate(eta_signs) if s > 0]
    perm = np.zeros((4, 4), dtype=object if exact else float)
    one = Fraction(1) if exact else 1.0
    for i, s in enumerate(d_signs):
        slot = neg_slots.pop(0) if s < 0 else pos_slots.pop(0)
        perm[slot, i] = one
    if exact:
        zero = Fraction(0)
        perm = np.vectorize(lambda v: v if v != 0 else zero, otypes=[object])(perm)

    n = matmul(matmul(perm, scale), w_inv)
    return n
