"""Sector classification, flat-limit utilities, and the compact real form.

Vertex types are read off principal-minor inertias of a Gram matrix, polar
dual vertex types off the face causal signs, and the flat limit embeds
tangent data into the ambient model at a finite radius.  The Euclidean
helpers mirror the Lorentzian closure/Gram/triple tests for SO(3)/SU(2)
data, where the reconstruction becomes the compact curved-tetrahedron
statement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import DEFAULT_TOL, Tolerances, max_abs, sign_of, to_float
from .errors import NotClosing, NotRotation
from .lorentz import GramData

FINITE, IDEAL, HYPERIDEAL = "finite", "ideal", "hyperideal"
ORDINARY = "ordinary"
SPACELIKE, TIMELIKE, NULL = "spacelike", "timelike", "null"


@dataclass(frozen=True)
class SectorReport:
    """Classification of a Gram matrix into model, vertex, and face sectors."""

    model: str  # "dS3" | "AdS3" | "indeterminate"
    sigma: int | None
    vertex_types: tuple
    dual_vertex_types: tuple
    face_causal_types: tuple
    det: float
    inertia: tuple
    minor_inertias: tuple


def _vertex_type(inertia) -> str:
    if inertia.zeros > 0:
        return IDEAL
    if inertia.signature == (1, 2):
        return FINITE
    return HYPERIDEAL


def dual_vertex_type(nu: int, sigma: int) -> str:
    """Polar-dual vertex type of a face with causal sign nu in the sigma model.

    Null faces dualize to ideal vertices in both models; a timelike normal
    (nu = -1, spacelike face) is an ordinary dual vertex in AdS and
    hyperideal in dS, and vice versa for a spacelike normal.
    """
    if nu == 0:
        return IDEAL
    if nu not in (-1, +1) or sigma not in (-1, +1):
        raise ValueError(f"invalid causal/model sign pair ({nu}, {sigma})")
    return ORDINARY if nu == sigma else HYPERIDEAL


def classify_sector(gram, sigma_hint: int | None = None,
                    tol: Tolerances = DEFAULT_TOL) -> SectorReport:
    """Full sector report of a symmetric 4x4 Gram matrix.

    The model is read from -sgn(det) (indeterminate when the determinant
    vanishes within tolerance), vertex types from the minor inertias, and the
    face causal types from the diagonal.  Always returns a report.
    """
    data = gram if isinstance(gram, GramData) else GramData.from_matrix(gram, tol)
    exact = data.exact
    det = data.det
    if exact:
        s = sign_of(det)
    else:
        scale = max(1.0, max_abs(data.entries) ** 4)
        s = 0 if abs(float(det)) <= tol.residual * scale else (1 if det > 0 else -1)
    if s == 0:
        model, sigma = "indeterminate", sigma_hint
    else:
        sigma = -s
        model = "dS3" if sigma == +1 else "AdS3"

    faces = []
    for i in range(4):
        gii = data.entries[i, i]
        if exact:
            fs = sign_of(gii)
        else:
            fs = 0 if abs(float(gii)) <= tol.classify else (1 if gii > 0 else -1)
        faces.append(SPACELIKE if fs < 0 else (TIMELIKE if fs > 0 else NULL))

    vertex_types = tuple(_vertex_type(mi) for mi in data.minor_inertias)
    if sigma in (-1, +1):
        duals = tuple(dual_vertex_type({SPACELIKE: -1, TIMELIKE: +1, NULL: 0}[f], sigma)
                      for f in faces)
    else:
        duals = tuple(IDEAL if f == NULL else "indeterminate" for f in faces)
    return SectorReport(
        model=model,
        sigma=sigma,
        vertex_types=vertex_types,
        dual_vertex_types=duals,
        face_causal_types=tuple(faces),
        det=float(det),
        inertia=data.inertia.as_tuple(),
        minor_inertias=tuple(mi.as_tuple() for mi in data.minor_inertias),
    )


@dataclass(frozen=True)
class FlatFaceData:
    """One face of a flat tetrahedron: unit normal, area, support number."""

    normal: np.ndarray
    area: float
    support: float = 0.0


def flat_closure_residual(faces) -> np.ndarray:
    """Sum of area-normal vectors; zero characterizes a closing flat tetrahedron."""
    total = np.zeros(3)
    for f in faces:
        total = total + f.area * to_float(np.asarray(f.normal))
    return total


def flat_limit_normal(n, h: float, radius: float, sigma: int) -> np.ndarray:
    """Embed a flat face (normal n, support h) at curvature radius R.

    In the split V = R e + e-perp around the base point R e the ambient
    normal is n - (sigma h / R) e; pairings of two embeddings recover
    <n_i, n_j> + sigma h_i h_j / R^2 exactly.
    """
    if radius <= 0:
        raise ValueError("curvature radius must be positive")
    nf = to_float(np.asarray(n))
    radial = -sigma * h / radius
    if sigma == +1:
        # eta_+ = diag(-1,1,1,1), radial slot 3
        return np.array([nf[0], nf[1], nf[2], radial])
    # eta_- = diag(-1,-1,1,1), radial slot 1
    return np.array([nf[0], radial, nf[1], nf[2]])


def flat_family_gram(faces, radius: float, sigma: int) -> np.ndarray:
    """Gram matrix of the flat data embedded at radius R."""
    emb = [flat_limit_normal(f.normal, f.support, radius, sigma) for f in faces]
    eta = np.diag([-1.0, 1.0, 1.0, 1.0]) if sigma == +1 else np.diag([-1.0, -1.0, 1.0, 1.0])
    m = np.array(emb)
    return m @ eta @ m.T


def flat_limit_holonomy(face: FlatFaceData, radius: float) -> np.ndarray:
    """Leading-order face holonomy exp(A J(n)/R^2) of the curved family."""
    from .lorentz import j_map
    j = j_map(to_float(np.asarray(face.normal)))
    coeff = face.area / radius ** 2
    out = np.eye(3)
    term = np.eye(3)
    for k in range(1, 16):
        term = term @ (coeff * j) / k
        out = out + term
    return out


# --- Euclidean (compact) real form -------------------------------------------


@dataclass(frozen=True)
class EuclideanReport:
    """Closure/Gram/triple tests for an SO(3) quadruple with unit normals."""

    closure_residual: float
    gram: np.ndarray
    exceptional_mismatch: float
    triple_signs: tuple
    det: float
    label: str  # "spherical" | "hyperbolic" | "flat"


def check_rotation(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    m = to_float(np.asarray(m))
    if m.shape != (3, 3):
        raise NotRotation(f"rotation must be 3x3, got {m.shape}")
    if max_abs(m.T @ m - np.eye(3)) > tol.classify:
        raise NotRotation("matrix is not orthogonal")
    if np.linalg.det(m) < 0:
        raise NotRotation("matrix has determinant -1")
    return m


def euclid_tests(rotations, normals, tol: Tolerances = DEFAULT_TOL) -> EuclideanReport:
    """Compact-real-form analogue of the Lorentzian closure and Gram tests.

    Gram entries are Euclidean dot products with the transported exceptional
    entry Gamma_24 = n2 . R1 n4 (cross-checked through R3^{-1}); the four
    triple signs use the same insertion; the sign of det Gamma labels the
    spherical/hyperbolic regime exactly as -sgn(det G) selects the model in
    the Lorentzian case.
    """
    rs = [check_rotation(r, tol) for r in rotations]
    ns = [to_float(np.asarray(n)) for n in normals]
    closure = max_abs(rs[3] @ rs[2] @ rs[1] @ rs[0] - np.eye(3))

    via1 = rs[0] @ ns[3]
    via3 = rs[2].T @ ns[3]
    mismatch = abs(float(ns[1] @ via1 - ns[1] @ via3))
    gamma = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            if {i, j} == {1, 3}:
                gamma[i, j] = ns[1] @ via1
            else:
                gamma[i, j] = ns[i] @ ns[j]

    triples = (
        float(np.cross(ns[2], ns[1]) @ via3),
        float(np.cross(ns[0], ns[2]) @ ns[3]),
        float(np.cross(ns[1], ns[0]) @ via1),
        float(np.cross(ns[0], ns[1]) @ ns[2]),
    )
    signs = tuple(0 if abs(t) <= tol.classify else (1 if t > 0 else -1) for t in triples)
    det = float(np.linalg.det(gamma))
    if abs(det) <= tol.residual:
        label = "flat"
    else:
        label = "spherical" if det > 0 else "hyperbolic"
    return EuclideanReport(float(closure), gamma, mismatch, signs, det, label)


_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI = (_SIGMA_X, _SIGMA_Y, _SIGMA_Z)


def su2_lift(r, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """A unit-quaternion lift of an SO(3) rotation (largest-component pivot)."""
    m = check_rotation(r, tol)
    candidates = [
        (1.0 + m[0, 0] + m[1, 1] + m[2, 2],
         lambda t: (t, (m[2, 1] - m[1, 2]) / (4 * t), (m[0, 2] - m[2, 0]) / (4 * t),
                    (m[1, 0] - m[0, 1]) / (4 * t))),
        (1.0 + m[0, 0] - m[1, 1] - m[2, 2],
         lambda t: ((m[2, 1] - m[1, 2]) / (4 * t), t, (m[0, 1] + m[1, 0]) / (4 * t),
                    (m[0, 2] + m[2, 0]) / (4 * t))),
        (1.0 - m[0, 0] + m[1, 1] - m[2, 2],
         lambda t: ((m[0, 2] - m[2, 0]) / (4 * t), (m[0, 1] + m[1, 0]) / (4 * t), t,
                    (m[1, 2] + m[2, 1]) / (4 * t))),
        (1.0 - m[0, 0] - m[1, 1] + m[2, 2],
         lambda t: ((m[1, 0] - m[0, 1]) / (4 * t), (m[0, 2] + m[2, 0]) / (4 * t),
                    (m[1, 2] + m[2, 1]) / (4 * t), t)),
    ]
    piv, recipe = max(candidates, key=lambda c: c[0])
    t = 0.5 * math.sqrt(piv)
    w, x, y, z = recipe(t)
    u = w * np.eye(2, dtype=complex) - 1j * (x * _SIGMA_X + y * _SIGMA_Y + z * _SIGMA_Z)
    return u


def su2_project(u) -> np.ndarray:
    """Adjoint action of an SU(2) element as an SO(3) matrix."""
    u = np.asarray(u, dtype=complex)
    out = np.empty((3, 3))
    udag = u.conj().T
    for j in range(3):
        v = u @ _PAULI[j] @ udag
        for i in range(3):
            out[i, j] = 0.5 * np.trace(_PAULI[i] @ v).real
    return out


def su2_lift_closure(lifts, tol: Tolerances = DEFAULT_TOL) -> tuple[int, float]:
    """Nearest central element of U4 U3 U2 U1 and the residual to it."""
    us = [np.asarray(u, dtype=complex) for u in lifts]
    for u in us:
        if u.shape != (2, 2):
            raise NotRotation(f"SU(2) lift must be 2x2, got {u.shape}")
        if max_abs(np.abs(u.conj().T @ u - np.eye(2))) > tol.classify:
            raise NotRotation("lift is not unitary")
        if abs(np.linalg.det(u) - 1) > tol.classify:
            raise NotRotation("lift is not unimodular")
    prod = us[3] @ us[2] @ us[1] @ us[0]
    r_plus = float(np.max(np.abs(prod - np.eye(2))))
    r_minus = float(np.max(np.abs(prod + np.eye(2))))
    eps, residual = (+1, r_plus) if r_plus <= r_minus else (-1, r_minus)
    if residual > tol.closure:
        raise NotClosing(f"SU(2) product is {residual:.3e} from both central elements",
                         residual=residual)
    return eps, residual


def fix_su2_closure(lifts, tol: Tolerances = DEFAULT_TOL):
    """Flip the lowest-index lift so the closure sign becomes +1."""
    eps, _ = su2_lift_closure(lifts, tol)
    out = [np.asarray(u, dtype=complex) for u in lifts]
    signs = [1, 1, 1, 1]
    if eps == -1:
        out[0] = -out[0]
        signs[0] = -1
    return out, signs


def two_sheeted_angle_area(alpha: float, beta: float, gamma: float) -> float:
    """Holonomy area 3*pi - (alpha+beta+gamma) of a two-sheeted triangle."""
    return 3.0 * math.pi - (alpha + beta + gamma)
