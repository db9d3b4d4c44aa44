"""The converse map: from an embedded tetrahedron to its face holonomies.

Geodesic parallel transport between model points has the closed form

    P_{p->q} X = X - <X,q> / (sigma + <p,q>) (p + q),

an isometry of tangent spaces along the connecting geodesic.  The four faces
are circled by fixed based loops (base vertex V4, with the fourth face
reached through the edge E24 = F1 /\ F3), giving four holonomies of the one
tangent space at V4.  A pseudo-orthonormal frame there turns them into
SO+(1,2) matrices; the frame is either supplied by the caller or built
deterministically from the normals incident at the base vertex.

All computation here is floating point: vertex and frame normalization need
square roots, so exact inputs are converted on entry and verified against
tight tolerances instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import DEFAULT_TOL, Tolerances, to_float
from .errors import DegeneratePair, HolotetError, MetricViolation, NullFace
from .lorentz import ETA_T, congruence_diagonalize, det_cofactor, eta_ambient
from .so12 import TWO_PI, VectorHolonomy, check_so12

__all__ = [
    "Tetrahedron",
    "transport",
    "transport_matrix",
    "face_holonomies",
    "face_holonomies_full",
    "face_holonomies_repaired",
    "base_frame",
    "roundtrip",
    "RoundtripReport",
    "signed_area",
]


@dataclass(frozen=True)
class Tetrahedron:
    """A strictly convex generalized tetrahedron in the sigma model.

    normals   - outward ambient face normals N_i (rows of a 4x4 array)
    vertices  - vertices V_i opposite face F_i, with <V_i, V_i> = sigma
    supports  - h_i = <V_i, N_i>, all negative for the outward convention
    """

    sigma: int
    normals: np.ndarray
    vertices: np.ndarray
    supports: np.ndarray

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        eta = eta_ambient(self.sigma)
        for i in range(4):
            v = self.vertices[i]
            norm_dev = abs(float(v @ eta @ v) - self.sigma)
            if norm_dev > tol.classify:
                raise MetricViolation(f"vertex {i} is off the model by {norm_dev:.3e}")
            for j in range(4):
                pairing = float(v @ eta @ self.normals[j])
                if i == j:
                    if not pairing < 0:
                        raise MetricViolation(f"support h_{i} = {pairing} is not negative")
                elif abs(pairing) > tol.classify * max(1.0, float(np.abs(v).max())):
                    raise MetricViolation(
                        f"vertex {i} does not lie on face {j}: <V,N> = {pairing:.3e}")


def _scalar_ld(x) -> np.longdouble:
    """Lossless-as-possible conversion of an exact or float scalar to longdouble."""
    if isinstance(x, Fraction):
        return np.longdouble(x.numerator) / np.longdouble(x.denominator)
    return np.longdouble(float(x)) if not isinstance(x, np.longdouble) else x


def transport(p, q, x, sigma: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Parallel transport of a tangent vector x at p to the tangent space at q."""
    return transport_matrix(p, q, sigma, tol) @ to_float(np.asarray(x))


def transport_matrix(p, q, sigma: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """4x4 matrix of P_{p->q} acting on ambient vectors (restricted to T_p)."""
    p = to_float(np.asarray(p))
    q = to_float(np.asarray(q))
    eta = eta_ambient(sigma).astype(p.dtype)
    denom = sigma + p @ eta @ q
    if abs(float(denom)) <= tol.classify:
        raise DegeneratePair(f"transport denominator sigma + <p,q> = {float(denom):.3e} vanishes")
    return np.eye(4, dtype=p.dtype) - np.outer(p + q, eta @ q) / denom


def base_frame(tetra: Tetrahedron, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Deterministic oriented pseudo-orthonormal frame at the base vertex V4.

    Columns (f0, f1, f2) span T_{V4} with <f0,f0> = -1, <f1,f1> = <f2,f2> = +1,
    built from the three normals incident at V4 by congruence elimination and
    oriented so that det(V4, f0, f1, f2) > 0 in ambient coordinates.
    """
    v = to_float(tetra.vertices[3])
    eta = eta_ambient(tetra.sigma).astype(v.dtype)
    basis = to_float(tetra.normals[:3]).T  # 4x3, columns N1,N2,N3 tangent at V4
    gram = basis.T @ eta @ basis
    w, d = congruence_diagonalize(gram, tol)
    cols = basis @ w
    order = np.argsort(d)  # timelike direction first
    frame = []
    for idx in order:
        c = cols[:, idx]
        norm2 = c @ eta @ c
        f = c / np.sqrt(abs(norm2))
        lead = f[np.argmax(np.abs(f))]
        if lead < 0:
            f = -f
        frame.append(f)
    e = np.column_stack(frame)
    if det_cofactor(np.column_stack([v, e])) < 0:
        e[:, 2] = -e[:, 2]
    return e


def _frame_projector(e: np.ndarray, sigma: int) -> np.ndarray:
    """phi = eta_T E^T eta_sigma, the inverse of the frame on its tangent space."""
    return ETA_T.astype(e.dtype) @ e.T @ eta_ambient(sigma).astype(e.dtype)


def face_holonomies_full(tetra: Tetrahedron, frame: np.ndarray | None = None,
                         tol: Tolerances = DEFAULT_TOL,
                         vertex_flips: tuple = (1, 1, 1, 1)):
    """Based face holonomies plus the frame and based normal representatives.

    Loop words (composition right to left, o_ab transporting T_{V_b} -> T_{V_a}):

        O1 = o43 o32 o24        O2 = o41 o13 o34        O3 = o42 o21 o14
        O4 = o42 o23 o31 o12 o24

    Every holonomy acts on T_{V4}; the 3x3 matrices are its components in the
    given frame.  The based representatives are N1, N2, N3 read at V4 and N4
    transported along the edge E24, all in frame components.

    ``vertex_flips`` selects antipodal vertex representatives for the edge
    transports only (the hyperplanes, hence the normals each loop fixes, do
    not change).  Generalized tetrahedra whose edges pass through infinity
    need such a projective-branch choice for the chord transports to compose
    into SO+(1,2) elements; see face_holonomies_repaired.
    """
    v = to_float(tetra.vertices) * np.asarray(vertex_flips, dtype=float)[:, None]
    sigma = tetra.sigma
    if frame is None:
        frame = base_frame(tetra, tol)
    phi = _frame_projector(frame, sigma)

    def o(a: int, b: int) -> np.ndarray:
        # transport along the oriented edge (ab): source V_b, target V_a
        return transport_matrix(v[b - 1], v[a - 1], sigma, tol)

    loops = [
        o(4, 3) @ o(3, 2) @ o(2, 4),
        o(4, 1) @ o(1, 3) @ o(3, 4),
        o(4, 2) @ o(2, 1) @ o(1, 4),
        o(4, 2) @ o(2, 3) @ o(3, 1) @ o(1, 2) @ o(2, 4),
    ]
    holos = [check_so12(phi @ ell @ frame, tol) for ell in loops]

    normals = to_float(tetra.normals)
    based = [phi @ normals[i] for i in range(3)]
    based.append(phi @ (o(4, 2) @ normals[3]))
    return holos, frame, based


# global antipodal flip is a gauge transformation, so V1's sign can stay fixed
_FLIP_PATTERNS = tuple(sorted(
    ((1,) + rest for rest in itertools.product((1, -1), repeat=3)),
    key=lambda f: (f.count(-1), f)))


def face_holonomies_repaired(tetra: Tetrahedron, frame: np.ndarray | None = None,
                             tol: Tolerances = DEFAULT_TOL):
    """Face holonomies with a deterministic projective-branch repair.

    Tries antipodal vertex-representative patterns in order of fewest flips
    (the identity pattern first, so ordinary strictly convex tetrahedra are
    untouched) and returns the first whose four loop maps all validate as
    SO+(1,2) elements.  Returns (holonomies, frame, based_normals, flips).
    """
    last_error: HolotetError | None = None
    for flips in _FLIP_PATTERNS:
        try:
            holos, frame_used, based = face_holonomies_full(tetra, frame, tol, flips)
            return holos, frame_used, based, flips
        except HolotetError as exc:
            last_error = exc
    raise last_error


def face_holonomies(tetra: Tetrahedron, frame: np.ndarray | None = None,
                    tol: Tolerances = DEFAULT_TOL) -> list[VectorHolonomy]:
    """The four based face holonomies of a tetrahedron (see face_holonomies_full)."""
    holos, _, _, _ = face_holonomies_repaired(tetra, frame, tol)
    return holos


@dataclass(frozen=True)
class RoundtripReport:
    """Gram -> tetrahedron -> holonomies -> Gram comparison."""

    sigma: int
    tetrahedron: Tetrahedron
    holonomies: list
    lifts: list
    spin_closure_sign: int
    representative_flips: tuple
    closure_residual: float
    gram_in: object
    gram_out: object
    gram_deviation: float
    det_deviation: float
    minor_deviations: tuple


def roundtrip(gram: np.ndarray, sigma: int, tol: Tolerances = DEFAULT_TOL) -> RoundtripReport:
    """Realize a Gram matrix, compute its face holonomies, and rebuild the Gram.

    The input must have the inertia of eta_sigma with every vertex minor of
    inertia (1,2).  Normals are realized by Sylvester factorization, vertices
    signed to negative supports, and the face holonomies computed with the
    projective-branch repair of face_holonomies_repaired.  The extracted
    non-null representatives are sign-aligned against the transported input
    normals before the Gram is rebuilt (null representatives carry no sign
    freedom), so the report's entrywise deviation is meaningful for
    generalized configurations as well.
    """
    from .lorentz import GramData, sylvester_factor
    from .reconstruct import reconstructed_gram, vertices_from_normals
    from .sl2r import lift, spin_closure, fix_spin_closure
    from .so12 import closure_residual, fixed_line

    gram_in = gram if isinstance(gram, GramData) else GramData.from_matrix(gram, tol)
    # extended precision keeps the back-substituted determinant sharp even for
    # large integer Gram tables
    work = to_float(gram_in.entries, dtype=np.longdouble)
    n_cols = sylvester_factor(work, sigma, tol)
    normals = n_cols.T
    vertices, supports = vertices_from_normals(normals, sigma, tol)
    tetra = Tetrahedron(sigma, normals, vertices, supports)
    tetra.validate(tol)

    holos, _, based, flips = face_holonomies_repaired(tetra, None, tol)
    closure = closure_residual(holos)
    lifts, _ = fix_spin_closure([lift(o, tol) for o in holos], tol)
    eps, _ = spin_closure(lifts, tol)

    reps = []
    for i, o in enumerate(holos):
        nd = fixed_line(o, tol)
        if nd.causal_sign != 0 and float(np.dot(nd.representative, based[i])) < 0:
            nd = nd.flipped()
        reps.append(nd)
    gram_out, _ = reconstructed_gram(reps, holos[0], holos[2], tol)

    g_in_f = to_float(gram_in.entries, dtype=np.longdouble)
    g_out_f = to_float(gram_out.entries, dtype=np.longdouble)
    dev = float(np.max(np.abs(g_out_f - g_in_f)))
    det_dev = float(abs(gram_out.det - _scalar_ld(gram_in.det)))
    minor_devs = tuple(float(abs(a - _scalar_ld(b)))
                       for a, b in zip(gram_out.minors, gram_in.minors))
    return RoundtripReport(
        sigma=sigma,
        tetrahedron=tetra,
        holonomies=holos,
        lifts=lifts,
        spin_closure_sign=eps,
        representative_flips=flips,
        closure_residual=float(closure),
        gram_in=gram_in,
        gram_out=gram_out,
        gram_deviation=dev,
        det_deviation=det_dev,
        minor_deviations=minor_devs,
    )


def signed_area(theta: float, nu: int, sigma: int, branch: int = +1) -> float:
    """Algebraic oriented area of a non-null face from its stabilizer coordinate.

    Inverts theta = branch * sigma * area; elliptic faces (nu = -1) report
    the representative in [0, 2pi).
    """
    if nu == 0:
        raise NullFace("null faces carry no unit normal and no scalar area")
    if nu not in (-1, +1):
        raise ValueError(f"causal sign must be -1, 0, or +1, got {nu}")
    area = branch * sigma * theta
    if nu == -1:
        area %= TWO_PI
    return area
