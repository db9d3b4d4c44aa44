"""Reconstruction pipeline: four closing holonomies to a convex tetrahedron.

Stages: validate and classify the inputs, extract invariant normal data,
form the reconstructed Gram matrix (with the transported exceptional entry
for the face pair (2,4)) and the four vertex triple products, select the
outward branch, read the model sign off det G, factor the Gram into ambient
normals, intersect hyperplanes into vertices, and finally verify that the
face holonomies of the result reproduce the inputs.

Every inequality threshold comes from the tolerance context; near-degenerate
data raise typed errors carrying the raw values instead of being clamped.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .backend import DEFAULT_TOL, Tolerances, is_exact, max_abs, sign_of, to_float
from .errors import (
    CentralHolonomy,
    ClosureViolation,
    ExceptionalEntryMismatch,
    FlatOrDegenerate,
    InadmissibleParabolicBranch,
    InertiaMismatch,
    InputDocumentError,
    WrongCausalVertexLine,
    ZeroTriple,
)
from .forward import Tetrahedron, face_holonomies_repaired
from .lorentz import (
    GramData,
    cross,
    det_cofactor,
    eta_ambient,
    j_map,
    sylvester_factor,
    tangent_pair,
    triple,
)
from .sl2r import fix_spin_closure, project, traceless_vector
from .so12 import (
    TWO_PI,
    HolonomyClass,
    NormalData,
    VectorHolonomy,
    closure_residual,
    exp_axis,
    fixed_line,
)


@dataclass(frozen=True)
class Diagnostics:
    """Residuals measured while reconstructing."""

    closure_residual: float
    exceptional_mismatch: float
    holonomy_match_residual: float
    minor_identity_residual: float


@dataclass(frozen=True)
class ReconstructionReport:
    """Full output of the reconstruction pipeline.

    normals carry the branch-selected representatives; chi are the corrected
    (all positive) triple products; branch_signs are the applied flips
    relative to the raw extraction; central_signs (spin input only) are the
    central-sign choices applied to the lifts.
    """

    normals: tuple
    gram: GramData
    chi: tuple
    branch_signs: tuple
    sigma: int
    tetrahedron: Tetrahedron
    face_classes: tuple
    diagnostics: Diagnostics
    central_signs: tuple | None = None

    @property
    def supports(self) -> np.ndarray:
        return self.tetrahedron.supports


def _transported_fourth(normals, o1: VectorHolonomy, o3: VectorHolonomy):
    """The two transport routes of the fourth representative to face 2."""
    n4 = normals[3].representative
    via_o1 = o1.matrix @ n4
    via_o3 = o3.inverse().matrix @ n4
    return via_o1, via_o3


def reconstructed_gram(normals, o1: VectorHolonomy, o3: VectorHolonomy,
                       tol: Tolerances = DEFAULT_TOL):
    """Gram matrix of the transported representatives.

    All entries are plain pairings except (2,4)/(4,2), which inserts the
    first holonomy: G_24 = <n_2, O_1 n_4>.  The equivalent route through
    O_3^{-1} is also computed; returns (GramData, route_mismatch) and raises
    if the two routes disagree beyond tolerance (non-closing or corrupted
    input).
    """
    reps = [nd.representative for nd in normals]
    exact = all(is_exact(np.asarray(r)) for r in reps)
    via_o1, via_o3 = _transported_fourth(normals, o1, o3)
    g24 = tangent_pair(reps[1], via_o1)
    g24_alt = tangent_pair(reps[1], via_o3)
    mismatch = abs(float(g24 - g24_alt))
    scale = max(1.0, abs(float(g24)))
    if mismatch > (0 if exact else tol.exceptional * scale):
        raise ExceptionalEntryMismatch(
            f"exceptional entry routes differ by {mismatch:.3e}",
            via_first=float(g24), via_third_inverse=float(g24_alt))
    n = len(reps)
    entries = np.empty((n, n), dtype=object if exact else float)
    for i in range(n):
        for j in range(n):
            if {i, j} == {1, 3}:
                entries[i, j] = g24
            else:
                entries[i, j] = tangent_pair(reps[i], reps[j])
    return GramData.from_matrix(entries, tol), mismatch


def triple_products(normals, o1: VectorHolonomy, o3: VectorHolonomy):
    """Vertex triple products of the transported representatives.

    chi_1 = <n3 x n2, O3^{-1} n4>, chi_2 = <n1 x n3, n4>,
    chi_3 = <n2 x n1, O1 n4>,      chi_4 = <n1 x n2, n3>.
    """
    n1, n2, n3 = (normals[i].representative for i in range(3))
    via_o1, via_o3 = _transported_fourth(normals, o1, o3)
    return (
        tangent_pair(cross(n3, n2), via_o3),
        triple(n1, n3, normals[3].representative),
        tangent_pair(cross(n2, n1), via_o1),
        triple(n1, n2, n3),
    )


def select_branch(chi, tol: Tolerances = DEFAULT_TOL):
    """Unique sign flips making all four triple products positive.

    With s_i = sgn(chi_i) and S = prod s_p, the flips are delta_i = S s_i and
    the corrected products are chi_i' = (prod_{p != i} delta_p) chi_i = |chi_i|.
    """
    signs = []
    for i, c in enumerate(chi):
        if abs(float(c)) <= tol.classify:
            raise ZeroTriple(f"triple product chi_{i + 1} = {float(c):.3e} vanishes",
                             chi=[float(x) for x in chi])
        signs.append(1 if float(c) > 0 else -1)
    s_total = signs[0] * signs[1] * signs[2] * signs[3]
    deltas = tuple(s_total * s for s in signs)
    corrected = []
    for i, c in enumerate(chi):
        factor = 1
        for p in range(4):
            if p != i:
                factor *= deltas[p]
        corrected.append(factor * c)
    return deltas, tuple(corrected)


def admissible_completion(chi, flippable, tol: Tolerances = DEFAULT_TOL):
    """Enumerate sign completions of the flippable faces; all-positive wins.

    Frozen faces keep delta = +1.  Returns the unique completing pattern or
    None when no completion makes every triple product positive.
    """
    for i, c in enumerate(chi):
        if abs(float(c)) <= tol.classify:
            raise ZeroTriple(f"triple product chi_{i + 1} = {float(c):.3e} vanishes",
                             chi=[float(x) for x in chi])
    free = [i for i in range(4) if flippable[i]]
    for assignment in itertools.product((1, -1), repeat=len(free)):
        deltas = [1, 1, 1, 1]
        for idx, d in zip(free, assignment):
            deltas[idx] = d
        ok = True
        for q in range(4):
            factor = 1
            for p in range(4):
                if p != q:
                    factor *= deltas[p]
            if factor * float(chi[q]) <= 0:
                ok = False
                break
        if ok:
            return tuple(deltas)
    return None


def branch_correct_normals(normals, o1, o3, tol: Tolerances = DEFAULT_TOL,
                           allow_null_flip: bool = False, require: bool = True):
    """Apply the outward branch selection to raw normal data.

    Null representatives are frozen unless ``allow_null_flip`` (the spin
    presentation's central freedom).  With ``require`` a missing completion
    raises InadmissibleParabolicBranch; otherwise the raw data come back
    unchanged with identity flips.
    """
    chi = triple_products(normals, o1, o3)
    flippable = [allow_null_flip or nd.causal_sign != 0 for nd in normals]
    deltas = admissible_completion(chi, flippable, tol)
    if deltas is None:
        if require:
            raise InadmissibleParabolicBranch(
                "no sign completion of the non-null representatives makes all "
                "triple products positive", chi=[float(c) for c in chi])
        return list(normals), (1, 1, 1, 1)
    corrected = [nd if d == 1 else nd.flipped() for nd, d in zip(normals, deltas)]
    return corrected, deltas


def model_sign(gram: GramData, tol: Tolerances = DEFAULT_TOL) -> int:
    """Model selection: sigma = -sgn(det G), requiring Lorentzian inertia."""
    det = gram.det
    if gram.exact:
        s = sign_of(det)
    else:
        s = 0 if abs(float(det)) <= tol.residual else (1 if det > 0 else -1)
    if s == 0:
        raise FlatOrDegenerate(f"det G = {float(det):.3e} is numerically zero",
                               det=float(det))
    sigma = -s
    signature = gram.inertia.signature
    if gram.inertia.zeros or signature not in ((1, 3), (2, 2)):
        raise InertiaMismatch(
            f"Gram inertia {gram.inertia.as_tuple()} is not Lorentzian-ambient",
            inertia=gram.inertia.as_tuple())
    return sigma


def vertices_from_normals(normals: np.ndarray, sigma: int,
                          tol: Tolerances = DEFAULT_TOL):
    """Vertices dual to ambient normal triples, signed to negative supports.

    Vertex V_i spans the orthogonal complement of the other three normals,
    normalized to <V_i,V_i> = sigma and directed so h_i = <V_i,N_i> < 0.
    A complement line of the wrong causal sign (ideal or hyperideal vertex)
    raises WrongCausalVertexLine.
    """
    nf = to_float(np.asarray(normals))
    eta = eta_ambient(sigma)
    eta_diag = np.diag(eta).astype(nf.dtype)
    vertices = np.zeros((4, 4), dtype=nf.dtype)
    supports = np.zeros(4, dtype=nf.dtype)
    for i in range(4):
        others = [j for j in range(4) if j != i]
        block = nf[others].T  # 4x3, columns are the three normals
        cov = np.array([((-1.0) ** row) * det_cofactor(np.delete(block, row, axis=0))
                        for row in range(4)], dtype=nf.dtype)
        w = eta_diag * cov  # eta is diagonal +-1, so eta^{-1} = eta
        q = w @ (eta_diag * w)
        scale = max(float(w @ w), 1e-300)
        if abs(float(q)) <= tol.classify * scale:
            raise WrongCausalVertexLine(
                f"vertex line {i + 1} is null (ideal vertex)", index=i, norm=float(q))
        if (q > 0) != (sigma > 0):
            raise WrongCausalVertexLine(
                f"vertex line {i + 1} has causal sign {'+' if q > 0 else '-'}1, "
                f"which does not match sigma = {sigma:+d} (hyperideal vertex)",
                index=i, norm=float(q))
        v = w / np.sqrt(abs(q))
        h = v @ (eta_diag * nf[i])
        if abs(float(h)) <= tol.classify:
            raise FlatOrDegenerate(f"support number h_{i + 1} vanishes", index=i)
        if h > 0:
            v, h = -v, -h
        vertices[i] = v
        supports[i] = h
    return vertices, supports


def _verification_frame(normals, ambient_normals: np.ndarray) -> np.ndarray:
    """Frame at V4 mapping the first three ambient normals onto the model reps."""
    m = np.column_stack([to_float(np.asarray(normals[i].representative))
                         for i in range(3)])
    n_tilde = to_float(ambient_normals[:3]).T
    return n_tilde @ np.linalg.inv(m)


def _pipeline(raw_normals, holonomies, tol: Tolerances, allow_null_flip: bool):
    o1, o3 = holonomies[0], holonomies[2]
    normals, deltas = branch_correct_normals(raw_normals, o1, o3, tol,
                                             allow_null_flip=allow_null_flip)
    chi = triple_products(normals, o1, o3)
    gram, mismatch = reconstructed_gram(normals, o1, o3, tol)
    sigma = model_sign(gram, tol)

    minor_residual = max(abs(float(gram.minors[i]) + float(chi[i]) ** 2)
                         for i in range(4))

    n_cols = to_float(sylvester_factor(gram.entries, sigma, tol))
    ambient_normals = n_cols.T
    vertices, supports = vertices_from_normals(ambient_normals, sigma, tol)
    tetra = Tetrahedron(sigma, ambient_normals, vertices, supports)
    tetra.validate(tol)

    frame = _verification_frame(normals, ambient_normals)
    forward_holos, _, _, _ = face_holonomies_repaired(tetra, frame, tol)
    match = max(max_abs(to_float(f.matrix) - to_float(o.matrix))
                for f, o in zip(forward_holos, holonomies))

    return ReconstructionReport(
        normals=tuple(normals),
        gram=gram,
        chi=tuple(chi),
        branch_signs=tuple(deltas),
        sigma=sigma,
        tetrahedron=tetra,
        face_classes=tuple(h.klass for h in holonomies),
        diagnostics=Diagnostics(
            closure_residual=float(closure_residual(holonomies)),
            exceptional_mismatch=float(mismatch),
            holonomy_match_residual=float(match),
            minor_identity_residual=float(minor_residual),
        ),
    )


def reconstruct(holonomies, tol: Tolerances = DEFAULT_TOL) -> ReconstructionReport:
    """Reconstruct the unique convex tetrahedron from four closing holonomies.

    Parabolic representatives are the logarithm-fixed null generators and are
    never sign-flipped; if no sign completion of the non-null faces makes all
    triple products positive the branch is inadmissible.
    """
    holonomies = list(holonomies)
    if len(holonomies) != 4:
        raise InputDocumentError(f"expected four holonomies, got {len(holonomies)}")
    for i, h in enumerate(holonomies):
        if h.klass is HolonomyClass.CENTRAL:
            raise CentralHolonomy(f"holonomy {i + 1} is the identity; its normal "
                                  "line is undefined", index=i)
    closure = closure_residual(holonomies)
    exact = all(is_exact(h.matrix) for h in holonomies)
    if float(closure) > (0 if exact else tol.closure):
        raise ClosureViolation(f"closure residual {float(closure):.3e} exceeds "
                               f"tolerance {tol.closure:.1e}", residual=float(closure))
    raw = [fixed_line(h, tol) for h in holonomies]
    return _pipeline(raw, holonomies, tol, allow_null_flip=False)


def spin_reconstruct(spins, tol: Tolerances = DEFAULT_TOL) -> ReconstructionReport:
    """Reconstruct from four noncentral spin lifts.

    Fixes central signs so the spin product is +id, projects to vector
    holonomies, and runs the pipeline with the null representatives taken
    from the (sign-carrying) traceless parts.  Null faces may be sign-flipped
    by branch selection here, since that is exactly the central-lift freedom;
    the applied central signs are recorded on the report.
    """
    spins = list(spins)
    if len(spins) != 4:
        raise InputDocumentError(f"expected four spin holonomies, got {len(spins)}")
    for i, h in enumerate(spins):
        if h.is_central(tol):
            raise CentralHolonomy(f"spin holonomy {i + 1} is central (+-id)", index=i)
    fixed, signs = fix_spin_closure(spins, tol)
    projected = [project(h, tol) for h in fixed]
    raw = []
    for h, o in zip(fixed, projected):
        nd = fixed_line(o, tol)
        if nd.causal_sign == 0:
            raw.append(NormalData(traceless_vector(h), 0, None))
        else:
            raw.append(nd)
    report = _pipeline(raw, projected, tol, allow_null_flip=True)
    central = list(signs)
    for i, nd in enumerate(raw):
        if nd.causal_sign == 0 and report.branch_signs[i] == -1:
            central[i] = -central[i]
    return replace(report, central_signs=tuple(central))


@dataclass(frozen=True)
class StabilizerUniqueness:
    """Outcome of the stabilizer-coordinate uniqueness verification."""

    hypotheses_ok: bool
    equal: bool
    failures: tuple
    coordinate_diffs: tuple


def _omega(nd: NormalData, u: float) -> np.ndarray:
    """exp(J(u n)) for the face's stabilizer subgroup, as a raw 3x3 matrix."""
    rep = to_float(np.asarray(nd.representative))
    if nd.causal_sign == 0:
        j = j_map(u * rep)
        return np.eye(3) + j + 0.5 * (j @ j)
    return exp_axis(rep, u).matrix


def stabilizer_uniqueness_check(normals, s, t, tol: Tolerances = DEFAULT_TOL
                                ) -> StabilizerUniqueness:
    """Verify that two admissible stabilizer-coordinate tuples coincide.

    Hypotheses checked (violations are reported, not raised): both tuples
    close, they share the exceptional scalar <n2, Omega_1(u) n4>, and the
    four endpoint triple products are strictly positive.  Under them the
    coordinates must agree componentwise, elliptic entries compared on the
    circle.
    """
    failures = []
    n2 = to_float(np.asarray(normals[1].representative))
    n4 = to_float(np.asarray(normals[3].representative))
    n1 = to_float(np.asarray(normals[0].representative))
    n3 = to_float(np.asarray(normals[2].representative))

    def closure_dev(coords):
        prod = np.eye(3)
        for nd, u in zip(normals, coords):
            prod = _omega(nd, u) @ prod
        return float(np.max(np.abs(prod - np.eye(3))))

    for label, coords in (("s", s), ("t", t)):
        dev = closure_dev(coords)
        if dev > tol.closure:
            failures.append(f"closure of {label} fails with residual {dev:.3e}")

    exc_s = tangent_pair(n2, _omega(normals[0], s[0]) @ n4)
    exc_t = tangent_pair(n2, _omega(normals[0], t[0]) @ n4)
    if abs(exc_s - exc_t) > tol.exceptional * max(1.0, abs(exc_s)):
        failures.append(f"exceptional scalars differ: {exc_s} vs {exc_t}")

    for label, coords in (("s", s), ("t", t)):
        end1 = tangent_pair(cross(n2, n1), _omega(normals[0], coords[0]) @ n4)
        end3 = tangent_pair(cross(n3, n2),
                            np.linalg.inv(_omega(normals[2], coords[2])) @ n4)
        if end1 <= tol.classify:
            failures.append(f"endpoint triple through face 1 for {label} is "
                            f"{end1:.3e}, not positive")
        if end3 <= tol.classify:
            failures.append(f"endpoint triple through face 3 for {label} is "
                            f"{end3:.3e}, not positive")

    diffs = []
    for nd, si, ti in zip(normals, s, t):
        if nd.causal_sign == -1:
            d = (si - ti + math.pi) % TWO_PI - math.pi
        else:
            d = si - ti
        diffs.append(abs(float(d)))
    hypotheses_ok = not failures
    equal = hypotheses_ok and all(d <= math.sqrt(tol.residual) for d in diffs)
    return StabilizerUniqueness(hypotheses_ok, equal, tuple(failures), tuple(diffs))
