"""Shared operation layer: request models in, response models out.

The FastAPI endpoints and the CLI both delegate here, so in-process CLI runs
and HTTP calls produce identical documents.
"""

from __future__ import annotations

import numpy as np

from .backend import Tolerances, as_matrix, format_scalar, is_exact, parse_scalar, to_float
from .datasets import gram_from_upper, list_datasets, load_dataset
from .errors import InputDocumentError
from .forward import RoundtripReport, Tetrahedron, roundtrip
from .lorentz import GramData
from .reconstruct import ReconstructionReport, reconstruct, spin_reconstruct
from .schemas import (
    ClassifyResponse,
    FlatCheckRequest,
    FlatCheckResponse,
    ForwardRequest,
    ForwardResponse,
    GramModel,
    GramRequest,
    HolonomyRequest,
    RadiusSample,
    ReconstructionResponse,
    RoundtripResponse,
    VerifyPaperResponse,
    VerifyRow,
)
from .sectors import FlatFaceData, classify_sector, flat_closure_residual, flat_family_gram
from .sl2r import check_sl2r, lift
from .so12 import check_so12, closure_residual, so12_inverse


def tolerances_of(options) -> Tolerances:
    return Tolerances(
        residual=options.tolerance,
        classify=options.class_tolerance,
        closure=options.closure_tolerance,
        exceptional=options.exceptional_tolerance,
    )


def _fmt_vector(v) -> list:
    return [format_scalar(x) for x in np.asarray(v).tolist()] \
        if is_exact(np.asarray(v)) else [float(x) for x in np.asarray(v)]


def _fmt_matrix(m) -> list:
    arr = np.asarray(m)
    if is_exact(arr):
        return [[format_scalar(x) for x in row] for row in arr.tolist()]
    return [[float(x) for x in row] for row in arr]


def _float_matrix(m) -> list:
    return [[float(x) for x in row] for row in to_float(np.asarray(m))]


def gram_model(gd: GramData) -> GramModel:
    return GramModel(
        entries=_fmt_matrix(gd.entries),
        det=format_scalar(gd.det),
        minors=[format_scalar(m) for m in gd.minors],
        inertia=list(gd.inertia.as_tuple()),
        minor_inertias=[list(mi.as_tuple()) for mi in gd.minor_inertias],
    )


def _parse_holonomies(req: HolonomyRequest):
    exact = req.options.exact
    tol = tolerances_of(req.options)
    mats = []
    for idx, m in enumerate(req.matrices):
        dim = 3 if req.kind == "so12" else 2
        if len(m) != dim or any(len(row) != dim for row in m):
            raise InputDocumentError(
                f"matrix {idx + 1} must be {dim}x{dim} for kind {req.kind!r}")
        rows = [[parse_scalar(v, exact) for v in row] for row in m]
        mats.append(as_matrix(rows, exact=exact))
    if req.derive_fourth:
        mats = mats[:3]
    if len(mats) == 3:
        if not req.derive_fourth:
            raise InputDocumentError("three matrices require derive_fourth")
        prod = mats[2] @ mats[1] @ mats[0]
        if req.kind == "so12":
            mats.append(so12_inverse(prod))
        else:
            a, b = prod[0]
            c, d = prod[1]
            mats.append(np.array([[d, -b], [-c, a]], dtype=prod.dtype))
    if req.kind == "so12":
        return [check_so12(m, tol) for m in mats], tol
    return [check_sl2r(m, tol) for m in mats], tol


def reconstruction_response(report: ReconstructionReport) -> ReconstructionResponse:
    tetra = report.tetrahedron
    return ReconstructionResponse(
        sigma=report.sigma,
        model="dS3" if report.sigma == +1 else "AdS3",
        normals=[{
            "representative": _fmt_vector(nd.representative),
            "causal_sign": nd.causal_sign,
            "theta": None if nd.theta is None else float(nd.theta),
        } for nd in report.normals],
        gram=gram_model(report.gram),
        chi=[format_scalar(c) for c in report.chi],
        branch_signs=list(report.branch_signs),
        tetrahedron={
            "sigma": tetra.sigma,
            "normals": _float_matrix(tetra.normals),
            "vertices": _float_matrix(tetra.vertices),
            "supports": [float(h) for h in tetra.supports],
        },
        face_classes=[k.value for k in report.face_classes],
        diagnostics={
            "closure_residual": report.diagnostics.closure_residual,
            "exceptional_mismatch": report.diagnostics.exceptional_mismatch,
            "holonomy_match_residual": report.diagnostics.holonomy_match_residual,
            "minor_identity_residual": report.diagnostics.minor_identity_residual,
        },
        central_signs=None if report.central_signs is None else list(report.central_signs),
    )


def run_reconstruct(req: HolonomyRequest) -> ReconstructionResponse:
    holos, tol = _parse_holonomies(req)
    if req.kind == "so12":
        report = reconstruct(holos, tol)
    else:
        report = spin_reconstruct(holos, tol)
    return reconstruction_response(report)


def _forward_fields(rt: RoundtripReport) -> dict:
    return {
        "sigma": rt.sigma,
        "representative_flips": list(rt.representative_flips),
        "closure_residual": rt.closure_residual,
        "holonomies": [_float_matrix(h.matrix) for h in rt.holonomies],
        "traces": [float(h.trace) for h in rt.holonomies],
        "face_classes": [h.klass.value for h in rt.holonomies],
        "lifts": [_float_matrix(h.matrix) for h in rt.lifts],
        "lift_traces": [float(h.trace) for h in rt.lifts],
        "spin_closure_sign": rt.spin_closure_sign,
    }


def _roundtrip_from_gram(greq: GramRequest) -> RoundtripReport:
    tol = tolerances_of(greq.options)
    gram = gram_from_upper(greq.upper, exact=greq.options.exact)
    gd = GramData.from_matrix(gram, tol)
    sigma = greq.sigma
    if sigma is None:
        det = float(gd.det)
        if det == 0:
            raise InputDocumentError("sigma not given and det G = 0")
        sigma = -1 if det > 0 else +1
    return roundtrip(gd, sigma, tol)


def run_forward(req: ForwardRequest) -> ForwardResponse:
    tol = tolerances_of(req.options)
    if (req.gram is None) == (req.tetrahedron is None):
        raise InputDocumentError("provide exactly one of 'gram' or 'tetrahedron'")
    if req.gram is not None:
        rt = _roundtrip_from_gram(req.gram)
        return ForwardResponse(**_forward_fields(rt))

    doc = req.tetrahedron
    from .forward import face_holonomies_repaired
    from .sl2r import fix_spin_closure, spin_closure
    normals = np.asarray(doc.normals, dtype=float)
    vertices = np.asarray(doc.vertices, dtype=float)
    eta = np.diag([-1.0, 1.0, 1.0, 1.0]) if doc.sigma == +1 else np.diag([-1.0, -1.0, 1.0, 1.0])
    supports = np.array([vertices[i] @ eta @ normals[i] for i in range(4)])
    tetra = Tetrahedron(doc.sigma, normals, vertices, supports)
    tetra.validate(tol)
    holos, _, _, flips = face_holonomies_repaired(tetra, None, tol)
    lifts, _ = fix_spin_closure([lift(o, tol) for o in holos], tol)
    eps, _ = spin_closure(lifts, tol)
    return ForwardResponse(
        sigma=doc.sigma,
        representative_flips=list(flips),
        closure_residual=float(closure_residual(holos)),
        holonomies=[_float_matrix(h.matrix) for h in holos],
        traces=[float(h.trace) for h in holos],
        face_classes=[h.klass.value for h in holos],
        lifts=[_float_matrix(h.matrix) for h in lifts],
        lift_traces=[float(h.trace) for h in lifts],
        spin_closure_sign=eps,
    )


def run_roundtrip(greq: GramRequest) -> RoundtripResponse:
    rt = _roundtrip_from_gram(greq)
    fields = _forward_fields(rt)
    fields.update(
        gram_in=gram_model(rt.gram_in),
        gram_out=gram_model(rt.gram_out),
        gram_deviation=rt.gram_deviation,
        det_deviation=rt.det_deviation,
        minor_deviations=list(rt.minor_deviations),
        supports=[float(h) for h in rt.tetrahedron.supports],
    )
    return RoundtripResponse(**fields)


def run_classify(greq: GramRequest) -> ClassifyResponse:
    tol = tolerances_of(greq.options)
    gram = gram_from_upper(greq.upper, exact=greq.options.exact)
    report = classify_sector(gram, sigma_hint=greq.sigma, tol=tol)
    return ClassifyResponse(
        model=report.model,
        sigma=report.sigma,
        det=report.det,
        inertia=list(report.inertia),
        minor_inertias=[list(mi) for mi in report.minor_inertias],
        vertex_types=list(report.vertex_types),
        dual_vertex_types=list(report.dual_vertex_types),
        face_causal_types=list(report.face_causal_types),
    )


def run_flatcheck(req: FlatCheckRequest) -> FlatCheckResponse:
    faces = [FlatFaceData(np.asarray(f.normal, dtype=float), f.area, f.support)
             for f in req.faces]
    residual = flat_closure_residual(faces)
    flat_gram = np.array([[float(np.dot(np.diag([-1.0, 1.0, 1.0]) @ fi.normal, fj.normal))
                           for fj in faces] for fi in faces])
    samples = []
    devs = []
    for radius in req.radii:
        g_r = flat_family_gram(faces, radius, req.sigma)
        dev = float(np.max(np.abs(g_r - flat_gram)))
        closure_defect, expansion_defect = _holonomy_defects(faces, radius)
        samples.append(RadiusSample(
            radius=radius,
            gram=[[float(x) for x in row] for row in g_r],
            gram_deviation_from_flat=dev,
            closure_defect=closure_defect,
            expansion_defect=expansion_defect,
        ))
        devs.append(dev)
    ratios = [devs[i] / devs[i + 1] if devs[i + 1] > 0 else float("inf")
              for i in range(len(devs) - 1)]
    return FlatCheckResponse(
        closure_residual_vector=[float(x) for x in residual],
        closure_residual_norm=float(np.linalg.norm(residual)),
        flat_gram=[[float(x) for x in row] for row in flat_gram],
        samples=samples,
        gram_scaling_ratios=ratios,
    )


def _holonomy_defects(faces, radius: float) -> tuple[float, float]:
    """Closure defect of the curved holonomy product and its expansion error.

    The product of exp(A_i J(n_i) / R^2) equals id + J(sum A_i n_i)/R^2 up to
    O(R^-4); both the defect from the identity and the defect from the
    leading expansion term are reported.
    """
    from .lorentz import j_map
    from .sectors import flat_limit_holonomy
    prod = np.eye(3)
    for f in faces:
        prod = flat_limit_holonomy(f, radius) @ prod
    total = flat_closure_residual(faces)
    leading = j_map(total / radius ** 2)
    closure_defect = float(np.max(np.abs(prod - np.eye(3))))
    expansion_defect = float(np.max(np.abs(prod - np.eye(3) - leading)))
    return closure_defect, expansion_defect


# --- batch verification -------------------------------------------------------


def _row(rows, dataset, check, ok, measured, detail=""):
    rows.append(VerifyRow(dataset=dataset, check=check,
                          status="pass" if ok else "fail",
                          measured=float(measured), detail=detail))


def _verify_gram_dataset(rows, name: str, doc: dict) -> None:
    import sympy

    exp = doc["expected"]
    gram = gram_from_upper(doc["upper"], exact=True)
    gd = GramData.from_matrix(gram)

    def exact_eq(value, expected_str) -> bool:
        diff = sympy.nsimplify(sympy.sympify(str(value)), rational=False) \
            - sympy.nsimplify(sympy.sympify(expected_str), rational=False)
        return sympy.simplify(diff) == 0

    _row(rows, name, "det exact", exact_eq(gd.det, exp["det"]), 0.0,
         f"det = {gd.det}")
    minors_ok = all(exact_eq(m, e) for m, e in zip(gd.minors, exp["minors"]))
    _row(rows, name, "minors exact", minors_ok, 0.0,
         "minors = " + ", ".join(str(m) for m in gd.minors))
    _row(rows, name, "inertia", list(gd.inertia.as_tuple()) == exp["inertia"], 0.0,
         str(gd.inertia.as_tuple()))
    got_mi = [list(mi.as_tuple()) for mi in gd.minor_inertias]
    _row(rows, name, "minor inertias", got_mi == exp["minor_inertias"], 0.0, str(got_mi))

    sector = classify_sector(gram)
    _row(rows, name, "vertex types",
         list(sector.vertex_types) == exp["vertex_types"], 0.0,
         "/".join(sector.vertex_types))
    _row(rows, name, "face causal types",
         list(sector.face_causal_types) == exp["face_causal_types"], 0.0,
         "/".join(sector.face_causal_types))
    _row(rows, name, "model", sector.model == exp["model"], 0.0, sector.model)

    if exp.get("roundtrip"):
        rt = roundtrip(gd, doc["sigma"])
        _row(rows, name, "roundtrip closure <= 1e-12",
             rt.closure_residual <= 1e-12, rt.closure_residual)
        _row(rows, name, "roundtrip Gram <= 1e-9",
             rt.gram_deviation <= 1e-9, rt.gram_deviation)
        _row(rows, name, "roundtrip det <= 1e-9",
             rt.det_deviation <= 1e-9, rt.det_deviation)
        if "lift_abs_traces" in exp:
            got = [abs(float(h.trace)) for h in rt.lifts]
            dev = max(abs(a - b) for a, b in zip(sorted(got), sorted(exp["lift_abs_traces"])))
            _row(rows, name, "lift |traces| <= 1e-4", dev <= 1e-4, dev,
                 str([round(t, 5) for t in got]))


def _verify_holonomy_dataset(rows, name: str, doc: dict) -> None:
    exp = doc["expected"]
    req = HolonomyRequest(kind=doc["kind"], matrices=doc["matrices"],
                          derive_fourth=doc.get("derive_fourth", False))
    if doc.get("exact"):
        req.options.exact = True
    resp = run_reconstruct(req)

    _row(rows, name, "sigma", resp.sigma == exp["sigma"], 0.0, str(resp.sigma))
    if "det" in exp:
        expected_det = exp["det"]
        if isinstance(expected_det, str):
            from fractions import Fraction
            ok = str(resp.gram.det) == str(Fraction(expected_det))
            _row(rows, name, "det exact", ok, 0.0, str(resp.gram.det))
        else:
            dev = abs(float(resp.gram.det) - expected_det)
            _row(rows, name, "det <= 1e-4", dev <= 1e-4, dev, str(resp.gram.det))
    for key, tolval in (("chi", 1e-4), ("minors", 1e-4), ("supports", 1e-4)):
        if key not in exp:
            continue
        got = resp.chi if key == "chi" else (
            resp.gram.minors if key == "minors" else resp.tetrahedron.supports)
        if all(isinstance(e, str) for e in exp[key]):
            from fractions import Fraction
            ok = [str(g) for g in got] == [str(Fraction(e)) for e in exp[key]]
            _row(rows, name, f"{key} exact", ok, 0.0, str(got))
        else:
            dev = max(abs(float(g) - e) for g, e in zip(got, exp[key]))
            _row(rows, name, f"{key} <= {tolval:g}", dev <= tolval, dev)
    if "trace_o4" in exp:
        # the fourth input holonomy's trace (derived by closure)
        holos, _ = _parse_holonomies(req)
        dev = abs(float(holos[3].trace) - exp["trace_o4"])
        _row(rows, name, "trace(O4) <= 1e-4", dev <= 1e-4, dev)
    if "face_classes" in exp:
        _row(rows, name, "face classes", resp.face_classes == exp["face_classes"], 0.0,
             "/".join(resp.face_classes))
    if "gram" in exp:
        ref = gram_from_upper(load_dataset(exp["gram"])["upper"], exact=True)
        got = gram_from_upper(
            [resp.gram.entries[i][j] for i in range(4) for j in range(i, 4)],
            exact=doc.get("exact", False))
        dev = float(np.max(np.abs(to_float(got) - to_float(ref))))
        _row(rows, name, "gram matches " + exp["gram"], dev <= 1e-9, dev)
    _row(rows, name, "holonomy match <= 1e-9",
         resp.diagnostics.holonomy_match_residual <= 1e-9,
         resp.diagnostics.holonomy_match_residual)


def run_verify_paper() -> VerifyPaperResponse:
    rows: list[VerifyRow] = []
    for name in list_datasets():
        doc = load_dataset(name)
        if doc["kind"] == "gram":
            _verify_gram_dataset(rows, name, doc)
        else:
            _verify_holonomy_dataset(rows, name, doc)
    passed = sum(1 for r in rows if r.status == "pass")
    failed = len(rows) - passed
    return VerifyPaperResponse(rows=rows, passed=passed, failed=failed,
                               all_passed=failed == 0)
