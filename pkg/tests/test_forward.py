"""Forward map: geodesic transport, face holonomies, Gram roundtrips."""

import math

import numpy as np
import pytest

from holotet.backend import to_float
from holotet.errors import DegeneratePair, NullFace
from holotet.forward import (
    Tetrahedron,
    base_frame,
    face_holonomies_repaired,
    roundtrip,
    signed_area,
    transport,
    transport_matrix,
)
from holotet.lorentz import eta_ambient
from holotet.reconstruct import reconstruct
from holotet.so12 import HolonomyClass, closure_residual
from conftest import gram_dataset, random_tetrahedron


def _random_model_point(rng, sigma):
    eta = eta_ambient(sigma)
    while True:
        x = rng.normal(size=4)
        q = float(x @ eta @ x)
        if sigma * q > 0.2:
            return x / math.sqrt(abs(q))


def _random_tangent_at(rng, p, sigma):
    eta = eta_ambient(sigma)
    x = rng.normal(size=4)
    x = x - (float(x @ eta @ p) / sigma) * p
    return x


def test_transport_identity_at_coincident_points(rng):
    for sigma in (+1, -1):
        p = _random_model_point(rng, sigma)
        x = _random_tangent_at(rng, p, sigma)
        assert np.allclose(transport(p, p, x, sigma), x, atol=1e-12)


def test_transport_isometry_and_tangency(rng):
    for sigma in (+1, -1):
        eta = eta_ambient(sigma)
        for _ in range(20):
            p = _random_model_point(rng, sigma)
            q = _random_model_point(rng, sigma)
            if abs(sigma + float(p @ eta @ q)) < 0.1:
                continue
            x = _random_tangent_at(rng, p, sigma)
            y = _random_tangent_at(rng, p, sigma)
            tx = transport(p, q, x, sigma)
            ty = transport(p, q, y, sigma)
            assert float(tx @ eta @ q) == pytest.approx(0.0, abs=1e-10)
            assert float(tx @ eta @ ty) == pytest.approx(float(x @ eta @ y), abs=1e-9)


def test_transport_reverse_is_inverse(rng):
    sigma = -1
    eta = eta_ambient(sigma)
    p = _random_model_point(rng, sigma)
    q = _random_model_point(rng, sigma)
    if abs(sigma + float(p @ eta @ q)) < 0.1:
        q = _random_model_point(rng, sigma)
    x = _random_tangent_at(rng, p, sigma)
    back = transport(q, p, transport(p, q, x, sigma), sigma)
    assert np.allclose(back, x, atol=1e-10)


def test_transport_degenerate_pair():
    p = np.array([0.0, 0.0, 0.0, 1.0])  # dS point
    with pytest.raises(DegeneratePair):
        transport_matrix(p, -p, +1)


def _geodesic(p, u, sigma, causal):
    """Unit-speed geodesic through p with unit tangent u of the given causal type."""
    if causal > 0:
        if sigma > 0:
            return lambda t: math.cos(t) * p + math.sin(t) * u, \
                lambda t: -math.sin(t) * p + math.cos(t) * u
        return lambda t: math.cosh(t) * p + math.sinh(t) * u, \
            lambda t: math.sinh(t) * p + math.cosh(t) * u
    if sigma > 0:
        return lambda t: math.cosh(t) * p + math.sinh(t) * u, \
            lambda t: math.sinh(t) * p + math.cosh(t) * u
    return lambda t: math.cos(t) * p + math.sin(t) * u, \
        lambda t: -math.sin(t) * p + math.cos(t) * u


def test_transport_matches_ode_integration(rng):
    # independent oracle: RK4 of dX/dt = -sigma <X, gamma'> gamma along the
    # connecting geodesic, for the de Sitter sign of the denominator
    sigma = +1
    eta = eta_ambient(sigma)
    for causal in (+1, -1):
        p = _random_model_point(rng, sigma)
        u = _random_tangent_at(rng, p, sigma)
        qval = float(u @ eta @ u)
        while causal * qval <= 0.05:
            u = _random_tangent_at(rng, p, sigma)
            qval = float(u @ eta @ u)
        u = u / math.sqrt(abs(qval))
        gamma, gamma_dot = _geodesic(p, u, sigma, causal)
        t_end = 0.8
        x = _random_tangent_at(rng, p, sigma)

        def rhs(t, xv):
            return -sigma * float(xv @ eta @ gamma_dot(t)) * gamma(t)

        steps = 2000
        h = t_end / steps
        xv = x.copy()
        t = 0.0
        for _ in range(steps):
            k1 = rhs(t, xv)
            k2 = rhs(t + h / 2, xv + h / 2 * k1)
            k3 = rhs(t + h / 2, xv + h / 2 * k2)
            k4 = rhs(t + h, xv + h * k3)
            xv = xv + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        direct = transport(p, gamma(t_end), x, sigma)
        assert np.max(np.abs(direct - xv)) <= 1e-6


def test_transport_composes_along_geodesic(rng):
    sigma = -1
    p = _random_model_point(rng, sigma)
    eta = eta_ambient(sigma)
    u = _random_tangent_at(rng, p, sigma)
    qval = float(u @ eta @ u)
    while qval <= 0.05:
        u = _random_tangent_at(rng, p, sigma)
        qval = float(u @ eta @ u)
    u = u / math.sqrt(qval)
    gamma, _ = _geodesic(p, u, sigma, +1)
    mid, end = gamma(0.4), gamma(0.9)
    x = _random_tangent_at(rng, p, sigma)
    two_step = transport(mid, end, transport(p, mid, x, sigma), sigma)
    one_step = transport(p, end, x, sigma)
    assert np.allclose(two_step, one_step, atol=1e-10)


@pytest.mark.parametrize("name", ["appendix_a_ell_fin", "appendix_a_null_fin",
                                  "appendix_a_hyp_fin"])
def test_face_holonomies_fix_based_normals(name):
    rt = roundtrip(gram_dataset(name), -1)
    tetra = rt.tetrahedron
    holos, _, based, flips = face_holonomies_repaired(tetra)
    for o, n in zip(holos, based):
        assert np.max(np.abs(to_float(o.matrix) @ to_float(n) - to_float(n))) <= 1e-9


@pytest.mark.parametrize("name,klass", [
    ("appendix_a_ell_fin", HolonomyClass.ELLIPTIC),
    ("appendix_a_null_fin", HolonomyClass.PARABOLIC),
    ("appendix_a_hyp_fin", HolonomyClass.HYPERBOLIC),
])
def test_face_holonomy_classes_match_causal_types(name, klass):
    rt = roundtrip(gram_dataset(name), -1)
    assert all(h.klass is klass for h in rt.holonomies)
    assert rt.closure_residual <= 1e-12


def test_roundtrip_reference_tables():
    expectations = {
        "appendix_a_ell_fin": (9 / 256, [-11 / 16, -9 / 32, -5 / 16, -9 / 16]),
        "appendix_a_null_fin": (58320.0, [-1296.0] * 4),
        "appendix_a_hyp_fin": (17 / 16, [-15 / 16, -25 / 16, -13 / 4, -217 / 16]),
    }
    for name, (det, minors) in expectations.items():
        rt = roundtrip(gram_dataset(name), -1)
        assert rt.gram_deviation <= 1e-9
        assert rt.det_deviation <= 1e-9
        assert float(rt.gram_out.det) == pytest.approx(det, abs=1e-8)
        assert np.allclose([float(m) for m in rt.gram_out.minors], minors, atol=1e-8)
        assert rt.spin_closure_sign in (-1, +1)


def test_roundtrip_ell_lift_traces_match_printed_table():
    rt = roundtrip(gram_dataset("appendix_a_ell_fin"), -1)
    got = sorted(abs(float(h.trace)) for h in rt.lifts)
    printed = sorted([0.5967, 0.34546, 0.93864, 0.2878])
    assert max(abs(a - b) for a, b in zip(got, printed)) <= 1e-4


def test_roundtrip_null_lift_trace_multiset():
    rt = roundtrip(gram_dataset("appendix_a_null_fin"), -1)
    assert sorted(abs(float(h.trace)) for h in rt.lifts) == pytest.approx([2.0] * 4)


def test_base_frame_is_pseudo_orthonormal():
    rt = roundtrip(gram_dataset("appendix_a_ell_fin"), -1)
    frame = base_frame(rt.tetrahedron)
    eta = eta_ambient(-1)
    gram = to_float(frame).T @ eta @ to_float(frame)
    assert np.allclose(gram, np.diag([-1.0, 1.0, 1.0]), atol=1e-10)


def test_fixed_point_of_composite_map(rng):
    # reconstruct(face_holonomies(T)) reproduces the invariants of T
    for sigma in (+1, -1):
        tetra = random_tetrahedron(rng, sigma)
        holos, _, _, _ = face_holonomies_repaired(tetra)
        rep = reconstruct(holos)
        assert rep.sigma == sigma
        assert np.allclose(sorted(rep.supports), sorted(tetra.supports), atol=1e-8)
        eta = eta_ambient(sigma)
        gram_direct = to_float(tetra.normals) @ eta @ to_float(tetra.normals).T
        assert np.allclose(to_float(rep.gram.entries), gram_direct, atol=1e-8)
        assert rep.diagnostics.holonomy_match_residual <= 1e-9


def test_tetrahedron_validation(rng):
    tetra = random_tetrahedron(rng, -1)
    tetra.validate()
    bad = Tetrahedron(tetra.sigma, tetra.normals, -tetra.vertices, tetra.supports)
    with pytest.raises(Exception):
        bad.validate()


def test_signed_area_values():
    assert signed_area(0.0, -1, +1) == 0.0
    assert signed_area(0.8, +1, -1, branch=+1) == pytest.approx(-0.8)
    assert signed_area(0.4, -1, +1, branch=+1) == pytest.approx(0.4)
    # elliptic areas are reported modulo 2 pi in [0, 2 pi)
    assert signed_area(0.4, -1, -1, branch=+1) == pytest.approx(2 * math.pi - 0.4)
    with pytest.raises(NullFace):
        signed_area(0.3, 0, +1)
