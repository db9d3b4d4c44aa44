"""Shared fixtures: golden inputs and random geometry generators."""

from __future__ import annotations

import math

import numpy as np
import pytest

from holotet.datasets import gram_from_upper, load_dataset
from holotet.forward import Tetrahedron, face_holonomies_repaired
from holotet.lorentz import eta_ambient
from holotet.so12 import check_so12, exp_axis, exp_parabolic


def make_elliptic_quadruple():
    """The all-elliptic dS reference quadruple (fourth built by closure)."""
    ch, sh = math.cosh(0.6), math.sinh(0.6)
    axes = [np.array([ch, sh, 0.0]),
            np.array([ch, -sh / 2, math.sqrt(3) / 2 * sh]),
            np.array([ch, -sh / 2, -math.sqrt(3) / 2 * sh])]
    thetas = [0.4, 0.5, 0.45]
    holos = [exp_axis(n, t) for n, t in zip(axes, thetas)]
    o4 = np.linalg.inv(holos[2].matrix @ holos[1].matrix @ holos[0].matrix)
    holos.append(check_so12(o4))
    return holos


def make_mixed_quadruple():
    """The parabolic/elliptic/hyperbolic AdS reference quadruple."""
    k1 = np.array([-1.0, -1.0, 0.0])
    ch, sh = math.cosh(0.8), math.sinh(0.8)
    n2 = np.array([ch, -sh, 0.0])
    n3 = np.array([sh, ch / math.sqrt(2), ch / math.sqrt(2)])
    holos = [exp_parabolic(k1), exp_axis(n2, 1.0), exp_axis(n3, 0.8)]
    o4 = np.linalg.inv(holos[2].matrix @ holos[1].matrix @ holos[0].matrix)
    holos.append(check_so12(o4))
    return holos


@pytest.fixture
def elliptic_quadruple():
    return make_elliptic_quadruple()


@pytest.fixture
def mixed_quadruple():
    return make_mixed_quadruple()


def gram_dataset(name: str, exact: bool = True) -> np.ndarray:
    return gram_from_upper(load_dataset(name)["upper"], exact=exact)


def random_unit_tangent(rng, causal: int) -> np.ndarray:
    """Random unit timelike (causal=-1) or spacelike (+1) tangent vector."""
    while True:
        v = rng.normal(size=3)
        q = -v[0] ** 2 + v[1] ** 2 + v[2] ** 2
        if causal * q > 0.05:
            return v / math.sqrt(abs(q))


def random_null_tangent(rng, scale: float = 1.0) -> np.ndarray:
    phi = rng.uniform(0.0, 2.0 * math.pi)
    a = rng.uniform(0.3, scale + 0.3) * rng.choice([-1.0, 1.0])
    return np.array([a, a * math.cos(phi), a * math.sin(phi)])


def random_tetrahedron(rng, sigma: int, max_tries: int = 200,
                       max_entry: float = 60.0) -> Tetrahedron:
    """Random strictly convex tetrahedron in the sigma model.

    Vertices are sampled on the model, normals built as duals and signed to
    negative supports; configurations with near-degenerate data or extreme
    holonomies are rejected so downstream tolerances stay meaningful.
    """
    eta = eta_ambient(sigma)
    for _ in range(max_tries):
        vertices = []
        for _ in range(4):
            for _ in range(100):
                x = rng.normal(size=4)
                q = float(x @ eta @ x)
                if sigma * q > 0.2:
                    vertices.append(x / math.sqrt(abs(q)))
                    break
        if len(vertices) != 4:
            continue
        v = np.array(vertices)
        if abs(np.linalg.det(v)) < 0.05:
            continue
        normals = np.zeros((4, 4))
        ok = True
        for i in range(4):
            others = [j for j in range(4) if j != i]
            block = v[others].T
            cov = np.array([((-1.0) ** r) * np.linalg.det(np.delete(block, r, axis=0))
                            for r in range(4)])
            w = np.diag(eta) * cov
            q = float(w @ eta @ w)
            if abs(q) < 0.02 * float(w @ w):
                ok = False
                break
            n = w / math.sqrt(abs(q))
            h = float(v[i] @ eta @ n)
            if abs(h) < 0.05:
                ok = False
                break
            if h > 0:
                n, h = -n, -h
            normals[i] = n
        if not ok:
            continue
        supports = np.array([float(v[i] @ eta @ normals[i]) for i in range(4)])
        tetra = Tetrahedron(sigma, normals, v, supports)
        try:
            tetra.validate()
            holos, _, _, _ = face_holonomies_repaired(tetra)
        except Exception:
            continue
        if max(np.abs(h.matrix).max() for h in holos) > max_entry:
            continue
        return tetra
    raise RuntimeError("failed to sample a usable random tetrahedron")


def random_quadruple(rng, sigma: int, max_entry: float = 60.0):
    """Admissible closing holonomy quadruple from a random tetrahedron."""
    tetra = random_tetrahedron(rng, sigma, max_entry=max_entry)
    holos, _, _, _ = face_holonomies_repaired(tetra)
    return holos


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)
