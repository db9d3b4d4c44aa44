"""Spin holonomies: generator algebra, exponentials, cover, connected traces."""

import itertools
import math

import numpy as np
import pytest

from holotet.backend import as_matrix
from holotet.errors import NotClosing, ZeroGenerator
from holotet.lorentz import tangent_pair, triple
from holotet.sl2r import (
    TAU,
    check_sl2r,
    connected_trace2,
    connected_trace3,
    fix_spin_closure,
    lift,
    project,
    spin_closure,
    spin_exp,
    t_inv,
    t_map,
    traceless_part,
    traceless_vector,
)
from holotet.so12 import HolonomyClass, check_so12, exp_axis, exp_parabolic
from conftest import random_null_tangent, random_unit_tangent

ETA_T = np.diag([-1.0, 1.0, 1.0])

NULL_LIFTS = [[[1, -3], [0, 1]], [[-1, -4], [1, 3]],
              [[4, 3], [-3, -2]], [[3, 4], [-1, -1]]]


def _eps() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for p in itertools.permutations(range(3)):
        sign = 1
        perm = list(p)
        for i in range(3):
            for j in range(i + 1, 3):
                if perm[i] > perm[j]:
                    sign = -sign
        eps[p] = sign
    return eps


def test_tau_pair_traces():
    for mu in range(3):
        for nu in range(3):
            got = np.trace(TAU[mu] @ TAU[nu])
            assert got == pytest.approx(0.5 * ETA_T[mu, nu], abs=1e-15)


def test_tau_triple_traces():
    eps = _eps()
    for mu in range(3):
        for nu in range(3):
            for rho in range(3):
                got = np.trace(TAU[mu] @ TAU[nu] @ TAU[rho])
                assert got == pytest.approx(0.25 * eps[mu, nu, rho], abs=1e-15)


def test_t_map_zero_square_law_and_inverse(rng):
    assert np.all(t_map(np.zeros(3)) == 0.0)
    for _ in range(25):
        x = rng.normal(size=3)
        tm = t_map(x)
        assert np.allclose(tm @ tm, 0.25 * tangent_pair(x, x) * np.eye(2), atol=1e-12)
        assert np.allclose(t_inv(tm), x, atol=1e-14)


def test_spin_exp_identity_and_errors():
    h = spin_exp(np.array([1.0, 0.0, 0.0]), 0.0, +1)
    assert np.allclose(h.matrix, np.eye(2))
    with pytest.raises(ZeroGenerator):
        spin_exp(np.zeros(3), 1.0)
    with pytest.raises(ValueError):
        spin_exp(np.array([2.0, 0.0, 0.0]), 1.0)


def test_spin_exp_null_integer_lift():
    h = spin_exp(np.array([-3.0, -3.0, 0.0]))
    assert np.allclose(h.matrix, [[1.0, -3.0], [0.0, 1.0]])


def test_spin_exp_projects_to_vector_exponential(rng):
    for _ in range(25):
        causal = int(rng.choice([-1, 1]))
        n = random_unit_tangent(rng, causal)
        theta = rng.uniform(0.1, 2.8)
        for eps in (+1, -1):
            h = spin_exp(n, theta, eps)
            assert np.max(np.abs(project(h).matrix - exp_axis(n, theta).matrix)) <= 1e-12


def test_project_kernel_and_homomorphism(rng):
    assert project(check_sl2r(np.eye(2))).klass is HolonomyClass.CENTRAL
    assert project(check_sl2r(-np.eye(2))).klass is HolonomyClass.CENTRAL
    for _ in range(20):
        h1 = spin_exp(random_unit_tangent(rng, -1), rng.uniform(0.2, 3.0))
        h2 = spin_exp(random_unit_tangent(rng, +1), rng.uniform(0.2, 1.5))
        prod = check_sl2r(h1.matrix @ h2.matrix)
        assert np.max(np.abs(project(prod).matrix
                             - project(h1).matrix @ project(h2).matrix)) <= 1e-10
        assert np.max(np.abs(project(h1).matrix
                             - project(h1.negated()).matrix)) == 0.0


def test_project_exact_parabolic_classes():
    for m in NULL_LIFTS:
        h = check_sl2r(as_matrix(m, exact=True))
        assert project(h).klass is HolonomyClass.PARABOLIC


def test_lift_identity_and_reference():
    assert np.allclose(lift(check_so12(np.eye(3))).matrix, np.eye(2))
    # unipotent reference: lifting the projection recovers the lift up to sign
    h = check_sl2r(np.array(NULL_LIFTS[0], dtype=float))
    li = lift(project(h))
    assert np.allclose(li.matrix, h.matrix) or np.allclose(li.matrix, -h.matrix)


def test_lift_project_round_trip(rng):
    for _ in range(200):
        kind = rng.integers(0, 3)
        if kind == 0:
            o = exp_axis(random_unit_tangent(rng, -1), rng.uniform(0.05, 2 * math.pi - 0.05))
        elif kind == 1:
            o = exp_axis(random_unit_tangent(rng, +1), rng.uniform(-2.5, 2.5))
        else:
            o = exp_parabolic(random_null_tangent(rng))
        h = lift(o)
        assert abs(float(h.det()) - 1.0) <= 1e-12
        assert np.max(np.abs(project(h).matrix - o.matrix)) <= 1e-12


def test_connected_trace2_laws(rng):
    central = check_sl2r(-np.eye(2))
    other = spin_exp(random_unit_tangent(rng, -1), 1.1)
    assert connected_trace2(central, other) == pytest.approx(0.0, abs=1e-15)
    for _ in range(20):
        hi = spin_exp(random_unit_tangent(rng, +1), rng.uniform(0.2, 2.0), +1)
        hj = spin_exp(random_unit_tangent(rng, -1), rng.uniform(0.2, 3.0), -1)
        bi, bj = traceless_vector(hi), traceless_vector(hj)
        assert connected_trace2(hi, hj) == pytest.approx(
            tangent_pair(bi, bj) / 4.0, abs=1e-12)
        assert connected_trace2(hi.negated(), hj) == pytest.approx(
            -connected_trace2(hi, hj), abs=1e-12)


def test_connected_trace3_laws(rng):
    for _ in range(20):
        hs = [spin_exp(random_unit_tangent(rng, int(rng.choice([-1, 1]))),
                       rng.uniform(0.2, 2.0)) for _ in range(3)]
        bs = [traceless_vector(h) for h in hs]
        expected = triple(bs[0], bs[1], bs[2]) / 8.0
        got = connected_trace3(*hs)
        assert got == pytest.approx(expected, abs=1e-12)
        # cyclic invariance
        assert connected_trace3(hs[1], hs[2], hs[0]) == pytest.approx(got, abs=1e-12)
        # repeated argument with parallel traceless parts vanishes
        assert connected_trace3(hs[0], hs[0], hs[1]) == pytest.approx(0.0, abs=1e-12)


def test_traceless_part_scaling(rng):
    # B_i = eps * s * T(n) with s = 2 sin(theta/2) or 2 sinh(theta/2)
    n = random_unit_tangent(rng, -1)
    theta = 1.3
    for eps in (+1, -1):
        h = spin_exp(n, theta, eps)
        s = 2.0 * math.sin(theta / 2.0)
        assert np.allclose(traceless_part(h), eps * s * t_map(n), atol=1e-12)
    m = random_unit_tangent(rng, +1)
    h = spin_exp(m, theta, +1)
    s = 2.0 * math.sinh(theta / 2.0)
    assert np.allclose(traceless_part(h), s * t_map(m), atol=1e-12)


def test_normalized_pair_and_triple_recovery(rng):
    # normalized connected-trace formulas reproduce unit-normal pairings
    for _ in range(15):
        data = []
        for _ in range(3):
            causal = int(rng.choice([-1, 1]))
            n = random_unit_tangent(rng, causal)
            theta = rng.uniform(0.3, 2.6)
            eps = int(rng.choice([-1, 1]))
            h = spin_exp(n, theta, eps)
            rho = 2.0 * math.sqrt(causal * float(connected_trace2(h, h)))
            b = traceless_vector(h)
            sign = 1.0 if float(np.dot(eps * b, n)) > 0 else -1.0
            data.append((n, h, rho, sign, eps))
        (n1, h1, r1, s1, e1), (n2, h2, r2, s2, e2), (n3, h3, r3, s3, e3) = data
        got_pair = 4.0 * s1 * s2 * float(connected_trace2(h1, h2)) / (r1 * r2) \
            * e1 * e2
        assert got_pair == pytest.approx(tangent_pair(n1, n2), abs=1e-9)
        got_triple = 8.0 * s1 * s2 * s3 * e1 * e2 * e3 \
            * float(connected_trace3(h1, h2, h3)) / (r1 * r2 * r3)
        assert got_triple == pytest.approx(triple(n1, n2, n3), abs=1e-9)


def test_spin_closure_reference_and_flip():
    ident = check_sl2r(np.eye(2))
    assert spin_closure([ident] * 4) == (+1, 0.0)
    lifts = [check_sl2r(as_matrix(m, exact=True)) for m in NULL_LIFTS]
    eps, residual = spin_closure(lifts)
    assert (eps, residual) == (+1, 0.0)
    flipped = [lifts[0].negated(), *lifts[1:]]
    eps, residual = spin_closure(flipped)
    assert (eps, residual) == (-1, 0.0)
    fixed, signs = fix_spin_closure(flipped)
    assert signs == [-1, 1, 1, 1]
    assert spin_closure(fixed)[0] == +1


def test_spin_closure_rejects_non_closing(rng):
    hs = [spin_exp(random_unit_tangent(rng, -1), rng.uniform(0.4, 2.0))
          for _ in range(4)]
    with pytest.raises(NotClosing):
        spin_closure(hs)


def test_lifted_vector_closure(elliptic_quadruple):
    lifts, _ = fix_spin_closure([lift(o) for o in elliptic_quadruple])
    eps, residual = spin_closure(lifts)
    assert eps == +1
    assert residual <= 1e-12
