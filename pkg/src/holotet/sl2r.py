"""Spin holonomies in SL(2,R) and the double cover of SO+(1,2).

The tangent model R^{1,2} is identified with sl(2,R) through the generators

    tau_0 = [[0,1],[-1,0]]/2,  tau_1 = [[0,1],[1,0]]/2,  tau_2 = [[1,0],[0,-1]]/2,

which satisfy tr(tau_mu tau_nu) = eta_T[mu,nu]/2 and
tr(tau_mu tau_nu tau_rho) = eps_{mu nu rho}/4.  The covering map sends
H = [[a,b],[c,d]] to the vector action

    [ (a^2+b^2+c^2+d^2)/2  (a^2-b^2+c^2-d^2)/2  -ab-cd ]
    [ (a^2+b^2-c^2-d^2)/2  (a^2-b^2-c^2+d^2)/2  -ab+cd ]
    [      -ac-bd               -ac+bd           ad+bc ]

from which the inverse (the lift) is read off by pivoting on whichever of
a^2, b^2, c^2, d^2 is largest; their sum is a^2+b^2+c^2+d^2 >= 2, so one
pivot always exceeds 1/2 and the cascade cannot fail on a valid input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    canon,
    canon_matrix,
    exact_sqrt,
    is_exact,
    matmul,
    max_abs,
    to_float,
)
from .errors import LiftFailure, NotClosing, ZeroGenerator
from .lorentz import causal_class, tangent_pair
from .so12 import VectorHolonomy, check_so12

TAU = (
    np.array([[0.0, 0.5], [-0.5, 0.0]]),
    np.array([[0.0, 0.5], [0.5, 0.0]]),
    np.array([[0.5, 0.0], [0.0, -0.5]]),
)


@dataclass(frozen=True)
class SpinHolonomy:
    """A unimodular 2x2 real matrix with central-sign bookkeeping.

    ``central_sign`` records the sign applied relative to the reference lift
    the holonomy was constructed from; it flips under negation and is purely
    bookkeeping (the projected vector holonomy cannot see it).
    """

    matrix: np.ndarray
    central_sign: int = +1

    def negated(self) -> "SpinHolonomy":
        return SpinHolonomy(-self.matrix, -self.central_sign)

    def inverse(self) -> "SpinHolonomy":
        a, b = self.matrix[0]
        c, d = self.matrix[1]
        inv = np.array([[d, -b], [-c, a]], dtype=self.matrix.dtype)
        return SpinHolonomy(canon_matrix(inv) if is_exact(inv) else inv, self.central_sign)

    @property
    def trace(self):
        return self.matrix[0, 0] + self.matrix[1, 1]

    def det(self):
        m = self.matrix
        return canon(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    def is_central(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        dev_plus = max_abs(self.matrix - _ident_like(self.matrix))
        dev_minus = max_abs(self.matrix + _ident_like(self.matrix))
        bound = 0 if is_exact(self.matrix) else tol.classify
        return min(dev_plus, dev_minus) <= bound


def _ident_like(m: np.ndarray) -> np.ndarray:
    if is_exact(m):
        return np.array([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]], dtype=object)
    return np.eye(2)


def check_sl2r(m, tol: Tolerances = DEFAULT_TOL) -> SpinHolonomy:
    """Validate det = 1 and wrap the matrix."""
    m = as_matrix(m, exact=True) if is_exact(np.asarray(m)) else np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise ZeroGenerator(f"spin holonomy must be 2x2, got shape {m.shape}")
    h = SpinHolonomy(m)
    det = h.det()
    bound = 0 if is_exact(m) else tol.classify
    if abs(det - 1) > bound:
        raise ZeroGenerator(f"det H = {det!r} differs from 1", det=float(det))
    return h


def t_map(x) -> np.ndarray:
    """Contraction x^mu tau_mu; satisfies T(x)^2 = <x,x>/4 * id."""
    exact = is_exact(np.asarray(x))
    half = Fraction(1, 2) if exact else 0.5
    rows = [
        [half * x[2], half * (x[0] + x[1])],
        [half * (x[1] - x[0]), -half * x[2]],
    ]
    out = np.array([[canon(v) for v in r] for r in rows], dtype=object if exact else float)
    return out


def t_inv(b: np.ndarray) -> np.ndarray:
    """Inverse of t_map on traceless matrices."""
    x0 = b[0, 1] - b[1, 0]
    x1 = b[0, 1] + b[1, 0]
    x2 = b[0, 0] - b[1, 1]
    exact = is_exact(b)
    return np.array([canon(x0), canon(x1), canon(x2)], dtype=object if exact else float)


def spin_exp(n, theta: float = 1.0, eps: int = +1, tol: Tolerances = DEFAULT_TOL) -> SpinHolonomy:
    """Spin exponential eps * exp(theta T(n)).

    Non-null unit axis: eps (c id + s T(n)) with (c, s) = (cos(theta/2),
    2 sin(theta/2)) for a timelike axis and the hyperbolic pair for a
    spacelike axis.  Null generator: eps (id + T(theta k)); the series
    terminates and the scale rides on the generator.
    """
    if eps not in (+1, -1):
        raise ValueError("central sign must be +1 or -1")
    narr = np.asarray(n, dtype=float)
    if float(np.dot(narr, narr)) == 0.0:
        raise ZeroGenerator("zero generator has no noncentral exponential")
    nu = causal_class(narr, tol)
    if nu == 0:
        h = np.eye(2) + t_map(theta * narr)
        return SpinHolonomy(eps * h, eps)
    norm2 = tangent_pair(narr, narr)
    if abs(abs(norm2) - 1.0) > tol.classify:
        raise ValueError(f"non-null generator must be unit, got <n,n> = {norm2}")
    if nu == -1:
        c, s = math.cos(theta / 2.0), 2.0 * math.sin(theta / 2.0)
    else:
        c, s = math.cosh(theta / 2.0), 2.0 * math.sinh(theta / 2.0)
    h = c * np.eye(2) + s * t_map(narr)
    return SpinHolonomy(eps * h, eps)


def project(h: SpinHolonomy, tol: Tolerances = DEFAULT_TOL) -> VectorHolonomy:
    """Covering map to SO+(1,2): the quadratic vector action of the lift.

    Insensitive to the central sign; exact inputs stay exact.
    """
    a, b = h.matrix[0]
    c, d = h.matrix[1]
    rows = [
        [(a * a + b * b + c * c + d * d) / 2,
         (a * a - b * b + c * c - d * d) / 2,
         -a * b - c * d],
        [(a * a + b * b - c * c - d * d) / 2,
         (a * a - b * b - c * c + d * d) / 2,
         -a * b + c * d],
        [-a * c - b * d, -a * c + b * d, a * d + b * c],
    ]
    exact = is_exact(h.matrix)
    m = np.array([[canon(v) for v in r] for r in rows], dtype=object if exact else float)
    return check_so12(m, tol)


def _pivot_products(o: np.ndarray):
    """Quadratic monomials of the lift read off the vector holonomy."""
    two = Fraction(2) if is_exact(o) else 2.0
    return {
        "aa": (o[0, 0] + o[0, 1] + o[1, 0] + o[1, 1]) / two,
        "bb": (o[0, 0] - o[0, 1] + o[1, 0] - o[1, 1]) / two,
        "cc": (o[0, 0] + o[0, 1] - o[1, 0] - o[1, 1]) / two,
        "dd": (o[0, 0] - o[0, 1] - o[1, 0] + o[1, 1]) / two,
        "ab": -(o[0, 2] + o[1, 2]) / two,
        "cd": (-o[0, 2] + o[1, 2]) / two,
        "ac": -(o[2, 0] + o[2, 1]) / two,
        "bd": (-o[2, 0] + o[2, 1]) / two,
        "ad": (o[2, 2] + 1) / two,
        "bc": (o[2, 2] - 1) / two,
    }


_PIVOT_BRANCHES = (
    ("aa", (("a", None), ("b", "ab"), ("c", "ac"), ("d", "ad"))),
    ("bb", (("b", None), ("a", "ab"), ("c", "bc"), ("d", "bd"))),
    ("cc", (("c", None), ("a", "ac"), ("b", "bc"), ("d", "cd"))),
    ("dd", (("d", None), ("a", "ad"), ("b", "bd"), ("c", "cd"))),
)


def _lift_linear_system(o: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Generic fallback: solve H T(e_nu) = T(O e_nu) H as a nullspace problem."""
    of = np.asarray(to_float(o), dtype=float)  # LAPACK path
    rows = []
    for nu in range(3):
        m_nu = t_map(of[:, nu])
        # (H tau_nu - m_nu H) entries, linear in vec(H) = (a, b, c, d)
        t = TAU[nu]
        for i in range(2):
            for j in range(2):
                coeff = np.zeros(4)
                for k in range(2):
                    # H[i,k] t[k,j]
                    coeff[2 * i + k] += t[k, j]
                    # -m_nu[i,k] H[k,j]
                    coeff[2 * k + j] -= m_nu[i, k]
                rows.append(coeff)
    _, svals, vt = np.linalg.svd(np.array(rows))
    v = vt[-1]
    det = v[0] * v[3] - v[1] * v[2]
    if det <= tol.classify:
        raise LiftFailure("adjoint system has no unimodular solution", det=float(det))
    h = (v / math.sqrt(det)).reshape(2, 2)
    flat = h.flatten()
    lead = flat[np.argmax(np.abs(flat))]
    if lead < 0:
        h = -h
    return h


def lift(o: VectorHolonomy, tol: Tolerances = DEFAULT_TOL) -> SpinHolonomy:
    """A spin lift of a vector holonomy (deterministic pivot cascade).

    Pivots on a, b, c, d in that order, taking the first squared pivot above
    tolerance (relative to their sum a^2+b^2+c^2+d^2 >= 2, so a valid input
    always offers a well-conditioned pivot), and falls back to a linear-system
    solve if all four degenerate.  Exact inputs produce exact lifts when the
    pivot has a rational square root.
    """
    prods = _pivot_products(o.matrix)
    exact = is_exact(o.matrix)
    if exact:
        bound = 0
    else:
        total = sum(float(prods[k]) for k in ("aa", "bb", "cc", "dd"))
        bound = max(tol.classify, 1e-3 * total)
    for key, recipe in _PIVOT_BRANCHES:
        piv = canon(prods[key])
        if not piv > bound:
            continue
        root = exact_sqrt(piv) if exact else math.sqrt(piv)
        if root is None:
            return lift(check_so12(to_float(o.matrix), tol), tol)
        vals = {}
        for var, prod_key in recipe:
            vals[var] = root if prod_key is None else canon(prods[prod_key] / root)
        h = np.array([[vals["a"], vals["b"]], [vals["c"], vals["d"]]],
                     dtype=object if exact else float)
        if not exact:
            det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
            h = h / np.sqrt(det)
        return SpinHolonomy(h, +1)
    return SpinHolonomy(_lift_linear_system(o.matrix, tol), +1)


def traceless_part(h: SpinHolonomy) -> np.ndarray:
    """B = H - tr(H)/2 * id."""
    half = Fraction(1, 2) if is_exact(h.matrix) else 0.5
    return h.matrix - (h.trace * half) * _ident_like(h.matrix)


def traceless_vector(h: SpinHolonomy) -> np.ndarray:
    """b with T(b) = traceless part of H (the scaled normal representative)."""
    return t_inv(traceless_part(h))


def connected_trace2(hi: SpinHolonomy, hj: SpinHolonomy):
    """tr(B_i B_j)/2 = <b_i, b_j>/4."""
    prod = matmul(traceless_part(hi), traceless_part(hj))
    half = Fraction(1, 2) if is_exact(prod) else 0.5
    return canon((prod[0, 0] + prod[1, 1]) * half)


def connected_trace3(hi: SpinHolonomy, hj: SpinHolonomy, hk: SpinHolonomy):
    """tr(B_i B_j B_k)/2 = <b_i x b_j, b_k>/8.

    Longer connected words follow the same half-trace-of-traceless-parts
    pattern; only the pair and triple are needed by the reconstruction.
    """
    prod = matmul(matmul(traceless_part(hi), traceless_part(hj)), traceless_part(hk))
    half = Fraction(1, 2) if is_exact(prod) else 0.5
    return canon((prod[0, 0] + prod[1, 1]) * half)


def spin_closure(holonomies, tol: Tolerances = DEFAULT_TOL) -> tuple[int, float]:
    """Nearest central element of H4 H3 H2 H1 and the residual to it.

    Returns (eps, residual) with eps in {+1, -1}; raises NotClosing when the
    product is far from both central elements.
    """
    h1, h2, h3, h4 = [h.matrix for h in holonomies]
    prod = matmul(matmul(h4, h3), matmul(h2, h1))
    ident = _ident_like(prod)
    r_plus = max_abs(prod - ident)
    r_minus = max_abs(prod + ident)
    eps, residual = (+1, r_plus) if r_plus <= r_minus else (-1, r_minus)
    if residual > (0 if is_exact(prod) else tol.closure):
        raise NotClosing(f"spin product is {residual:.3e} away from both central elements",
                         residual=float(residual))
    return eps, float(residual)


def fix_spin_closure(holonomies, tol: Tolerances = DEFAULT_TOL):
    """Flip the lowest-index lift if needed so the closure sign becomes +1.

    Returns (fixed_holonomies, applied_signs).
    """
    eps, _ = spin_closure(holonomies, tol)
    signs = [1, 1, 1, 1]
    fixed = list(holonomies)
    if eps == -1:
        fixed[0] = fixed[0].negated()
        signs[0] = -1
    return fixed, signs
