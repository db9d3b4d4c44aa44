"""Scalar backends and small generic matrix helpers.

Two backends carry every real number in this package:

* exact: ``fractions.Fraction`` (or any exact Python number type with the
  same arithmetic protocol, e.g. sympy numbers for quadratic surds), stored
  in object-dtype numpy arrays.  Arithmetic is rounding-free and sign tests
  are exact.
* float: ordinary float64 numpy arrays, governed by a tolerance context.

All core algorithms are written once against plain ``+ - * /`` and a sign
test, so they run unchanged on either backend; backend dispatch happens only
where the algorithms genuinely differ (eigenvalues vs. exact elimination).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy


@dataclass(frozen=True)
class Tolerances:
    """Tolerance context for the floating backend.

    residual    - absolute tolerance on algebraic residuals (defaults 1e-9)
    classify    - tolerance for classification boundaries such as null
                  detection and trace thresholds; boundaries are more
                  sensitive than residuals, hence the looser default
    closure     - tolerance on holonomy closure products
    exceptional - tolerance on the two-route consistency of the exceptional
                  Gram entry
    """

    residual: float = 1e-9
    classify: float = 1e-7
    closure: float = 1e-9
    exceptional: float = 1e-7


DEFAULT_TOL = Tolerances()


def is_exact(value) -> bool:
    """True for exact scalars or object-dtype arrays of exact scalars."""
    if isinstance(value, np.ndarray):
        return value.dtype == object
    return isinstance(value, (int, Fraction, sympy.Basic)) and not isinstance(value, bool)


def canon(x):
    """Normalize an exact scalar to a canonical form.

    sympy numbers are expanded and denominators rationalized so that
    structural equality with zero coincides with mathematical equality;
    Fractions and ints are already canonical.
    """
    if isinstance(x, sympy.Basic):
        return sympy.radsimp(sympy.expand(x))
    return x


def sign_of(x) -> int:
    """Exact sign of an exact scalar: -1, 0, or +1."""
    x = canon(x)
    if x == 0:
        return 0
    return 1 if x > 0 else -1


def exact_sqrt(x):
    """Square root of a nonnegative exact scalar, or None if irrational.

    Fractions give a Fraction back only when numerator and denominator are
    perfect squares; sympy values give an exact symbolic root.
    """
    if isinstance(x, sympy.Basic):
        return sympy.sqrt(x)
    frac = Fraction(x)
    if frac < 0:
        raise ValueError("square root of negative exact scalar")
    num, den = frac.numerator, frac.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def parse_scalar(text, exact: bool):
    """Parse one wire-format scalar.

    Strings hold exact values ("p/q" rationals or sympy-parseable exact
    expressions such as "sqrt(11)/4"); bare JSON numbers are floats.  In
    float mode every value is coerced to float.
    """
    if isinstance(text, str):
        try:
            value = Fraction(text)
        except ValueError:
            value = sympy.nsimplify(sympy.sympify(text), rational=False)
        return value if exact else float(value)
    if exact:
        if isinstance(text, int):
            return Fraction(text)
        if isinstance(text, float) and text.is_integer():
            return Fraction(int(text))
        raise ValueError(f"non-integral float {text!r} in exact mode; pass a 'p/q' string")
    return float(text)


def format_scalar(x):
    """Serialize a scalar for the wire: exact values as strings, floats as is."""
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, sympy.Basic):
        return str(x)
    return float(x)


def as_matrix(rows, exact: bool = False) -> np.ndarray:
    """Build a backend matrix (or vector) from nested scalars.

    In exact mode every integer entry is promoted to Fraction so that later
    divisions never fall back to floats.
    """
    if exact:
        arr = np.array(rows, dtype=object)
        promote = lambda v: canon(Fraction(int(v)) if isinstance(v, (int, np.integer)) else v)
        return np.vectorize(promote, otypes=[object])(arr)
    return np.array(rows, dtype=float)


def to_float(m: np.ndarray, dtype=None) -> np.ndarray:
    """Convert a backend matrix to floating point.

    Object (exact) entries are converted through rational splitting so that
    extended-precision dtypes keep the extra bits; float inputs keep their
    dtype unless one is requested.
    """
    if m.dtype == object:
        out_dtype = dtype or float
        def conv(v):
            if isinstance(v, Fraction):
                return out_dtype(v.numerator) / out_dtype(v.denominator)
            return out_dtype(float(v)) if isinstance(v, sympy.Basic) else out_dtype(v)
        return np.vectorize(conv, otypes=[out_dtype])(m)
    if dtype is not None:
        return np.asarray(m, dtype=dtype)
    return np.asarray(m) if np.issubdtype(m.dtype, np.floating) else np.asarray(m, dtype=float)


def canon_matrix(m: np.ndarray) -> np.ndarray:
    """Canonicalize every entry of an object-dtype matrix in place-free form."""
    if m.dtype != object:
        return m
    return np.vectorize(canon, otypes=[object])(m)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product valid on both backends (canonicalizes exact results)."""
    out = a @ b
    if isinstance(out, np.ndarray) and out.dtype == object:
        out = canon_matrix(out)
    return out


def identity_like(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if m.dtype == object:
        eye = np.zeros((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                eye[i, j] = Fraction(1) if i == j else Fraction(0)
        return eye
    return np.eye(n)


def max_abs(m) -> float:
    """Max-norm of a matrix/vector on either backend, as a float."""
    arr = np.asarray(m)
    if arr.dtype == object:
        return max((abs(float(v)) for v in arr.flat), default=0.0)
    return float(np.max(np.abs(arr))) if arr.size else 0.0
