"""Exact scalar tower: rationals, cyclotomic field elements, complex floats.

A Scalar is one of three variants:

* rational        -- a ``fractions.Fraction`` in lowest terms,
* cyclotomic(k)   -- a vector of rationals over the power basis
                     1, w, ..., w^(d-1) of the k-th cyclotomic field,
                     where w is the primitive k-th root of unity whose
                     float value is exp(-2*pi*i/k) (clockwise convention),
* complex float   -- a Python complex, reached only by explicit promotion.

Arithmetic between a rational and a cyclotomic promotes to cyclotomic;
between cyclotomics of different k it raises (use ``embed`` explicitly).
A cyclotomic result whose vector is purely rational demotes back to the
rational variant, so equality and hashing are canonical.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Union


class ScalarError(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def cyclotomic_polynomial(k: int) -> tuple:
    """Coefficients (ascending, integer) of the k-th cyclotomic polynomial."""
    if k < 1:
        raise ValueError("k must be positive")
    # Phi_k = (x^k - 1) / prod_{d | k, d < k} Phi_d, by exact division.
    num = [0] * (k + 1)
    num[0] = -1
    num[k] = 1
    for d in range(1, k):
        if k % d == 0:
            num = _poly_divide_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_divide_exact(num, den):
    # Integer polynomial long division, remainder must vanish.
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // den[-1]
        out[i] = q
        for j, dj in enumerate(den):
            num[i + j] -= q * dj
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def _field_degree(k: int) -> int:
    return len(cyclotomic_polynomial(k)) - 1


def _reduce_mod_cyclotomic(vec, k):
    """Reduce a coefficient list mod Phi_k, returning a tuple of length deg."""
    phi = cyclotomic_polynomial(k)
    d = len(phi) - 1
    vec = list(vec)
    for i in range(len(vec) - 1, d - 1, -1):
        c = vec[i]
        if c == 0:
            continue
        # x^i = x^(i-d) * (x^d - Phi_k(x)) since Phi_k is monic
        vec[i] = Fraction(0)
        for j in range(d):
            vec[i - d + j] -= c * phi[j]
    vec = vec[:d] + [Fraction(0)] * (d - len(vec))
    return tuple(Fraction(c) for c in vec)


def _poly_xgcd(a, b):
    # Extended Euclid over Q[x] for lists of Fractions (ascending).
    def deg(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i] != 0:
                return i
        return -1

    def trim(p):
        return p[: deg(p) + 1] if deg(p) >= 0 else []

    def sub_scaled(p, q, c, shift):
        p = list(p) + [Fraction(0)] * max(0, deg(q) + shift + 1 - len(p))
        for i, qi in enumerate(q):
            p[i + shift] -= c * qi
        return trim(p)

    r0, r1 = trim(list(a)), trim(list(b))
    s0, s1 = [Fraction(1)], []
    while r1:
        r = list(r0)
        q = [Fraction(0)] * (deg(r0) - deg(r1) + 1) if deg(r0) >= deg(r1) else []
        while deg(r) >= deg(r1):
            c = r[deg(r)] / r1[deg(r1)]
            shift = deg(r) - deg(r1)
            q[shift] = c
            r = sub_scaled(r, r1, c, shift)
        # s_next = s0 - q s1
        s = list(s0)
        for shift, c in enumerate(q):
            if c:
                s = sub_scaled(s, s1, c, shift)
        r0, r1, s0, s1 = r1, r, s1, s
    return r0, s0  # gcd, Bezout coefficient of a


_ZERO = Fraction(0)


class Scalar:
    """Immutable exact scalar; see module docstring for the variant rules."""

    __slots__ = ("_rat", "_k", "_vec", "_z")

    def __init__(self, rat=None, k=None, vec=None, z=None):
        self._rat = rat
        self._k = k
        self._vec = vec
        self._z = z

    # ---- constructors -------------------------------------------------

    @staticmethod
    def integer(n: int) -> "Scalar":
        return Scalar(rat=Fraction(n))

    @staticmethod
    def rational(p, q=1) -> "Scalar":
        return Scalar(rat=Fraction(p, q))

    @staticmethod
    def from_fraction(f: Fraction) -> "Scalar":
        return Scalar(rat=Fraction(f))

    @staticmethod
    def root_of_unity(k: int, power: int = 1) -> "Scalar":
        """The primitive k-th root with float value exp(-2*pi*i/k), raised to power."""
        d = _field_degree(k)
        vec = [_ZERO] * (k + 1)
        vec[power % k] = Fraction(1)
        del d  # degree >= 1 for every k; reduction may still demote
        vec = _reduce_mod_cyclotomic(vec, k)
        return Scalar._make_cyc(k, vec)

    @staticmethod
    def complex_float(z) -> "Scalar":
        return Scalar(z=complex(z))

    @staticmethod
    def _make_cyc(k, vec) -> "Scalar":
        if all(c == 0 for c in vec[1:]):
            return Scalar(rat=vec[0] if vec else _ZERO)
        return Scalar(k=k, vec=tuple(vec))

    # ---- predicates ---------------------------------------------------

    def is_rational(self):
        return self._rat is not None

    def is_cyclotomic(self):
        return self._vec is not None

    def is_float(self):
        return self._z is not None

    def is_zero(self):
        if self._rat is not None:
            return self._rat == 0
        if self._vec is not None:
            return False  # cyclotomic variant is never the demoted zero
        return self._z == 0

    @property
    def field_order(self):
        return self._k

    # ---- coercion helpers ---------------------------------------------

    @staticmethod
    def _coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return Scalar(rat=Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    def _as_vec(self, k):
        if self._rat is not None:
            d = _field_degree(k)
            return (Fraction(self._rat),) + (_ZERO,) * (d - 1)
        if self._k != k:
            raise ScalarError(
                f"mixing cyclotomic fields k={self._k} and k={k} needs an explicit embed"
            )
        return self._vec

    def to_fraction(self) -> Fraction:
        if self._rat is None:
            raise ScalarError("scalar is not rational")
        return self._rat

    def to_complex(self) -> complex:
        if self._z is not None:
            return self._z
        if self._rat is not None:
            return complex(self._rat)
        w = cmath.exp(-2j * math.pi / self._k)
        return sum(complex(c) * w**i for i, c in enumerate(self._vec))

    def embed(self, k: int) -> "Scalar":
        """Embed a rational, or a cyclotomic of order dividing k, into Q(w_k)."""
        if self._z is not None:
            return self
        if self._rat is not None:
            return Scalar._make_cyc(k, self._as_vec(k))
        if k == self._k:
            return self
        if k % self._k != 0:
            raise ScalarError(f"no canonical embedding of k={self._k} into k={k}")
        m = k // self._k
        vec = [_ZERO] * (_field_degree(self._k) * m + 1)
        out = [_ZERO] * (len(vec) + k)
        for i, c in enumerate(self._vec):
            out[i * m] += c
        return Scalar._make_cyc(k, _reduce_mod_cyclotomic(out, k))

    # ---- arithmetic ----------------------------------------------------

    def _binop(self, other, frac_op, vec_op, complex_op):
        other = Scalar._coerce(other)
        if self._z is not None or other._z is not None:
            return Scalar(z=complex_op(self.to_complex(), other.to_complex()))
        if self._rat is not None and other._rat is not None:
            return Scalar(rat=frac_op(self._rat, other._rat))
        k = self._k or other._k
        return vec_op(self._as_vec(k), other._as_vec(k), k)

    def __add__(self, other):
        try:
            return self._binop(
                other,
                lambda a, b: a + b,
                lambda a, b, k: Scalar._make_cyc(k, tuple(x + y for x, y in zip(a, b))),
                lambda a, b: a + b,
            )
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return self._binop(
                other,
                lambda a, b: a - b,
                lambda a, b, k: Scalar._make_cyc(k, tuple(x - y for x, y in zip(a, b))),
                lambda a, b: a - b,
            )
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return Scalar._coerce(other).__sub__(self)

    def __mul__(self, other):
        def vec_mul(a, b, k):
            out = [_ZERO] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x == 0:
                    continue
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
            return Scalar._make_cyc(k, _reduce_mod_cyclotomic(out, k))

        try:
            return self._binop(other, lambda a, b: a * b, vec_mul, lambda a, b: a * b)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("scalar division by zero")
        if self._z is not None:
            return Scalar(z=1 / self._z)
        if self._rat is not None:
            return Scalar(rat=1 / self._rat)
        phi = [Fraction(c) for c in cyclotomic_polynomial(self._k)]
        g, s = _poly_xgcd(list(self._vec), phi)
        # gcd is a nonzero constant since Phi_k is irreducible
        c = g[0]
        inv = [x / c for x in s]
        return Scalar._make_cyc(self._k, _reduce_mod_cyclotomic(inv, self._k))

    def __truediv__(self, other):
        other = Scalar._coerce(other)
        if other._rat is not None:
            if other._rat == 0:
                raise ZeroDivisionError("scalar division by zero")
            return self * Scalar(rat=1 / other._rat)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar._coerce(other).__truediv__(self)

    def __neg__(self):
        if self._rat is not None:
            return Scalar(rat=-self._rat)
        if self._vec is not None:
            return Scalar(k=self._k, vec=tuple(-c for c in self._vec))
        return Scalar(z=-self._z)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("scalar powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar.integer(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            other = Scalar._coerce(other)
        except TypeError:
            return NotImplemented
        if self._rat is not None and other._rat is not None:
            return self._rat == other._rat
        if self._vec is not None and other._vec is not None:
            return self._k == other._k and self._vec == other._vec
        if self._z is not None and other._z is not None:
            return self._z == other._z
        return False

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    def __hash__(self):
        if self._rat is not None:
            return hash(("rat", self._rat))
        if self._vec is not None:
            return hash(("cyc", self._k, self._vec))
        return hash(("z", self._z))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if self._rat is not None:
            return str(self._rat)
        if self._vec is not None:
            return "[" + ", ".join(str(c) for c in self._vec) + f"]@w{self._k}"
        return repr(self._z)

    # ---- serialization -------------------------------------------------

    def to_json(self):
        if self._rat is not None:
            return {"rat": [self._rat.numerator, self._rat.denominator]}
        if self._vec is not None:
            return {
                "cyc": {
                    "k": self._k,
                    "vec": [[c.numerator, c.denominator] for c in self._vec],
                }
            }
        return {"float": [self._z.real, self._z.imag]}

    @staticmethod
    def from_json(obj) -> "Scalar":
        if "rat" in obj:
            p, q = obj["rat"]
            return Scalar.rational(p, q)
        if "cyc" in obj:
            k = obj["cyc"]["k"]
            vec = tuple(Fraction(p, q) for p, q in obj["cyc"]["vec"])
            return Scalar._make_cyc(k, _reduce_mod_cyclotomic(list(vec), k))
        re, im = obj["float"]
        return Scalar.complex_float(complex(re, im))


ScalarLike = Union[Scalar, int, Fraction]

ZERO = Scalar.integer(0)
ONE = Scalar.integer(1)


def frac_binomial(r: Fraction, m: int) -> Fraction:
    """Generalized binomial coefficient C(r, m) with rational upper index."""
    if m < 0:
        return Fraction(0)
    out = Fraction(1)
    for i in range(m):
        out *= (r - i)
    return out / math.factorial(m)
