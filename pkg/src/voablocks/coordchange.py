"""Local coordinate transformations and their action on graded vectors.

A CoordChange holds the data (c0, c1, c2, ...) of a transformation

    rho(z) = c0 * exp( sum_{n>0} c_n z^{n+1} d/dz ) z,      c0 = rho'(0) != 0,

truncated at a working order M (coefficients beyond M are implicitly zero up
to that order).  Its action on a graded vector is

    c0^{L0} * exp( sum_{n>0} c_n L_n ),

a finite sum on each homogeneous piece because L_n strictly lowers weight.
Coefficients may be Scalars or formal Laurent monomials/series in an
auxiliary parameter (as needed by the k-th-root chart changes), in which
case c0 must stay invertible in that ring.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, frac_binomial
from .series import FracLaurent
from .voa import GradedVector, virasoro_mode

S0 = Scalar.integer(0)
S1 = Scalar.integer(1)


def _is_zero_coef(c):
    return c.is_zero()


def _inv_coef(c):
    if isinstance(c, Scalar):
        return c.inverse()
    return c.inverse()  # FracLaurent: exact for monomials


def _pow_coef(c, h: int):
    return c**h


class CoordChange:
    __slots__ = ("c0", "cs")

    def __init__(self, c0, cs=()):
        c0 = c0 if isinstance(c0, (Scalar, FracLaurent)) else Scalar._coerce(c0)
        if _is_zero_coef(c0):
            raise ValueError("c0 = rho'(0) must be nonzero")
        self.c0 = c0
        cs = [c if isinstance(c, (Scalar, FracLaurent)) else Scalar._coerce(c) for c in cs]
        while cs and _is_zero_coef(cs[-1]):
            cs.pop()
        self.cs = tuple(cs)

    @staticmethod
    def identity() -> "CoordChange":
        return CoordChange(S1)

    @staticmethod
    def dilation(a) -> "CoordChange":
        return CoordChange(a)

    @property
    def order(self) -> int:
        return len(self.cs) + 1

    def coefficient(self, n: int):
        if n == 0:
            return self.c0
        return self.cs[n - 1] if n - 1 < len(self.cs) else S0

    def __eq__(self, other):
        if not isinstance(other, CoordChange):
            return NotImplemented
        return self.c0 == other.c0 and self.cs == other.cs

    def __repr__(self):
        return f"CoordChange(c0={self.c0}, cs={list(self.cs)})"

    def truncated(self, order: int) -> "CoordChange":
        return CoordChange(self.c0, self.cs[: max(order - 1, 0)])

    def to_json(self):
        def cj(c):
            return c.to_json() if isinstance(c, Scalar) else {"series": c.to_json()}

        return {"c0": cj(self.c0), "cs": [cj(c) for c in self.cs]}


# ---------------------------------------------------------------------------
# the exponential flow and its inversion


def _flow_derivation(cs, poly):
    # D = sum_n c_n z^{n+1} d/dz applied to a z-polynomial {deg: coef}
    out = {}
    for m, coef in poly.items():
        for n, cn in enumerate(cs, start=1):
            if _is_zero_coef(cn):
                continue
            d = m + n
            term = cn * coef * m
            if d in out:
                out[d] = out[d] + term
            else:
                out[d] = term
    return out


def taylor_coefficients(rho: CoordChange, order: int):
    """Taylor coefficients [a1, ..., a_order] of rho(z) around 0."""
    poly = {1: S1}
    total = {1: S1}
    j = 1
    while poly:
        poly = _flow_derivation(rho.cs, poly)
        inv = Fraction(1, j)
        poly = {m: c * inv for m, c in poly.items() if m <= order}
        for m, c in poly.items():
            total[m] = total[m] + c if m in total else c
        j += 1
    return [rho.c0 * total.get(m, S0) for m in range(1, order + 1)]


def solve_coefficients(taylor) -> CoordChange:
    """Recover (c0, c1, ...) from Taylor data [a1, a2, ...] with a1 != 0.

    Order-by-order elimination: at order z^{n+1} the unknown c_n enters
    linearly with coefficient c0, all lower orders being already matched.
    """
    taylor = [a if isinstance(a, (Scalar, FracLaurent)) else Scalar._coerce(a) for a in taylor]
    if not taylor or _is_zero_coef(taylor[0]):
        raise ValueError("a1 = rho'(0) must be nonzero; not a coordinate")
    c0 = taylor[0]
    c0_inv = _inv_coef(c0)
    cs = []
    for n in range(1, len(taylor)):
        approx = taylor_coefficients(CoordChange(c0, cs + [S0]), n + 1)
        cs.append((taylor[n] - approx[n]) * c0_inv)
    return CoordChange(c0, cs)


def compose(rho1: CoordChange, rho2: CoordChange, order: int) -> CoordChange:
    """Coefficients of z -> rho1(rho2(z)) to the given order."""
    t1 = taylor_coefficients(rho1, order)
    t2 = taylor_coefficients(rho2, order)
    # polynomial composition with generic ring coefficients
    out = [S0] * order  # a_1 .. a_order
    power = [S1] + [S0] * (order - 1)  # t2^e as coefficient list on z^1..z^order, e=0 -> 1*z^0 handled apart
    # build t2^e iteratively; t2 has no constant term so t2^e starts at z^e
    cur = None
    for e, a in enumerate(t1, start=1):
        if cur is None:
            cur = list(t2)
        else:
            nxt = [S0] * order
            for i, x in enumerate(cur, start=1):
                if _is_zero_coef(x):
                    continue
                for j, y in enumerate(t2, start=1):
                    if i + j <= order and not _is_zero_coef(y):
                        nxt[i + j - 1] = nxt[i + j - 1] + x * y
            cur = nxt
        if _is_zero_coef(a):
            continue
        for i in range(order):
            if not _is_zero_coef(cur[i]):
                out[i] = out[i] + a * cur[i]
    return solve_coefficients(out)


def invert(rho: CoordChange, order: int) -> CoordChange:
    """The compositional inverse to the given order."""
    t = taylor_coefficients(rho, order)
    if any(isinstance(a, FracLaurent) for a in t):
        raise ValueError("inversion is implemented for scalar coefficients")
    f = FracLaurent("z", 1, {Fraction(m): a for m, a in enumerate(t, start=1)})
    g = f.truncate(order + 1).reverse(order)
    return solve_coefficients([g.coeff(m) for m in range(1, order + 1)])


# ---------------------------------------------------------------------------
# geometric constructors


def chart_transition(eta: FracLaurent, mu: FracLaurent, p, order: int) -> CoordChange:
    """The transformation carrying the local coordinate mu - mu(p) to
    eta - eta(p) at the point p, i.e. the unique rho with
    eta - eta(p) = rho(mu - mu(p)) near p.
    """
    p = p if isinstance(p, Scalar) else Scalar._coerce(p)

    def local(f):
        # f(p + t) - f(p) as a series in t
        shifted = {}
        for e, c in f.terms.items():
            if e.denominator != 1 or e < 0:
                raise ValueError("chart functions must be polynomials")
            for m in range(1, int(e) + 1):
                term = c * Scalar.integer(int(frac_binomial(Fraction(e), m))) * p ** (int(e) - m)
                shifted[Fraction(m)] = shifted.get(Fraction(m), S0) + term
        return FracLaurent("t", 1, shifted)

    te = local(eta).truncate(order + 1)
    tm = local(mu).truncate(order + 1)
    inv = tm.drop_truncation().reverse(order)
    comp = te.compose(inv, order + 1)
    return solve_coefficients([comp.coeff(m) for m in range(1, order + 1)])


def kth_root_shift(k: int, order: int, s="s") -> CoordChange:
    """The chart change from (zeta^k - p^k) to (zeta - p) at a point p with
    p = s: the transformation t -> (s^k + t)^(1/k) - s, whose Taylor
    coefficient at t^m is C(1/k, m) s^(1-mk).

    ``s`` may be a variable name (giving exact Laurent-monomial coefficients)
    or an explicit Scalar/FracLaurent value of the point.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if isinstance(s, str):
        base = FracLaurent.variable(s)
    elif isinstance(s, (Scalar, FracLaurent)):
        base = s
    else:
        base = Scalar._coerce(s)
    taylor = []
    for m in range(1, order + 1):
        b = frac_binomial(Fraction(1, k), m)
        coef = _pow_coef(base, 1 - m * k) * Scalar.from_fraction(b)
        if isinstance(coef, FracLaurent) and set(coef.terms) <= {Fraction(0)} and coef.trunc is None:
            coef = coef.terms.get(Fraction(0), S0)  # k = 1: the exponent drops out
        taylor.append(coef)
    return solve_coefficients(taylor)


# ---------------------------------------------------------------------------
# the module action


def apply_coord_change(rho: CoordChange, w: GradedVector) -> GradedVector:
    """rho'(0)^{L0} exp(sum_{n>0} c_n L_n) applied to a graded vector."""
    total = GradedVector(w.space)
    for h, part in w.weight_components().items():
        # exp part: L_n lowers weight by n, so at most h applications act
        acc = part
        summand = part
        j = 1
        while not summand.is_zero():
            step = GradedVector(w.space)
            for n, cn in enumerate(rho.cs, start=1):
                if _is_zero_coef(cn):
                    continue
                ln = virasoro_mode(n, summand)
                if not ln.is_zero():
                    step = step + ln.scale(cn)
            summand = step.scale(Fraction(1, j))
            acc = acc + summand
            j += 1
        # c0^{L0}: scale each homogeneous output piece by c0^weight
        for hw, piece in acc.weight_components().items():
            total = total + piece.scale(_pow_coef(rho.c0, hw))
    return total
