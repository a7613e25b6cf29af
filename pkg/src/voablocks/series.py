"""Formal Laurent series with exponents on a fractional lattice (1/k)Z.

A FracLaurent stores finitely many terms ``exponent -> Scalar`` where every
exponent is an exact rational whose denominator divides the lattice constant
``k``.  An optional truncation order marks the first unknown exponent: terms
at exponents >= trunc are not stored and must not be asked for.  Operations
propagate the tightest truncation they can justify and raise TruncationError
rather than silently zero-filling.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, frac_binomial


class TruncationError(ArithmeticError):
    pass


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a * b // gcd(a, b)


class FracLaurent:
    __slots__ = ("var", "k", "terms", "trunc")

    def __init__(self, var: str, k: int = 1, terms=None, trunc=None):
        if k < 1:
            raise ValueError("lattice denominator must be positive")
        self.var = var
        self.k = k
        self.trunc = Fraction(trunc) if trunc is not None else None
        clean = {}
        for e, c in (terms or {}).items():
            e = Fraction(e)
            if e.denominator != 1 and k % e.denominator != 0:
                raise ValueError(f"exponent {e} not on the (1/{k})Z lattice")
            if self.trunc is not None and e >= self.trunc:
                continue
            c = c if isinstance(c, Scalar) else Scalar._coerce(c)
            if not c.is_zero():
                clean[e] = c
        self.terms = clean

    # ---- constructors --------------------------------------------------

    @staticmethod
    def zero(var: str, k: int = 1, trunc=None) -> "FracLaurent":
        return FracLaurent(var, k, {}, trunc)

    @staticmethod
    def one(var: str, k: int = 1) -> "FracLaurent":
        return FracLaurent(var, k, {Fraction(0): Scalar.integer(1)})

    @staticmethod
    def monomial(var: str, exp, coef=1, k: int = None) -> "FracLaurent":
        exp = Fraction(exp)
        if k is None:
            k = exp.denominator
        return FracLaurent(var, k, {exp: Scalar._coerce(coef) if not isinstance(coef, Scalar) else coef})

    @staticmethod
    def variable(var: str, k: int = 1) -> "FracLaurent":
        return FracLaurent.monomial(var, 1, 1, k)

    # ---- basic queries ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1 and self.trunc is None

    def valuation(self):
        """Lowest stored exponent; None for the (exact) zero series."""
        return min(self.terms) if self.terms else None

    def degree(self):
        return max(self.terms) if self.terms else None

    def coeff(self, exp) -> Scalar:
        exp = Fraction(exp)
        if self.trunc is not None and exp >= self.trunc:
            raise TruncationError(
                f"coefficient at {self.var}^{exp} is beyond truncation order {self.trunc}"
            )
        return self.terms.get(exp, Scalar.integer(0))

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, FracLaurent):
            return NotImplemented
        return self.var == other.var and self.terms == other.terms and self.trunc == other.trunc

    def __hash__(self):
        return hash((self.var, self.trunc, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"({c})*{self.var}^{e}" for e, c in self.sorted_terms())
        tail = f" + O({self.var}^{self.trunc})" if self.trunc is not None else ""
        return body + tail

    # ---- ring operations -------------------------------------------------

    def _check_var(self, other):
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def _join(self, other):
        return _lcm(self.k, other.k)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = FracLaurent(self.var, 1, {Fraction(0): Scalar._coerce(other) if not isinstance(other, Scalar) else other})
        if not isinstance(other, FracLaurent):
            return NotImplemented
        self._check_var(other)
        trunc = self.trunc
        if other.trunc is not None:
            trunc = other.trunc if trunc is None else min(trunc, other.trunc)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return FracLaurent(self.var, self._join(other), terms, trunc)

    __radd__ = __add__

    def __neg__(self):
        return FracLaurent(self.var, self.k, {e: -c for e, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self + (-(Scalar._coerce(other) if not isinstance(other, Scalar) else other))
        if not isinstance(other, FracLaurent):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FracLaurent":
        c = c if isinstance(c, Scalar) else Scalar._coerce(c)
        if c.is_zero():
            return FracLaurent(self.var, self.k, {}, self.trunc)
        return FracLaurent(self.var, self.k, {e: x * c for e, x in self.terms.items()}, self.trunc)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, FracLaurent):
            return NotImplemented
        self._check_var(other)
        # Truncation of a Cauchy product: unknown terms of one factor shift by
        # the valuation of the other.
        trunc = None
        if self.trunc is not None or other.trunc is not None:
            cands = []
            if self.trunc is not None:
                if other.is_zero() and other.trunc is None:
                    cands.append(None)
                else:
                    vb = other.valuation()
                    cands.append(None if vb is None else self.trunc + vb)
            if other.trunc is not None:
                if self.is_zero() and self.trunc is None:
                    cands.append(None)
                else:
                    va = self.valuation()
                    cands.append(None if va is None else other.trunc + va)
            cands = [c for c in cands if c is not None]
            trunc = min(cands) if cands else None
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if trunc is not None and e >= trunc:
                    continue
                prod = c1 * c2
                terms[e] = terms[e] + prod if e in terms else prod
        return FracLaurent(self.var, self._join(other), terms, trunc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "FracLaurent":
        if not isinstance(n, int):
            raise TypeError("series powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = FracLaurent.one(self.var, self.k)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self, order=None) -> "FracLaurent":
        """Multiplicative inverse as a series ascending from -valuation.

        Exact (no truncation) when self is a monomial; otherwise the result
        carries a truncation order, derived from self.trunc or from ``order``
        (the number of correct terms counted from the leading one).
        """
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("inverting the zero series")
        lead = self.terms[v]
        if len(self.terms) == 1:
            out = FracLaurent(self.var, self.k, {-v: lead.inverse()})
            if self.trunc is None:
                return out
            known = self.trunc - v
        else:
            known = None if self.trunc is None else self.trunc - v
        if known is None:
            if order is None:
                raise TruncationError("inverse of a non-monomial series needs an order")
            known = Fraction(order)
        if order is not None:
            known = min(known, Fraction(order))
        # u = 1 - self / (lead * x^v); inverse = lead^-1 x^-v * sum u^m
        linv = lead.inverse()
        rel = FracLaurent(self.var, self.k, {e - v: -(c * linv) for e, c in self.terms.items() if e != v})
        acc = FracLaurent.one(self.var, self.k)
        out = FracLaurent.one(self.var, self.k)
        step = min((e for e in rel.terms), default=None)
        if step is not None:
            m = 1
            while m * step < known:
                acc = (acc * rel).truncate(known)
                if acc.is_zero():
                    break
                out = out + acc
                m += 1
        out = out.truncate(known)
        return FracLaurent(
            self.var, self.k, {e - v: c * linv for e, c in out.terms.items()}, known - v
        )

    def truncate(self, order) -> "FracLaurent":
        order = Fraction(order)
        trunc = order if self.trunc is None else min(self.trunc, order)
        return FracLaurent(self.var, self.k, {e: c for e, c in self.terms.items() if e < trunc}, trunc)

    def drop_truncation(self) -> "FracLaurent":
        """Assert exactness: reinterpret a truncated value as exact."""
        return FracLaurent(self.var, self.k, dict(self.terms), None)

    def shift(self, exp) -> "FracLaurent":
        exp = Fraction(exp)
        return FracLaurent(
            self.var,
            _lcm(self.k, exp.denominator),
            {e + exp: c for e, c in self.terms.items()},
            None if self.trunc is None else self.trunc + exp,
        )

    def rename(self, var: str) -> "FracLaurent":
        return FracLaurent(var, self.k, dict(self.terms), self.trunc)

    # ---- calculus-flavored operations -------------------------------------

    def residue(self) -> Scalar:
        """Coefficient of x^-1, the residue of self dx."""
        if self.trunc is not None and self.trunc <= -1:
            raise TruncationError("residue lies beyond the truncation order")
        return self.terms.get(Fraction(-1), Scalar.integer(0))

    def derivative(self) -> "FracLaurent":
        return FracLaurent(
            self.var,
            self.k,
            {e - 1: c * Fraction(e) for e, c in self.terms.items() if e != 0},
            None if self.trunc is None else self.trunc - 1,
        )

    def compose(self, inner: "FracLaurent", order) -> "FracLaurent":
        """self(inner), truncated at the given order.

        Requires inner to vanish at 0 (valuation >= lattice step > 0) and self
        to be a power series (no negative exponents).
        """
        order = Fraction(order)
        iv = inner.valuation()
        if inner.terms and iv <= 0:
            raise ValueError("inner series must have positive valuation")
        if self.terms and self.valuation() < 0:
            raise ValueError("outer series must have no negative exponents")
        if self.trunc is not None and inner.terms:
            order = min(order, self.trunc * iv)
        if inner.trunc is not None:
            order = min(order, inner.trunc)
        out = FracLaurent.zero(inner.var, inner.k)
        power = FracLaurent.one(inner.var, inner.k)
        prev = Fraction(0)
        for e, c in self.sorted_terms():
            if e.denominator != 1:
                raise ValueError("outer series must live on the integer lattice")
            if inner.is_zero():
                if e == 0:
                    out = out + FracLaurent(inner.var, inner.k, {Fraction(0): c})
                continue
            if e * iv >= order:
                break
            for _ in range(int(e - prev)):
                power = (power * inner).truncate(order)
            prev = e
            out = out + power.scale(c)
        return out.truncate(order)

    def reverse(self, order: int) -> "FracLaurent":
        """Compositional inverse g with self(g(x)) = x, to the given order."""
        if self.coeff(1).is_zero():
            raise ValueError("compositional inverse needs a nonzero linear term")
        if self.terms and self.valuation() < 1:
            raise ValueError("compositional inverse needs valuation 1")
        a1 = self.coeff(1)
        g = FracLaurent(self.var, self.k, {Fraction(1): a1.inverse()})
        for m in range(2, order + 1):
            err = self.compose(g, m + 1).coeff(m)
            if not err.is_zero():
                g = g + FracLaurent(self.var, self.k, {Fraction(m): -(err / a1)})
        return g

    # ---- evaluation and expansion helpers ---------------------------------

    def evaluate(self, x: Scalar) -> Scalar:
        """Exact evaluation; refuses truncated series (sum their terms explicitly)."""
        if self.trunc is not None:
            raise TruncationError("evaluate called on a truncated series")
        return self.evaluate_partial(x)

    def evaluate_partial(self, x: Scalar) -> Scalar:
        x = x if isinstance(x, Scalar) else Scalar._coerce(x)
        total = Scalar.integer(0)
        for e, c in self.terms.items():
            if e.denominator != 1:
                raise ValueError("cannot evaluate fractional exponents without a branch")
            total = total + c * x ** int(e)
        return total

    def evaluate_complex(self, x: complex) -> complex:
        total = 0j
        for e, c in self.terms.items():
            total += c.to_complex() * complex(x) ** float(e)
        return total

    def to_json(self):
        return {
            "var": self.var,
            "k": self.k,
            "terms": [
                [e.numerator, e.denominator, c.to_json()] for e, c in self.sorted_terms()
            ],
            "trunc": None
            if self.trunc is None
            else [self.trunc.numerator, self.trunc.denominator],
        }

    @staticmethod
    def from_json(obj) -> "FracLaurent":
        terms = {Fraction(p, q): Scalar.from_json(c) for p, q, c in obj["terms"]}
        trunc = obj.get("trunc")
        return FracLaurent(
            obj["var"], obj["k"], terms, None if trunc is None else Fraction(*trunc)
        )


def binomial_expand(lead_pow, rel: FracLaurent, r: Fraction, order) -> "FracLaurent":
    """(c + u)^r expanded as lead_pow * sum C(r, m) (u/c)^m for valuation(u) > 0.

    ``rel`` must already be u/c (the caller divides by the leading term) and
    ``lead_pow`` must be the exact value of c^r (Scalar or monomial series).
    """
    r = Fraction(r)
    order = Fraction(order)
    out = FracLaurent.one(rel.var, rel.k)
    power = FracLaurent.one(rel.var, rel.k)
    m = 1
    step = rel.valuation()
    if step is not None:
        if step <= 0:
            raise ValueError("relative part must vanish at 0")
        while m * step < order:
            power = (power * rel).truncate(order)
            if power.is_zero():
                break
            out = out + power.scale(Scalar.from_fraction(frac_binomial(r, m)))
            m += 1
    out = out.truncate(order)
    if isinstance(lead_pow, FracLaurent):
        if lead_pow.var != rel.var:
            raise ValueError("leading factor must share the expansion variable")
        return out * lead_pow
    return out.scale(lead_pow)
