"""Exact field arithmetic: Q, Q(i), and prime fields F_p.

All downstream modules are field-generic; they only ever manipulate
``FieldValue`` objects tied to a ``FieldContext``.  Values are immutable,
stored in canonical form (rationals in lowest terms with positive
denominator, residues in ``[0, p)``), and compare structurally.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, List, Union

from .errors import DeepLocusError

RATIONALS = "rationals"
GAUSSIAN_RATIONALS = "gaussian-rationals"
PRIME_FIELD = "prime-field"

_MAX_PRIME = 2**31


class FieldError(DeepLocusError):
    pass


class ContextMismatch(FieldError):
    """Two values from different field contexts were combined."""


class DivisionByZero(FieldError, ZeroDivisionError):
    """Division by, or inversion of, the zero element."""


class InfiniteField(FieldError):
    """Element enumeration requested for an infinite field."""


class UnsupportedExponent(FieldError):
    """roots_of_minus_one exponent outside the supported range for Q(i)."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class FieldContext:
    """One of Q, Q(i), or F_p.  Use the module factories to construct."""

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: int = 0):
        if kind not in (RATIONALS, GAUSSIAN_RATIONALS, PRIME_FIELD):
            raise ValueError(f"unknown field kind {kind!r}")
        if kind == PRIME_FIELD:
            if not (2 <= p <= _MAX_PRIME) or not _is_prime(p):
                raise ValueError(f"modulus {p} is not a prime in [2, 2^31]")
        else:
            p = 0
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("FieldContext is immutable")

    @property
    def characteristic(self) -> int:
        return self.p

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldContext)
            and self.kind == other.kind
            and self.p == other.p
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.p))

    def __repr__(self) -> str:
        if self.kind == PRIME_FIELD:
            return f"FieldContext(F_{self.p})"
        return f"FieldContext({self.kind})"

    # -- value construction ------------------------------------------------

    def zero(self) -> "FieldValue":
        return self.from_int(0)

    def one(self) -> "FieldValue":
        return self.from_int(1)

    def minus_one(self) -> "FieldValue":
        return self.from_int(-1)

    def from_int(self, n: int) -> "FieldValue":
        if self.kind == PRIME_FIELD:
            return FieldValue(self, n % self.p)
        if self.kind == RATIONALS:
            return FieldValue(self, Fraction(n))
        return FieldValue(self, (Fraction(n), Fraction(0)))

    def rational(self, num: int, den: int = 1) -> "FieldValue":
        if self.kind == PRIME_FIELD:
            if den % self.p == 0:
                raise DivisionByZero(f"denominator {den} vanishes mod {self.p}")
            return self.from_int(num) / self.from_int(den)
        if self.kind == RATIONALS:
            return FieldValue(self, Fraction(num, den))
        return FieldValue(self, (Fraction(num, den), Fraction(0)))

    def gaussian(self, re, im) -> "FieldValue":
        if self.kind != GAUSSIAN_RATIONALS:
            raise ContextMismatch(f"{self!r} has no imaginary unit")
        return FieldValue(self, (Fraction(re), Fraction(im)))

    def i(self) -> "FieldValue":
        return self.gaussian(0, 1)

    def parse(self, text: str) -> "FieldValue":
        """Parse a canonical string ("3/2", "1+2i", "4 mod 5")."""
        s = text.strip().replace(" ", "")
        if self.kind == PRIME_FIELD:
            if "mod" in s:
                r, mod = s.split("mod")
                if int(mod) != self.p:
                    raise ContextMismatch(f"{text!r} is not in F_{self.p}")
                s = r
            return self.from_int(int(s))
        if self.kind == RATIONALS:
            return FieldValue(self, Fraction(s))
        return FieldValue(self, _parse_gaussian(s))

    # -- whole-field operations -------------------------------------------

    def elements(self) -> Iterator["FieldValue"]:
        """All field elements in residue order (prime fields only)."""
        if self.kind != PRIME_FIELD:
            raise InfiniteField(f"{self!r} is infinite")
        for r in range(self.p):
            yield FieldValue(self, r)

    def nonzero_elements(self) -> Iterator["FieldValue"]:
        it = self.elements()
        next(it)
        return it

    def roots_of_minus_one(self, b: int) -> List["FieldValue"]:
        """All alpha with alpha**b == -1, sorted deterministically."""
        if b < 1:
            raise ValueError("exponent must be a positive integer")
        minus_one = self.minus_one()
        if self.kind == PRIME_FIELD:
            return [a for a in self.elements() if a**b == minus_one]
        if self.kind == RATIONALS:
            return [minus_one] if b % 2 == 1 else []
        # Q(i): only the exponents whose solutions are determined by
        # rational data are supported.
        if b == 1:
            return [minus_one]
        if b == 2:
            return [self.gaussian(0, -1), self.gaussian(0, 1)]
        if b == 4:
            # the solutions are primitive 8th roots of unity, none rational
            return []
        raise UnsupportedExponent(f"exponent {b} unsupported over Q(i)")


def rationals() -> FieldContext:
    return FieldContext(RATIONALS)


def gaussian_rationals() -> FieldContext:
    return FieldContext(GAUSSIAN_RATIONALS)


def prime_field(p: int) -> FieldContext:
    return FieldContext(PRIME_FIELD, p)


QQ = rationals()
QI = gaussian_rationals()


def _parse_gaussian(s: str):
    if s in ("i", "+i"):
        return (Fraction(0), Fraction(1))
    if s == "-i":
        return (Fraction(0), Fraction(-1))
    if not s.endswith("i"):
        return (Fraction(s), Fraction(0))
    body = s[:-1]
    split = 0
    for idx in range(1, len(body)):
        if body[idx] in "+-":
            split = idx
            break
    if split:
        re_part, im_part = body[:split], body[split:]
    else:
        re_part, im_part = "", body
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = Fraction(im_part)
    re = Fraction(re_part) if re_part else Fraction(0)
    return (re, im)


Payload = Union[int, Fraction, tuple]


class FieldValue:
    """An immutable element of a FieldContext."""

    __slots__ = ("ctx", "_v")

    def __init__(self, ctx: FieldContext, payload: Payload):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "_v", payload)

    def __setattr__(self, name, value):
        raise AttributeError("FieldValue is immutable")

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        if self.ctx.kind == PRIME_FIELD:
            return self._v == 0
        if self.ctx.kind == RATIONALS:
            return self._v == 0
        return self._v[0] == 0 and self._v[1] == 0

    def __bool__(self) -> bool:
        return not self.is_zero

    def _check(self, other: "FieldValue") -> None:
        if not isinstance(other, FieldValue):
            raise TypeError(f"expected FieldValue, got {type(other).__name__}")
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "FieldValue") -> "FieldValue":
        self._check(other)
        k = self.ctx.kind
        if k == PRIME_FIELD:
            return FieldValue(self.ctx, (self._v + other._v) % self.ctx.p)
        if k == RATIONALS:
            return FieldValue(self.ctx, self._v + other._v)
        (a, b), (c, d) = self._v, other._v
        return FieldValue(self.ctx, (a + c, b + d))

    def __sub__(self, other: "FieldValue") -> "FieldValue":
        return self + (-other)

    def __neg__(self) -> "FieldValue":
        k = self.ctx.kind
        if k == PRIME_FIELD:
            return FieldValue(self.ctx, (-self._v) % self.ctx.p)
        if k == RATIONALS:
            return FieldValue(self.ctx, -self._v)
        a, b = self._v
        return FieldValue(self.ctx, (-a, -b))

    def __mul__(self, other: "FieldValue") -> "FieldValue":
        self._check(other)
        k = self.ctx.kind
        if k == PRIME_FIELD:
            return FieldValue(self.ctx, (self._v * other._v) % self.ctx.p)
        if k == RATIONALS:
            return FieldValue(self.ctx, self._v * other._v)
        (a, b), (c, d) = self._v, other._v
        return FieldValue(self.ctx, (a * c - b * d, a * d + b * c))

    def inverse(self) -> "FieldValue":
        if self.is_zero:
            raise DivisionByZero("cannot invert zero")
        k = self.ctx.kind
        if k == PRIME_FIELD:
            return FieldValue(self.ctx, pow(self._v, -1, self.ctx.p))
        if k == RATIONALS:
            return FieldValue(self.ctx, 1 / self._v)
        a, b = self._v
        norm = a * a + b * b
        return FieldValue(self.ctx, (a / norm, -b / norm))

    def __truediv__(self, other: "FieldValue") -> "FieldValue":
        self._check(other)
        return self * other.inverse()

    def __pow__(self, n: int) -> "FieldValue":
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / hashing -------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldValue)
            and self.ctx == other.ctx
            and self._v == other._v
        )

    def __hash__(self) -> int:
        return hash((self.ctx, self._v))

    def sort_key(self):
        if self.ctx.kind == GAUSSIAN_RATIONALS:
            return self._v
        return self._v

    # -- formatting -------------------------------------------------------------

    def __str__(self) -> str:
        k = self.ctx.kind
        if k == PRIME_FIELD:
            return f"{self._v} mod {self.ctx.p}"
        if k == RATIONALS:
            return str(self._v)
        re, im = self._v
        if im == 0:
            return str(re)
        if im == 1:
            im_str = "i"
        elif im == -1:
            im_str = "-i"
        else:
            im_str = f"{im}i"
        if re == 0:
            return im_str
        sign = "+" if im > 0 else ""
        return f"{re}{sign}{im_str}"

    def __repr__(self) -> str:
        return f"<{self} : {self.ctx!r}>"


def arithmetic(a: FieldValue, b: FieldValue, op: str) -> FieldValue:
    """Dispatch helper for the four field operations by name."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def product(ctx: FieldContext, values) -> FieldValue:
    out = ctx.one()
    for v in values:
        out = out * v
    return out
