"""Exact arithmetic in cyclotomic fields.

A CycloNumber is an element of Q(zeta_M), zeta_M = exp(2*pi*i/M), stored
in the power basis 1, zeta, ..., zeta^(phi(M)-1) with Fraction
coefficients.  Mixed-conductor arithmetic promotes both operands to the
lcm of their conductors.  Conductors stay small here (at most 192 for
the level-8 modular data), so dense coefficient vectors, schoolbook
products and a precomputed monomial-reduction table are entirely
adequate.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import cache
from math import gcd

__all__ = [
    "CycloNumber",
    "zeta",
    "from_rational",
    "qnumber",
    "qnumber_frac",
    "sqrt_int",
    "to_float",
    "euler_phi",
    "cyclotomic_poly",
]


@cache
def euler_phi(m: int) -> int:
    assert m >= 1
    result, n, p = m, m, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # long division of integer polynomials, ascending coefficients;
    # only used where the division is exact over Z (den monic up to sign)
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        assert c % lead == 0
        q = c // lead
        quot[i - dd] = q
        for j, d in enumerate(den):
            num[i - dd + j] -= q * d
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


@cache
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, ascending order."""
    if m == 1:
        return (-1, 1)
    f = [0] * (m + 1)
    f[0], f[m] = -1, 1  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            f, rem = _poly_divmod_int(f, list(cyclotomic_poly(d)))
            assert rem == [0]
    assert len(f) == euler_phi(m) + 1 and f[-1] == 1
    return tuple(f)


@cache
def _reduction_table(m: int) -> tuple[tuple[int, ...], ...]:
    """x^e mod Phi_m for e = phi(m) .. max(m, 2*phi(m)) - 1, as int rows."""
    phi = euler_phi(m)
    poly = cyclotomic_poly(m)
    top = max(m, 2 * phi)
    base = [-poly[j] for j in range(phi)]  # x^phi mod Phi_m
    rows = [tuple(base)]
    cur = list(base)
    while len(rows) < top - phi:
        lead = cur[-1]
        cur = [0] + cur[:-1]  # multiply by x
        if lead:
            for j in range(phi):
                cur[j] += lead * base[j]
        rows.append(tuple(cur))
    return tuple(rows)


def _reduce(vec: list[Fraction], m: int) -> tuple[Fraction, ...]:
    """Reduce an exponent vector (any length < max(m, 2 phi(m))) mod Phi_m."""
    phi = euler_phi(m)
    if len(vec) <= phi:
        out = list(vec) + [Fraction(0)] * (phi - len(vec))
        return tuple(out)
    table = _reduction_table(m)
    out = list(vec[:phi])
    for e in range(phi, len(vec)):
        c = vec[e]
        if c:
            row = table[e - phi]
            for j in range(phi):
                if row[j]:
                    out[j] += c * row[j]
    return tuple(out)


class CycloNumber:
    """Element of Q(zeta_conductor) in the power basis."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs):
        phi = euler_phi(conductor)
        coeffs = tuple(Fraction(c) for c in coeffs)
        assert len(coeffs) == phi, (conductor, len(coeffs))
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *a):
        raise AttributeError("CycloNumber is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def rational(value) -> "CycloNumber":
        return CycloNumber(1, (Fraction(value),))

    @staticmethod
    def root_of_unity(m: int, k: int = 1) -> "CycloNumber":
        k %= m
        vec = [Fraction(0)] * (k + 1)
        vec[k] = Fraction(1)
        return CycloNumber(m, _reduce(vec, m))

    # -- conductor management -----------------------------------------

    def promote(self, m: int) -> "CycloNumber":
        """Rewrite in Q(zeta_m); self.conductor must divide m."""
        if m == self.conductor:
            return self
        assert m % self.conductor == 0
        step = m // self.conductor
        vec = [Fraction(0)] * ((len(self.coeffs) - 1) * step + 1)
        for j, c in enumerate(self.coeffs):
            vec[j * step] = c
        return CycloNumber(m, _reduce(vec, m))

    @staticmethod
    def _common(a: "CycloNumber", b: "CycloNumber"):
        m = a.conductor * b.conductor // gcd(a.conductor, b.conductor)
        return a.promote(m), b.promote(m)

    # -- ring operations ----------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, CycloNumber):
            return x
        if isinstance(x, (int, Fraction)):
            return CycloNumber.rational(x)
        return NotImplemented

    def __add__(self, other):
        other = CycloNumber._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = CycloNumber._common(self, other)
        return CycloNumber(a.conductor, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.conductor, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = CycloNumber._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return CycloNumber(self.conductor, tuple(c * f for c in self.coeffs))
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = CycloNumber._common(self, other)
        n = len(a.coeffs)
        conv = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        conv[i + j] += x * y
        return CycloNumber(a.conductor, _reduce(conv, a.conductor))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero CycloNumber")
        m = self.conductor
        phi = cyclotomic_poly(m)
        # extended Euclid over Q[x]: u*self + v*Phi = gcd (a nonzero constant)
        r0 = [Fraction(c) for c in phi]
        r1 = list(self.coeffs)
        while len(r1) > 1 and r1[-1] == 0:
            r1.pop()
        u0, u1 = [Fraction(0)], [Fraction(1)]
        while True:
            while len(r1) > 1 and r1[-1] == 0:
                r1.pop()
            if len(r1) == 1:
                break
            q, r = _poly_divmod_frac(r0, r1)
            r0, r1 = r1, r
            u0, u1 = u1, _poly_sub(u0, _poly_mul(q, u1))
        if r1 == [Fraction(0)]:
            raise ZeroDivisionError("not invertible (zero divisor?)")
        g = r1[0]
        inv = [c / g for c in u1]
        return CycloNumber(m, _reduce(inv, m))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return CycloNumber(self.conductor, tuple(c / f for c in self.coeffs))
        if not isinstance(other, CycloNumber):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = CycloNumber._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycloNumber.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- galois action -------------------------------------------------

    def galois(self, a: int) -> "CycloNumber":
        """Apply zeta -> zeta^a; a must be coprime to the conductor."""
        m = self.conductor
        assert gcd(a, m) == 1
        a %= m
        vec = [Fraction(0)] * m
        for j, c in enumerate(self.coeffs):
            if c:
                vec[(a * j) % m] += c
        return CycloNumber(m, _reduce(vec, m))

    def conjugate(self) -> "CycloNumber":
        return self.galois(self.conductor - 1) if self.conductor > 2 else self

    # -- predicates and conversions -------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number: %r" % (self,))
        return self.coeffs[0]

    def complex_value(self) -> complex:
        m = self.conductor
        return sum(
            float(c) * cmath.exp(2j * cmath.pi * j / m)
            for j, c in enumerate(self.coeffs)
            if c
        ) or 0j

    def __eq__(self, other):
        other = CycloNumber._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = CycloNumber._common(self, other)
        return a.coeffs == b.coeffs

    __hash__ = None  # equality crosses conductors; use to_json() as a key

    def __repr__(self):
        return "CycloNumber(%d, %s)" % (
            self.conductor,
            [str(c) for c in self.coeffs],
        )

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {"conductor": self.conductor, "coeffs": [str(c) for c in self.coeffs]}

    @staticmethod
    def from_json(obj: dict) -> "CycloNumber":
        return CycloNumber(int(obj["conductor"]), [Fraction(c) for c in obj["coeffs"]])


# -- Fraction polynomial helpers for the extended Euclid ----------------


def _poly_divmod_frac(num: list[Fraction], den: list[Fraction]):
    num = list(num)
    while len(den) > 1 and den[-1] == 0:
        den = den[:-1]
    dd = len(den) - 1
    lead = den[-1]
    if len(num) - 1 < dd:
        return [Fraction(0)], num
    quot = [Fraction(0)] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q = c / lead
        quot[i - dd] = q
        for j, d in enumerate(den):
            num[i - dd + j] -= q * d
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


# -- public helpers -----------------------------------------------------


def zeta(m: int, k: int = 1) -> CycloNumber:
    """The root of unity exp(2*pi*i*k/m)."""
    return CycloNumber.root_of_unity(m, k)


def from_rational(value) -> CycloNumber:
    return CycloNumber.rational(value)


def qnumber(n: int, kappa: int) -> CycloNumber:
    """Quantum integer [n] at q = exp(i*pi/kappa).

    [n] = (q^n - q^-n)/(q - q^-1) = q^(n-1) + q^(n-3) + ... + q^(1-n),
    so no division is needed for integer n.
    """
    if n < 0:
        return -qnumber(-n, kappa)
    m = 2 * kappa
    vec = [Fraction(0)] * m
    for j in range(n):
        e = (n - 1 - 2 * j) % m
        vec[e] += 1
    return CycloNumber(m, _reduce(vec, m))


def qnumber_frac(x: Fraction, kappa: int) -> CycloNumber:
    """Quantum number [x] at q = exp(i*pi/kappa) for half-integer x."""
    x = Fraction(x)
    if x.denominator == 1:
        return qnumber(x.numerator, kappa)
    assert x.denominator == 2, x
    u = zeta(4 * kappa)  # u^2 = q
    n2 = x.numerator  # x = n2/2, so q^x = u^n2
    num = u ** n2 - u ** (-n2)
    den = u ** 2 - u ** (-2)
    return num / den


def sqrt_int(n: int) -> CycloNumber:
    """Exact square root of a positive integer whose squarefree part
    divides 30 (covers every radical appearing in this package)."""
    assert n > 0
    square, rest = 1, n
    p = 2
    while p * p <= rest:
        while rest % (p * p) == 0:
            rest //= p * p
            square *= p
        p += 1
    parts = {
        1: CycloNumber.rational(1),
        2: zeta(8) + zeta(8, -1),
        3: zeta(12) + zeta(12, -1),
        5: 2 * (zeta(5) + zeta(5, 4)) + 1,
    }
    out = CycloNumber.rational(square)
    for p in (2, 3, 5):
        if rest % p == 0:
            out = out * parts[p]
            rest //= p
    if rest != 1:
        raise ValueError("no cyclotomic square root rule for %d" % n)
    return out


def to_float(x) -> float:
    """Real value of a (real) CycloNumber, int or Fraction."""
    if isinstance(x, CycloNumber):
        z = x.complex_value()
        assert abs(z.imag) < 1e-9, "not a real number: %r" % (x,)
        return z.real
    return float(x)
