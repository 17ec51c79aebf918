"""Dense univariate polynomials with arbitrary-precision integer coefficients.

Coefficients are stored in ascending order (``coeffs[i]`` multiplies x^i) and
trailing zeros are stripped, so the zero polynomial is the empty tuple.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IntegrityError

# Below this length (of the shorter factor) products use the schoolbook
# double loop; above it they go through Kronecker substitution.
SCHOOLBOOK_THRESHOLD = 64


@dataclass(frozen=True, eq=True)
class IntPoly:
    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __mul__(self, other: IntPoly) -> IntPoly:
        return poly_mul(self, other)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            body = "" if (mag == 1 and i > 0) else str(mag)
            if i == 1:
                body += "x"
            elif i > 1:
                body += f"x^{i}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> str:
        return poly_to_json(self)

    @classmethod
    def from_json(cls, text: str) -> IntPoly:
        return poly_from_json(text)


ONE = IntPoly([1])


def _schoolbook(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return out


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    """Evaluate the polynomial at 2**(8*nbytes)."""
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value: int, nbytes: int, length: int) -> list[int]:
    """Inverse of :func:`_pack` for coefficients of magnitude < 2**(8*nbytes-1)."""
    half = 1 << (8 * nbytes - 1)
    bias = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * length, "little")
    raw = (value + bias).to_bytes(nbytes * length, "little")
    return [
        int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") - half
        for i in range(length)
    ]


def _kronecker(a: Sequence[int], b: Sequence[int]) -> list[int]:
    ha = max(abs(c) for c in a)
    hb = max(abs(c) for c in b)
    bound = ha * hb * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2 + 7) // 8
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    return _unpack(prod, nbytes, len(a) + len(b) - 1)


def poly_mul(f: IntPoly, g: IntPoly) -> IntPoly:
    if f.is_zero() or g.is_zero():
        return IntPoly()
    a, b = f.coeffs, g.coeffs
    if min(len(a), len(b)) < SCHOOLBOOK_THRESHOLD:
        return IntPoly(_schoolbook(a, b))
    return IntPoly(_kronecker(a, b))


def poly_exact_div(f: IntPoly, g: IntPoly) -> IntPoly:
    """Quotient q with q*g == f; raises IntegrityError unless g divides f.

    Works upward from the constant term, so each step divides by g's
    constant term (assumed to be a unit in practice, e.g. cyclotomic
    factors) and the left-over high part must vanish.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return IntPoly()
    gc = g.coeffs
    shift = 0
    while gc[shift] == 0:
        shift += 1
    fc = f.coeffs
    if any(fc[:shift]):
        raise IntegrityError("non-exact division: remainder in low terms")
    fc, gc = fc[shift:], gc[shift:]
    dq = len(fc) - len(gc)
    if dq < 0:
        raise IntegrityError("non-exact division: divisor degree exceeds dividend")
    g0 = gc[0]
    taps = [(j, c) for j, c in enumerate(gc) if j and c]
    work = list(fc)
    q = [0] * (dq + 1)
    for i in range(dq + 1):
        r = work[i]
        if r == 0:
            continue
        qi, rem = divmod(r, g0)
        if rem:
            raise IntegrityError("non-exact division: coefficient not divisible")
        q[i] = qi
        for j, c in taps:
            work[i + j] -= qi * c
    if any(work[dq + 1 :]):
        raise IntegrityError("non-exact division: nonzero remainder")
    return IntPoly(q)


def poly_height(f: IntPoly) -> int:
    return max((abs(c) for c in f.coeffs), default=0)


def poly_inflate(f: IntPoly, m: int) -> IntPoly:
    """f(x**m)."""
    if m < 1:
        raise ValueError("inflation factor must be >= 1")
    if m == 1 or f.is_zero():
        return f
    out = [0] * (m * f.degree + 1)
    out[::m] = f.coeffs
    return IntPoly(out)


def x_pow_minus_one(n: int) -> IntPoly:
    if n < 1:
        raise ValueError("n must be >= 1")
    c = [0] * (n + 1)
    c[0], c[n] = -1, 1
    return IntPoly(c)


def poly_to_json(f: IntPoly) -> str:
    """JSON array of decimal strings, ascending order."""
    return json.dumps([str(c) for c in f.coeffs])


def poly_from_json(text: str) -> IntPoly:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("polynomial JSON must be an array")
    return IntPoly(int(v) for v in data)
