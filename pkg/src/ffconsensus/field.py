"""Exact arithmetic in prime fields F_p = {0, 1, ..., p-1}.

Every value is kept in canonical residue form after each operation, so
equality of scalars is plain structural equality.  Only prime moduli are
accepted; the containers in the rest of the package carry one shared
``PrimeField`` per object and reject mixed-modulus operations.
"""

from __future__ import annotations

from typing import Iterator


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (desk-scale n)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """The prime field F_p.  Instances compare equal iff they share p."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
            raise ValueError(f"modulus must be a prime integer, got {p!r}")
        self.p = p

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def scalar(self, value: int) -> "Scalar":
        """Canonical residue of ``value`` as an element of this field."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise ValueError("scalar belongs to a different field")
            return value
        return Scalar(self, value % self.p)

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, 0)

    @property
    def one(self) -> "Scalar":
        return Scalar(self, 1)

    def elements(self) -> Iterator["Scalar"]:
        for v in range(self.p):
            yield Scalar(self, v)

    def random_scalar(self, rng) -> "Scalar":
        return Scalar(self, rng.randrange(self.p))


def _coerce(a: "Scalar", other) -> int:
    """Residue of ``other`` in a's field; rejects foreign-field scalars."""
    if isinstance(other, Scalar):
        if other.field != a.field:
            raise ValueError(
                f"modulus mismatch: F_{a.field.p} vs F_{other.field.p}"
            )
        return other.value
    if isinstance(other, int) and not isinstance(other, bool):
        return other % a.field.p
    return NotImplemented


class Scalar:
    """An element of F_p in canonical form (0 <= value < p)."""

    __slots__ = ("field", "value")

    def __init__(self, field: PrimeField, value: int):
        self.field = field
        self.value = value % field.p

    def __add__(self, other) -> "Scalar":
        v = _coerce(self, other)
        if v is NotImplemented:
            return NotImplemented
        return Scalar(self.field, (self.value + v) % self.field.p)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        v = _coerce(self, other)
        if v is NotImplemented:
            return NotImplemented
        return Scalar(self.field, (self.value - v) % self.field.p)

    def __rsub__(self, other) -> "Scalar":
        v = _coerce(self, other)
        if v is NotImplemented:
            return NotImplemented
        return Scalar(self.field, (v - self.value) % self.field.p)

    def __mul__(self, other) -> "Scalar":
        v = _coerce(self, other)
        if v is NotImplemented:
            return NotImplemented
        return Scalar(self.field, (self.value * v) % self.field.p)

    __rmul__ = __mul__

    def __neg__(self) -> "Scalar":
        return Scalar(self.field, -self.value % self.field.p)

    def __pow__(self, e: int) -> "Scalar":
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative integer")
        return Scalar(self.field, pow(self.value, e, self.field.p))

    def inv(self) -> "Scalar":
        """Multiplicative inverse via Fermat exponentiation; rejects zero."""
        if self.value == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return Scalar(self.field, pow(self.value, self.field.p - 2, self.field.p))

    def __truediv__(self, other) -> "Scalar":
        v = _coerce(self, other)
        if v is NotImplemented:
            return NotImplemented
        return self * Scalar(self.field, v).inv()

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"
