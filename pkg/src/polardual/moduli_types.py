"""Type vectors and the duality involution on them.

A type ``(d1, ..., dg)`` labels a moduli space of polarized abelian
varieties.  Dualizing sends it to

    (d1, d1*dg/d(g-1), ..., d1*dg/d2, dg)

and doing it twice gives back the original type, so the types of a fixed
genus split into orbits of size one or two.

>>> delta_type((1, 1, 2))
TypeVector(d=(1, 2, 2))
>>> is_fixed((1, 2, 4))
True
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import BoundTooLarge, InvalidType

DEFAULT_CAP = 10**6


@dataclass(frozen=True, order=True)
class TypeVector:
    """A divisibility chain ``d1 | d2 | ... | dg`` of positive integers."""

    d: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(self.d))
        if not self.d:
            raise InvalidType("a type vector needs at least one entry", index=0)
        for i, x in enumerate(self.d):
            if isinstance(x, bool) or not isinstance(x, int):
                raise InvalidType(f"entry {i} is not an integer: {x!r}", index=i)
            if x <= 0:
                raise InvalidType(f"entry {i} is not positive: {x}", index=i)
            if i and x % self.d[i - 1]:
                raise InvalidType(
                    f"entry {i - 1} ({self.d[i - 1]}) does not divide entry {i} ({x})",
                    index=i,
                )

    @property
    def g(self) -> int:
        return len(self.d)

    @property
    def exponent(self) -> int:
        return self.d[-1]

    @property
    def degree(self) -> int:
        out = 1
        for x in self.d:
            out *= x
        return out

    def __iter__(self) -> Iterator[int]:
        return iter(self.d)

    def __len__(self) -> int:
        return len(self.d)

    def __getitem__(self, i):
        return self.d[i]

    def __str__(self):
        return "(" + ",".join(map(str, self.d)) + ")"


def validate_type(d: Iterable[int] | TypeVector) -> TypeVector:
    """Return ``d`` as a :class:`TypeVector` or raise ``InvalidType``.

    The exception's ``index`` attribute points at the first bad entry.
    """
    if isinstance(d, TypeVector):
        return d
    return TypeVector(tuple(d))


def delta_type(t) -> TypeVector:
    t = validate_type(t)
    d = t.d
    g = len(d)
    if g == 1:
        return t
    d1, dg = d[0], d[-1]
    middle = tuple(d1 * dg // d[g - 1 - i] for i in range(1, g - 1))
    return TypeVector((d1,) + middle + (dg,))


def d_dual_type(t) -> TypeVector:
    """Type ``(1, dg/d(g-1), ..., dg/d1)`` of the inverse-isogeny polarization."""
    t = validate_type(t)
    dg = t.d[-1]
    return TypeVector(tuple(dg // x for x in reversed(t.d)))


def is_fixed(t) -> bool:
    """Whether ``t`` is fixed by :func:`delta_type`.

    Uses the closed criterion ``d_i * d_(g+1-i) == d1 * dg`` for every ``i``.
    """
    d = validate_type(t).d
    target = d[0] * d[-1]
    return all(d[i] * d[-1 - i] == target for i in range(len(d)))


def count_types(g: int, max_dg: int) -> int:
    """Number of types of genus ``g`` with last entry at most ``max_dg``."""
    if g < 1 or max_dg < 1:
        raise ValueError("g and max_dg must be positive")
    # chains[m] = number of chains d1 | ... | dk = m
    chains = [0] + [1] * max_dg
    for _ in range(g - 1):
        nxt = [0] * (max_dg + 1)
        for a in range(1, max_dg + 1):
            c = chains[a]
            for m in range(a, max_dg + 1, a):
                nxt[m] += c
        chains = nxt
    return sum(chains)


def enumerate_types(g: int, max_dg: int, cap: int = DEFAULT_CAP) -> list[TypeVector]:
    """All types of genus ``g`` with ``dg <= max_dg``, in lexicographic order.

    Raises ``BoundTooLarge`` if more than ``cap`` types would be produced.
    """
    if g < 1 or max_dg < 1:
        raise ValueError("g and max_dg must be positive")
    # every m <= max_dg ends at least the chain (1, ..., 1, m)
    if max_dg > cap:
        raise BoundTooLarge(f"at least {max_dg} types exceed the cap of {cap}")
    projected = count_types(g, max_dg)
    if projected > cap:
        raise BoundTooLarge(f"{projected} types exceed the cap of {cap}")

    out: list[TypeVector] = []
    prefix: list[int] = []

    def extend(prev: int):
        if len(prefix) == g:
            out.append(TypeVector(tuple(prefix)))
            return
        for x in range(prev, max_dg + 1, prev):
            prefix.append(x)
            extend(x)
            prefix.pop()

    extend(1)
    return out


@dataclass
class OrbitReport:
    g: int
    max_dg: int
    types: list[TypeVector]
    orbits: list[list[TypeVector]]
    fixed_count: int
    swap_count: int  # number of two-element orbits
    closed: bool = field(default=True)

    @property
    def fixed_fraction(self) -> float:
        return self.fixed_count / len(self.types) if self.types else 1.0

    def to_json(self, fixed_only: bool = False) -> dict:
        orbits = [o for o in self.orbits if len(o) == 1] if fixed_only else self.orbits
        types = [o[0] for o in orbits] if fixed_only else self.types
        return {
            "g": self.g,
            "max_dg": str(self.max_dg),
            "types": [[str(x) for x in t] for t in types],
            "orbits": [[[str(x) for x in t] for t in o] for o in orbits],
            "fixed_count": self.fixed_count,
            "swap_count": self.swap_count,
        }


def orbit_report(g: int, max_dg: int, cap: int = DEFAULT_CAP) -> OrbitReport:
    """Split the enumerated types into orbits of :func:`delta_type`.

    ``delta_type`` keeps ``dg`` fixed, so the enumerated set is closed under
    it and every orbit lies inside it.
    """
    types = enumerate_types(g, max_dg, cap)
    members = set(types)
    seen: set[TypeVector] = set()
    orbits: list[list[TypeVector]] = []
    closed = True
    for t in types:
        if t in seen:
            continue
        s = delta_type(t)
        closed = closed and s in members and delta_type(s) == t
        orbit = sorted({t, s})
        seen.update(orbit)
        orbits.append(orbit)
    fixed = sum(1 for o in orbits if len(o) == 1)
    return OrbitReport(
        g=g,
        max_dg=max_dg,
        types=types,
        orbits=orbits,
        fixed_count=fixed,
        swap_count=len(orbits) - fixed,
        closed=closed,
    )
