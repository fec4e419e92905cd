"""Trivariate bicycle code construction.

A code is fixed by two cyclic orders ``l, m`` and two lists of monomials in
``x = S_l (x) I_m``, ``y = I_l (x) S_m`` and ``z = S_l (x) S_m``. Since
``z = xy``, every monomial is stored as a pair ``(ex, ey)`` in ``Z_l x Z_m``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gf2_core as gf2
from .gf2_core import BinaryMatrix, BinaryVector


class SpecError(ValueError):
    """Malformed or degenerate code specification."""


@dataclass(frozen=True, order=True)
class Monomial:
    ex: int
    ey: int

    @classmethod
    def of(cls, var: str, power: int, l: int, m: int) -> Monomial:
        if var == "1":
            return cls(0, 0)
        if var == "x":
            return cls(power % l, 0)
        if var == "y":
            return cls(0, power % m)
        if var == "z":
            return cls(power % l, power % m)
        raise SpecError(f"unknown variable {var!r}")

    def mul(self, other: Monomial, l: int, m: int) -> Monomial:
        return Monomial((self.ex + other.ex) % l, (self.ey + other.ey) % m)

    def inverse(self, l: int, m: int) -> Monomial:
        """Group inverse, which is also the matrix transpose."""
        return Monomial(-self.ex % l, -self.ey % m)

    def order(self, l: int, m: int) -> int:
        return math.lcm(l // math.gcd(l, self.ex), m // math.gcd(m, self.ey))

    def __str__(self) -> str:
        parts = []
        if self.ex:
            parts.append("x" if self.ex == 1 else f"x^{self.ex}")
        if self.ey:
            parts.append("y" if self.ey == 1 else f"y^{self.ey}")
        return "".join(parts) or "1"


@dataclass(frozen=True)
class CodeSpec:
    l: int
    m: int
    a_terms: tuple[Monomial, ...]
    b_terms: tuple[Monomial, ...]
    # display strings of the terms as the author wrote them
    a_labels: tuple[str, ...] = field(default=(), compare=False)
    b_labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.l < 1 or self.m < 1:
            raise SpecError("l and m must be positive")
        for name, terms in (("A", self.a_terms), ("B", self.b_terms)):
            for t in terms:
                if not (0 <= t.ex < self.l and 0 <= t.ey < self.m):
                    raise SpecError(f"{name} term {t} not canonical for l={self.l}, m={self.m}")
            if len(set(terms)) != len(terms):
                raise SpecError(f"duplicate terms in {name} cancel over GF(2)")
        if self.weight < 2:
            raise SpecError("code weight must be at least 2")

    @property
    def weight(self) -> int:
        return len(self.a_terms) + len(self.b_terms)

    @property
    def pattern(self) -> tuple[int, int]:
        return (len(self.a_terms), len(self.b_terms))

    def swapped(self) -> CodeSpec:
        """The (A, B) -> (B^T, A^T) partner, which exchanges the X and Z sides."""
        inv = lambda ts: tuple(t.inverse(self.l, self.m) for t in ts)
        return CodeSpec(self.l, self.m, inv(self.b_terms), inv(self.a_terms))

    def canonical(self) -> CodeSpec:
        """Representative up to term order and, for equal term counts, the X/Z swap."""
        own = CodeSpec(self.l, self.m, tuple(sorted(self.a_terms)), tuple(sorted(self.b_terms)))
        if len(self.a_terms) != len(self.b_terms):
            return own
        sw = self.swapped()
        other = CodeSpec(self.l, self.m, tuple(sorted(sw.a_terms)), tuple(sorted(sw.b_terms)))
        return min(own, other, key=lambda s: (s.a_terms, s.b_terms))

    def to_text(self) -> str:
        def poly(terms, labels):
            return "+".join(labels) if labels else "+".join(str(t) for t in terms)

        return (f"l={self.l} m={self.m} A={poly(self.a_terms, self.a_labels)} "
                f"B={poly(self.b_terms, self.b_labels)}")

    def __str__(self) -> str:
        return self.to_text()


_FIELD = re.compile(r"([lmAB])=")
_TERM = re.compile(r"^(?:1|(?:[xyz](?:\^-?\d+)?)+)$")
_FACTOR = re.compile(r"([xyz])(?:\^(-?\d+))?")


def _parse_poly(text: str, l: int, m: int, name: str) -> tuple[tuple[Monomial, ...], tuple[str, ...]]:
    if not text:
        raise SpecError(f"empty polynomial for {name}")
    terms, labels = [], []
    for raw in text.split("+"):
        if not _TERM.match(raw):
            raise SpecError(f"cannot parse term {raw!r} in {name}")
        mono = Monomial(0, 0)
        # products such as x^2y^3 multiply factor by factor
        for var, power in _FACTOR.findall(raw):
            mono = mono.mul(Monomial.of(var, int(power) if power else 1, l, m), l, m)
        terms.append(mono)
        labels.append(raw)
    if len(set(terms)) != len(terms):
        raise SpecError(f"duplicate terms in {name} after reduction: {text}")
    return tuple(terms), tuple(labels)


def parse_spec(text: str) -> CodeSpec:
    """Parse ``l=<int> m=<int> A=<poly> B=<poly>`` (whitespace-insensitive)."""
    body = re.sub(r"\s+", "", text.split("#", 1)[0])
    pieces = _FIELD.split(body)
    if pieces[0]:
        raise SpecError(f"unexpected text {pieces[0]!r}")
    fields = {}
    for key, value in zip(pieces[1::2], pieces[2::2]):
        if key in fields:
            raise SpecError(f"field {key} given twice")
        fields[key] = value
    missing = {"l", "m", "A", "B"} - fields.keys()
    if missing:
        raise SpecError(f"missing fields: {', '.join(sorted(missing))}")
    try:
        l, m = int(fields["l"]), int(fields["m"])
    except ValueError as exc:
        raise SpecError(f"l and m must be integers: {exc}") from None
    if l < 1 or m < 1:
        raise SpecError("l and m must be positive")
    a, a_labels = _parse_poly(fields["A"], l, m, "A")
    b, b_labels = _parse_poly(fields["B"], l, m, "B")
    return CodeSpec(l, m, a, b, a_labels, b_labels)


def read_specs(text: str) -> list[CodeSpec]:
    """All specs in a file, one per non-blank, non-comment line."""
    return [parse_spec(ln) for ln in text.splitlines() if ln.split("#", 1)[0].strip()]


# matrices ---------------------------------------------------------------------


def monomial_permutation(mono: Monomial, l: int, m: int) -> np.ndarray:
    """Column index of the single 1 in each row of ``x^ex y^ey``."""
    a, b = np.divmod(np.arange(l * m), m)
    return ((a + mono.ex) % l) * m + (b + mono.ey) % m


def monomial_matrix(mono: Monomial, l: int, m: int) -> BinaryMatrix:
    dense = np.zeros((l * m, l * m), dtype=np.uint8)
    dense[np.arange(l * m), monomial_permutation(mono, l, m)] = 1
    return BinaryMatrix.from_dense(dense)


def polynomial_matrix(terms, l: int, m: int) -> np.ndarray:
    dense = np.zeros((l * m, l * m), dtype=np.uint8)
    rows = np.arange(l * m)
    for t in terms:
        dense[rows, monomial_permutation(t, l, m)] ^= 1
    return dense


@dataclass(eq=False)
class CssCode:
    """A CSS code given by its two check matrices."""

    h_x: BinaryMatrix
    h_z: BinaryMatrix
    logicals_x: list[BinaryVector] = field(default_factory=list)
    logicals_z: list[BinaryVector] = field(default_factory=list)
    name: str = ""

    @property
    def n(self) -> int:
        return self.h_x.cols

    @property
    def k(self) -> int:
        return self.n - gf2.rank(self.h_x) - gf2.rank(self.h_z)

    def commutes(self) -> bool:
        return (self.h_x @ self.h_z.T).is_zero()

    def populate_logicals(self) -> None:
        self.logicals_x, self.logicals_z = logical_basis(self)


@dataclass(eq=False)
class TbCode(CssCode):
    spec: CodeSpec | None = None
    a: np.ndarray | None = field(default=None, repr=False)
    b: np.ndarray | None = field(default=None, repr=False)
    zero_rate: bool = False
    _k: int | None = field(default=None, repr=False)

    @property
    def k(self) -> int:
        if self._k is None:
            self._k = super().k
        return self._k

    @property
    def weight(self) -> int:
        return self.spec.weight

    @property
    def label(self) -> str:
        return f"[[{self.n},{self.k}]] w{self.weight}"


def logical_basis(code: CssCode) -> tuple[list[BinaryVector], list[BinaryVector]]:
    """Coset bases: X-logicals in ker(h_z) mod rs(h_x), Z-logicals in ker(h_x) mod rs(h_z)."""
    xs = gf2.independent_modulo(gf2.kernel_basis(code.h_z), code.h_x)
    zs = gf2.independent_modulo(gf2.kernel_basis(code.h_x), code.h_z)
    return list(xs), list(zs)


def build_code(spec: CodeSpec, with_logicals: bool = True) -> TbCode:
    l, m = spec.l, spec.m
    a = polynomial_matrix(spec.a_terms, l, m)
    b = polynomial_matrix(spec.b_terms, l, m)
    h_x = BinaryMatrix.from_dense(np.hstack([a, b]))
    h_z = BinaryMatrix.from_dense(np.hstack([b.T, a.T]))
    code = TbCode(h_x, h_z, spec=spec, a=a, b=b, name=spec.to_text())
    if not code.commutes():
        raise AssertionError(f"H_X H_Z^T != 0 for {spec}")
    k_blocks = 2 * gf2.intersect_kernels(BinaryMatrix.from_dense(a), BinaryMatrix.from_dense(b)).rows
    if k_blocks != code.k:
        raise AssertionError(f"k mismatch {k_blocks} vs {code.k} for {spec}")
    if code.k == 0:
        code.zero_rate = True
    elif with_logicals:
        code.populate_logicals()
    return code


def bpt_locality_constant(code: CssCode, d: int) -> Fraction:
    """The constant c with k d^2 = c n."""
    return Fraction(code.k * d * d, code.n)


@dataclass(eq=False)
class Component:
    """A connected piece of a CSS code's Tanner graph, as a standalone code."""

    code: CssCode
    x_checks: np.ndarray
    z_checks: np.ndarray
    qubits: np.ndarray


def split_components(code: CssCode) -> list[Component]:
    """Decompose a CSS code into the direct sum of its connected subcodes."""
    from scipy.sparse import bmat, csr_matrix
    from scipy.sparse.csgraph import connected_components

    hx, hz = code.h_x.to_dense(), code.h_z.to_dense()
    rx, rz, n = hx.shape[0], hz.shape[0], code.n
    h = csr_matrix(np.vstack([hx, hz]))
    adj = bmat([[None, h.T], [h, None]])
    count, labels = connected_components(adj, directed=False)
    qubit_lab, check_lab = labels[:n], labels[n:]
    parts = []
    for c in range(count):
        qubits = np.flatnonzero(qubit_lab == c)
        checks = np.flatnonzero(check_lab == c)
        xs, zs = checks[checks < rx], checks[checks >= rx] - rx
        sub = CssCode(BinaryMatrix.from_dense(hx[np.ix_(xs, qubits)]),
                      BinaryMatrix.from_dense(hz[np.ix_(zs, qubits)]))
        parts.append(Component(sub, xs, zs, qubits))
    # deterministic order: by smallest qubit index
    parts.sort(key=lambda p: p.qubits.min() if p.qubits.size else n)
    return parts
