"""Irreducible root systems and a Weyl element without fixed vectors.

Roots are stored exactly as integer numerator vectors over a common
denominator of 2, so membership tests are exact. Every Weyl element is built
as an explicit product of root reflections (its ``word``), which certifies
membership in W by construction; spectra are computed in floating point.

Realizations: A_l and G_2 live in the sum-zero hyperplane of R^{l+1} and R^3;
B, C, D, F in R^l; all three E types live in R^8, with E_7 the roots of E_8
orthogonal to e7+e8 and E_6 those additionally orthogonal to e6-e7.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import InvalidRank, SingularSystem, UnsupportedType
from .lie_core import GroupElement, GroupSpec

DENOM = 2

RANK_RULES = {
    "A": (lambda r: r >= 1, "rank >= 1"),
    "B": (lambda r: r >= 2, "rank >= 2"),
    "C": (lambda r: r >= 3, "rank >= 3"),
    "D": (lambda r: r >= 4, "rank >= 4"),
    "E": (lambda r: r in (6, 7, 8), "rank in {6, 7, 8}"),
    "F": (lambda r: r == 4, "rank == 4"),
    "G": (lambda r: r == 2, "rank == 2"),
}

# every (type, rank) pair exercised by the test matrix
TEST_MATRIX = (
    [("A", r) for r in range(1, 9)]
    + [("B", r) for r in range(2, 9)]
    + [("C", r) for r in range(3, 9)]
    + [("D", r) for r in range(4, 9)]
    + [("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)]
)

Vec = tuple  # tuple of ints: numerators over DENOM


def _unit(dim: int, *entries: tuple[int, int]) -> Vec:
    v = [0] * dim
    for i, c in entries:
        v[i] += c * DENOM
    return tuple(v)


def _pm_pairs(dim: int, idx: range) -> set:
    out = set()
    for i, j in itertools.combinations(idx, 2):
        for si in (1, -1):
            for sj in (1, -1):
                out.add(_unit(dim, (i, si), (j, sj)))
    return out


def _e8_roots() -> set:
    roots = _pm_pairs(8, range(8))
    for signs in itertools.product((1, -1), repeat=8):
        if sum(s < 0 for s in signs) % 2 == 0:
            roots.add(tuple(signs))
    return roots


def _dot(a: Vec, b: Vec) -> int:
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class RootSystem:
    type_label: str
    rank: int
    ambient_dim: int
    numerators: tuple  # sorted tuple of Vec

    @property
    def roots(self) -> np.ndarray:
        return np.array(self.numerators, dtype=float) / DENOM

    def exact_roots(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(x, DENOM) for x in r) for r in self.numerators]

    @cached_property
    def root_set(self) -> frozenset:
        return frozenset(self.numerators)

    @cached_property
    def span_basis(self) -> np.ndarray:
        """Orthonormal basis of the span E of the roots, as columns."""
        basis = scipy.linalg.orth(self.roots.T)
        if basis.shape[1] != self.rank:
            raise AssertionError("root span has the wrong dimension")
        return basis

    def is_crystallographic(self) -> bool:
        for a in self.numerators:
            for b in self.numerators:
                if (2 * _dot(a, b)) % _dot(b, b):
                    return False
        return True

    def length_classes(self) -> dict:
        """Count of roots per squared length."""
        out: dict = {}
        for r in self.numerators:
            key = Fraction(_dot(r, r), DENOM * DENOM)
            out[key] = out.get(key, 0) + 1
        return out


def expected_root_count(type_label: str, rank: int) -> int:
    l = rank
    return {
        "A": l * (l + 1),
        "B": 2 * l * l,
        "C": 2 * l * l,
        "D": 2 * l * (l - 1),
        "E": {6: 72, 7: 126, 8: 240}.get(l, -1),
        "F": 48,
        "G": 12,
    }[type_label]


def build_root_system(type_label: str, rank: int) -> RootSystem:
    t = type_label.upper()
    if t not in RANK_RULES:
        raise InvalidRank(f"unknown root system type {type_label!r}")
    ok, rule = RANK_RULES[t]
    if int(rank) != rank or not ok(rank):
        raise InvalidRank(f"type {t} needs {rule}, got {rank}")
    l = int(rank)

    if t == "A":
        dim = l + 1
        roots = {_unit(dim, (i, 1), (j, -1)) for i in range(dim) for j in range(dim) if i != j}
    elif t in "BCD":
        dim = l
        roots = _pm_pairs(dim, range(dim))
        if t in "BC":
            c = 1 if t == "B" else 2
            roots |= {_unit(dim, (i, s * c)) for i in range(dim) for s in (1, -1)}
    elif t == "E":
        dim = 8
        roots = _e8_roots()
        if l <= 7:
            roots = {r for r in roots if r[6] == -r[7]}
        if l == 6:
            roots = {r for r in roots if r[5] == r[6]}
    elif t == "F":
        dim = 4
        roots = _pm_pairs(dim, range(dim))
        roots |= {_unit(dim, (i, s)) for i in range(dim) for s in (1, -1)}
        roots |= set(itertools.product((1, -1), repeat=4))
    else:  # G
        dim = 3
        roots = set()
        for i, j in itertools.permutations(range(3), 2):
            roots.add(_unit(3, (i, 1), (j, -1)))
        for i in range(3):
            j, k = [x for x in range(3) if x != i]
            for s in (1, -1):
                roots.add(_unit(3, (i, 2 * s), (j, -s), (k, -s)))

    return RootSystem(t, l, dim, tuple(sorted(roots)))


# -- Weyl elements ---------------------------------------------------------------


def reflection_matrix(alpha: Vec) -> tuple:
    """Exact matrix of the reflection in the hyperplane orthogonal to ``alpha``."""
    aa = _dot(alpha, alpha)
    n = len(alpha)
    return tuple(
        tuple(Fraction(int(i == j)) - Fraction(2 * alpha[i] * alpha[j], aa) for j in range(n))
        for i in range(n)
    )


def _matmul_exact(a: tuple, b: tuple) -> tuple:
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _identity_exact(n: int) -> tuple:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def _apply_exact(m: tuple, v: Vec):
    out = []
    for row in m:
        x = sum(c * vi for c, vi in zip(row, v))
        if x.denominator != 1:
            return None
        out.append(int(x))
    return tuple(out)


# three mutually orthogonal A2 subsystems of E6 (numerators over 2)
_E6_A2_CUBED = (
    ((-2, -2, 0, 0, 0, 0, 0, 0), (0, 2, -2, 0, 0, 0, 0, 0)),
    ((-1, 1, 1, -1, -1, 1, 1, -1), (0, 0, 0, 2, 2, 0, 0, 0)),
    ((-1, 1, 1, -1, 1, -1, -1, 1), (0, 0, 0, 2, -2, 0, 0, 0)),
)


def _negation_word(dim: int, coords: list[int]) -> list[Vec]:
    """Reflections in e_a - e_b and e_a + e_b negate coordinates a and b."""
    word = []
    for a, b in zip(coords[0::2], coords[1::2]):
        word += [_unit(dim, (a, 1), (b, -1)), _unit(dim, (a, 1), (b, 1))]
    return word


def weyl_word(system: RootSystem) -> tuple[list[Vec], str]:
    """Reflection word for the chosen element and a short description.

    The matrix is ``s_{word[0]} s_{word[1]} ...`` (rightmost acts first).
    """
    t, l, dim = system.type_label, system.rank, system.ambient_dim
    if t in "AG":
        word = [_unit(dim, (i, 1), (i + 1, -1)) for i in range(dim - 1)]
        return word, "cyclic shift e_i -> e_{i+1}"
    if t == "B" or t == "F":
        return [_unit(dim, (i, 1)) for i in range(dim)], "-id"
    if t == "C":
        return [_unit(dim, (i, 2)) for i in range(dim)], "-id"
    if t == "D" and l % 2 == 0:
        return _negation_word(dim, list(range(dim))), "-id"
    if t == "D":
        # swap e1, e2 first, then negate e1 and e3..el (an even number of signs)
        word = _negation_word(dim, [0] + list(range(2, dim))) + [_unit(dim, (0, 1), (1, -1))]
        return word, "e1 -> e2, e2 -> -e1, e_i -> -e_i (i >= 3)"
    if t == "E" and l == 8:
        return _negation_word(8, list(range(8))), "-id"
    if t == "E" and l == 7:
        word = _negation_word(8, list(range(6))) + [_unit(8, (6, 1), (7, -1))]
        return word, "-id"
    word = [r for pair in _E6_A2_CUBED for r in pair]
    return word, "product of cyclic shifts on three orthogonal A2 subsystems"


@dataclass(frozen=True, eq=False)
class WeylElement:
    system: RootSystem
    word: tuple
    exact: tuple  # ambient matrix, Fractions
    description: str

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.exact])

    @cached_property
    def restriction(self) -> np.ndarray:
        b = self.system.span_basis
        return b.T @ self.matrix @ b

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        ev = np.linalg.eigvals(self.restriction)
        ang = np.round(np.angle(ev), 12)
        return ev[np.lexsort((np.round(ev.real, 12), ang))]

    def permutes_roots(self) -> bool:
        image = set()
        for r in self.system.numerators:
            v = _apply_exact(self.exact, r)
            if v is None or v not in self.system.root_set:
                return False
            image.add(v)
        return image == self.system.root_set


def build_weyl_element(system: RootSystem) -> WeylElement:
    word, desc = weyl_word(system)
    m = _identity_exact(system.ambient_dim)
    for alpha in word:
        if alpha not in system.root_set:
            raise AssertionError(f"reflection word uses a non-root {alpha}")
        m = _matmul_exact(m, reflection_matrix(alpha))
    return WeylElement(system, tuple(word), m, desc)


@dataclass(frozen=True)
class WeylReport:
    min_distance_to_1: float
    root_permutation_ok: bool
    det_w_minus_1: float


def verify_no_unit_eigenvalue(w: WeylElement) -> WeylReport:
    ev = w.eigenvalues
    det = abs(np.linalg.det(w.restriction - np.eye(w.system.rank)))
    return WeylReport(float(np.min(np.abs(ev - 1))), w.permutes_roots(), float(det))


def solve_translation(w: WeylElement, xi) -> np.ndarray:
    """Solve ``w xi' - xi' = xi`` for ``xi'`` in E; ``xi`` in ambient coordinates."""
    xi = np.asarray(xi, dtype=float)
    b = w.system.span_basis
    coords = b.T @ xi
    if np.linalg.norm(b @ coords - xi) > 1e-10 * max(1.0, np.linalg.norm(xi)):
        raise ValueError("xi does not lie in the span of the roots")
    lhs = w.restriction - np.eye(w.system.rank)
    if abs(np.linalg.det(lhs)) <= 1e-9:
        raise SingularSystem("w has eigenvalue 1")
    return b @ np.linalg.solve(lhs, coords)


def cyclic_element(n: int) -> WeylElement:
    return build_weyl_element(build_root_system("A", n - 1))


def torus_representative(spec: GroupSpec, w: WeylElement) -> GroupElement:
    """Element ``a`` of N(T) in SU(n) whose conjugation on diagonals realizes ``w``.

    ``a`` is the cyclic permutation matrix ``a e_i = e_{i+1}`` with the wrap-around
    entry scaled by ``(-1)^(n-1)`` so that det(a) = 1.
    """
    if w.system.type_label != "A":
        raise UnsupportedType("group representatives are only built for type A")
    if spec.family != "SU" or spec.n != w.system.rank + 1:
        raise UnsupportedType(f"type A_{w.system.rank} needs SU({w.system.rank + 1})")
    n = spec.n
    shift = np.roll(np.eye(n), 1, axis=0)
    if not np.array_equal(shift, w.matrix):
        raise UnsupportedType("only the cyclic-shift element has a built-in representative")
    a = shift.astype(complex)
    a[0, n - 1] *= (-1) ** (n - 1)
    return GroupElement(spec, a)
