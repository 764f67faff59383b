"""Component labels for representation varieties and the counting formulas.

For U(n) the label of a solution on a nonorientable surface is the image of
the crosscap generators in G/G_ss (the determinant), which squares to 1. For
SO(3) it is the sign picked up by the relation after lifting every generator
to SU(2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

import numpy as np
import sympy

from .errors import (
    ExcludedSurface,
    NotASolution,
    OrientableSurface,
    UnsupportedCombination,
    UnsupportedGroup,
)
from .lie_core import ACCEPT_TOL, GroupSpec, so3_to_su2
from .surface import SurfaceSig, TuplePoint, relation_residual, relation_word, word_value


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z/d_1 + ... + Z/d_r`` with ``d_1 | d_2 | ... | d_r``."""

    invariant_factors: tuple = ()

    def __post_init__(self):
        d = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", d)
        if any(x < 2 for x in d):
            raise ValueError("invariant factors must be >= 2")
        if any(b % a for a, b in zip(d, d[1:])):
            raise ValueError(f"{d} is not a divisibility chain")

    @classmethod
    def from_cyclic_orders(cls, orders) -> "FiniteAbelianGroup":
        """Normalize any product of cyclic groups to invariant-factor form."""
        powers: dict = {}
        for m in orders:
            for p, e in sympy.factorint(int(m)).items():
                powers.setdefault(p, []).append(p**e)
        depth = max((len(v) for v in powers.values()), default=0)
        factors = [1] * depth
        for p, pp in powers.items():
            for i, q in enumerate(sorted(pp, reverse=True)):
                factors[depth - 1 - i] *= q
        return cls(tuple(f for f in factors if f > 1))

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def elements(self):
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def label(self) -> str:
        return " + ".join(f"Z/{d}" for d in self.invariant_factors) or "0"


def all_abelian_groups(order: int) -> list[FiniteAbelianGroup]:
    """Every abelian group of the given order, up to isomorphism."""
    per_prime = []
    for p, e in sympy.factorint(order).items():
        per_prime.append([[p**k for k in part] for part in _partitions(e)])
    groups = []
    for combo in itertools.product(*per_prime):
        groups.append(FiniteAbelianGroup.from_cyclic_orders([q for part in combo for q in part]))
    return groups


def _partitions(n: int, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k] + rest


def squares_quotient_formula(group: FiniteAbelianGroup) -> int:
    return 2 ** sum(1 for d in group.invariant_factors if d % 2 == 0)


def squares_quotient_enumerated(group: FiniteAbelianGroup) -> int:
    d = group.invariant_factors
    squares = {tuple((2 * a) % m for a, m in zip(x, d)) for x in group.elements()}
    return group.order // len(squares)


def quotient_by_squares(group: FiniteAbelianGroup, method: str = "both") -> int:
    """Order of ``G / {a^2}``; ``method="both"`` cross-checks the two routes."""
    if method == "formula":
        return squares_quotient_formula(group)
    if method == "enumerate":
        return squares_quotient_enumerated(group)
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    f = squares_quotient_formula(group)
    e = squares_quotient_enumerated(group)
    if f != e:
        raise AssertionError(f"formula {f} != enumeration {e} for {group.label()}")
    return f


@dataclass(frozen=True)
class ObstructionClass:
    """Element of ``K = {k in G/G_ss : k^2 = 1}``, as bits (1 means -1)."""

    bits: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("obstruction bits must be 0 or 1")

    @classmethod
    def parse(cls, text: str) -> "ObstructionClass":
        text = text.strip()
        return cls(tuple(int(b) for b in text.split(",") if b.strip() != "")) if text else cls(())

    def to_json(self) -> list:
        return list(self.bits)


def _require_solution(x: TuplePoint, tol: float):
    res = relation_residual(x)
    if res > tol:
        raise NotASolution(f"relation residual {res:.3g} exceeds {tol:g}")


def crosscap_value(x: TuplePoint) -> complex:
    """``pi(c)`` or ``pi(c_1) pi(c_2)`` as a complex number."""
    return complex(np.prod([np.linalg.det(c.mat) for c in x.crosscap_gens]))


def obstruction(x: TuplePoint, tol: float = ACCEPT_TOL) -> ObstructionClass:
    if x.sig.orientable:
        raise OrientableSurface("orientable surfaces have no K-valued obstruction")
    if x.spec.family == "SO3":
        raise UnsupportedGroup("SO(3) has trivial G/G_ss; use lift_obstruction")
    _require_solution(x, tol)
    if x.spec.family == "SU":
        return ObstructionClass(())
    v = crosscap_value(x)
    if abs(v - 1) <= tol:
        return ObstructionClass((0,))
    if abs(v + 1) <= tol:
        return ObstructionClass((1,))
    raise NotASolution(f"crosscap determinant {v:.6g} is not +-1")


def lift_obstruction(x: TuplePoint, tol: float = ACCEPT_TOL) -> int:
    """Sign of the relation word evaluated on SU(2) lifts of SO(3) generators."""
    if x.spec.family != "SO3":
        raise UnsupportedGroup("lift_obstruction is defined for SO(3)")
    _require_solution(x, tol)
    if x.sig.arity == 0:
        return 1
    lifts = np.array([so3_to_su2(g.mat) for g in x.elements])
    r = word_value(lifts, relation_word(x.sig))
    if np.linalg.norm(r - np.eye(2)) <= 10 * tol:
        return 1
    if np.linalg.norm(r + np.eye(2)) <= 10 * tol:
        return -1
    raise NotASolution("lifted relation is not +-I")


def component_label(x: TuplePoint, tol: float = ACCEPT_TOL):
    """Hashable label of the component containing ``x``; ``()`` when no invariant applies."""
    if x.spec.family == "SO3":
        return ("lift", lift_obstruction(x, tol))
    if x.sig.orientable:
        return ()
    return ("K", obstruction(x, tol).bits)


def obstruction_is_locally_constant_check(path, tol: float = ACCEPT_TOL) -> bool:
    """True iff every step of the path carries the same component label."""
    points = path.points if hasattr(path, "points") else list(path)
    try:
        labels = {component_label(p, tol) for p in points}
    except NotASolution:
        return False
    return len(labels) <= 1


@dataclass(frozen=True)
class ComponentCount:
    components: int
    formula: str
    excluded: bool = False

    def to_json(self) -> dict:
        return {"components": self.components, "formula": self.formula, "excluded": self.excluded}


def count_components(sig: SurfaceSig, group, formula: str = None) -> ComponentCount:
    """Number of connected components of the moduli space.

    ``group`` is a GroupSpec or, for a semisimple group given abstractly, its
    fundamental group as a FiniteAbelianGroup. ``formula`` forces one of
    ``"2^dimS"``, ``"pi1"``, ``"pi1_mod_squares"`` and is refused when its
    hypotheses fail.
    """
    if sig.excluded:
        raise ExcludedSurface(f"{sig.total_crosscaps} crosscaps is excluded (k in {{1, 2, 4}})")
    if sig.is_sphere:
        return ComponentCount(1, "trivial")

    if isinstance(group, GroupSpec):
        pi1 = group.pi1
        semisimple = group.semisimple
        ss_sc = group.ss_simply_connected
        dim_s = group.dim_S
    else:
        pi1, semisimple, ss_sc, dim_s = group, True, group.order == 1, 0

    if formula is None:
        if ss_sc:
            formula = "trivial" if sig.orientable else "2^dimS"
        else:
            formula = "pi1" if sig.orientable else "pi1_mod_squares"

    if formula in ("pi1", "pi1_mod_squares"):
        if not semisimple or not isinstance(pi1, FiniteAbelianGroup):
            raise UnsupportedCombination("the pi_1 formulas need a semisimple group with finite pi_1")
        if (formula == "pi1") != sig.orientable:
            raise UnsupportedCombination(f"formula {formula} does not match the surface type")
        n = pi1.order if formula == "pi1" else quotient_by_squares(pi1)
        return ComponentCount(n, formula)
    if formula in ("trivial", "2^dimS"):
        if not ss_sc:
            raise UnsupportedCombination("needs a simply connected semisimple part")
        if formula == "trivial":
            if not sig.orientable:
                raise UnsupportedCombination("nonorientable surfaces use 2^dimS")
            return ComponentCount(1, "trivial")
        if sig.orientable:
            raise UnsupportedCombination("orientable surfaces are connected here")
        return ComponentCount(2**dim_s, "2^dimS")
    raise ValueError(f"unknown formula {formula!r}")
