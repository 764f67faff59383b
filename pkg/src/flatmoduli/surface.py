"""Surface types, their fundamental-group relation, and its evaluation.

A closed surface is presented as a genus-l handlebody with m in {0, 1, 2}
crosscap generators appended; the single relation is

    [a_1, b_1] ... [a_l, b_l] c_1^2 ... c_m^2 = e.

Internally the relation is a *word*: a list of ``(generator index, +1/-1)``
letters over the flat generator list ``a_1, b_1, ..., a_l, b_l, c_1, ...``,
optionally followed by a constant matrix. The array-level helpers here are
shared with the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ArityError, ExcludedSurface, SpecMismatch
from .lie_core import AlgebraElement, GroupElement, GroupSpec, algebra_project

EXCLUDED_CROSSCAPS = (1, 2, 4)


@dataclass(frozen=True)
class SurfaceSig:
    orientable: bool
    genus: int
    crosscaps: int = 0

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if self.orientable and self.crosscaps != 0:
            raise ValueError("orientable surfaces have no crosscaps")
        if not self.orientable and self.crosscaps not in (1, 2):
            raise ValueError("nonorientable surfaces are normalized to 1 or 2 crosscaps")

    @classmethod
    def from_genus(cls, genus: int) -> "SurfaceSig":
        return cls(True, int(genus), 0)

    @classmethod
    def from_crosscaps(cls, k: int) -> "SurfaceSig":
        """Connected sum of ``k`` projective planes, in normal form."""
        k = int(k)
        if k < 1:
            raise ValueError("need at least one crosscap")
        if k % 2:
            return cls(False, (k - 1) // 2, 1)
        return cls(False, (k - 2) // 2, 2)

    @classmethod
    def parse(cls, text: str) -> "SurfaceSig":
        """``"genus=2"`` or ``"crosscaps=5"``."""
        key, sep, value = text.strip().partition("=")
        if not sep:
            raise ValueError(f"surface must look like genus=N or crosscaps=N, got {text!r}")
        key = key.strip().lower()
        if key == "genus":
            return cls.from_genus(int(value))
        if key == "crosscaps":
            return cls.from_crosscaps(int(value))
        raise ValueError(f"unknown surface key {key!r}")

    @property
    def total_crosscaps(self) -> int:
        return 0 if self.orientable else 2 * self.genus + self.crosscaps

    @property
    def excluded(self) -> bool:
        return not self.orientable and self.total_crosscaps in EXCLUDED_CROSSCAPS

    @property
    def is_sphere(self) -> bool:
        return self.orientable and self.genus == 0

    @property
    def arity(self) -> int:
        return 2 * self.genus + self.crosscaps

    def require_allowed(self):
        if self.excluded:
            raise ExcludedSurface(
                f"{self.total_crosscaps} crosscaps is one of the excluded cases k in {{1, 2, 4}}"
            )

    def to_json(self) -> dict:
        return {
            "orientable": self.orientable,
            "genus": self.genus,
            "crosscaps": self.crosscaps,
            "total_crosscaps": self.total_crosscaps,
            "excluded": self.excluded,
        }

    @classmethod
    def from_json(cls, d: dict) -> "SurfaceSig":
        return cls(bool(d["orientable"]), int(d["genus"]), int(d.get("crosscaps", 0)))


@dataclass(frozen=True, eq=False)
class TuplePoint:
    """Generators ``(a_1, b_1, ..., a_l, b_l, c_1, ..., c_m)`` for a surface."""

    sig: SurfaceSig
    spec: GroupSpec
    handles: tuple
    crosscap_gens: tuple

    def __post_init__(self):
        handles = tuple((a, b) for a, b in self.handles)
        object.__setattr__(self, "handles", handles)
        object.__setattr__(self, "crosscap_gens", tuple(self.crosscap_gens))
        if len(handles) != self.sig.genus or len(self.crosscap_gens) != self.sig.crosscaps:
            raise ArityError(
                f"surface needs {self.sig.genus} handles and {self.sig.crosscaps} crosscap generators"
            )
        for g in self.elements:
            if g.spec != self.spec:
                raise SpecMismatch(f"generator in {g.spec.label}, tuple in {self.spec.label}")

    @classmethod
    def from_elements(cls, sig: SurfaceSig, spec: GroupSpec, elements: Sequence[GroupElement]):
        elements = list(elements)
        if len(elements) != sig.arity:
            raise ArityError(f"expected {sig.arity} generators, got {len(elements)}")
        l = sig.genus
        handles = [(elements[2 * i], elements[2 * i + 1]) for i in range(l)]
        return cls(sig, spec, tuple(handles), tuple(elements[2 * l:]))

    @classmethod
    def from_arrays(cls, sig: SurfaceSig, spec: GroupSpec, mats, tol: float = 1e-9):
        return cls.from_elements(sig, spec, [GroupElement(spec, m, tol=tol) for m in mats])

    @classmethod
    def identity(cls, sig: SurfaceSig, spec: GroupSpec) -> "TuplePoint":
        e = GroupElement.identity(spec)
        return cls.from_elements(sig, spec, [e] * sig.arity)

    @property
    def elements(self) -> list[GroupElement]:
        out = []
        for a, b in self.handles:
            out += [a, b]
        return out + list(self.crosscap_gens)

    def arrays(self) -> np.ndarray:
        return np.array([g.mat for g in self.elements], dtype=complex).reshape(
            self.sig.arity, self.spec.n, self.spec.n
        )

    def conjugate_by(self, g: GroupElement) -> "TuplePoint":
        return TuplePoint.from_elements(self.sig, self.spec, [x.conjugate_by(g) for x in self.elements])

    def to_json(self) -> dict:
        return {
            "surface": self.sig.to_json(),
            "spec": self.spec.to_json(),
            "handles": [[a.to_json(), b.to_json()] for a, b in self.handles],
            "crosscaps": [c.to_json() for c in self.crosscap_gens],
        }

    @classmethod
    def from_json(cls, d: dict, tol: float = 1e-9) -> "TuplePoint":
        sig = SurfaceSig.from_json(d["surface"])
        spec = GroupSpec.from_json(d["spec"])
        els = []
        for a, b in d["handles"]:
            els += [GroupElement.from_json(a, tol), GroupElement.from_json(b, tol)]
        els += [GroupElement.from_json(c, tol) for c in d["crosscaps"]]
        return cls.from_elements(sig, spec, els)


# -- relation words on raw arrays -------------------------------------------------


def relation_word(sig: SurfaceSig) -> list[tuple[int, int]]:
    word = []
    for i in range(sig.genus):
        a, b = 2 * i, 2 * i + 1
        word += [(a, 1), (b, 1), (a, -1), (b, -1)]
    for j in range(sig.crosscaps):
        c = 2 * sig.genus + j
        word += [(c, 1), (c, 1)]
    return word


def commutator_word(genus: int) -> list[tuple[int, int]]:
    return relation_word(SurfaceSig.from_genus(genus))


def _dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(m.conj(), -1, -2)


def word_value(mats: np.ndarray, word, tail: Optional[np.ndarray] = None) -> np.ndarray:
    n = mats.shape[-1]
    out = np.eye(n, dtype=complex) if tail is None else np.asarray(tail, dtype=complex)
    for idx, sgn in reversed(word):
        out = (mats[idx] if sgn > 0 else _dagger(mats[idx])) @ out
    return out


def word_adjoints(mats: np.ndarray, word, tail: Optional[np.ndarray] = None):
    """Value ``R`` of the word and, per letter, ``(generator, sign, Q)``.

    The left-trivialized derivative ``R^-1 dR`` along ``x_j -> x_j exp(s xi_j)``
    is ``sum(sign * Q xi_j Q^*)`` over the letters of generator ``j``.
    """
    n = mats.shape[-1]
    suffix = np.eye(n, dtype=complex) if tail is None else np.asarray(tail, dtype=complex)
    terms = []
    for idx, sgn in reversed(word):
        x = mats[idx]
        if sgn > 0:
            q = _dagger(suffix)
            suffix = x @ suffix
        else:
            q = _dagger(suffix) @ x
            suffix = _dagger(x) @ suffix
        terms.append((idx, sgn, q))
    terms.reverse()
    return suffix, terms


def word_differential(mats, word, directions, tail=None) -> np.ndarray:
    _, terms = word_adjoints(mats, word, tail)
    out = np.zeros(mats.shape[-2:], dtype=complex)
    for idx, sgn, q in terms:
        out += sgn * (q @ directions[idx] @ _dagger(q))
    return out


def word_gradient(spec: GroupSpec, mats, word, tail=None):
    """Residual squared and its Riemannian gradient in left-trivialized coordinates."""
    r, terms = word_adjoints(mats, word, tail)
    n = mats.shape[-1]
    diff = r - np.eye(n)
    f = float(np.real(np.vdot(diff, diff)))
    m = _dagger(r) @ diff
    grad = np.zeros_like(mats, dtype=complex)
    for idx, sgn, q in terms:
        grad[idx] += sgn * (_dagger(q) @ m @ q)
    return f, algebra_project(spec, 2 * grad), r


# -- public operations ------------------------------------------------------------


def _common_spec(elements) -> GroupSpec:
    specs = {g.spec for g in elements}
    if len(specs) > 1:
        raise SpecMismatch("generators come from different groups: " + ", ".join(s.label for s in specs))
    return specs.pop()


def commutator_mu(handles) -> GroupElement:
    """Ordered product of commutators ``a_1 b_1 a_1^-1 b_1^-1 ... a_l b_l a_l^-1 b_l^-1``."""
    handles = [tuple(h) for h in handles]
    if not handles:
        raise ArityError("commutator map needs at least one handle")
    flat = [g for h in handles for g in h]
    spec = _common_spec(flat)
    mats = np.array([g.mat for g in flat], dtype=complex)
    return GroupElement(spec, word_value(mats, commutator_word(len(handles))))


def relation_value(x: TuplePoint) -> GroupElement:
    """``mu(handles) * c_1^2 ... c_m^2``; identity iff ``x`` is a homomorphism."""
    if x.sig.arity == 0:
        return GroupElement.identity(x.spec)
    _common_spec(x.elements)
    return GroupElement(x.spec, word_value(x.arrays(), relation_word(x.sig)))


def relation_residual(x: TuplePoint) -> float:
    r = relation_value(x).mat
    return float(np.linalg.norm(r - np.eye(x.spec.n)))


def relation_differential(x: TuplePoint, direction: Sequence[AlgebraElement]) -> AlgebraElement:
    """Left-trivialized derivative ``R^-1 dR`` of the relation along ``x_j exp(s xi_j)``."""
    direction = list(direction)
    if len(direction) != x.sig.arity:
        raise ArityError(f"direction has {len(direction)} entries, surface needs {x.sig.arity}")
    for d in direction:
        if d.spec != x.spec:
            raise SpecMismatch(f"direction in {d.spec.label}, tuple in {x.spec.label}")
    n = x.spec.n
    if x.sig.arity == 0:
        return AlgebraElement.zero(x.spec)
    dirs = np.array([d.mat for d in direction], dtype=complex).reshape(-1, n, n)
    d = word_differential(x.arrays(), relation_word(x.sig), dirs)
    return AlgebraElement(x.spec, (d - d.conj().T) / 2)
