"""Explicit paths inside representation varieties, and their certification.

Three constructions:

* :func:`deform_to_semisimple` slides every generator of an orientable tuple
  along its central direction until it lands in SU(n), keeping the
  commutator product fixed.
* :func:`path_odd` (surface = genus l + one crosscap) joins a standard point
  ``(a, e, e, ..., e, k~)`` to a tuple whose crosscap generator is ``c``.
* :func:`path_even` (genus l >= 2 + two crosscaps) joins
  ``(a, e, a, e, ..., e, k~)`` to a tuple with crosscap generators ``(c1, c2)``.

The odd and even paths use the cyclic Weyl element of type A_{n-1} and its
representative in SU(n). Along both, the relation word evaluates to
``k~^2`` identically, where ``k~`` is the chosen central lift of the
obstruction class; the paths stay on the solution variety only when
``k~^2 = e``, which is enforced unless ``strict=False``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousBranch,
    ArityError,
    BranchFailure,
    ExcludedSurface,
    NoInvolutiveLift,
    NotASolution,
    UnsupportedGroup,
)
from .lie_core import (
    GroupElement,
    GroupSpec,
    balance_angles,
    eig_unitary,
    expm_skew,
    group_log,
    principal_angles,
    split_central,
    traceless_log,
)
from .rootsys import cyclic_element, solve_translation, torus_representative
from .surface import SurfaceSig, TuplePoint, relation_value
from .topology import obstruction_is_locally_constant_check

SCHEMA = "flatmoduli/1"

RESIDUAL_TOL = 1e-8
ENDPOINT_TOL = 1e-9


@dataclass(frozen=True)
class EndpointTarget:
    at: str  # "start" or "end"
    index: int  # position in the flat generator list
    element: GroupElement


@dataclass(frozen=True, eq=False)
class GroupPath:
    ts: np.ndarray
    points: tuple
    tag: str  # "deform_ss", "odd" or "even"
    fiber: GroupElement  # value the relation word is supposed to keep
    targets: tuple = ()
    lift_square: Optional[GroupElement] = None
    construction: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ts", np.asarray(self.ts, dtype=float))
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.ts) != len(self.points):
            raise ValueError("one parameter value per point")

    @property
    def residuals(self) -> np.ndarray:
        f = self.fiber.mat
        return np.array([np.linalg.norm(relation_value(p).mat - f) for p in self.points])

    @property
    def sig(self) -> SurfaceSig:
        return self.points[0].sig

    @property
    def spec(self) -> GroupSpec:
        return self.points[0].spec

    def relation_constancy(self) -> float:
        """Max distance of the relation value from ``k~^2`` (or the fiber)."""
        ref = (self.lift_square or self.fiber).mat
        return float(max(np.linalg.norm(relation_value(p).mat - ref) for p in self.points))

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "group_path",
            "tag": self.tag,
            "ts": [float(t) for t in self.ts],
            "residuals": [float(r) for r in self.residuals],
            "fiber": self.fiber.to_json(),
            "lift_square": None if self.lift_square is None else self.lift_square.to_json(),
            "targets": [
                {"at": t.at, "index": t.index, "element": t.element.to_json()} for t in self.targets
            ],
            "points": [p.to_json() for p in self.points],
        }

    @classmethod
    def from_json(cls, d: dict) -> "GroupPath":
        points = [TuplePoint.from_json(p, tol=1e-6) for p in d["points"]]
        targets = [
            EndpointTarget(t["at"], int(t["index"]), GroupElement.from_json(t["element"], tol=1e-6))
            for t in d.get("targets", [])
        ]
        lift = d.get("lift_square")
        return cls(
            np.array(d["ts"], float),
            points,
            d["tag"],
            GroupElement.from_json(d["fiber"], tol=1e-6),
            tuple(targets),
            None if lift is None else GroupElement.from_json(lift, tol=1e-6),
        )


@dataclass(frozen=True)
class PathCertificate:
    max_residual: float
    endpoint_errors: tuple
    class_constant: bool
    times_ok: bool
    relation_constancy: float
    residual_tol: float
    endpoint_tol: float

    @property
    def max_endpoint_error(self) -> float:
        return max((e for _, _, e in self.endpoint_errors), default=0.0)

    @property
    def certified(self) -> bool:
        return (
            self.times_ok
            and self.class_constant
            and self.max_residual <= self.residual_tol
            and self.max_endpoint_error <= self.endpoint_tol
        )

    def to_json(self) -> dict:
        return {
            "certified": self.certified,
            "max_residual": self.max_residual,
            "max_endpoint_error": self.max_endpoint_error,
            "endpoint_errors": [{"at": a, "index": i, "error": e} for a, i, e in self.endpoint_errors],
            "class_constant": self.class_constant,
            "times_ok": self.times_ok,
            "relation_constancy": self.relation_constancy,
        }


def certify_path(p: GroupPath, residual_tol: float = RESIDUAL_TOL, endpoint_tol: float = ENDPOINT_TOL) -> PathCertificate:
    ts = p.ts
    times_ok = bool(len(ts) >= 2 and ts[0] == 0.0 and ts[-1] == 1.0 and np.all(np.diff(ts) > 0))
    errors = []
    for t in p.targets:
        point = p.points[0] if t.at == "start" else p.points[-1]
        errors.append((t.at, t.index, point.elements[t.index].distance(t.element)))
    return PathCertificate(
        max_residual=float(np.max(p.residuals)),
        endpoint_errors=tuple(errors),
        class_constant=obstruction_is_locally_constant_check(p),
        times_ok=times_ok,
        relation_constancy=p.relation_constancy(),
        residual_tol=residual_tol,
        endpoint_tol=endpoint_tol,
    )


# -- building blocks ---------------------------------------------------------------


def _grid(steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("need at least one step")
    return np.linspace(0.0, 1.0, steps + 1)


def _diagonalize(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``g`` in SU(n) and traceless angles with ``g^-1 h g = diag(exp(i angles))``.

    Eigenvectors are ordered by ascending eigenvalue angle. ``h`` only needs
    det(h) = 1 to rounding; the angles are projected to trace zero.
    """
    eigs, z = eig_unitary(h)
    ang = principal_angles(eigs)
    order = np.argsort(ang, kind="stable")
    z, ang = z[:, order], ang[order]
    z[:, 0] *= np.conj(np.linalg.det(z))
    ang = balance_angles(ang)
    return z, ang - ang.mean()


def _su_path_log(g: np.ndarray, n: int):
    """A log of ``g`` in su(n), right-multiplying by torus elements to dodge the branch cut.

    Returns the possibly adjusted ``g`` and its log; both still diagonalize the same element.
    """
    spec = GroupSpec("SU", n)
    for attempt in range(6):
        try:
            return g, traceless_log(GroupElement(spec, g)).mat
        except AmbiguousBranch:
            phase = balance_angles(0.37 * (attempt + 1) * np.arange(1, n + 1))
            phase = phase - phase.mean()
            g = g @ np.diag(np.exp(1j * phase))
    raise BranchFailure("could not find a diagonalizing element off the branch cut")


def _central_lift(k: complex, n: int, strict: bool) -> np.ndarray:
    """A central ``k~`` in U(n) over ``k = +-1``; involutive when one exists."""
    if abs(k - 1) <= 1e-8:
        return np.eye(n, dtype=complex)
    if abs(k + 1) > 1e-8:
        raise NotASolution(f"pi(c) = {k:.6g} is not in K = {{+1, -1}}")
    if n % 2:
        return -np.eye(n, dtype=complex)
    if strict:
        raise NoInvolutiveLift(
            f"det = -1 in U({n}) with n even: every central lift of -1 has order 4"
        )
    return np.exp(1j * np.pi / n) * np.eye(n, dtype=complex)


def _check_group(spec: GroupSpec):
    if spec.family == "SO3":
        raise UnsupportedGroup("explicit paths are built for U(n) and SU(n)")
    if spec.n < 2:
        raise UnsupportedGroup("explicit paths need n >= 2 (the Weyl group of U(1) is trivial)")


def _torus_data(n: int, angles: np.ndarray):
    w = cyclic_element(n)
    a = torus_representative(GroupSpec("SU", n), w).mat
    return a, solve_translation(w, angles)


def _conj(g: np.ndarray, m: np.ndarray) -> np.ndarray:
    return g @ m @ g.conj().T


def _diag_exp(angles: np.ndarray) -> np.ndarray:
    return np.diag(np.exp(1j * angles))


def _make_points(sig, spec, arrays_per_t) -> list[TuplePoint]:
    return [TuplePoint.from_arrays(sig, spec, mats, tol=1e-8) for mats in arrays_per_t]


# -- constructions -------------------------------------------------------------------


def deform_to_semisimple(x: TuplePoint, steps: int = 100) -> GroupPath:
    """``gamma(t) = (a_i exp(-t X_i), b_i exp(-t Y_i))`` with ``X_i, Y_i`` central logs."""
    if not x.sig.orientable:
        raise ValueError("deform_to_semisimple acts on orientable surfaces")
    _check_group(x.spec)
    ts = _grid(steps)
    logs, ss_parts = [], []
    for g in x.elements:
        ss, s = split_central(g)
        try:
            logs.append(group_log(s).mat if x.spec.family == "U" else np.zeros((x.spec.n,) * 2))
        except AmbiguousBranch as exc:
            raise BranchFailure(str(exc)) from exc
        ss_parts.append(ss)
    base = x.arrays()
    logs = np.array(logs, dtype=complex).reshape(base.shape)
    arrays = [base @ expm_skew(-t * logs) for t in ts]
    points = _make_points(x.sig, x.spec, arrays)
    targets = [EndpointTarget("start", i, g) for i, g in enumerate(x.elements)]
    targets += [EndpointTarget("end", i, g) for i, g in enumerate(ss_parts)]
    fiber = relation_value(x)
    return GroupPath(ts, points, "deform_ss", fiber, tuple(targets), None, {"central_logs": logs})


def path_odd(c: GroupElement, sig: SurfaceSig, steps: int = 100, strict: bool = True) -> GroupPath:
    """Path in the genus-l + crosscap variety from ``(a, e, ..., e, k~)`` to crosscap ``c``."""
    if sig.excluded:
        raise ExcludedSurface(f"{sig.total_crosscaps} crosscaps is excluded (k in {{1, 2, 4}})")
    if sig.orientable or sig.crosscaps != 1 or sig.genus < 1:
        raise ArityError("path_odd needs genus >= 1 with exactly one crosscap")
    spec = c.spec
    _check_group(spec)
    n = spec.n
    k = c.det() if spec.family == "U" else 1.0
    k_lift = _central_lift(k, n, strict)
    if spec.family == "SU" and not np.allclose(k_lift, np.eye(n)):
        raise AssertionError("SU(n) only uses the trivial lift")

    h = c.mat @ k_lift.conj().T
    g, xi = _diagonalize(h)
    g, log_g = _su_path_log(g, n)
    a, xi_p = _torus_data(n, xi)

    ts = _grid(steps)
    e = np.eye(n, dtype=complex)
    arrays = []
    for t in ts:
        gt = expm_skew(t * log_g)
        mats = [e] * sig.arity
        mats[0] = _conj(gt, a)
        mats[1] = _conj(gt, _diag_exp(-2 * t * xi_p))
        mats[-1] = k_lift @ _conj(gt, _diag_exp(t * xi))
        arrays.append(mats)
    points = _make_points(sig, spec, arrays)

    el = lambda m: GroupElement(spec, m, tol=1e-8)
    last = sig.arity - 1
    targets = [EndpointTarget("start", 0, el(a)), EndpointTarget("start", 1, el(e))]
    targets += [EndpointTarget("start", i, el(e)) for i in range(2, last)]
    targets += [
        EndpointTarget("start", last, el(k_lift)),
        EndpointTarget("end", 0, el(_conj(g, a))),
        EndpointTarget("end", 1, el(_conj(g, _diag_exp(-2 * xi_p)))),
        EndpointTarget("end", last, c),
    ]
    info = {"a": a, "g": g, "xi": xi, "xi_prime": xi_p, "k_lift": k_lift}
    return GroupPath(ts, points, "odd", GroupElement.identity(spec), tuple(targets), el(k_lift @ k_lift), info)


def path_even(
    c1: GroupElement, c2: GroupElement, sig: SurfaceSig, steps: int = 100, strict: bool = True
) -> GroupPath:
    """Path in the genus-l + Klein-bottle variety from ``(a, e, a, e, ..., e, k~)`` to ``(c1, c2)``."""
    if sig.excluded:
        raise ExcludedSurface(f"{sig.total_crosscaps} crosscaps is excluded (k in {{1, 2, 4}})")
    if sig.orientable or sig.crosscaps != 2:
        raise ArityError("path_even needs exactly two crosscap generators")
    if sig.genus < 2:
        raise ArityError("path_even needs genus >= 2")
    if c1.spec != c2.spec:
        raise ValueError("c1 and c2 must come from the same group")
    spec = c1.spec
    _check_group(spec)
    n = spec.n

    k = c1.det() * c2.det() if spec.family == "U" else 1.0
    k_lift = _central_lift(k, n, strict)
    s1 = split_central(c1)[1].mat
    x_central = np.angle(s1[0, 0]) * 1j * np.eye(n)
    s2 = s1.conj().T @ k_lift

    g1, xi1 = _diagonalize(c1.mat @ s1.conj().T)
    g2, xi2 = _diagonalize(c2.mat @ s2.conj().T)
    g1, log_g1 = _su_path_log(g1, n)
    g2, log_g2 = _su_path_log(g2, n)
    a, xi1_p = _torus_data(n, xi1)
    _, xi2_p = _torus_data(n, xi2)

    ts = _grid(steps)
    e = np.eye(n, dtype=complex)
    arrays = []
    for t in ts:
        gt1, gt2 = expm_skew(t * log_g1), expm_skew(t * log_g2)
        ext = expm_skew(t * x_central)
        mats = [e] * sig.arity
        mats[0] = _conj(gt2, a)
        mats[1] = _conj(gt2, _diag_exp(-2 * t * xi2_p))
        mats[2] = _conj(gt1, a)
        mats[3] = _conj(gt1, _diag_exp(-2 * t * xi1_p))
        mats[-2] = _conj(gt1, _diag_exp(t * xi1)) @ ext
        mats[-1] = _conj(gt2, _diag_exp(t * xi2)) @ ext.conj().T @ k_lift
        arrays.append(mats)
    points = _make_points(sig, spec, arrays)

    el = lambda m: GroupElement(spec, m, tol=1e-8)
    last = sig.arity - 1
    start = [a, e, a, e] + [e] * (sig.arity - 6) + [e, k_lift]
    targets = [EndpointTarget("start", i, el(m)) for i, m in enumerate(start)]
    targets += [
        EndpointTarget("end", 0, el(_conj(g2, a))),
        EndpointTarget("end", 1, el(_conj(g2, _diag_exp(-2 * xi2_p)))),
        EndpointTarget("end", 2, el(_conj(g1, a))),
        EndpointTarget("end", 3, el(_conj(g1, _diag_exp(-2 * xi1_p)))),
        EndpointTarget("end", last - 1, c1),
        EndpointTarget("end", last, c2),
    ]
    info = {
        "a": a, "g1": g1, "g2": g2, "xi1": xi1, "xi2": xi2,
        "xi1_prime": xi1_p, "xi2_prime": xi2_p, "k_lift": k_lift, "s1": s1, "s2": s2,
    }
    return GroupPath(ts, points, "even", GroupElement.identity(spec), tuple(targets), el(k_lift @ k_lift), info)
