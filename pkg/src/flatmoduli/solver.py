"""Numerical solutions of surface-group relations in compact matrix groups.

Minimizes ``||R(x) - I||_F^2`` over a product of copies of the group by
Riemannian gradient descent: each generator moves along the one-parameter
subgroup ``x_j exp(-eta grad_j)`` and the step is chosen by Armijo
backtracking. Once the residual drops below ``polish_below`` a Gauss-Newton
iteration in left-translated algebra coordinates takes it to ``polish_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ExcludedSurface, ImageViolation, NoConvergence, UnsupportedGroup
from .lie_core import (
    GroupElement,
    GroupSpec,
    _haar_array,
    algebra_basis,
    expm_skew,
    logm_unitary,
    polar_project,
)
from .surface import (
    SurfaceSig,
    TuplePoint,
    commutator_word,
    relation_word,
    word_adjoints,
    word_gradient,
    word_value,
)

Seed = Union[int, Sequence[int]]


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 10000
    step_init: float = 0.1
    armijo_c: float = 1e-4
    residual_tol: float = 1e-6
    polish_below: float = 1e-3
    polish_tol: float = 1e-10
    restarts: int = 10
    reproject_every: int = 100
    seed: Seed = 0

    def __post_init__(self):
        for name in ("max_iters", "step_init", "armijo_c", "residual_tol", "restarts", "reproject_every"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.residual_tol < 1:
            raise ValueError("residual_tol must be < 1")

    def seed_for(self, *counters: int) -> list[int]:
        base = [self.seed] if isinstance(self.seed, (int, np.integer)) else list(self.seed)
        return [int(s) for s in base] + [int(c) for c in counters]


@dataclass(frozen=True, eq=False)
class SolverReport:
    solution: Optional[TuplePoint]
    residual: float
    iters: int
    restarts_used: int
    converged: bool
    history: tuple = ()

    def to_json(self) -> dict:
        return {
            "converged": self.converged,
            "residual": self.residual,
            "iters": self.iters,
            "restarts_used": self.restarts_used,
            "solution": None if self.solution is None else self.solution.to_json(),
        }


# -- core iteration ---------------------------------------------------------------


def _residual(mats, word, tail) -> float:
    r = word_value(mats, word, tail)
    return float(np.linalg.norm(r - np.eye(mats.shape[-1])))


def _reproject(spec: GroupSpec, mats: np.ndarray) -> np.ndarray:
    return np.array([polar_project(spec, m) for m in mats], dtype=complex)


def _descend(spec, mats, word, tail, cfg: SolverConfig, history: Optional[list]):
    """Armijo gradient descent; stops early once the residual is polishable."""
    step = cfg.step_init
    f, grad, _ = word_gradient(spec, mats, word, tail)
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if np.sqrt(f) < cfg.polish_below:
            break
        gnorm2 = float(np.real(np.vdot(grad, grad)))
        if gnorm2 < 1e-30:
            break
        eta = min(step * 2.0, 1.0)
        while True:
            trial = mats @ expm_skew(-eta * grad)
            f_trial = _residual(trial, word, tail) ** 2
            if f_trial <= f - cfg.armijo_c * eta * gnorm2 or eta < 1e-12:
                break
            eta /= 2
        if f_trial > f:
            break  # no descent possible at machine precision
        mats, step = trial, eta
        if it % cfg.reproject_every == 0:
            mats = _reproject(spec, mats)
        f, grad, _ = word_gradient(spec, mats, word, tail)
        if history is not None:
            history.append(f)
    return mats, it


def _gauss_newton(spec, mats, word, tail, cfg: SolverConfig, max_steps: int = 30):
    basis = algebra_basis(spec)
    n_gen = mats.shape[0]
    d = len(basis)
    conj_basis = basis.conj()
    res = _residual(mats, word, tail)
    for _ in range(max_steps):
        if res <= cfg.polish_tol:
            break
        r, terms = word_adjoints(mats, word, tail)
        target = -logm_unitary(r, check_branch=False)
        rhs = np.real(np.einsum("gij,ij->g", conj_basis, target))
        jac = np.zeros((d, n_gen * d))
        for idx, sgn, q in terms:
            moved = q @ basis @ q.conj().T
            block = np.real(np.einsum("gij,bij->gb", conj_basis, moved))
            jac[:, idx * d:(idx + 1) * d] += sgn * block
        delta, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
        steps = np.einsum("jb,bkl->jkl", delta.reshape(n_gen, d), basis)
        trial = _reproject(spec, mats @ expm_skew(steps))
        new_res = _residual(trial, word, tail)
        if new_res >= res:
            break
        mats, res = trial, new_res
    return mats, res


def _minimize(spec, init, word, tail, cfg, history=None):
    mats, iters = _descend(spec, init, word, tail, cfg, history)
    mats = _reproject(spec, mats)
    res = _residual(mats, word, tail)
    if res < cfg.polish_below:
        mats, res = _gauss_newton(spec, mats, word, tail, cfg)
    return mats, res, iters


def _as_real(spec, mats):
    return np.real(mats) if spec.is_real else mats


# -- initial points -------------------------------------------------------------


def _pi_rotation_pair() -> tuple[np.ndarray, np.ndarray]:
    return np.diag([1.0, -1.0, -1.0]), np.diag([-1.0, 1.0, -1.0])


def _initial_point(sig: SurfaceSig, spec: GroupSpec, rng, target_bits, target_lift):
    mats = np.array([_haar_array(spec, rng) for _ in range(sig.arity)], dtype=complex)
    if target_bits is not None and spec.family == "U" and sig.crosscaps:
        # crosscap generators with the requested determinants; a Haar SU(n) factor
        # keeps them otherwise random
        su = GroupSpec("SU", spec.n) if spec.n > 1 else None
        l = sig.genus
        sign = -1.0 if target_bits[0] else 1.0
        flip = np.eye(spec.n, dtype=complex)
        flip[0, 0] = sign
        for j in range(sig.crosscaps):
            base = _haar_array(su, rng) if su else np.eye(1, dtype=complex)
            mats[2 * l + j] = base @ flip if j == 0 else base
    if target_lift == -1 and spec.family == "SO3":
        if sig.genus < 1:
            raise ValueError("the nontrivial SO(3) class needs a handle in this seeding")
        h = _haar_array(spec, rng)
        a, b = _pi_rotation_pair()
        mats[0], mats[1] = h @ a @ h.T, h @ b @ h.T
        for k in range(2, 2 * sig.genus):
            mats[k] = np.eye(3)
        for k in range(2 * sig.genus, sig.arity):
            mats[k] = np.eye(3)
        noise = np.array([_small_rotation(rng, 0.05) for _ in range(sig.arity)])
        mats = mats @ noise
    elif target_lift == 1 and spec.family == "SO3":
        # a common torus: all generators rotate about one axis
        h = _haar_array(spec, rng)
        mats = np.array([h @ _z_rotation(rng.uniform(-np.pi, np.pi)) @ h.T for _ in range(sig.arity)], dtype=complex)
        mats = mats @ np.array([_small_rotation(rng, 0.05) for _ in range(sig.arity)])
    return mats


def _z_rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])


def _small_rotation(rng, scale: float) -> np.ndarray:
    v = rng.standard_normal(3) * scale
    k = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.real(expm_skew(k + 0j))


# -- public operations ------------------------------------------------------------


def _bits_of(target) -> Optional[tuple]:
    if target is None:
        return None
    bits = getattr(target, "bits", target)
    return tuple(int(b) for b in bits)


def solve_relation(
    sig: SurfaceSig,
    spec: GroupSpec,
    target_obstruction=None,
    cfg: SolverConfig = SolverConfig(),
    target_lift: Optional[int] = None,
    keep_history: bool = False,
) -> SolverReport:
    """Find a tuple with relation value I.

    ``target_obstruction`` (an ObstructionClass or a bit sequence) seeds and
    verifies the K-class for U(n); ``target_lift`` (+1/-1) does the same for the
    SO(3) lifting class. Attempts whose class drifts are discarded.
    """
    from .topology import lift_obstruction, obstruction

    if sig.excluded:
        raise ExcludedSurface(f"{sig.total_crosscaps} crosscaps is excluded (k in {{1, 2, 4}})")
    if sig.arity == 0:
        raise ValueError("the sphere has no generators to solve for")
    bits = _bits_of(target_obstruction)
    if bits is not None:
        if len(bits) != spec.dim_S:
            raise ValueError(f"obstruction class for {spec.label} has {spec.dim_S} bits, got {len(bits)}")
        if sig.orientable and bits:
            raise ValueError("orientable surfaces carry no K-class")
    if target_lift is not None and spec.family != "SO3":
        raise UnsupportedGroup("target_lift is for SO(3)")

    word = relation_word(sig)
    best = None
    total_iters = 0
    for attempt in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed_for(attempt))
        init = _initial_point(sig, spec, rng, bits, target_lift)
        history = [] if keep_history else None
        mats, res, iters = _minimize(spec, init, word, None, cfg, history)
        total_iters += iters
        if best is None or res < best[1]:
            best = (mats, res)
        if res > cfg.residual_tol:
            continue
        point = TuplePoint.from_arrays(sig, spec, _as_real(spec, mats))
        if bits and obstruction(point).bits != bits:
            continue
        if target_lift is not None and lift_obstruction(point) != target_lift:
            continue
        return SolverReport(point, res, total_iters, attempt, True, tuple(history or ()))
    return SolverReport(None, best[1], total_iters, cfg.restarts - 1, False)


def commutator_preimage(g: GroupElement, genus: int, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    """Find ``(a_1, b_1, ..., a_l, b_l)`` with ``mu(a, b) = g``."""
    spec = g.spec
    if genus < 1:
        raise ValueError("need at least one handle")
    if spec.family in ("U", "SU") and abs(g.det() - 1) > 1e-9:
        raise ImageViolation(f"det(g) = {g.det():.6g}; commutators lie in G_ss so no preimage exists")
    sig = SurfaceSig.from_genus(genus)
    word = commutator_word(genus)
    tail = g.mat.conj().T.astype(complex)
    n = spec.n
    ident = np.array([np.eye(n, dtype=complex)] * (2 * genus))
    if _residual(ident, word, tail) <= cfg.polish_tol:
        return SolverReport(TuplePoint.identity(sig, spec), 0.0, 0, 0, True)
    best = np.inf
    total_iters = 0
    for attempt in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed_for(attempt))
        init = np.array([_haar_array(spec, rng) for _ in range(2 * genus)], dtype=complex)
        mats, res, iters = _minimize(spec, init, word, tail, cfg)
        total_iters += iters
        best = min(best, res)
        if res <= cfg.residual_tol:
            point = TuplePoint.from_arrays(sig, spec, _as_real(spec, mats))
            return SolverReport(point, res, total_iters, attempt, True)
    return SolverReport(None, best, total_iters, cfg.restarts - 1, False)


def require_converged(report: SolverReport) -> TuplePoint:
    if not report.converged:
        raise NoConvergence(f"best residual {report.residual:.3g} after {report.restarts_used + 1} attempts")
    return report.solution


def with_seed(cfg: SolverConfig, seed: Seed) -> SolverConfig:
    return replace(cfg, seed=seed)
