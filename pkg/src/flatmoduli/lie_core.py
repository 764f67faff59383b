"""Matrix-group arithmetic for U(n), SU(n) and SO(3).

Elements are unitary matrices wrapped with the group they belong to; Lie
algebra elements are skew-Hermitian matrices. Exponential and logarithm go
through a unitary eigendecomposition, so they are exact on maximal tori.
Branches are principal: eigenvalue angles live in (-pi, pi].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg

from .errors import AmbiguousBranch, SpecMismatch, UnsupportedGroup

CONSTRUCTION_TOL = 1e-12
POST_TOL = 1e-9
ACCEPT_TOL = 1e-6

BRANCH_TOL = 1e-12

FAMILIES = ("U", "SU", "SO3")


@dataclass(frozen=True)
class GroupSpec:
    """A concrete compact group: ``U(n)``, ``SU(n)`` or ``SO(3)``."""

    family: str
    n: int = 3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown group family {self.family!r}")
        if self.family == "SO3" and self.n != 3:
            raise ValueError("SO3 has fixed matrix size 3")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"matrix size must be a positive integer, got {self.n!r}")
        if self.family == "SU" and self.n < 2:
            raise ValueError("SU(n) needs n >= 2")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse ``"U:2"``, ``"SU:3"`` or ``"SO3"``."""
        text = text.strip()
        if text.upper() == "SO3":
            return cls("SO3", 3)
        family, _, n = text.partition(":")
        if not n:
            raise ValueError(f"group must look like U:n, SU:n or SO3, got {text!r}")
        return cls(family.upper(), int(n))

    @property
    def label(self) -> str:
        return "SO3" if self.family == "SO3" else f"{self.family}:{self.n}"

    @property
    def dim_S(self) -> int:
        """Dimension of the identity component of the center."""
        return 1 if self.family == "U" else 0

    @property
    def ss_simply_connected(self) -> bool:
        return self.family in ("U", "SU")

    @property
    def semisimple(self) -> bool:
        return self.family in ("SU", "SO3")

    @property
    def pi1(self):
        """Fundamental group: ``"free-rank-1"`` for U(n), else a FiniteAbelianGroup."""
        from .topology import FiniteAbelianGroup

        if self.family == "U":
            return "free-rank-1"
        if self.family == "SU":
            return FiniteAbelianGroup(())
        return FiniteAbelianGroup((2,))

    @property
    def is_real(self) -> bool:
        return self.family == "SO3"

    def to_json(self) -> dict:
        return {"family": self.family, "n": self.n}

    @classmethod
    def from_json(cls, d: dict) -> "GroupSpec":
        return cls(d["family"], int(d.get("n", 3)))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def unitarity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A matrix in a declared group; checked at construction against ``tol``."""

    spec: GroupSpec
    mat: np.ndarray
    tol: float = field(default=POST_TOL, repr=False)

    def __post_init__(self):
        m = np.asarray(self.mat)
        n = self.spec.n
        if m.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix for {self.spec.label}, got {m.shape}")
        if self.spec.is_real:
            if np.max(np.abs(np.imag(m)), initial=0.0) > self.tol:
                raise ValueError("SO3 element has non-real entries")
            m = np.real(m).astype(float)
        else:
            m = m.astype(complex)
        object.__setattr__(self, "mat", _frozen(m))
        problems = self.violations(self.tol)
        if problems:
            raise ValueError(f"not an element of {self.spec.label}: " + "; ".join(problems))

    def violations(self, tol: float) -> list[str]:
        out = []
        err = unitarity_error(self.mat)
        if err > tol:
            out.append(f"unitarity error {err:.3g}")
        if self.spec.family in ("SU", "SO3"):
            d = np.linalg.det(self.mat)
            if abs(d - 1) > tol:
                out.append(f"determinant {d:.6g} != 1")
        return out

    def is_valid(self, tol: float = CONSTRUCTION_TOL) -> bool:
        return not self.violations(tol)

    @classmethod
    def identity(cls, spec: GroupSpec) -> "GroupElement":
        return cls(spec, np.eye(spec.n))

    def _check_same(self, other: "GroupElement"):
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec.label} vs {other.spec.label}")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        self._check_same(other)
        return GroupElement(self.spec, self.mat @ other.mat)

    def inv(self) -> "GroupElement":
        return GroupElement(self.spec, self.mat.conj().T)

    def conjugate_by(self, g: "GroupElement") -> "GroupElement":
        """Return ``g self g^-1``."""
        self._check_same(g)
        return GroupElement(self.spec, g.mat @ self.mat @ g.mat.conj().T)

    def det(self) -> complex:
        return complex(np.linalg.det(self.mat))

    def distance(self, other: "GroupElement") -> float:
        return float(np.linalg.norm(self.mat - other.mat))

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "matrix": matrix_to_pairs(self.mat)}

    @classmethod
    def from_json(cls, d: dict, tol: float = POST_TOL) -> "GroupElement":
        spec = GroupSpec.from_json(d["spec"])
        return cls(spec, pairs_to_matrix(d["matrix"], spec.n), tol=tol)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A skew-Hermitian matrix in the Lie algebra of ``spec``."""

    spec: GroupSpec
    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat)
        if m.shape != (self.spec.n, self.spec.n):
            raise ValueError(f"expected a {self.spec.n}x{self.spec.n} matrix")
        if self.spec.is_real:
            if np.max(np.abs(np.imag(m)), initial=0.0) > CONSTRUCTION_TOL:
                raise ValueError("so(3) element must be real")
            m = np.real(m).astype(float)
        else:
            m = m.astype(complex)
        if np.linalg.norm(m + m.conj().T) > CONSTRUCTION_TOL * max(1.0, np.linalg.norm(m)):
            raise ValueError("matrix is not skew-Hermitian")
        if self.spec.family == "SU" and abs(np.trace(m)) > 1e-10 * max(1.0, np.linalg.norm(m)):
            raise ValueError("su(n) element must be traceless")
        object.__setattr__(self, "mat", _frozen(m))

    @classmethod
    def zero(cls, spec: GroupSpec) -> "AlgebraElement":
        return cls(spec, np.zeros((spec.n, spec.n)))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec.label} vs {other.spec.label}")
        return AlgebraElement(self.spec, self.mat + other.mat)

    def __mul__(self, scalar: float) -> "AlgebraElement":
        return AlgebraElement(self.spec, float(scalar) * self.mat)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.mat))


# -- raw array helpers (shared with the solver and homotopy code) -------------


def expm_skew(a: np.ndarray) -> np.ndarray:
    """Exponential of one or a stack of skew-Hermitian matrices."""
    w, v = np.linalg.eigh(-1j * np.asarray(a))
    return (v * np.exp(1j * w)[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def eig_unitary(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and an orthonormal eigenbasis of a normal matrix (complex Schur)."""
    t, z = scipy.linalg.schur(np.asarray(u, dtype=complex), output="complex")
    return np.diag(t).copy(), z


def principal_angles(eigs: np.ndarray) -> np.ndarray:
    ang = np.angle(eigs)
    # np.angle(-1-0j) is -pi; the principal branch is (-pi, pi]
    ang[ang <= -np.pi] += 2 * np.pi
    return ang


def logm_unitary(u: np.ndarray, check_branch: bool = True) -> np.ndarray:
    eigs, z = eig_unitary(u)
    if check_branch and np.any(np.abs(eigs + 1) <= BRANCH_TOL):
        raise AmbiguousBranch("eigenvalue on the branch cut at -1")
    ang = principal_angles(eigs)
    out = (z * (1j * ang)) @ z.conj().T
    return (out - out.conj().T) / 2


def nth_root_principal(z: complex, n: int) -> complex:
    ang = float(principal_angles(np.array([complex(z)]))[0])
    return np.exp(1j * ang / n)


def algebra_project(spec: GroupSpec, a: np.ndarray) -> np.ndarray:
    """Orthogonal projection of arbitrary matrices onto the Lie algebra of ``spec``."""
    a = np.asarray(a)
    s = (a - np.swapaxes(a.conj(), -1, -2)) / 2
    if spec.family == "SU":
        tr = np.trace(s, axis1=-2, axis2=-1)[..., None, None]
        s = s - tr / spec.n * np.eye(spec.n)
    elif spec.family == "SO3":
        s = np.real(s) + 0j
    return s


def algebra_basis(spec: GroupSpec) -> np.ndarray:
    """Orthonormal basis of the Lie algebra for ``<A, B> = Re tr(A^* B)``."""
    n = spec.n
    mats = []
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), complex)
            e[j, k], e[k, j] = 1, -1
            mats.append(e / np.sqrt(2))
            if spec.family != "SO3":
                f = np.zeros((n, n), complex)
                f[j, k] = f[k, j] = 1j
                mats.append(f / np.sqrt(2))
    if spec.family == "U":
        for j in range(n):
            e = np.zeros((n, n), complex)
            e[j, j] = 1j
            mats.append(e)
    elif spec.family == "SU":
        # Helmert-style orthonormal traceless diagonals
        for m in range(1, n):
            d = np.zeros(n)
            d[:m] = 1
            d[m] = -m
            mats.append(np.diag(1j * d / np.linalg.norm(d)))
    return np.array(mats)


def polar_project(spec: GroupSpec, m: np.ndarray) -> np.ndarray:
    """Nearest group element (polar factor, then determinant fix)."""
    u, _, vh = np.linalg.svd(m)
    q = u @ vh
    if spec.family == "SU":
        q = q / nth_root_principal(np.linalg.det(q), spec.n)
    elif spec.family == "SO3":
        q = np.real(q)
        if np.linalg.det(q) < 0:
            raise ValueError("cannot project onto SO(3) from det -1")
    return q


# -- SU(2) -> SO(3) double cover ----------------------------------------------

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def quaternion_to_su2(q) -> np.ndarray:
    w, x, y, z = q
    return w * np.eye(2) - 1j * (x * PAULI[0] + y * PAULI[1] + z * PAULI[2])


def su2_to_so3(u: np.ndarray) -> np.ndarray:
    """Adjoint action on Pauli matrices: ``R_jk = tr(s_j U s_k U*) / 2``."""
    r = np.einsum("jab,bc,kcd,da->jk", PAULI, u, PAULI, u.conj().T) / 2
    return np.real(r)


def so3_to_su2(r: np.ndarray) -> np.ndarray:
    """One of the two SU(2) preimages of a rotation matrix."""
    r = np.asarray(r, float)
    tr = np.trace(r)
    cand = np.array([1 + tr, 1 + 2 * r[0, 0] - tr, 1 + 2 * r[1, 1] - tr, 1 + 2 * r[2, 2] - tr])
    i = int(np.argmax(cand))
    q = np.empty(4)
    s = np.sqrt(max(cand[i], 0.0)) / 2
    q[i] = s
    # off-diagonal combinations of the standard quaternion rotation matrix
    if i == 0:
        q[1] = (r[2, 1] - r[1, 2]) / (4 * s)
        q[2] = (r[0, 2] - r[2, 0]) / (4 * s)
        q[3] = (r[1, 0] - r[0, 1]) / (4 * s)
    elif i == 1:
        q[0] = (r[2, 1] - r[1, 2]) / (4 * s)
        q[2] = (r[0, 1] + r[1, 0]) / (4 * s)
        q[3] = (r[0, 2] + r[2, 0]) / (4 * s)
    elif i == 2:
        q[0] = (r[0, 2] - r[2, 0]) / (4 * s)
        q[1] = (r[0, 1] + r[1, 0]) / (4 * s)
        q[3] = (r[1, 2] + r[2, 1]) / (4 * s)
    else:
        q[0] = (r[1, 0] - r[0, 1]) / (4 * s)
        q[1] = (r[0, 2] + r[2, 0]) / (4 * s)
        q[2] = (r[1, 2] + r[2, 1]) / (4 * s)
    q /= np.linalg.norm(q)
    return quaternion_to_su2(q)


# -- public operations --------------------------------------------------------


def group_exp(x: AlgebraElement) -> GroupElement:
    return GroupElement(x.spec, expm_skew(x.mat), tol=POST_TOL)


def group_log(g: GroupElement) -> AlgebraElement:
    """Principal logarithm.

    Raises AmbiguousBranch when an eigenvalue sits within 1e-12 of -1. On SU(n)
    the principal angles are rebalanced to sum to zero (see
    :func:`balance_angles`) so the result stays in su(n).
    """
    if g.spec.family == "SU":
        return traceless_log(g)
    return AlgebraElement(g.spec, logm_unitary(g.mat))


def traceless_log(g: GroupElement) -> AlgebraElement:
    if g.spec.family != "SU":
        raise UnsupportedGroup("traceless_log is for SU(n)")
    eigs, z = eig_unitary(g.mat)
    if np.any(np.abs(eigs + 1) <= BRANCH_TOL):
        raise AmbiguousBranch("eigenvalue on the branch cut at -1")
    ang = balance_angles(principal_angles(eigs))
    m = (z * (1j * ang)) @ z.conj().T
    return AlgebraElement(g.spec, algebra_project(g.spec, m))


def balance_angles(ang: np.ndarray) -> np.ndarray:
    """Shift angles by multiples of 2*pi so that they sum to zero."""
    ang = np.array(ang, float)
    wraps = int(np.rint(ang.sum() / (2 * np.pi)))
    order = np.argsort(ang)
    if wraps > 0:
        ang[order[len(ang) - wraps:]] -= 2 * np.pi
    elif wraps < 0:
        ang[order[: -wraps]] += 2 * np.pi
    return ang


def _haar_array(spec: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.family == "SO3":
        q = rng.standard_normal(4)
        return su2_to_so3(quaternion_to_su2(q / np.linalg.norm(q)))
    n = spec.n
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    if spec.family == "SU":
        q = q / nth_root_principal(np.linalg.det(q), n)
    return q


def haar_sample(spec: GroupSpec, seed: Union[int, np.random.Generator, list, tuple]) -> GroupElement:
    """Haar-distributed element; deterministic for a fixed seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return GroupElement(spec, _haar_array(spec, rng), tol=CONSTRUCTION_TOL * 100)


def split_central(g: GroupElement) -> tuple[GroupElement, GroupElement]:
    """Write ``g = ss_part @ s_part`` with ``ss_part`` in SU(n), ``s_part`` scalar.

    The scalar is the principal n-th root of det(g). For SU(n) and SO(3) the
    central torus is trivial and the split is ``(g, I)``.
    """
    spec = g.spec
    if spec.family != "U":
        return g, GroupElement.identity(spec)
    lam = nth_root_principal(np.linalg.det(g.mat), spec.n)
    s = GroupElement(spec, lam * np.eye(spec.n))
    ss = GroupElement(spec, g.mat / lam)
    return ss, s


def project_pi(g: GroupElement) -> complex:
    """Image of ``g`` in G/G_ss, realized as a unit complex number."""
    if g.spec.family == "SO3":
        raise UnsupportedGroup("G/G_ss is trivial for SO(3); use topology.lift_obstruction")
    if g.spec.family == "SU":
        return 1.0 + 0j
    return g.det()


# -- serialization -------------------------------------------------------------


def matrix_to_pairs(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def pairs_to_matrix(data, n: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape == (n * n, 2):
        arr = arr.reshape(n, n, 2)
    if arr.shape != (n, n, 2):
        raise ValueError(f"matrix payload has shape {arr.shape}, expected ({n}, {n}, 2)")
    return arr[..., 0] + 1j * arr[..., 1]
