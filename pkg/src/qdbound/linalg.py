"""Dense complex linear algebra for the bound-verification toolkit.

Everything operates on square-ish ``numpy`` arrays of ``complex128``; matrices
are the universal carrier for states, Hamiltonians, unitaries, and (after
vectorization) superoperators.  Target sizes are desk scale: joint dimensions
up to 32 and superoperator matrices up to 1024.  All functions are pure.

Randomness is counter-based and splittable: every stream is a Philox generator
keyed by ``SeedSequence(seed, spawn_key=path)``, so any trial or restart can be
replayed in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

GENERATOR_ID = "numpy-philox4x32/SeedSequence(seed, spawn_key=path)"

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-8
BRANCH_TOL = 1e-6

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class BranchCutError(ValueError):
    """A unitary has an eigenphase too close to the log branch cut at ±π."""


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array and reject non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def require_square(a: np.ndarray) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def require_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = require_square(a)
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e} > {tol:.1e})")
    return a


def require_unitary(a: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    a = require_square(a)
    dev = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))
    if dev > tol:
        raise ValueError(f"matrix is not unitary (max deviation {dev:.3e} > {tol:.1e})")
    return a


@dataclass(frozen=True)
class SubsystemDims:
    """System ⊗ bath factorization of a joint Hilbert space."""

    d_s: int
    d_b: int

    def __post_init__(self):
        if self.d_s < 1 or self.d_b < 1:
            raise ValueError("subsystem dimensions must be positive")

    @property
    def joint(self) -> int:
        return self.d_s * self.d_b

    def check(self, a: np.ndarray) -> None:
        if a.shape[0] != self.joint:
            raise ValueError(
                f"matrix side {a.shape[0]} does not factor as {self.d_s}x{self.d_b}"
            )


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    return as_matrix(a).conj().T


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, left-factor-major block order."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_b(x: np.ndarray, dims: SubsystemDims) -> np.ndarray:
    """Trace out the bath factor by direct index summation.

    (tr_B X)_{ij} = sum_k X_{(i,k),(j,k)}.  Preserves the trace exactly (up to
    floating-point addition order).
    """
    x = require_square(x)
    dims.check(x)
    blocks = x.reshape(dims.d_s, dims.d_b, dims.d_s, dims.d_b)
    return np.trace(blocks, axis1=1, axis2=3)


def eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = require_hermitian(h)
    w, q = np.linalg.eigh(h)
    return w, q


def svd_values(a: np.ndarray) -> np.ndarray:
    """Singular values, descending and non-negative."""
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def expm_skew_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i t H) for Hermitian H, via eigendecomposition; exactly normal."""
    w, q = eigh(h)
    return (q * np.exp(-1j * t * w)) @ q.conj().T


def expm_general(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of a general square matrix (Padé scaling-and-squaring)."""
    return scipy.linalg.expm(require_square(m))


def unitary_branch_margin(u: np.ndarray) -> float:
    """Smallest angular distance of any eigenphase of ``u`` from ±π."""
    u = require_unitary(u)
    t, _ = scipy.linalg.schur(u, output="complex")
    return float(np.pi - np.max(np.abs(np.angle(np.diag(t)))))


def logm_unitary_principal(u: np.ndarray, branch_tol: float = BRANCH_TOL) -> np.ndarray:
    """Hermitian Ω with U = exp(-i Ω) and eigenphases in (-π, π).

    The principal branch is ill-conditioned near eigenvalue -1, where an
    infinitesimal perturbation flips an eigenphase by 2π; inputs with any
    eigenphase within ``branch_tol`` of ±π are rejected.
    """
    u = require_unitary(u)
    # Schur of a (numerically) normal matrix: T is diagonal up to round-off
    # and Q is exactly unitary, so the rebuilt Ω is Hermitian by construction.
    t, q = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    margin = np.pi - np.max(np.abs(phases))
    if margin < branch_tol:
        raise BranchCutError(
            f"eigenphase within {margin:.3e} of the ±π branch cut (tol {branch_tol:.1e})"
        )
    omega = (q * (-phases)) @ q.conj().T
    return (omega + omega.conj().T) / 2


# ---------------------------------------------------------------------------
# seeded random instances
# ---------------------------------------------------------------------------

RANDOM_KINDS = ("haar-unitary", "gue-hermitian", "random-density", "ginibre")


@dataclass(frozen=True)
class RandomInstanceSpec:
    """Deterministic description of one random matrix draw."""

    seed: int
    kind: str
    dim: int
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in RANDOM_KINDS:
            raise ValueError(f"unknown kind {self.kind!r}, expected one of {RANDOM_KINDS}")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.scale < 0:
            raise ValueError("scale must be non-negative")


def stream(seed: int, *path: int) -> np.random.Generator:
    """Philox substream for a (seed, path) pair; disjoint for distinct paths."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=path)))


def ginibre(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Complex Ginibre matrix: i.i.d. entries with E|g|^2 = 1."""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal
    phases folded back in (plain QR is not Haar without this correction)."""
    q, r = np.linalg.qr(ginibre(dim, rng))
    d = np.diag(r)
    return q * (d / np.abs(d))


def gue_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = ginibre(dim, rng)
    return scale * (g + g.conj().T) / 2


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(dim, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_instance(spec: RandomInstanceSpec) -> np.ndarray:
    """Draw the matrix described by ``spec``; same spec, same bits."""
    rng = stream(spec.seed)
    if spec.kind == "haar-unitary":
        return haar_unitary(spec.dim, rng)
    if spec.kind == "gue-hermitian":
        return gue_hermitian(spec.dim, rng, spec.scale)
    if spec.kind == "random-density":
        return random_density(spec.dim, rng)
    return spec.scale * ginibre(spec.dim, rng)
