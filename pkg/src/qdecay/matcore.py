"""Dense complex Hermitian linear algebra.

Everything downstream (entropies, channels, bound checks) sits on this
module: a cyclic Jacobi eigensolver for complex Hermitian matrices,
matrix functions through the eigenbasis, tensor and partial-trace
structure, trace norms, and Loewner-order queries.

Conventions fixed here and used globally:
  * matrices are numpy complex arrays, row-major;
  * vectorization is column-stacking (relevant to the channels module);
  * an eigenvalue counts as nonzero when it exceeds SUPPORT_RTOL times
    the largest eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .rng import Rng

HERMITIAN_ATOL = 1e-10
DENSITY_EIG_FLOOR = -1e-10
DENSITY_TRACE_ATOL = 1e-10
SUPPORT_RTOL = 1e-12

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL_FACTOR = 1e-13


class JacobiConvergenceError(RuntimeError):
    """Raised when the cyclic Jacobi sweep cap is hit before convergence."""


def as_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate that m is Hermitian within tolerance and return (m + m†)/2."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
    dev = float(np.abs(m - m.conj().T).max())
    if dev > atol * scale:
        raise ValueError(f"matrix is not Hermitian: max |M - M^dagger| = {dev:.3e}")
    return (m + m.conj().T) / 2


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns match eigenvalues


def jacobi_eigh_batch(stack: np.ndarray,
                      max_sweeps: int = JACOBI_MAX_SWEEPS,
                      tol_factor: float = JACOBI_TOL_FACTOR) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a stack of Hermitian matrices.

    Applies the same cyclic (p, q) rotation schedule to every matrix in
    the (n, d, d) stack, with rotation angles computed elementwise, until
    each off-diagonal Frobenius norm falls below tol_factor times the
    matrix Frobenius norm.  Returns (eigenvalues, eigenvectors) with
    eigenvalues ascending per matrix.
    """
    A = np.array(stack, dtype=complex)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {A.shape}")
    n, d, _ = A.shape
    V = np.broadcast_to(np.eye(d, dtype=complex), (n, d, d)).copy()
    if d == 1:
        return A[:, 0, 0].real.reshape(n, 1), V
    norm_f = np.sqrt((np.abs(A) ** 2).sum(axis=(1, 2)))
    tol = tol_factor * np.maximum(norm_f, np.finfo(float).tiny)
    off_mask = ~np.eye(d, dtype=bool)
    converged = False
    for _ in range(max_sweeps):
        off = np.sqrt((np.abs(A[:, off_mask]) ** 2).sum(axis=1))
        if np.all(off <= tol):
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[:, p, q].copy()
                mag = np.abs(apq)
                active = mag > np.finfo(float).tiny
                safe_mag = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe_mag, 1.0 + 0.0j)
                tau = (A[:, q, q].real - A[:, p, p].real) / (2.0 * safe_mag)
                t = np.where(active,
                             np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau)),
                             0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s_ph = (t * c) * phase
                # right-multiply columns p,q of A and V, left-multiply rows of A
                colp, colq = A[:, :, p].copy(), A[:, :, q].copy()
                A[:, :, p] = c[:, None] * colp - np.conj(s_ph)[:, None] * colq
                A[:, :, q] = s_ph[:, None] * colp + c[:, None] * colq
                rowp, rowq = A[:, p, :].copy(), A[:, q, :].copy()
                A[:, p, :] = c[:, None] * rowp - s_ph[:, None] * rowq
                A[:, q, :] = np.conj(s_ph)[:, None] * rowp + c[:, None] * rowq
                colp, colq = V[:, :, p].copy(), V[:, :, q].copy()
                V[:, :, p] = c[:, None] * colp - np.conj(s_ph)[:, None] * colq
                V[:, :, q] = s_ph[:, None] * colp + c[:, None] * colq
    if not converged:
        off = np.sqrt((np.abs(A[:, off_mask]) ** 2).sum(axis=1))
        worst = int(np.argmax(off / np.maximum(tol, np.finfo(float).tiny)))
        raise JacobiConvergenceError(
            f"Jacobi did not converge after {max_sweeps} sweeps for a "
            f"{d}x{d} matrix (off-diagonal residual {off[worst]:.3e})")
    w = np.diagonal(A, axis1=1, axis2=2).real.copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    return w, V


def eigh(h: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a single Hermitian matrix, eigenvalues ascending."""
    h = as_hermitian(h)
    w, v = jacobi_eigh_batch(h[None])
    return EigenDecomposition(w[0], v[0])


def matrix_function(h: np.ndarray, f: Callable[[np.ndarray], np.ndarray],
                    domain: Callable[[np.ndarray], np.ndarray] | None = None,
                    name: str = "f") -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its eigenbasis.

    domain, when given, maps eigenvalues to a boolean validity mask; the
    first invalid eigenvalue is reported in the error.
    """
    w, v = eigh(h)
    if domain is not None:
        ok = np.asarray(domain(w), dtype=bool)
        if not ok.all():
            bad = float(w[~ok][0])
            raise ValueError(f"{name} is undefined at eigenvalue {bad!r}")
    fw = np.asarray(f(w), dtype=float)
    return (v * fw) @ v.conj().T


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, left factor major (matches BipartiteDensity order)."""
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(m: np.ndarray, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Partial trace of a (dim_a*dim_b) square matrix; keep is 'A' or 'B'."""
    m = np.asarray(m)
    d = dim_a * dim_b
    if m.shape != (d, d):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dim_a}x{dim_b}")
    r = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijik->jk", r)
    raise ValueError("keep must be 'A' or 'B'")


def trace_norm(m: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = eigh(m)
    return float(np.abs(w).sum())


def operator_norm(m: np.ndarray) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    w, _ = eigh(m)
    return float(np.abs(w).max())


@dataclass(frozen=True)
class DensityMatrix:
    """Positive semidefinite unit-trace Hermitian matrix with cached spectrum.

    The stored matrix is reconstructed from the clamped spectrum, so the
    cached (eigenvalues, eigenvectors) pair is exactly consistent with
    .matrix.  Eigenvalues in [-1e-10, 0) are clamped to zero and the trace
    renormalized; anything more negative is rejected.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "DensityMatrix":
        h = as_hermitian(m)
        tr = float(np.trace(h).real)
        if abs(tr - 1.0) > DENSITY_TRACE_ATOL:
            raise ValueError(f"density trace {tr!r} is not 1 within {DENSITY_TRACE_ATOL}")
        w, v = jacobi_eigh_batch(h[None])
        w, v = w[0], v[0]
        if w[0] < DENSITY_EIG_FLOOR:
            raise ValueError(f"matrix is not positive semidefinite: eigenvalue {w[0]!r}")
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        rebuilt = (v * w) @ v.conj().T
        rebuilt = (rebuilt + rebuilt.conj().T) / 2
        rebuilt.setflags(write=False)
        w.setflags(write=False)
        v.setflags(write=False)
        return cls(rebuilt, w, v)

    @classmethod
    def pure(cls, vec: np.ndarray) -> "DensityMatrix":
        vec = np.asarray(vec, dtype=complex)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        vec = vec / nrm
        return cls.from_matrix(np.outer(vec, vec.conj()))

    @classmethod
    def diagonal(cls, probs) -> "DensityMatrix":
        p = np.asarray(probs, dtype=float)
        return cls.from_matrix(np.diag(p.astype(complex)))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls.from_matrix(np.eye(d, dtype=complex) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def support_mask(self) -> np.ndarray:
        top = self.eigenvalues[-1]
        return self.eigenvalues > SUPPORT_RTOL * max(top, np.finfo(float).tiny)

    def support_rank(self) -> int:
        return int(self.support_mask().sum())

    def support_projector(self) -> np.ndarray:
        vs = self.eigenvectors[:, self.support_mask()]
        return vs @ vs.conj().T


@dataclass(frozen=True)
class BipartiteDensity:
    """Density on A tensor B with A fixed as the left factor."""

    dim_a: int
    dim_b: int
    state: DensityMatrix

    def __post_init__(self):
        if self.dim_a * self.dim_b != self.state.dim:
            raise ValueError(
                f"split {self.dim_a}x{self.dim_b} does not match dim {self.state.dim}")

    @classmethod
    def from_matrix(cls, m: np.ndarray, dim_a: int, dim_b: int) -> "BipartiteDensity":
        return cls(dim_a, dim_b, DensityMatrix.from_matrix(m))

    def marginal(self, keep: str) -> DensityMatrix:
        red = partial_trace(self.state.matrix, self.dim_a, self.dim_b, keep)
        return DensityMatrix.from_matrix(red)


def loewner_min_coefficient(rho, sigma, strict: bool = False) -> float:
    """Smallest g with g*sigma - P_sigma rho P_sigma >= 0.

    rho and sigma may be DensityMatrix instances or PSD Hermitian arrays
    (sigma's support is read off its spectrum either way).  When strict
    is set, any weight of rho outside supp(sigma) makes the answer
    infinite; otherwise rho is first compressed to supp(sigma).
    """
    rho_m = rho.matrix if isinstance(rho, DensityMatrix) else as_hermitian(rho)
    if isinstance(sigma, DensityMatrix):
        ws, vs = sigma.eigenvalues, sigma.eigenvectors
    else:
        ws, vs = eigh(as_hermitian(sigma))
    top = max(float(ws[-1]), np.finfo(float).tiny)
    mask = ws > SUPPORT_RTOL * top
    if strict:
        outside = vs[:, ~mask]
        if outside.size:
            leak = float(np.linalg.norm(outside.conj().T @ rho_m @ outside))
            if leak > SUPPORT_RTOL * max(1.0, float(np.abs(rho_m).max())):
                return float("inf")
    vsup = vs[:, mask]
    wsup = ws[mask]
    # generalized eigenvalue problem on supp(sigma): g = lmax(S^-1/2 R S^-1/2)
    compressed = vsup.conj().T @ rho_m @ vsup
    scale = 1.0 / np.sqrt(wsup)
    whitened = scale[:, None] * compressed * scale[None, :]
    w, _ = jacobi_eigh_batch(as_hermitian(whitened, atol=1e-8)[None])
    return float(w[0][-1])


def commuting_order_floor(rho: DensityMatrix, sigma: DensityMatrix,
                          comm_atol: float = 1e-10) -> float:
    """For commuting densities, eps = || (rho - sigma)|_supp(sigma) ||_inf.

    Asserts the order floor rho - sigma + eps * P_sigma >= -1e-12 before
    returning.  Non-commuting inputs are a precondition error.
    """
    comm = rho.matrix @ sigma.matrix - sigma.matrix @ rho.matrix
    if float(np.abs(comm).max()) > comm_atol:
        raise ValueError("inputs do not commute within tolerance")
    p = sigma.support_projector()
    diff = p @ (rho.matrix - sigma.matrix) @ p
    eps = operator_norm(diff)
    floor = rho.matrix - sigma.matrix + eps * p
    wmin = float(eigh(floor)[0][0])
    if wmin < -1e-12:
        raise AssertionError(f"order floor violated: min eigenvalue {wmin!r}")
    return eps


def random_hermitian(rng: Rng, d: int, scale: float = 1.0) -> np.ndarray:
    """Gaussian Hermitian matrix (GUE-style up to normalization)."""
    g = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            g[i, j] = rng.normal() + 1j * rng.normal()
    return scale * (g + g.conj().T) / 2


def random_density(rng: Rng, d: int, mix: float = 0.0) -> DensityMatrix:
    """Hilbert-Schmidt random density: G G^dagger normalized, optionally
    mixed with I/d to keep the spectrum away from zero."""
    g = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            g[i, j] = rng.normal() + 1j * rng.normal()
    r = g @ g.conj().T
    r = r / np.trace(r).real
    if mix:
        r = (1 - mix) * r + mix * np.eye(d) / d
    return DensityMatrix.from_matrix(r)


def random_probability_vector(rng: Rng, d: int, floor: float = 0.0) -> np.ndarray:
    """Probability vector from exponential spacings, optionally floored."""
    x = np.array([-np.log(rng.uniform_open()) for _ in range(d)])
    p = x / x.sum()
    if floor:
        p = (1 - d * floor) * p + floor
    return p
