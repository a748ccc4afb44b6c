"""Reduced-basis construction by the method of snapshots.

The snapshot matrix S (N x Ns) is zero-centered column-wise, the small
Gram matrix G = Sc^T Sc / Ns is diagonalized with cyclic Jacobi rotations,
and the basis vectors are recovered as u_l = Sc v_l / (sigma_l sqrt(Ns))
with sigma_l = sqrt(lambda_l), which is the SVD of Sc / sqrt(Ns) computed
on the Ns-dimensional side.  Reduced coefficients are standardized by
dividing by sigma_l so every network output is O(1); parameters are
min-max mapped to [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, NumericalError

_EPS = np.finfo(float).eps


def center(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise mean and the centered matrix."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[1] < 2:
        raise ValueError("need an N x Ns matrix with Ns >= 2")
    mean = s.mean(axis=1)
    return mean, s - mean[:, None]


def gram(sc: np.ndarray) -> np.ndarray:
    """G = Sc^T Sc / Ns, the small symmetric positive semidefinite matrix."""
    sc = np.asarray(sc, dtype=float)
    ns = sc.shape[1]
    g = sc.T @ sc / ns
    return 0.5 * (g + g.T)


def eigendecompose_spsd(
    g: np.ndarray,
    tol: float = 1e-12,
    max_sweeps: int = 50,
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric PSD matrix.

    Sweeps until the off-diagonal Frobenius norm drops below tol * ||G||_F.
    Returns eigenvalues (clamped at >= 0, descending) and the matching
    orthonormal eigenvectors with a fixed sign convention (first nonzero
    entry positive), so the output is byte-reproducible.
    """
    a = np.array(g, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    norm_g = float(np.linalg.norm(a))

    def off_norm() -> float:
        # summed directly over off-diagonal entries; the sum(A^2) - sum(diag^2)
        # form cancels catastrophically near convergence
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        return float(np.linalg.norm(off))

    if n > 1 and norm_g > 0.0:
        converged = False
        for _ in range(max_sweeps):
            if off_norm() <= tol * norm_g:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    col_p = a[:, p].copy()
                    col_q = a[:, q].copy()
                    a[:, p] = c * col_p - s * col_q
                    a[:, q] = s * col_p + c * col_q
                    row_p = a[p, :].copy()
                    row_q = a[q, :].copy()
                    a[p, :] = c * row_p - s * row_q
                    a[q, :] = s * row_p + c * row_q
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    v_p = v[:, p].copy()
                    v_q = v[:, q].copy()
                    v[:, p] = c * v_p - s * v_q
                    v[:, q] = s * v_p + c * v_q
        if not converged and off_norm() > tol * norm_g:
            raise NumericalError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps"
            )

    vals = np.maximum(np.diag(a).copy(), 0.0)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    v = v[:, order]
    _canonicalize_signs(v)
    return vals, v


def _canonicalize_signs(mat: np.ndarray) -> None:
    """Flip column signs in place so the first nonzero entry is positive."""
    for j in range(mat.shape[1]):
        col = mat[:, j]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            mat[:, j] = -col


def numerical_rank(eigenvalues: np.ndarray, n_rows: int, n_cols: int) -> int:
    """Rank estimate with the usual SVD cutoff sigma > max(N, Ns) * eps * sigma_1,
    expressed on the eigenvalues of the Gram matrix."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size == 0 or eigenvalues[0] <= 0:
        return 0
    thresh = (max(n_rows, n_cols) * _EPS) ** 2 * eigenvalues[0]
    return int(np.sum(eigenvalues > thresh))


@dataclass(frozen=True)
class ParamScaler:
    """Affine min-max map of each parameter to [-1, 1] and back."""

    names: tuple
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        if np.any(self.maxs <= self.mins):
            raise ConfigurationError("degenerate parameter range (max <= min)")

    @classmethod
    def from_samples(cls, names, matrix: np.ndarray) -> "ParamScaler":
        matrix = np.asarray(matrix, dtype=float)
        return cls(tuple(names), matrix.min(axis=0), matrix.max(axis=0))

    def scale(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=float)
        return 2.0 * (mu - self.mins) / (self.maxs - self.mins) - 1.0

    def unscale(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return self.mins + (z + 1.0) * (self.maxs - self.mins) / 2.0


@dataclass(frozen=True)
class ReducedBasis:
    """Mean field, orthonormal modes, singular values of Sc / sqrt(Ns), the
    full eigenvalue spectrum, and the parameter scaler used online."""

    mean_field: np.ndarray
    modes: np.ndarray  # (N, L)
    singular_values: np.ndarray  # (L,)
    energy_spectrum: np.ndarray  # all eigenvalues, descending
    param_scaler: ParamScaler | None = None
    truncation_note: str | None = None

    @property
    def n_dof(self) -> int:
        return int(self.mean_field.shape[0])

    @property
    def n_modes(self) -> int:
        return int(self.modes.shape[1])

    def with_scaler(self, scaler: ParamScaler) -> "ReducedBasis":
        return replace(self, param_scaler=scaler)


@dataclass(frozen=True)
class ReducedCoefficients:
    raw: np.ndarray
    standardized: np.ndarray


def compute_basis(
    sc: np.ndarray,
    eigenvalues: np.ndarray,
    eigenvectors: np.ndarray,
    n_modes: int,
    tol_rank: float = 1e-12,
    mean_field: np.ndarray | None = None,
) -> ReducedBasis:
    """Assemble the reduced basis from the centered matrix and the Gram
    eigendecomposition.

    Modes with eigenvalues at or below tol_rank * lambda_1 are dropped; a
    request past that floor truncates and records a note.  Orthonormality
    of the modes is the arbiter: if round-off at the rank floor degrades
    it past 1e-11 the modes get one Gram-Schmidt polish pass.
    """
    sc = np.asarray(sc, dtype=float)
    n, ns = sc.shape
    lam1 = float(eigenvalues[0]) if eigenvalues.size else 0.0
    if lam1 > 0:
        keep = eigenvalues > max(tol_rank * lam1, 0.0)
        rank = int(np.sum(keep))
    else:
        rank = 0
    n_kept = min(int(n_modes), rank)
    note = None
    if n_modes > rank:
        note = f"requested {n_modes} modes but the eigenvalue floor keeps {rank}"

    sigma = np.sqrt(eigenvalues[:n_kept])
    if n_kept:
        modes = (sc @ eigenvectors[:, :n_kept]) / (sigma * math.sqrt(ns))
        dev = np.abs(modes.T @ modes - np.eye(n_kept)).max()
        if dev > 1e-11:
            modes = _gram_schmidt(modes)
        _canonicalize_signs(modes)
    else:
        modes = np.zeros((n, 0))

    if mean_field is None:
        mean_field = np.zeros(n)
    return ReducedBasis(
        mean_field=np.asarray(mean_field, dtype=float),
        modes=modes,
        singular_values=sigma,
        energy_spectrum=np.asarray(eigenvalues, dtype=float).copy(),
        truncation_note=note,
    )


def _gram_schmidt(q: np.ndarray) -> np.ndarray:
    q = q.copy()
    for j in range(q.shape[1]):
        for _ in range(2):  # twice is enough
            if j:
                q[:, j] -= q[:, :j] @ (q[:, :j].T @ q[:, j])
        norm = np.linalg.norm(q[:, j])
        if norm == 0.0:
            raise NumericalError("mode collapsed to zero during orthonormalization")
        q[:, j] /= norm
    return q


def pod_basis(s: np.ndarray, n_modes: int, tol_rank: float = 1e-12) -> ReducedBasis:
    """center + gram + eigendecompose + compute_basis in one call."""
    mean, sc = center(s)
    vals, vecs = eigendecompose_spsd(gram(sc))
    return compute_basis(sc, vals, vecs, n_modes, tol_rank, mean_field=mean)


def project(basis: ReducedBasis, snapshot: np.ndarray) -> ReducedCoefficients:
    """Orthogonal projection onto the basis; coefficients come back both raw
    and standardized (divided by the singular values)."""
    snapshot = np.asarray(snapshot, dtype=float)
    if snapshot.shape != (basis.n_dof,):
        raise ValueError(
            f"snapshot length {snapshot.shape} does not match basis dof {basis.n_dof}"
        )
    raw = basis.modes.T @ (snapshot - basis.mean_field)
    standardized = raw / basis.singular_values
    # re-multiply so standardized * sigma reproduces raw bit-exactly
    return ReducedCoefficients(raw=standardized * basis.singular_values, standardized=standardized)


def project_columns(basis: ReducedBasis, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batch projection: returns (raw, standardized), each (L, Ns)."""
    s = np.asarray(s, dtype=float)
    raw = basis.modes.T @ (s - basis.mean_field[:, None])
    standardized = raw / basis.singular_values[:, None]
    return standardized * basis.singular_values[:, None], standardized


def reconstruct(basis: ReducedBasis, coeffs) -> np.ndarray:
    """mean + modes @ raw for ReducedCoefficients or a raw coefficient vector."""
    raw = coeffs.raw if isinstance(coeffs, ReducedCoefficients) else np.asarray(coeffs, dtype=float)
    if raw.shape != (basis.n_modes,):
        raise ValueError(
            f"coefficient length {raw.shape} does not match mode count {basis.n_modes}"
        )
    return basis.mean_field + basis.modes @ raw


def projection_error_spectrum(basis: ReducedBasis, s: np.ndarray) -> np.ndarray:
    """Aggregate relative L2 projection error of the columns of s for
    L = 1..n_modes, measured against the centered snapshot energy:

        err(L) = ||Sc - P_L Sc||_F / ||Sc||_F

    so err(L)^2 equals the eigenvalue tail fraction when s is the training
    set.  Computed by explicit rank-1 downdates (not the eigenvalue
    shortcut) to stay accurate near machine precision.
    """
    s = np.asarray(s, dtype=float)
    sc = s - basis.mean_field[:, None]
    e_tot = float((sc * sc).sum())
    n_modes = basis.n_modes
    if e_tot == 0.0 or n_modes == 0:
        return np.zeros(n_modes)
    coeff = basis.modes.T @ sc
    resid = sc.copy()
    errs = np.empty(n_modes)
    for l in range(n_modes):
        resid -= np.outer(basis.modes[:, l], coeff[l])
        errs[l] = math.sqrt(max(float((resid * resid).sum()), 0.0) / e_tot)
    return errs
