"""The dissipative generator: action, vectorized matrix, spectrum, kernel.

The generator of the dynamics is

    L(rho) = -i [H, rho] + sum_m ( L_m rho L_m† - (1/2) {L_m† L_m, rho} )

and the vectorized form uses the column-stacking convention throughout:
vec stacks columns (Fortran order), so vec(A rho B) = (B^T kron A) vec(rho).
Mixing this up is the classic silent transpose bug, hence the explicit
helpers below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modelspec import ModelSpec
from .opalg import Operator

DEFAULT_MAX_DIM = 2**8


class NumericalFailure(RuntimeError):
    """A linear-algebra step produced an unusable result."""


def vec(mat: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(mat).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def apply_matrices(ham: np.ndarray, jumps, rho: np.ndarray) -> np.ndarray:
    """Generator action from raw matrices; the workhorse behind apply()."""
    out = -1j * (ham @ rho - rho @ ham)
    for jump in jumps:
        jdag = jump.conj().T
        jdj = jdag @ jump
        out += jump @ rho @ jdag - 0.5 * (jdj @ rho + rho @ jdj)
    return out


def apply(spec: ModelSpec, rho: Operator) -> Operator:
    """Apply the generator to a density-like operator."""
    if rho.dim != spec.dim:
        raise ValueError(f"rho has dim {rho.dim}, model has dim {spec.dim}")
    ham, jumps = spec.operators()
    return Operator(apply_matrices(ham.mat, [j.mat for j in jumps], rho.mat))


@dataclass
class LiouvillianMatrix:
    """The d² x d² matrix of the generator, column-stacking convention."""

    d: int
    matrix: np.ndarray


def assemble_matrices(ham: np.ndarray, jumps) -> LiouvillianMatrix:
    d = ham.shape[0]
    eye = np.eye(d, dtype=complex)
    mat = -1j * (np.kron(eye, ham) - np.kron(ham.T, eye))
    for jump in jumps:
        jdj = jump.conj().T @ jump
        mat += np.kron(jump.conj(), jump)
        mat -= 0.5 * np.kron(eye, jdj)
        mat -= 0.5 * np.kron(jdj.T, eye)
    return LiouvillianMatrix(d=d, matrix=mat)


def assemble(spec: ModelSpec, max_dim: int = DEFAULT_MAX_DIM) -> LiouvillianMatrix:
    """Vectorize the generator; guarded by a memory budget on d."""
    d = spec.dim
    if d > max_dim:
        raise ValueError(
            f"model dimension {d} exceeds the budget {max_dim}; "
            f"the vectorized matrix would be {d * d} x {d * d}"
        )
    ham, jumps = spec.operators()
    return assemble_matrices(ham.mat, [j.mat for j in jumps])


def spectrum(lm: LiouvillianMatrix) -> np.ndarray:
    """All eigenvalues, sorted by descending real part then imaginary part.

    The generator is non-normal, so these are reported for inspection only;
    kernel dimensions always come from the SVD-based kernel() below.
    """
    try:
        vals = np.linalg.eigvals(lm.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((vals.imag, -vals.real))
    return vals[order]


def kernel(lm: LiouvillianMatrix, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the numerical null space, as columns.

    Columns are right singular vectors whose singular value falls below
    tol * sigma_max. SVD rather than eigendecomposition: the zero eigenvalue
    of a non-normal matrix can sit in a defective block, where eigenvector
    counts mislead but the rank decision does not.
    """
    vecs, _ = kernel_and_values(lm, tol)
    return vecs


def kernel_and_values(lm: LiouvillianMatrix, tol: float = 1e-9):
    """Like kernel(), but also returns the full singular-value list.

    The values let callers report how decisively the rank decision was
    made (gap between the largest in-kernel and smallest out-of-kernel
    singular value).
    """
    try:
        _, svals, vh = np.linalg.svd(lm.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    smax = float(svals[0]) if svals.size else 0.0
    if smax == 0.0:
        # the zero generator: everything is steady
        return np.eye(lm.matrix.shape[1], dtype=complex), svals
    mask = svals < tol * smax
    vecs = vh[mask].conj().T
    if vecs.shape[1] == 0:
        raise NumericalFailure(
            "no kernel vector found, but a steady state always exists; "
            f"smallest singular value {svals[-1]:.3e} vs cutoff {tol * smax:.3e}"
        )
    return vecs, svals
