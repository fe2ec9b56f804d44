"""Dense complex linear algebra on small matrices: modulus-ordered eigen
decompositions, attracting flags, and symmetric-space translation length.

Eigenvalues are ordered by non-increasing modulus throughout (lambda^1 is
largest), with modulus ties broken by ascending argument.  Residuals and
invariance checks are taken relative to the scale of the input matrix: the
matrix is normalized by its largest entry before factorization, so the
reported residuals are those of the normalized problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

GAP_TOL = 1e-8


class ConvergenceFailure(RuntimeError):
    """Eigen decomposition failed or its internal cross-check disagreed."""


class InsufficientGap(RuntimeError):
    """Required modulus gap at index k is below tolerance."""

    def __init__(self, k: int, message: str | None = None):
        self.k = k
        super().__init__(message or f"insufficient modulus gap at k={k}")


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues sorted by non-increasing modulus with unit eigenvectors.

    residuals are ||A v - lambda v|| for the modulus-normalized matrix.
    tie_warning is set when consecutive moduli differ by less than gap_tol
    (relative); ties lists the offending gap indices k (1-based).
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    tie_warning: bool
    ties: tuple[int, ...]


def _sort_by_modulus(values: np.ndarray) -> np.ndarray:
    # descending modulus; ties by ascending argument (deterministic)
    return np.lexsort((np.angle(values), -np.abs(values)))


def _charpoly_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Characteristic-polynomial route (Faddeev-LeVerrier + roots), d <= 4."""
    d = A.shape[0]
    coeffs = np.zeros(d + 1, dtype=complex)
    coeffs[0] = 1.0
    M = np.zeros_like(A)
    eye = np.eye(d, dtype=complex)
    for k in range(1, d + 1):
        M = A @ M + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(A @ M) / k
    return np.roots(coeffs)


def eigen_by_modulus(A: np.ndarray, gap_tol: float = GAP_TOL) -> EigenData:
    """Eigen decomposition sorted largest-modulus first.

    For d <= 4 the LAPACK values are cross-checked against an independent
    characteristic-polynomial computation; disagreement raises
    ConvergenceFailure.
    """
    A = np.asarray(A)
    d = A.shape[0]
    scale = float(np.abs(A).max())
    if scale == 0.0:
        raise ConvergenceFailure("zero matrix")
    S = A / scale
    try:
        vals, vecs = np.linalg.eig(S)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = _sort_by_modulus(vals)
    vals, vecs = vals[order], vecs[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    residuals = np.linalg.norm(S @ vecs - vecs * vals[None, :], axis=0)

    if d <= 4:
        # repeated roots limit the polynomial route to ~eps^(1/m) accuracy,
        # so this only guards against gross disagreement
        ref = _charpoly_eigenvalues(S)
        ref = ref[_sort_by_modulus(ref)]
        if np.abs(ref - vals).max() > 5e-3:
            raise ConvergenceFailure("charpoly and QR eigenvalue paths disagree")

    mods = np.abs(vals)
    ties = tuple(
        k + 1
        for k in range(d - 1)
        if mods[k] - mods[k + 1] < gap_tol * max(mods[k], 1e-300)
    )
    return EigenData(
        values=vals * scale,
        vectors=vecs,
        residuals=residuals,
        tie_warning=bool(ties),
        ties=ties,
    )


def eigenvalues_paired(A: np.ndarray, A_inv: np.ndarray) -> np.ndarray:
    """Modulus-sorted eigenvalues using A for the top half and A^-1 for the
    bottom half.

    When A is a long word product its small eigenvalues carry absolute error
    at the scale eps*||A||; the reversed reciprocals of the eigenvalues of an
    independently accumulated inverse product recover them at full relative
    accuracy.
    """
    d = A.shape[0]
    fwd = eigen_by_modulus(A).values
    bwd = eigen_by_modulus(A_inv).values
    half = d // 2
    vals = fwd.copy()
    # bottom entries from the inverse run: lambda_i = 1 / mu_{d-1-i}
    for i in range(d - half, d):
        vals[i] = 1.0 / bwd[d - 1 - i]
    return vals


def _gap_check(values: np.ndarray, ks, gap_tol: float) -> None:
    mods = np.abs(values)
    for k in ks:
        if not (mods[k - 1] - mods[k] > gap_tol * max(mods[k - 1], 1e-300)):
            raise InsufficientGap(k)


def _nest_bases(bases: dict[int, np.ndarray], d: int) -> list[np.ndarray]:
    """Force exact nesting across increasing dims: extend each space by the
    dominant new directions of the next one (SVD of its complement part)."""
    nested = []
    prev = np.zeros((d, 0), dtype=complex)
    for k in sorted(bases):
        B = bases[k].astype(complex)
        if prev.shape[1]:
            D = B - prev @ (prev.conj().T @ B)
        else:
            D = B
        U, _, _ = np.linalg.svd(D, full_matrices=False)
        add = U[:, : k - prev.shape[1]]
        prev = np.concatenate([prev, add], axis=1)
        # one re-orthonormalization pass for cleanliness
        prev, _ = np.linalg.qr(prev)
        nested.append(prev)
    return nested


@dataclass(frozen=True)
class Flag:
    """Nested orthonormal bases for the listed subspace dimensions."""

    dims: tuple[int, ...]
    bases: tuple[np.ndarray, ...]

    def basis(self, k: int) -> np.ndarray:
        return self.bases[self.dims.index(k)]


def attracting_flag(
    A: np.ndarray,
    ks,
    gap_tol: float = GAP_TOL,
    A_inv: np.ndarray | None = None,
) -> Flag:
    """Nested spans of the top-k eigenvectors for each k in ks.

    Spaces with k <= d/2 come from the eigenvectors of A; larger k are built
    as orthocomplements of the small attracting spaces of (A^-1)^T, which
    stay well conditioned when A is a long word product.  Pass the exactly
    accumulated inverse as A_inv when available.
    """
    A = np.asarray(A).astype(complex)
    d = A.shape[0]
    ks = tuple(sorted(set(int(k) for k in ks)))
    if not ks or ks[0] < 1 or ks[-1] > d - 1:
        raise ValueError(f"flag dims must lie in 1..{d - 1}")
    if A_inv is None:
        A_inv = np.linalg.inv(A)

    vals = eigenvalues_paired(A, A_inv)
    _gap_check(vals, ks, gap_tol)

    fwd = eigen_by_modulus(A)
    bwd_t = eigen_by_modulus(A_inv.T)

    bases: dict[int, np.ndarray] = {}
    for k in ks:
        if k <= d // 2:
            Q, _ = np.linalg.qr(fwd.vectors[:, :k])
            bases[k] = Q[:, :k]
        else:
            # top-(d-k) eigenvectors u of (A^-1)^T are left eigenvectors of A
            # for its smallest eigenvalues; the attracting k-plane is the
            # orthocomplement of their conjugates
            U = bwd_t.vectors[:, : d - k]
            Q, _ = np.linalg.qr(np.conj(U))
            full, _ = np.linalg.qr(np.concatenate([Q[:, : d - k], np.eye(d, dtype=complex)], axis=1))
            bases[k] = full[:, d - k :][:, :k]
    nested = _nest_bases(bases, d)
    return Flag(dims=ks, bases=tuple(nested))


def symmetric_space_length(A: np.ndarray) -> float:
    """Riemannian translation length sqrt(sum_i log^2 |lambda^i|)."""
    vals = eigen_by_modulus(np.asarray(A)).values
    logs = np.log(np.abs(vals))
    return float(np.sqrt((logs * logs).sum()))


def intersect_subspaces(*bases: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the intersection of the given column spans.

    Nullspace of stacked complement projectors; singular values below
    rel_tol times the largest are treated as zero.
    """
    d = bases[0].shape[0]
    rows = []
    for B in bases:
        rows.append(np.eye(d, dtype=complex) - B @ B.conj().T)
    stacked = np.concatenate(rows, axis=0)
    _, s, vh = np.linalg.svd(stacked)
    cutoff = rel_tol * (s[0] if s[0] > 0 else 1.0)
    null_mask = s < cutoff
    ns = vh[len(s) - null_mask.sum() :].conj().T if null_mask.any() else np.zeros((d, 0), complex)
    # svd of a tall matrix returns d singular values; nullspace rows are last
    return ns


def principal_angles(B1: np.ndarray, B2: np.ndarray) -> np.ndarray:
    return scipy.linalg.subspace_angles(B1, B2)


def as_sl_lift(A: np.ndarray) -> np.ndarray:
    """Rescale to determinant 1 using the principal d-th root."""
    A = np.asarray(A).astype(complex)
    d = A.shape[0]
    det = np.linalg.det(A)
    if abs(det) < 1e-300:
        raise ValueError("singular matrix cannot be lifted to SL")
    return A / det ** (1.0 / d)
