"""Dense complex-matrix primitives shared by the probability layers.

Matrices are numpy complex128 arrays throughout. Composite systems are
flattened row-major: basis index (i, k) of a system with dimension list
(n, m) sits at flat position i * m + k, which is exactly numpy's kron /
reshape convention, so no permutations are needed anywhere.

The numerical tolerances live here as module constants so that every
caller agrees on what "Hermitian", "PSD", or "invertible" means.
"""

from __future__ import annotations

import string

import numpy as np

from .errors import DimensionError, NotPositiveError, SingularMarginalError

HERMITIAN_TOL = 1e-9
# Eigenvalues in [-EIG_CLIP, 0) are rounding noise and get clipped to 0;
# anything below -EIG_CLIP is a genuine positivity violation.
EIG_CLIP = 1e-10
# Inverse square roots are refused when the smallest eigenvalue is not
# safely above INV_CUTOFF times the largest.
INV_CUTOFF = 1e-8


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    mat = np.asarray(a, dtype=np.complex128)
    if mat.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat.real)) or not np.all(np.isfinite(mat.imag)):
        raise ValueError("matrix entries must be finite")
    return mat


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a^dag b)."""
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.trace(a.conj().T @ b))


def fro_norm(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def op_norm(a: np.ndarray) -> float:
    """Operator norm (largest singular value)."""
    return float(np.linalg.norm(a, 2))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, row-major composite indexing."""
    return np.kron(a, b)


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return a.shape[0] == a.shape[1] and bool(
        np.max(np.abs(a - a.conj().T)) <= tol
    )


def _eigh_checked(a: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    if not is_hermitian(a):
        raise NotPositiveError(f"{what}: matrix is not Hermitian")
    # symmetrize before eigh so the decomposition reproduces the input
    # to working precision even when it carries ~1e-10 asymmetry noise
    return np.linalg.eigh((a + a.conj().T) / 2)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Positive square root of a PSD matrix via eigendecomposition."""
    w, v = _eigh_checked(a, "psd_sqrt")
    if w.min() < -EIG_CLIP:
        raise NotPositiveError(f"psd_sqrt: eigenvalue {w.min():.3e} below -{EIG_CLIP}")
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2


def psd_inv_sqrt(a: np.ndarray) -> np.ndarray:
    """Inverse positive square root of a strictly positive matrix."""
    w, v = _eigh_checked(a, "psd_inv_sqrt")
    if w.max() <= 0 or w.min() <= INV_CUTOFF * w.max():
        raise SingularMarginalError(
            f"psd_inv_sqrt: eigenvalues span [{w.min():.3e}, {w.max():.3e}], "
            "matrix is singular to working precision"
        )
    root = (v / np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2


def check_dims(dims, flat: int | None = None) -> tuple[int, ...]:
    """Validate a dimension list; entries >= 1, product matches flat."""
    out = tuple(int(d) for d in dims)
    if not out or any(d < 1 for d in out):
        raise DimensionError(f"bad dimension list {dims}")
    if flat is not None and int(np.prod(out)) != flat:
        raise DimensionError(f"dimension list {out} does not flatten to {flat}")
    return out


def partial_trace(a: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out the components of `dims` whose `keep` bit is 0.

    An all-ones mask returns the matrix unchanged, an all-zeros mask the
    1x1 matrix [[tr a]]. The total trace is preserved for every mask.
    """
    mat = as_matrix(a)
    dims = check_dims(dims, mat.shape[0])
    if mat.shape[0] != mat.shape[1]:
        raise DimensionError("partial_trace needs a square matrix")
    bits = [int(b) for b in keep]
    if len(bits) != len(dims) or any(b not in (0, 1) for b in bits):
        raise DimensionError(f"mask {keep} does not match dimension list {dims}")
    k = len(dims)
    if 2 * k > len(string.ascii_lowercase):
        raise DimensionError("too many components")
    row = list(string.ascii_lowercase[:k])
    col = [string.ascii_lowercase[k + i] if bits[i] else row[i] for i in range(k)]
    out = [row[i] for i in range(k) if bits[i]] + [col[i] for i in range(k) if bits[i]]
    sub = "".join(row) + "".join(col) + "->" + "".join(out)
    reduced = np.einsum(sub, mat.reshape(dims + dims))
    side = int(np.prod([d for d, b in zip(dims, bits) if b], initial=1))
    return np.ascontiguousarray(reduced.reshape(side, side))


def matrix_to_json(a: np.ndarray) -> dict:
    """Serialize as {"rows", "cols", "re", "im"} with row-major nesting."""
    mat = as_matrix(a)
    return {
        "rows": int(mat.shape[0]),
        "cols": int(mat.shape[1]),
        "re": mat.real.tolist(),
        "im": mat.imag.tolist(),
    }


def matrix_from_json(d: dict) -> np.ndarray:
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d["im"], dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise DimensionError("re/im parts must be matching 2-d arrays")
    if re.shape != (int(d["rows"]), int(d["cols"])):
        raise DimensionError("declared rows/cols do not match the entries")
    return as_matrix(re + 1j * im)
